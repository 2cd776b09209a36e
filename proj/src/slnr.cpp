#include "secbeam/slnr.hpp"

#include <cmath>

#include <Eigen/Cholesky>

namespace secbeam {

BeamformerSet slnr_beamformers(const ChannelSet& cs, double power_budget) {
  cs.validate();
  if (!(power_budget > 0.0)) throw Error(ErrorCode::kInvalidArgument, "P must be positive");
  const int K = cs.k_pairs;
  const int n = cs.n_tx;
  BeamformerSet bf;
  bf.power_budget = power_budget;
  const double per_user = std::sqrt(power_budget / K);
  for (int i = 0; i < K; ++i) {
    CMatrix A = cs.sigma2[i] * CMatrix::Identity(n, n);
    for (int k = 0; k < K; ++k) {
      if (k == i) continue;
      const CVector hc = cs.h_est[k].conjugate();
      A += hc * hc.adjoint();
    }
    CVector dir = A.llt().solve(cs.h_est[i].conjugate());
    const double nd = dir.norm();
    bf.w.push_back(nd > 0.0 ? CVector(dir * (per_user / nd)) : CVector::Zero(n));
  }
  return bf;
}

}  // namespace secbeam
