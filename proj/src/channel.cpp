#include "secbeam/channel.hpp"

#include <cmath>
#include <string>

namespace secbeam {

void ChannelSet::validate() const {
  if (k_pairs < 1 || n_tx < k_pairs) {
    throw Error(ErrorCode::kInvalidDimension,
                "need n_tx >= k_pairs >= 1, got n_tx=" + std::to_string(n_tx) +
                    " k_pairs=" + std::to_string(k_pairs));
  }
  const auto k = static_cast<std::size_t>(k_pairs);
  if (h_est.size() != k || g_est.size() != k || sigma2.size() != k ||
      varsigma2.size() != k) {
    throw Error(ErrorCode::kInvalidDimension, "per-pair arrays must have k_pairs entries");
  }
  for (std::size_t i = 0; i < k; ++i) {
    if (h_est[i].size() != n_tx || g_est[i].size() != n_tx) {
      throw Error(ErrorCode::kInvalidDimension, "channel vector length must equal n_tx");
    }
    if (!(sigma2[i] > 0.0) || !(varsigma2[i] > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "noise variances must be positive");
    }
  }
  if (!(eps >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "eps must be nonnegative");
}

ChannelSet ChannelSet::from_vectors(std::vector<CVector> h, std::vector<CVector> g,
                                    double eps, std::vector<double> sigma2,
                                    std::vector<double> varsigma2) {
  ChannelSet cs;
  cs.k_pairs = static_cast<int>(h.size());
  cs.n_tx = h.empty() ? 0 : static_cast<int>(h.front().size());
  cs.h_est = std::move(h);
  cs.g_est = std::move(g);
  cs.eps = eps;
  cs.sigma2 = std::move(sigma2);
  cs.varsigma2 = std::move(varsigma2);
  cs.validate();
  return cs;
}

ChannelSet ChannelSet::subset(const std::vector<int>& pairs) const {
  ChannelSet out;
  out.n_tx = n_tx;
  out.k_pairs = static_cast<int>(pairs.size());
  out.eps = eps;
  for (int p : pairs) {
    out.h_est.push_back(h_est.at(p));
    out.g_est.push_back(g_est.at(p));
    out.sigma2.push_back(sigma2.at(p));
    out.varsigma2.push_back(varsigma2.at(p));
  }
  return out;
}

ChannelSet TrueChannelInstance::as_channel_set(const ChannelSet& estimate) const {
  ChannelSet cs = estimate;
  cs.h_est = h_true;
  cs.g_est = g_true;
  cs.eps = 0.0;
  return cs;
}

ChannelSet sample_channel_set(int n_tx, int k_pairs, double eps,
                              const std::vector<double>& sigma2,
                              const std::vector<double>& varsigma2, RngStream& rng) {
  if (k_pairs < 1 || n_tx < k_pairs) {
    throw Error(ErrorCode::kInvalidDimension,
                "need n_tx >= k_pairs >= 1, got n_tx=" + std::to_string(n_tx) +
                    " k_pairs=" + std::to_string(k_pairs));
  }
  ChannelSet cs;
  cs.n_tx = n_tx;
  cs.k_pairs = k_pairs;
  cs.eps = eps;
  cs.sigma2 = sigma2;
  cs.varsigma2 = varsigma2;
  for (int i = 0; i < k_pairs; ++i) {
    cs.h_est.push_back(rng.complex_normal_vector(n_tx));
    cs.g_est.push_back(rng.complex_normal_vector(n_tx));
  }
  cs.validate();
  return cs;
}

ChannelSet sample_channel_set(int n_tx, int k_pairs, double eps, double noise_var,
                              RngStream& rng) {
  const auto k = static_cast<std::size_t>(k_pairs < 0 ? 0 : k_pairs);
  return sample_channel_set(n_tx, k_pairs, eps, std::vector<double>(k, noise_var),
                            std::vector<double>(k, noise_var), rng);
}

CVector sample_ball(Eigen::Index n, double radius, RngStream& rng) {
  if (radius <= 0.0) return CVector::Zero(n);
  // Direction uniform on the unit sphere of R^{2n}, radius with CDF r^{2n}.
  CVector dir = rng.complex_normal_vector(n);
  double norm = dir.norm();
  while (norm == 0.0) {
    dir = rng.complex_normal_vector(n);
    norm = dir.norm();
  }
  const double u = rng.uniform();
  const double r = radius * std::pow(u, 1.0 / (2.0 * static_cast<double>(n)));
  return dir * (r / norm);
}

TrueChannelInstance sample_true_instance(const ChannelSet& cs, RngStream& rng) {
  TrueChannelInstance inst;
  for (int i = 0; i < cs.k_pairs; ++i) {
    inst.dh.push_back(sample_ball(cs.n_tx, cs.eps, rng));
    inst.dg.push_back(sample_ball(cs.n_tx, cs.eps, rng));
    inst.h_true.push_back(cs.h_est[i] + inst.dh.back());
    inst.g_true.push_back(cs.g_est[i] + inst.dg.back());
  }
  return inst;
}

ExtremePoint lemma1_extreme(const CVector& y, double eps, Sense sense) {
  if (eps < 0.0) throw Error(ErrorCode::kInvalidArgument, "eps must be nonnegative");
  const double ny = y.norm();
  if (ny == 0.0 || eps == 0.0) return {CVector::Zero(y.size()), 0.0};
  const double sign = sense == Sense::kMax ? 1.0 : -1.0;
  return {y * (sign * eps / ny), sign * eps * ny};
}

}  // namespace secbeam
