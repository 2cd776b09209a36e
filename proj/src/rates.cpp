#include "secbeam/rates.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace secbeam {
namespace {

constexpr double kLogArgFloor = 1e-12;

// Sum of |h^T w_k|^2 over k, optionally skipping index `skip`.
double interference(const CVector& h, const std::vector<CVector>& w, int skip) {
  double total = 0.0;
  for (int k = 0; k < static_cast<int>(w.size()); ++k) {
    if (k != skip) total += received_power(h, w[k]);
  }
  return total;
}

}  // namespace

double BeamformerSet::total_power() const {
  double p = 0.0;
  for (const auto& v : w) p += v.squaredNorm();
  return p;
}

void BeamformerSet::validate() const {
  if (!(power_budget > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "power budget must be positive");
  }
  if (total_power() > power_budget * (1.0 + 1e-9)) {
    throw Error(ErrorCode::kInvalidArgument, "beamformers exceed the power budget");
  }
}

CovarianceSet CovarianceSet::from_beamformers(const BeamformerSet& bf) {
  CovarianceSet cov;
  cov.W.reserve(bf.w.size());
  for (const auto& v : bf.w) cov.W.push_back(v * v.adjoint());
  return cov;
}

double CovarianceSet::total_trace() const {
  double t = 0.0;
  for (const auto& m : W) t += m.trace().real();
  return t;
}

void CovarianceSet::validate(double power_budget) const {
  for (const auto& m : W) {
    if (m.rows() != m.cols()) throw Error(ErrorCode::kInvalidDimension, "W must be square");
    if ((m - m.adjoint()).norm() > 1e-10) {
      throw Error(ErrorCode::kNotHermitian, "covariance is not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-8) {
      throw Error(ErrorCode::kInvalidArgument, "covariance is not PSD");
    }
  }
  if (total_trace() > power_budget + 1e-8) {
    throw Error(ErrorCode::kInvalidArgument, "covariances exceed the power budget");
  }
}

double received_power(const CVector& h, const CVector& w) {
  return std::norm(h.cwiseProduct(w).sum());
}

double link_rate(const CVector& ch, const std::vector<CVector>& w, int i, double noise) {
  const double signal = received_power(ch, w[i]);
  return std::log2(1.0 + signal / (interference(ch, w, i) + noise));
}

double user_rate_exact(const ChannelSet& ch, const BeamformerSet& bf, int i) {
  return link_rate(ch.h_est.at(i), bf.w, i, ch.sigma2.at(i));
}

double eaves_rate_exact(const ChannelSet& ch, const BeamformerSet& bf, int i) {
  return link_rate(ch.g_est.at(i), bf.w, i, ch.varsigma2.at(i));
}

double user_rate_exact(const TrueChannelInstance& ch, const ChannelSet& noise,
                       const BeamformerSet& bf, int i) {
  return link_rate(ch.h_true.at(i), bf.w, i, noise.sigma2.at(i));
}

double eaves_rate_exact(const TrueChannelInstance& ch, const ChannelSet& noise,
                        const BeamformerSet& bf, int i) {
  return link_rate(ch.g_true.at(i), bf.w, i, noise.varsigma2.at(i));
}

double ssr_exact(const ChannelSet& ch, const BeamformerSet& bf) {
  double total = 0.0;
  for (int i = 0; i < ch.k_pairs; ++i) {
    total += user_rate_exact(ch, bf, i) - eaves_rate_exact(ch, bf, i);
  }
  return total;
}

double ssr_exact(const TrueChannelInstance& ch, const ChannelSet& noise,
                 const BeamformerSet& bf) {
  double total = 0.0;
  for (int i = 0; i < noise.k_pairs; ++i) {
    total += user_rate_exact(ch, noise, bf, i) - eaves_rate_exact(ch, noise, bf, i);
  }
  return total;
}

QuadBounds quad_bounds(const CVector& hbar, const CMatrix& W, double eps) {
  const CVector a = hbar.conjugate();
  const CVector wa = W * a;
  QuadBounds b;
  b.center = a.dot(wa).real();
  b.norm = wa.norm();
  b.lb = b.center - 2.0 * eps * b.norm;
  b.ub = b.center + 2.0 * eps * b.norm;
  return b;
}

LowerBoundSsr ssr_lower_bound(const ChannelSet& cs, const CovarianceSet& cov) {
  const int k_pairs = cs.k_pairs;
  if (static_cast<int>(cov.W.size()) != k_pairs) {
    throw Error(ErrorCode::kInvalidDimension, "covariance count must equal k_pairs");
  }
  LowerBoundSsr out;
  auto clamp_lb = [&](double lb, bool own, const CMatrix& W) {
    if (lb >= 0.0) return lb;
    ++out.clamped_terms;
    if (own && W.trace().real() > 0.0) out.degenerate = true;
    return 0.0;
  };
  auto safe_log2 = [&](double arg) {
    if (!(arg >= kLogArgFloor)) {
      out.degenerate = true;
      arg = kLogArgFloor;
    }
    return std::log2(arg);
  };

  double total = 0.0;
  for (int i = 0; i < k_pairs; ++i) {
    double user_num = cs.sigma2[i];
    double user_den = cs.sigma2[i];
    double eav_num = cs.varsigma2[i];
    double eav_den = cs.varsigma2[i];
    for (int k = 0; k < k_pairs; ++k) {
      const QuadBounds hb = quad_bounds(cs.h_est[i], cov.W[k], cs.eps);
      const QuadBounds gb = quad_bounds(cs.g_est[i], cov.W[k], cs.eps);
      user_num += clamp_lb(hb.lb, k == i, cov.W[k]);
      eav_num += gb.ub;
      if (k != i) {
        user_den += hb.ub;
        eav_den += clamp_lb(gb.lb, false, cov.W[k]);
      }
    }
    total += safe_log2(user_num / user_den) - safe_log2(eav_num / eav_den);
  }
  out.bits = total;
  return out;
}

LowerBoundSsr ssr_lower_bound(const ChannelSet& cs, const BeamformerSet& bf) {
  return ssr_lower_bound(cs, CovarianceSet::from_beamformers(bf));
}

}  // namespace secbeam
