#pragma once

#include <vector>

#include "secbeam/channel.hpp"
#include "secbeam/common.hpp"

namespace secbeam {

/// K transmit beamformers sharing a sum-power budget.
struct BeamformerSet {
  std::vector<CVector> w;
  double power_budget = 0.0;

  double total_power() const;
  /// Throws kInvalidArgument if the budget is exceeded beyond 1e-9 relative.
  void validate() const;
};

/// K Hermitian PSD transmit covariances (the relaxed W_i = w_i w_i^H).
struct CovarianceSet {
  std::vector<CMatrix> W;

  static CovarianceSet from_beamformers(const BeamformerSet& bf);
  double total_trace() const;
  /// Hermitian to 1e-10, min eigenvalue >= -1e-8, total trace <= P + 1e-8.
  void validate(double power_budget) const;
};

/// |h^T w|^2, the received power of beam w on channel row h.
double received_power(const CVector& h, const CVector& w);

/// log2(1 + |ch_i^T w_i|^2 / (sum_{k!=i} |ch_i^T w_k|^2 + noise)).
double link_rate(const CVector& ch, const std::vector<CVector>& w, int i, double noise);

double user_rate_exact(const ChannelSet& ch, const BeamformerSet& bf, int i);
double eaves_rate_exact(const ChannelSet& ch, const BeamformerSet& bf, int i);
double user_rate_exact(const TrueChannelInstance& ch, const ChannelSet& noise,
                       const BeamformerSet& bf, int i);
double eaves_rate_exact(const TrueChannelInstance& ch, const ChannelSet& noise,
                        const BeamformerSet& bf, int i);

/// Signed sum secrecy rate sum_i (r_i - s_i) in bits on the set's channels.
double ssr_exact(const ChannelSet& ch, const BeamformerSet& bf);
/// Same, on the true channels with the noise variances of `noise`.
double ssr_exact(const TrueChannelInstance& ch, const ChannelSet& noise,
                 const BeamformerSet& bf);

struct QuadBounds {
  double lb = 0.0;
  double ub = 0.0;
  double center = 0.0;  // hbar^T W hbar^*
  double norm = 0.0;    // |W hbar^*|
};

/// First-order worst-case bounds of h^T W h^* over |h - hbar| <= eps.
QuadBounds quad_bounds(const CVector& hbar, const CMatrix& W, double eps);

struct LowerBoundSsr {
  double bits = 0.0;
  /// An own-signal lower bound of an active user went negative, or a log
  /// argument hit the 1e-12 floor.
  bool degenerate = false;
  /// Number of negative lower-bound terms replaced by zero.
  int clamped_terms = 0;
};

/// Robust lower-bound sum secrecy rate of a covariance set.
LowerBoundSsr ssr_lower_bound(const ChannelSet& cs, const CovarianceSet& cov);
LowerBoundSsr ssr_lower_bound(const ChannelSet& cs, const BeamformerSet& bf);

}  // namespace secbeam
