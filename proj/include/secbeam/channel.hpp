#pragma once

#include <vector>

#include "secbeam/common.hpp"
#include "secbeam/rng.hpp"

namespace secbeam {

/// Estimated downlink channels for K user-eavesdropper pairs plus the shared
/// norm bound on the estimation error. Channel vectors are stored as
/// received-signal rows: user i sees h_est[i]^T w.
struct ChannelSet {
  int n_tx = 0;
  int k_pairs = 0;
  std::vector<CVector> h_est;
  std::vector<CVector> g_est;
  double eps = 0.0;
  std::vector<double> sigma2;
  std::vector<double> varsigma2;

  /// Throws Error(kInvalidDimension / kInvalidArgument) on a broken invariant.
  void validate() const;

  /// Builds a set from explicit vectors, validating it.
  static ChannelSet from_vectors(std::vector<CVector> h, std::vector<CVector> g,
                                 double eps, std::vector<double> sigma2,
                                 std::vector<double> varsigma2);

  /// Copy restricted to the listed pairs, in the given order.
  ChannelSet subset(const std::vector<int>& pairs) const;
};

/// A ground-truth channel draw inside the uncertainty balls of a ChannelSet.
struct TrueChannelInstance {
  std::vector<CVector> h_true;
  std::vector<CVector> g_true;
  std::vector<CVector> dh;
  std::vector<CVector> dg;

  /// The true channels packaged as an error-free ChannelSet.
  ChannelSet as_channel_set(const ChannelSet& estimate) const;
};

/// Draws i.i.d. CN(0,1) estimated channels.
ChannelSet sample_channel_set(int n_tx, int k_pairs, double eps,
                              const std::vector<double>& sigma2,
                              const std::vector<double>& varsigma2,
                              RngStream& rng);

/// Same, with one noise variance for every user and eavesdropper.
ChannelSet sample_channel_set(int n_tx, int k_pairs, double eps, double noise_var,
                              RngStream& rng);

/// Uniform draw from the closed complex ball {x in C^n : |x| <= radius}.
CVector sample_ball(Eigen::Index n, double radius, RngStream& rng);

TrueChannelInstance sample_true_instance(const ChannelSet& cs, RngStream& rng);

enum class Sense { kMax, kMin };

struct ExtremePoint {
  CVector x;
  double value = 0.0;
};

/// Extremizer of Re(x^H y) over |x| <= eps.
ExtremePoint lemma1_extreme(const CVector& y, double eps, Sense sense);

}  // namespace secbeam
