#pragma once

#include <cstdint>

#include "secbeam/common.hpp"

namespace secbeam {

/// Counter-based random stream keyed by (seed, substream).
///
/// Draw n of stream (seed, id) is a pure function of (seed, id, n), so
/// Monte Carlo trials keyed by trial index produce the same numbers no
/// matter in which order (or on which thread) they run. Normal variates use
/// Box-Muller on top of the integer stream rather than
/// std::normal_distribution, whose algorithm is implementation-defined.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t substream);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t substream() const noexcept { return substream_; }
  std::uint64_t counter() const noexcept { return counter_; }

  /// Child stream with an independent key; does not advance this stream.
  RngStream derive(std::uint64_t child_id) const;

  std::uint64_t next_u64();
  /// Uniform on [0, 1).
  double uniform();
  double normal();
  /// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
  Complex complex_normal(double variance = 1.0);
  CVector complex_normal_vector(Eigen::Index n, double variance = 1.0);

 private:
  std::uint64_t seed_;
  std::uint64_t substream_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace secbeam
