#include "secbeam/rng.hpp"

#include <cmath>
#include <numbers>

namespace secbeam {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t substream)
    : seed_(seed),
      substream_(substream),
      key_(mix64(mix64(seed + kGolden) ^ (substream * 0xD1B54A32D192ED03ULL + 1))) {}

RngStream RngStream::derive(std::uint64_t child_id) const {
  return RngStream(key_, child_id);
}

std::uint64_t RngStream::next_u64() {
  ++counter_;
  return mix64(key_ + counter_ * kGolden);
}

double RngStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

Complex RngStream::complex_normal(double variance) {
  const double s = std::sqrt(variance / 2.0);
  const double re = normal();
  const double im = normal();
  return {s * re, s * im};
}

CVector RngStream::complex_normal_vector(Eigen::Index n, double variance) {
  CVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = complex_normal(variance);
  return v;
}

}  // namespace secbeam
