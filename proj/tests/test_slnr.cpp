#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "secbeam/slnr.hpp"

using namespace secbeam;

namespace {

// |<a, b>| / (|a| |b|): 1 when the directions agree up to a phase.
double alignment(const CVector& a, const CVector& b) {
  return std::abs(a.dot(b)) / (a.norm() * b.norm());
}

}  // namespace

TEST_CASE("single pair reduces to maximum ratio transmission") {
  RngStream rng(1, 0);
  for (int n = 0; n < 20; ++n) {
    const ChannelSet cs = sample_channel_set(2 + n % 6, 1, 0.1, 1.0, rng);
    const BeamformerSet bf = slnr_beamformers(cs, 4.0);
    const CVector mrt = cs.h_est[0].conjugate() / cs.h_est[0].norm();
    CHECK((bf.w[0] / bf.w[0].norm() - mrt).norm() < 1e-12);
  }
}

TEST_CASE("orthogonal users need no leakage shaping") {
  RngStream rng(2, 0);
  const CVector a = rng.complex_normal_vector(4);
  CVector b = rng.complex_normal_vector(4);
  b -= a * (a.dot(b) / a.squaredNorm());
  REQUIRE(std::abs(a.dot(b)) < 1e-12);
  const ChannelSet cs = ChannelSet::from_vectors({a, b}, {b, a}, 0.0, {1.0, 1.0}, {1.0, 1.0});
  const BeamformerSet bf = slnr_beamformers(cs, 2.0);
  CHECK(alignment(bf.w[0], a.conjugate()) > 1.0 - 1e-12);
  CHECK(alignment(bf.w[1], b.conjugate()) > 1.0 - 1e-12);
}

TEST_CASE("direction ignores the scale of the own channel") {
  RngStream rng(3, 0);
  ChannelSet cs = sample_channel_set(4, 3, 0.1, 1.0, rng);
  const BeamformerSet a = slnr_beamformers(cs, 3.0);
  cs.h_est[1] *= 7.5;
  const BeamformerSet b = slnr_beamformers(cs, 3.0);
  CHECK((a.w[1] - b.w[1]).norm() < 1e-12);
}

TEST_CASE("budget is split evenly and used fully") {
  RngStream rng(4, 0);
  for (int n = 0; n < 50; ++n) {
    const int k = 1 + n % 4;
    const ChannelSet cs = sample_channel_set(4, k, 0.1, 1.0, rng);
    const double P = 0.5 + 20.0 * rng.uniform();
    const BeamformerSet bf = slnr_beamformers(cs, P);
    CHECK(std::abs(bf.total_power() - P) < 1e-9);
    for (const auto& w : bf.w) CHECK(std::abs(w.squaredNorm() - P / k) < 1e-9);
  }
}

TEST_CASE("closed form equals the dominant generalized eigenvector") {
  RngStream rng(5, 0);
  for (int n = 0; n < 50; ++n) {
    const int k = 2 + n % 3;
    const ChannelSet cs = sample_channel_set(4, k, 0.0, 0.3 + rng.uniform(), rng);
    const BeamformerSet bf = slnr_beamformers(cs, 1.0);
    for (int i = 0; i < k; ++i) {
      const CVector hc = cs.h_est[i].conjugate();
      const CMatrix sig = hc * hc.adjoint();
      CMatrix leak = cs.sigma2[i] * CMatrix::Identity(4, 4);
      for (int j = 0; j < k; ++j) {
        if (j != i) leak += cs.h_est[j].conjugate() * cs.h_est[j].transpose();
      }
      Eigen::GeneralizedSelfAdjointEigenSolver<CMatrix> es(sig, leak);
      const CVector top = es.eigenvectors().col(3);
      CHECK(alignment(bf.w[i], top) > 1.0 - 1e-9);
    }
  }
}
