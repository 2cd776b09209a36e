#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "secbeam/rates.hpp"

using namespace secbeam;

namespace {

CVector vec2(Complex a, Complex b) {
  CVector v(2);
  v << a, b;
  return v;
}

BeamformerSet random_beams(int n, int k, double P, RngStream& rng) {
  BeamformerSet bf;
  bf.power_budget = P;
  for (int i = 0; i < k; ++i) bf.w.push_back(rng.complex_normal_vector(n));
  const double s = std::sqrt(P / bf.total_power());
  for (auto& v : bf.w) v *= s;
  return bf;
}

// Straight-line user rate: log2(1 + |h^T w_i|^2 / (sum_{k!=i} |h^T w_k|^2 + noise)).
double reference_rate(const CVector& h, const BeamformerSet& bf, int i, double noise) {
  double sig = 0.0, interf = noise;
  for (std::size_t k = 0; k < bf.w.size(); ++k) {
    Complex acc = 0.0;
    for (Eigen::Index j = 0; j < h.size(); ++j) acc += h(j) * bf.w[k](j);
    const double p = std::norm(acc);
    if (static_cast<int>(k) == i) {
      sig = p;
    } else {
      interf += p;
    }
  }
  return std::log2(1.0 + sig / interf);
}

}  // namespace

TEST_CASE("single user without interference") {
  const CVector e1 = vec2(1.0, 0.0);
  const ChannelSet cs = ChannelSet::from_vectors({e1}, {vec2(0.0, 1.0)}, 0.0, {1.0}, {1.0});
  BeamformerSet bf{{e1}, 1.0};
  CHECK(user_rate_exact(cs, bf, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(eaves_rate_exact(cs, bf, 0) == 0.0);
  bf.w[0].setZero();
  CHECK(user_rate_exact(cs, bf, 0) == 0.0);
}

TEST_CASE("two users sharing one direction") {
  const CVector e1 = vec2(1.0, 0.0);
  const ChannelSet cs =
      ChannelSet::from_vectors({e1, e1}, {e1, e1}, 0.0, {1.0, 1.0}, {1.0, 1.0});
  const BeamformerSet bf{{e1, e1}, 2.0};
  CHECK(user_rate_exact(cs, bf, 0) == doctest::Approx(std::log2(1.5)).epsilon(1e-15));
  CHECK(user_rate_exact(cs, bf, 0) == doctest::Approx(reference_rate(e1, bf, 0, 1.0)));
}

TEST_CASE("eavesdropper with larger noise") {
  const CVector e1 = vec2(1.0, 0.0);
  const ChannelSet cs = ChannelSet::from_vectors({e1}, {e1}, 0.0, {1.0}, {2.0});
  const BeamformerSet bf{{e1}, 1.0};
  CHECK(eaves_rate_exact(cs, bf, 0) == doctest::Approx(std::log2(1.5)).epsilon(1e-15));
}

TEST_CASE("rates agree with a direct evaluation") {
  RngStream rng(1, 0);
  for (int n = 0; n < 100; ++n) {
    const int k = 1 + n % 4;
    const ChannelSet cs = sample_channel_set(4, k, 0.0, 0.5 + rng.uniform(), rng);
    const BeamformerSet bf = random_beams(4, k, 10.0, rng);
    for (int i = 0; i < k; ++i) {
      CHECK(std::abs(user_rate_exact(cs, bf, i) -
                     reference_rate(cs.h_est[i], bf, i, cs.sigma2[i])) < 1e-12);
      CHECK(std::abs(eaves_rate_exact(cs, bf, i) -
                     reference_rate(cs.g_est[i], bf, i, cs.varsigma2[i])) < 1e-12);
    }
  }
}

TEST_CASE("symmetric wiretap has zero secrecy") {
  RngStream rng(2, 0);
  ChannelSet cs = sample_channel_set(4, 3, 0.0, 1.0, rng);
  cs.g_est = cs.h_est;
  CHECK(std::abs(ssr_exact(cs, random_beams(4, 3, 5.0, rng))) < 1e-12);
}

TEST_CASE("silent transmitter gives zero") {
  RngStream rng(3, 0);
  const ChannelSet cs = sample_channel_set(4, 2, 0.1, 1.0, rng);
  BeamformerSet bf{{CVector::Zero(4), CVector::Zero(4)}, 1.0};
  CHECK(ssr_exact(cs, bf) == 0.0);
  CHECK(ssr_lower_bound(cs, bf).bits == 0.0);
}

TEST_CASE("phase rotation leaves the rate unchanged") {
  RngStream rng(4, 0);
  const ChannelSet cs = sample_channel_set(4, 3, 0.0, 1.0, rng);
  const BeamformerSet bf = random_beams(4, 3, 8.0, rng);
  BeamformerSet rot = bf;
  for (auto& v : rot.w) v *= std::polar(1.0, 2.0 * M_PI * rng.uniform());
  CHECK(std::abs(ssr_exact(cs, bf) - ssr_exact(cs, rot)) < 1e-12);
}

TEST_CASE("quadratic bounds for a unit direction") {
  const CVector e1 = vec2(1.0, 0.0);
  const CMatrix W = e1 * e1.adjoint();
  const QuadBounds b = quad_bounds(e1, W, 0.1);
  CHECK(b.lb == doctest::Approx(0.8).epsilon(1e-14));
  CHECK(b.ub == doctest::Approx(1.2).epsilon(1e-14));

  // Exact extremes of |(h + d)^T w|^2 differ from the linear bounds by at most eps^2.
  RngStream rng(5, 0);
  double mn = 1e9, mx = -1e9;
  for (int n = 0; n < 1000000; ++n) {
    const double v = received_power(e1 + sample_ball(2, 0.1, rng), e1);
    mn = std::min(mn, v);
    mx = std::max(mx, v);
  }
  CHECK(mn >= b.lb - 0.01 - 1e-12);
  CHECK(mx <= b.ub + 0.01 + 1e-12);
  CHECK(mn < b.lb + 0.02);
  CHECK(mx > b.ub - 0.02);

  const QuadBounds z = quad_bounds(e1, CMatrix::Zero(2, 2), 0.1);
  CHECK(z.lb == 0.0);
  CHECK(z.ub == 0.0);
  const QuadBounds e0 = quad_bounds(e1, W, 0.0);
  CHECK(e0.lb == e0.center);
  CHECK(e0.ub == e0.center);
}

TEST_CASE("quadratic bounds bracket and widen with the radius") {
  RngStream rng(6, 0);
  for (int n = 0; n < 500; ++n) {
    const CVector h = rng.complex_normal_vector(4);
    const CVector w1 = rng.complex_normal_vector(4), w2 = rng.complex_normal_vector(4);
    const CMatrix W = w1 * w1.adjoint() + w2 * w2.adjoint();
    const double e1 = rng.uniform(), e2 = e1 + rng.uniform();
    const QuadBounds a = quad_bounds(h, W, e1), b = quad_bounds(h, W, e2);
    CHECK(a.lb <= a.center);
    CHECK(a.center <= a.ub);
    CHECK(b.ub >= a.ub);
    CHECK(b.lb <= a.lb);
  }
}

TEST_CASE("lower bound collapses to the exact rate at zero radius") {
  RngStream rng(7, 0);
  for (int n = 0; n < 100; ++n) {
    const int nt = 2 << (n % 3);
    const int k = std::min(nt, 1 << (n / 3 % 3));
    const ChannelSet cs = sample_channel_set(nt, k, 0.0, 1.0, rng);
    const BeamformerSet bf = random_beams(nt, k, 10.0, rng);
    CHECK(std::abs(ssr_lower_bound(cs, bf).bits - ssr_exact(cs, bf)) < 1e-9);
  }
}

TEST_CASE("covariance and beamformer overloads agree") {
  RngStream rng(8, 0);
  for (int n = 0; n < 50; ++n) {
    const ChannelSet cs = sample_channel_set(4, 2, 0.05 * (n % 4), 1.0, rng);
    const BeamformerSet bf = random_beams(4, 2, 10.0, rng);
    const double a = ssr_lower_bound(cs, bf).bits;
    const double b = ssr_lower_bound(cs, CovarianceSet::from_beamformers(bf)).bits;
    CHECK(std::abs(a - b) < 1e-12);
  }
}

TEST_CASE("lower bound holds over sampled true channels up to second order") {
  RngStream rng(9, 0);
  const double eps = 0.05, P = 10.0;
  const ChannelSet cs = sample_channel_set(4, 2, eps, 1.0, rng);
  const BeamformerSet bf = random_beams(4, 2, P, rng);
  const LowerBoundSsr lb = ssr_lower_bound(cs, bf);
  double wmax = 0.0;
  for (const auto& v : bf.w) wmax = std::max(wmax, v.squaredNorm());
  const double slack = 4.0 * 2 * eps * eps * wmax * kLog2E / 1.0;
  double worst = 1e9;
  for (int n = 0; n < 10000; ++n) {
    worst = std::min(worst, ssr_exact(sample_true_instance(cs, rng), cs, bf));
  }
  CHECK(worst >= lb.bits - slack);
  CHECK(!lb.degenerate);
}

TEST_CASE("negative own-signal bound is clamped and flagged") {
  const CVector e1 = vec2(1.0, 0.0);
  const ChannelSet cs = ChannelSet::from_vectors({e1}, {e1}, 0.8, {1.0}, {1.0});
  const BeamformerSet bf{{e1}, 1.0};
  const LowerBoundSsr lb = ssr_lower_bound(cs, bf);
  CHECK(lb.degenerate);
  CHECK(lb.clamped_terms >= 1);
  CHECK(std::isfinite(lb.bits));
}

TEST_CASE("power budget checks") {
  BeamformerSet bf{{vec2(1.0, 1.0)}, 2.0};
  CHECK_NOTHROW(bf.validate());
  bf.power_budget = 1.5;
  CHECK_THROWS_AS(bf.validate(), Error);
  CovarianceSet cov;
  cov.W.push_back(CMatrix::Identity(2, 2));
  CHECK_NOTHROW(cov.validate(2.0));
  CHECK_THROWS_AS(cov.validate(1.0), Error);
  cov.W[0](0, 1) = Complex(0.0, 1.0);
  CHECK_THROWS_AS(cov.validate(2.0), Error);
}
