#include <cmath>
#include <functional>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "secbeam/harness.hpp"
#include "secbeam/slnr.hpp"

namespace secbeam {
namespace {

using CheckFn = std::function<std::string()>;

std::string num(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

std::string check_channel_determinism() {
  RngStream a(11, 3), b(11, 3);
  const ChannelSet x = sample_channel_set(4, 2, 0.1, 1.0, a);
  const ChannelSet y = sample_channel_set(4, 2, 0.1, 1.0, b);
  for (int i = 0; i < 2; ++i) {
    if (x.h_est[i] != y.h_est[i] || x.g_est[i] != y.g_est[i]) return "draws differ";
  }
  return {};
}

std::string check_ball_membership() {
  RngStream rng(12, 0);
  const ChannelSet cs = sample_channel_set(4, 2, 0.3, 1.0, rng);
  for (int n = 0; n < 2000; ++n) {
    const TrueChannelInstance t = sample_true_instance(cs, rng);
    for (int i = 0; i < 2; ++i) {
      if (t.dh[i].norm() > cs.eps + 1e-12 || t.dg[i].norm() > cs.eps + 1e-12) {
        return "perturbation outside the ball";
      }
    }
  }
  return {};
}

std::string check_lemma1() {
  RngStream rng(13, 0);
  for (int n = 0; n < 200; ++n) {
    const CVector y = rng.complex_normal_vector(1 + n % 8);
    const double eps = 0.05 + rng.uniform();
    const ExtremePoint hi = lemma1_extreme(y, eps, Sense::kMax);
    const ExtremePoint lo = lemma1_extreme(y, eps, Sense::kMin);
    const double bound = eps * y.norm();
    if (std::abs(hi.x.dot(y).real() - bound) > 1e-12 * (1 + bound) ||
        std::abs(lo.x.dot(y).real() + bound) > 1e-12 * (1 + bound)) {
      return "extremizer misses the bound";
    }
    const CVector x = sample_ball(y.size(), eps, rng);
    if (std::abs(x.dot(y).real()) > bound + 1e-12) return "sample exceeds the bound";
  }
  return {};
}

std::string check_eps0_collapse() {
  RngStream rng(14, 0);
  for (int n = 0; n < 30; ++n) {
    const int nt = 2 + n % 7;
    const int k = 1 + n % std::min(nt, 4);
    const ChannelSet cs = sample_channel_set(nt, k, 0.0, 1.0, rng);
    BeamformerSet bf;
    bf.power_budget = 10.0;
    for (int i = 0; i < k; ++i) bf.w.push_back(rng.complex_normal_vector(nt));
    const double d = std::abs(ssr_lower_bound(cs, bf).bits - ssr_exact(cs, bf));
    if (d >= 1e-9) return "difference " + num(d);
  }
  return {};
}

std::string check_quad_bounds() {
  RngStream rng(15, 0);
  for (int n = 0; n < 200; ++n) {
    const CVector h = rng.complex_normal_vector(4);
    const CVector w = rng.complex_normal_vector(4);
    const CMatrix W = w * w.adjoint();
    const QuadBounds a = quad_bounds(h, W, 0.05);
    const QuadBounds b = quad_bounds(h, W, 0.1);
    if (!(a.lb <= a.center && a.center <= a.ub)) return "bounds do not bracket the center";
    if (b.ub < a.ub || b.lb > a.lb) return "bounds not monotone in eps";
  }
  return {};
}

std::string check_embedding() {
  RngStream rng(16, 0);
  for (int n = 0; n < 200; ++n) {
    const int dim = 1 + n % 8;
    CMatrix G(dim, dim);
    for (int r = 0; r < dim; ++r)
      for (int c = 0; c < dim; ++c) G(r, c) = rng.complex_normal();
    CMatrix W = G * G.adjoint();
    if (n % 2) W -= CMatrix::Identity(dim, dim) * (W.trace().real() / dim);
    const double lw = Eigen::SelfAdjointEigenSolver<CMatrix>(W).eigenvalues().minCoeff();
    const double lm = Eigen::SelfAdjointEigenSolver<RMatrix>(herm_to_real(W)).eigenvalues().minCoeff();
    if (std::abs(lw - lm) > 1e-9 * (1 + std::abs(lw))) return "spectrum not preserved";
    if ((real_to_herm(herm_to_real(W)) - W).norm() > 1e-14 * (1 + W.norm())) return "round trip";
  }
  return {};
}

std::string check_conic_examples() {
  ConicProgram prog;
  const int x = prog.add_variable("x");
  const int s = prog.add_variable("s");
  prog.set_objective(x, 1.0);
  prog.add(ExponentialCone{AffineExpr::variable(x), AffineExpr(1.0), AffineExpr::variable(s)});
  prog.add(NonnegativeCone{AffineExpr(5.0) - AffineExpr::variable(s)});
  const SolverResult r = solve(prog);
  if (r.status != SolveStatus::kOptimal) return std::string("status ") + to_string(r.status);
  if (std::abs(r.primal(x) - std::log(5.0)) > 1e-6) return "x = " + num(r.primal(x));
  return {};
}

std::string check_sca(const ChannelSet& cs, double P) {
  RngStream rng(17, 0);
  const ScaResult r = run_sca(cs, P, ScaConfig{}, rng);
  for (std::size_t n = 1; n < r.trace.size(); ++n) {
    if (r.trace[n] < r.trace[n - 1] - 1e-6) return "trace decreased at iteration " + std::to_string(n + 1);
  }
  for (const auto& it : r.state.history) {
    if (it.max_slack > 1e-5) return "constraint slack " + num(it.max_slack);
    if (it.norm_gap > 1e-5) return "norm mark gap " + num(it.norm_gap);
  }
  if (r.value > r.relaxed_value + 1e-6) return "rank-one value exceeds the relaxation";
  if (r.beamformers.total_power() > P + 1e-9) return "power budget exceeded";
  return {};
}

std::string check_zf_nulling() {
  RngStream rng(18, 0);
  for (int n = 0; n < 20; ++n) {
    const ChannelSet cs = sample_channel_set(8, 4, 0.0, 1.0, rng);
    const ZfDirections d = zf_directions(cs, {0, 1, 2, 3});
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        const Complex hv = d.v[i].cwiseProduct(cs.h_est[j].conjugate()).sum();
        const Complex gv = d.v[i].cwiseProduct(cs.g_est[j].conjugate()).sum();
        if (std::abs(hv - (i == j ? 1.0 : 0.0)) > 1e-8 || std::abs(gv) > 1e-8) {
          return "nulling residual too large";
        }
      }
    }
  }
  return {};
}

std::string check_zf_kkt(const SelftestOptions& opts) {
  RngStream rng(19, 0);
  for (int n = 0; n < 50; ++n) {
    const double eps = 0.05 * (n % 5);
    const ChannelSet cs = sample_channel_set(8, 4, eps, 1.0, rng);
    const ZfDirections d = zf_directions(cs, {0, 1, 2, 3});
    const double P = std::pow(10.0, (n % 4) * 0.5);
    PowerAllocation a = waterfill(d, cs, P);
    if (opts.corrupt_waterfill) opts.corrupt_waterfill(a);
    const std::string v = waterfill_kkt_violation(d, cs, P, a);
    if (!v.empty()) return v + " (instance " + std::to_string(n) + ")";
  }
  return {};
}

std::string check_zf_oracle() {
  RngStream rng(20, 0);
  for (int n = 0; n < 20; ++n) {
    const ChannelSet cs = sample_channel_set(6, 3, 0.05 * (n % 4), 1.0, rng);
    const ZfDirections d = zf_directions(cs, {0, 1, 2});
    const double P = 1.0 + 9.0 * rng.uniform();
    const PowerAllocation a = waterfill(d, cs, P);
    const PowerAllocation b = waterfill_convex_oracle(d, cs, P);
    for (std::size_t j = 0; j < a.power.size(); ++j) {
      if (std::abs(a.power[j] - b.power[j]) > 1e-4 * P) return "closed form differs from oracle";
    }
  }
  return {};
}

std::string check_selection() {
  RngStream rng(21, 0);
  for (int n = 0; n < 20; ++n) {
    const ChannelSet cs = sample_channel_set(4, 4, 0.05, 1.0, rng);
    const double ex = select_users(cs, 10.0, SelectionMode::kExhaustive).value;
    const double he = select_users(cs, 10.0, SelectionMode::kHeuristic).value;
    if (he > ex + 1e-12) return "heuristic beats exhaustive";
  }
  return {};
}

std::string check_slnr() {
  RngStream rng(22, 0);
  for (int n = 0; n < 50; ++n) {
    const ChannelSet cs = sample_channel_set(4, 1 + n % 4, 0.1, 1.0, rng);
    const BeamformerSet bf = slnr_beamformers(cs, 5.0);
    if (std::abs(bf.total_power() - 5.0) > 1e-9) return "power not equal to budget";
  }
  return {};
}

}  // namespace

bool SelftestReport::passed() const {
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

SelftestReport selftest(const SelftestOptions& opts) {
  RngStream rng(23, 0);
  const ChannelSet sca_cs = sample_channel_set(4, 2, 0.1, 1.0, rng);
  const std::vector<std::pair<std::string, CheckFn>> suite = {
      {"channel.determinism", check_channel_determinism},
      {"channel.ball_membership", check_ball_membership},
      {"channel.lemma1_bound", check_lemma1},
      {"rates.eps0_collapse", check_eps0_collapse},
      {"rates.quad_bounds_order", check_quad_bounds},
      {"conic.embedding_psd", check_embedding},
      {"conic.exp_cone_example", check_conic_examples},
      {"sca.monotone_tight_dominated", [&] { return check_sca(sca_cs, 10.0); }},
      {"zf.nulling", check_zf_nulling},
      {"zf.kkt_certificate", [&] { return check_zf_kkt(opts); }},
      {"zf.oracle_equivalence", check_zf_oracle},
      {"zf.selection_dominance", check_selection},
      {"slnr.power", check_slnr},
  };
  SelftestReport report;
  for (const auto& [name, fn] : suite) {
    SelftestCheck c;
    c.name = name;
    try {
      c.detail = fn();
      c.passed = c.detail.empty();
    } catch (const std::exception& e) {
      c.detail = std::string("threw: ") + e.what();
    }
    report.checks.push_back(std::move(c));
  }
  return report;
}

}  // namespace secbeam
