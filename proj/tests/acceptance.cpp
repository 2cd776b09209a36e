// Acceptance criteria 1-12. Usage: acceptance <n>, or no argument for all.
// Each criterion prints one PASS/FAIL line; the exit code is nonzero on FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "secbeam/harness.hpp"
#include "secbeam/slnr.hpp"

using namespace secbeam;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

BeamformerSet random_beams(int n, int k, double P, RngStream& rng) {
  BeamformerSet bf;
  bf.power_budget = P;
  for (int i = 0; i < k; ++i) bf.w.push_back(rng.complex_normal_vector(n));
  const double s = std::sqrt(P / bf.total_power());
  for (auto& v : bf.w) v *= s;
  return bf;
}

double mean(const std::vector<double>& x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

// Lower 2.5% point of the bootstrap distribution of the mean of `d`.
double bootstrap_lower(const std::vector<double>& d, RngStream& rng, int resamples = 10000) {
  std::vector<double> means(resamples);
  const auto n = static_cast<std::uint64_t>(d.size());
  for (auto& m : means) {
    double s = 0.0;
    for (std::uint64_t j = 0; j < n; ++j) s += d[rng.next_u64() % n];
    m = s / static_cast<double>(n);
  }
  std::sort(means.begin(), means.end());
  return means[static_cast<std::size_t>(0.025 * resamples)];
}

// ---------------------------------------------------------------------------

Verdict c1_eps0_collapse() {
  const auto t0 = Clock::now();
  RngStream rng(101, 0);
  const int nts[] = {2, 4, 8};
  const int ks[] = {1, 2, 4};
  double worst = 0.0;
  int instances = 0;
  while (instances < 100) {
    const int nt = nts[rng.next_u64() % 3];
    const int k = ks[rng.next_u64() % 3];
    if (k > nt) continue;
    const ChannelSet cs = sample_channel_set(nt, k, 0.0, 1.0, rng);
    const double P = std::pow(10.0, 2.0 * rng.uniform() - 0.5);
    const BeamformerSet bf = random_beams(nt, k, P, rng);
    worst = std::max(worst, std::abs(ssr_lower_bound(cs, bf).bits - ssr_exact(cs, bf)));
    ++instances;
  }
  const double secs = seconds_since(t0);
  return {worst < 1e-9 && secs < 5.0,
          "max |lb - exact| = " + fmt("%.3g", worst) + " bits (< 1e-9) over 100 instances, " +
              fmt("%.2f", secs) + " s (< 5 s)"};
}

Verdict c2_lemma1() {
  RngStream rng(102, 0);
  double worst_excess = -1e300, worst_attain = 0.0;
  for (int inst = 0; inst < 10; ++inst) {
    const int n = 1 + inst % 8;
    const CVector y = rng.complex_normal_vector(n);
    const double eps = 0.05 + 1.5 * rng.uniform();
    const double bound = eps * y.norm();
    for (int s = 0; s < 100000; ++s) {
      const double v = sample_ball(n, eps, rng).dot(y).real();
      worst_excess = std::max(worst_excess, std::abs(v) - bound);
    }
    const double hi = lemma1_extreme(y, eps, Sense::kMax).x.dot(y).real();
    const double lo = lemma1_extreme(y, eps, Sense::kMin).x.dot(y).real();
    worst_attain = std::max({worst_attain, std::abs(hi - bound), std::abs(lo + bound)});
  }
  return {worst_excess <= 0.0 && worst_attain <= 1e-12,
          "max (|Re x^H y| - eps|y|) = " + fmt("%.3g", worst_excess) +
              " (<= 0) over 10 x 1e5 draws; extremizer error " + fmt("%.3g", worst_attain) +
              " (<= 1e-12)"};
}

// Same channel and design streams as the harness (seed 1, trials 0..49).
Verdict c3_convergence() {
  const auto t0 = Clock::now();
  ExperimentConfig cfg;
  cfg.n_tx = 4;
  cfg.k_pairs = 2;
  cfg.eps = 0.1;
  cfg.snr_db = {10.0};
  cfg.trials = 50;
  cfg.methods = {Method::kSca};
  cfg.seed = 1;
  int monotone = 0, converged = 0, fast = 0, failed = 0;
  std::vector<int> iters;
  for (int t = 0; t < cfg.trials; ++t) {
    RngStream crng = RngStream(cfg.seed, t).derive(0);
    const ChannelSet cs = sample_channel_set(cfg.n_tx, cfg.k_pairs, cfg.eps, 1.0, crng);
    RngStream drng = RngStream(cfg.seed, t).derive(1000);
    try {
      const ScaResult r = run_sca(cs, cfg.power(10.0), cfg.sca, drng);
      bool mono = true;
      for (std::size_t j = 1; j < r.trace.size(); ++j) mono = mono && r.trace[j] >= r.trace[j - 1] - 1e-6;
      monotone += mono;
      converged += r.converged;
      fast += r.converged && r.iterations <= 15;
      iters.push_back(r.iterations);
    } catch (const Error&) {
      ++failed;
    }
  }
  std::sort(iters.begin(), iters.end());
  const double secs = seconds_since(t0);
  const bool pass = monotone == 50 && converged == 50 && fast >= 45 && secs < 600.0;
  return {pass, "monotone " + std::to_string(monotone) + "/50, converged within 50 " +
                    std::to_string(converged) + "/50, within 15 " + std::to_string(fast) +
                    "/50 (need 45), failed " + std::to_string(failed) + ", median iterations " +
                    (iters.empty() ? "n/a" : std::to_string(iters[iters.size() / 2])) + ", " +
                    fmt("%.0f", secs) + " s (< 600 s)"};
}

Verdict c4_tightness() {
  RngStream rng(104, 0);
  double slack = 0.0, gap = 0.0;
  int iterates = 0, failed = 0;
  for (int t = 0; t < 20; ++t) {
    const int k = 1 + t % 3;
    const double eps = 0.05 * (1 + t % 3);
    const ChannelSet cs = sample_channel_set(4, k, eps, 1.0, rng);
    RngStream drng(104, 1 + t);
    try {
      const ScaResult r = run_sca(cs, std::pow(10.0, (t % 4) * 0.5), ScaConfig{}, drng);
      for (const auto& it : r.state.history) {
        slack = std::max(slack, it.max_slack);
        gap = std::max(gap, it.norm_gap);
        ++iterates;
      }
    } catch (const Error&) {
      ++failed;
    }
  }
  return {slack <= 1e-5 && gap <= 1e-5 && failed == 0,
          "max relative slack " + fmt("%.3g", slack) + ", max norm-mark gap " + fmt("%.3g", gap) +
              " (both <= 1e-5) over " + std::to_string(iterates) + " iterates, " +
              std::to_string(failed) + " failed runs"};
}

Verdict c5_nulling() {
  RngStream rng(105, 0);
  double null_err = 0.0, eaves = 0.0;
  for (int n = 0; n < 100; ++n) {
    const double eps = n % 2 ? 0.1 : 0.0;
    const ChannelSet cs = sample_channel_set(8, 4, eps, 1.0, rng);
    const ZfDirections d = zf_directions(cs, {0, 1, 2, 3});
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        const Complex hv = d.v[i].cwiseProduct(cs.h_est[j].conjugate()).sum();
        const Complex gv = d.v[i].cwiseProduct(cs.g_est[j].conjugate()).sum();
        null_err = std::max({null_err, std::abs(hv - (i == j ? 1.0 : 0.0)), std::abs(gv)});
      }
    }
    if (eps == 0.0) {
      const ZfDesign z = zf_design(cs, 10.0);
      for (int i = 0; i < 4; ++i) eaves = std::max(eaves, eaves_rate_exact(cs, z.beamformers, i));
    }
  }
  return {null_err < 1e-8 && eaves < 1e-12,
          "max nulling residual " + fmt("%.3g", null_err) + " (< 1e-8), max eavesdropper rate " +
              fmt("%.3g", eaves) + " bits (< 1e-12) over 100 instances"};
}

Verdict c6_waterfill_oracle() {
  RngStream rng(106, 0);
  double worst = 0.0, sum_err = 0.0;
  int kkt = 0, forced = 0, forced_bad = 0;
  for (int n = 0; n < 100; ++n) {
    const int k = 1 + n % 4;
    const double eps = 0.1 * (n % 5);
    const ChannelSet cs = sample_channel_set(2 * k + n % 3, k, eps, 1.0, rng);
    const ZfDirections d = zf_directions(cs, [&] {
      std::vector<int> s(k);
      std::iota(s.begin(), s.end(), 0);
      return s;
    }());
    const double P = std::pow(10.0, 2.0 * rng.uniform() - 0.5);
    const PowerAllocation a = waterfill(d, cs, P);
    if (!waterfill_kkt_violation(d, cs, P, a).empty()) ++kkt;
    bool any = false;
    double total = 0.0;
    for (int j = 0; j < k; ++j) {
      total += a.power[j];
      any = any || a.power[j] > 0.0;
      if (1.0 - 2.0 * eps * d.v_norm[j] <= 0.0) {
        ++forced;
        if (a.power[j] != 0.0) ++forced_bad;
      }
    }
    if (any) sum_err = std::max(sum_err, std::abs(total - P));
    if (a.no_eligible) continue;
    const PowerAllocation o = waterfill_convex_oracle(d, cs, P);
    for (int j = 0; j < k; ++j) worst = std::max(worst, std::abs(a.power[j] - o.power[j]) / P);
  }
  return {worst <= 1e-4 && sum_err <= 1e-8 && kkt == 0 && forced_bad == 0,
          "max |dP|/P " + fmt("%.3g", worst) + " (<= 1e-4), max |sum P - P| " +
              fmt("%.3g", sum_err) + " (<= 1e-8), KKT violations " + std::to_string(kkt) +
              ", forced-zero pairs " + std::to_string(forced) + " (" +
              std::to_string(forced_bad) + " nonzero)"};
}

Verdict c7_ordering() {
  const auto t0 = Clock::now();
  ExperimentConfig cfg;
  cfg.n_tx = 8;
  cfg.k_pairs = 2;
  cfg.eps = 0.1;
  cfg.snr_db = {10.0};
  cfg.trials = 200;
  cfg.methods = {Method::kSca, Method::kZf, Method::kSlnr};
  cfg.theoretical = false;
  cfg.seed = 7;
  const OutcomeGrid g = run_trials(cfg);
  std::vector<double> d1, d2, sca, zf, slnr;
  int dropped = 0;
  for (int t = 0; t < cfg.trials; ++t) {
    const auto& a = g[0][0][t];
    const auto& b = g[0][1][t];
    const auto& c = g[0][2][t];
    if (!a.ok || !b.ok || !c.ok) {
      ++dropped;
      continue;
    }
    sca.push_back(a.lb_ssr);
    zf.push_back(b.lb_ssr);
    slnr.push_back(c.lb_ssr);
    d1.push_back(a.lb_ssr - b.lb_ssr);
    d2.push_back(b.lb_ssr - c.lb_ssr);
  }
  RngStream boot(107, 0);
  const double lo1 = bootstrap_lower(d1, boot), lo2 = bootstrap_lower(d2, boot);
  const double secs = seconds_since(t0);
  const bool pass = sca.size() >= 200 && lo1 > 0.0 && lo2 > 0.0 && secs < 1800.0;
  return {pass, "means SCA " + fmt("%.4f", mean(sca)) + ", ZF " + fmt("%.4f", mean(zf)) +
                    ", SLNR " + fmt("%.4f", mean(slnr)) + " bits over " +
                    std::to_string(sca.size()) + " paired draws (" + std::to_string(dropped) +
                    " dropped); 95% bootstrap lower bounds of gaps SCA-ZF " + fmt("%.4f", lo1) +
                    ", ZF-SLNR " + fmt("%.4f", lo2) + " (> 0); " + fmt("%.0f", secs) +
                    " s (< 1800 s)"};
}

Verdict c8_randomization() {
  ExperimentConfig cfg;
  cfg.n_tx = 4;
  cfg.k_pairs = 2;
  cfg.eps = 0.1;
  cfg.snr_db = {10.0};
  cfg.trials = 50;
  cfg.seed = 8;
  int failures = 0;
  const auto rows = run_rand_effect(cfg, &failures);
  int violations = 0, rank_one = 0;
  std::vector<double> rel;
  for (const auto& r : rows) {
    if (r.rand > r.no_rand + 1e-6) ++violations;
    rank_one += r.rank_one;
    rel.push_back(r.gap / std::max(std::abs(r.no_rand), 1e-12));
  }
  const double m = rel.empty() ? NAN : mean(rel);
  return {violations == 0 && !rel.empty() && m < 0.10,
          "rand > relaxed + 1e-6 in " + std::to_string(violations) + "/" +
              std::to_string(rows.size()) + " trials; mean relative gap " + fmt("%.3g", m) +
              " (< 0.10); rank-one relaxations " + std::to_string(rank_one) + ", failures " +
              std::to_string(failures)};
}

Verdict c9_single_pair_grid() {
  RngStream rng(109, 0);
  const double P = 10.0;
  double worst = 0.0;
  for (int n = 0; n < 20; ++n) {
    const ChannelSet cs = sample_channel_set(2, 1, 0.0, 1.0, rng);
    // 10^4 beam directions at full power: 100 amplitude angles x 100 phases.
    double grid = -1e300;
    for (int ia = 0; ia < 100; ++ia) {
      const double a = 0.5 * M_PI * ia / 99.0;
      for (int ib = 0; ib < 100; ++ib) {
        CVector w(2);
        w << std::cos(a), std::sin(a) * std::polar(1.0, 2.0 * M_PI * ib / 100.0);
        grid = std::max(grid, ssr_exact(cs, BeamformerSet{{std::sqrt(P) * w}, P}));
      }
    }
    RngStream drng(109, 1 + n);
    const ScaResult r = run_sca(cs, P, ScaConfig{}, drng);
    worst = std::max(worst, std::abs(ssr_exact(cs, r.beamformers) - grid));
  }
  return {worst < 1e-2, "max |SCA - grid| = " + fmt("%.3g", worst) + " bits (< 1e-2) over 20 instances"};
}

Verdict c10_power_trend() {
  ExperimentConfig cfg;
  cfg.n_tx = 4;
  cfg.k_pairs = 2;
  cfg.eps = 0.1;
  cfg.snr_db = {0.0, 5.0, 10.0, 15.0};
  cfg.trials = 100;
  cfg.theoretical = false;
  cfg.seed = 10;
  const auto recs = run_sweep(cfg);
  bool pass = true;
  std::string detail;
  for (Method m : cfg.methods) {
    std::vector<double> means;
    for (const auto& r : recs) {
      if (r.method == m) means.push_back(r.lb_ssr.mean);
    }
    for (std::size_t j = 1; j < means.size(); ++j) pass = pass && means[j] >= means[j - 1];
    detail += std::string(detail.empty() ? "" : "; ") + to_string(m) + ":";
    for (double v : means) detail += " " + fmt("%.4f", v);
  }
  return {pass, "mean lb-SSR at 0/5/10/15 dB (nondecreasing) " + detail};
}

Verdict c11_large_eps() {
  auto run = [](double eps) {
    ExperimentConfig cfg;
    cfg.n_tx = 4;
    cfg.k_pairs = 2;
    cfg.eps = eps;
    cfg.snr_db = {10.0};
    cfg.trials = 50;
    cfg.theoretical = false;
    cfg.seed = 11;
    return run_sweep(cfg);
  };
  int flags = 0;
  bool crashed = false;
  std::vector<ResultRecord> big;
  try {
    big = run(0.8);
  } catch (const std::exception&) {
    crashed = true;
  }
  for (const auto& r : big) flags += r.init_failures + r.degenerate + r.no_eligible;
  const auto a = run(0.1), b = run(0.2);
  bool order = true;
  std::string detail;
  for (std::size_t j = 0; j < a.size(); ++j) {
    order = order && b[j].lb_ssr.mean <= a[j].lb_ssr.mean;
    detail += std::string(" ") + to_string(a[j].method) + " " + fmt("%.4f", a[j].lb_ssr.mean) +
              " -> " + fmt("%.4f", b[j].lb_ssr.mean) + ";";
  }
  return {!crashed && flags > 0 && order,
          "eps=0.8: " + std::string(crashed ? "crashed" : "completed") + ", " +
              std::to_string(flags) + " flagged trials (> 0); mean lb-SSR eps 0.1 -> 0.2:" + detail};
}

Verdict c12_selection() {
  RngStream rng(112, 0);
  int violations = 0, strict = 0;
  for (int n = 0; n < 100; ++n) {
    const ChannelSet cs = sample_channel_set(4, 4, 0.05 * (n % 3), 1.0, rng);
    const double ex = select_users(cs, 10.0, SelectionMode::kExhaustive).value;
    const double he = select_users(cs, 10.0, SelectionMode::kHeuristic).value;
    if (ex < he) ++violations;
    if (ex > he) ++strict;
  }
  return {violations == 0, "exhaustive < heuristic in " + std::to_string(violations) +
                               "/100 instances (need 0); strictly better in " +
                               std::to_string(strict)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"eps0_collapse", c1_eps0_collapse},       {"lemma1_bound", c2_lemma1},
      {"sca_convergence", c3_convergence},       {"subproblem_tightness", c4_tightness},
      {"zf_nulling", c5_nulling},                {"waterfill_oracle", c6_waterfill_oracle},
      {"method_ordering", c7_ordering},          {"randomization_gap", c8_randomization},
      {"single_pair_grid", c9_single_pair_grid}, {"power_trend", c10_power_trend},
      {"large_eps", c11_large_eps},              {"selection_dominance", c12_selection},
  };
  std::vector<int> which;
  if (argc > 1) {
    which.push_back(std::atoi(argv[1]));
    if (which[0] < 1 || which[0] > static_cast<int>(criteria.size())) {
      std::fprintf(stderr, "criterion must be 1..%zu\n", criteria.size());
      return 2;
    }
  } else {
    for (int j = 1; j <= static_cast<int>(criteria.size()); ++j) which.push_back(j);
  }
  bool all = true;
  for (int j : which) {
    Verdict v;
    try {
      v = criteria[j - 1].second();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    all = all && v.pass;
    std::printf("%s criterion %d (%s): %s\n", v.pass ? "PASS" : "FAIL", j, criteria[j - 1].first,
                v.detail.c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
