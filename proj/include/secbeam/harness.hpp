#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "secbeam/channel.hpp"
#include "secbeam/rates.hpp"
#include "secbeam/sca.hpp"
#include "secbeam/zf.hpp"

namespace secbeam {

enum class Method { kSca, kZf, kSlnr };

const char* to_string(Method m);
/// "sca", "zf" or "slnr"; nullopt otherwise.
std::optional<Method> parse_method(const std::string& name);

/// Draws the estimated channels of one trial. The default samples i.i.d.
/// CN(0,1) channels; tests inject fixtures here.
using ChannelSource = std::function<ChannelSet(int trial, RngStream& rng)>;

struct ExperimentConfig {
  int n_tx = 4;
  int k_pairs = 2;
  double eps = 0.1;
  std::vector<double> snr_db{0.0, 5.0, 10.0, 15.0};
  int trials = 20;
  std::vector<Method> methods{Method::kSca, Method::kZf, Method::kSlnr};
  std::uint64_t seed = 1;
  ScaConfig sca;
  /// sigma_i^2 = varsigma_i^2; P = noise_var * 10^(snr/10).
  double noise_var = 1.0;
  /// Also redesign on the true channels with eps = 0 (doubles the work).
  bool theoretical = true;
  SelectionMode selection = SelectionMode::kExhaustive;
  int threads = 1;
  ChannelSource channel_source;

  /// Throws kInvalidConfig on a broken invariant.
  void validate() const;
  double power(double snr_db) const;
};

/// Flat key=value text, one pair per line, '#' starts a comment. Keys: ntx, k,
/// eps, snr, trials, methods, seed, out, threads, theoretical, selection,
/// max_iter, obj_tol, init_attempts, rand_samples, strict_sign_check.
/// Lists are comma separated. Throws kInvalidConfig on unknown keys or bad
/// values. `out` is returned through `out_path` when given.
void apply_config_text(ExperimentConfig& cfg, const std::string& text,
                       std::string* out_path = nullptr);
void apply_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value,
                        std::string* out_path = nullptr);

/// One method on one trial at one SNR.
struct TrialOutcome {
  bool ok = false;
  double lb_ssr = 0.0;
  double practical_ssr = 0.0;
  double theoretical_ssr = 0.0;
  bool has_theoretical = false;
  int iterations = 0;
  bool degenerate = false;
  bool init_failure = false;
  bool no_eligible = false;
  std::string error;
};

struct Stats {
  double mean = 0.0;
  double stddev = 0.0;  // unbiased (n - 1); NaN below two samples
  int count = 0;
};

Stats summarize(const std::vector<double>& xs);

struct ResultRecord {
  double snr_db = 0.0;
  Method method = Method::kSca;
  Stats lb_ssr, practical_ssr, theoretical_ssr, lb_ssr_per_user, iterations;
  int trials = 0;
  int failures = 0;
  int degenerate = 0;
  int init_failures = 0;
  int no_eligible = 0;
};

/// outcomes[s][m][t] for snr_db[s], methods[m], trial t.
using OutcomeGrid = std::vector<std::vector<std::vector<TrialOutcome>>>;

/// Runs every (trial, snr, method) cell. Channel draws depend only on
/// (seed, trial), so every method and SNR sees the same draws.
OutcomeGrid run_trials(const ExperimentConfig& cfg);

std::vector<ResultRecord> aggregate(const ExperimentConfig& cfg, const OutcomeGrid& grid);

std::vector<ResultRecord> run_sweep(const ExperimentConfig& cfg);

/// header snr_db,method,metric,mean,stddev,trials,failures; %.9g floats.
void write_results_csv(std::ostream& out, const std::vector<ResultRecord>& records);

/// SCA objective traces at the first SNR: trial,iter,objective_bits.
struct ConvergenceRow {
  int trial = 0;
  int iter = 0;
  double objective_bits = 0.0;
};
std::vector<ConvergenceRow> run_convergence(const ExperimentConfig& cfg, int* failures = nullptr);
void write_convergence_csv(std::ostream& out, const std::vector<ConvergenceRow>& rows);

/// Relaxed value versus recovered rank-one value per trial and SNR.
struct RandEffectRow {
  double snr_db = 0.0;
  int trial = 0;
  double no_rand = 0.0;
  double rand = 0.0;
  double gap = 0.0;  // no_rand - rand
  bool rank_one = false;
};
std::vector<RandEffectRow> run_rand_effect(const ExperimentConfig& cfg, int* failures = nullptr);
void write_rand_effect_csv(std::ostream& out, const std::vector<RandEffectRow>& rows);

struct SelftestOptions {
  /// Applied to every allocation before the KKT certificate is checked.
  std::function<void(PowerAllocation&)> corrupt_waterfill;
};

struct SelftestCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SelftestReport {
  std::vector<SelftestCheck> checks;
  bool passed() const;
};

SelftestReport selftest(const SelftestOptions& opts = {});

}  // namespace secbeam
