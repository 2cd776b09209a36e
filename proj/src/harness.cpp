#include "secbeam/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include "secbeam/slnr.hpp"

namespace secbeam {
namespace {

constexpr std::uint64_t kChannelStream = 0;
constexpr std::uint64_t kTruthStream = 1;

std::uint64_t design_stream(std::size_t snr_index, Method m, bool theoretical) {
  return (theoretical ? 2000 : 1000) + 100 * snr_index + static_cast<std::uint64_t>(m);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
  throw Error(ErrorCode::kInvalidConfig, "bad value for " + key + ": '" + value + "'");
}

long long parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(value, &pos);
    if (pos != value.size()) bad_value(key, value);
    return v;
  } catch (const std::logic_error&) {
    bad_value(key, value);
  }
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size() || !std::isfinite(v)) bad_value(key, value);
    return v;
  } catch (const std::logic_error&) {
    bad_value(key, value);
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true" || value == "on" || value == "yes") return true;
  if (value == "0" || value == "false" || value == "off" || value == "no") return false;
  bad_value(key, value);
}

ChannelSet draw_channels(const ExperimentConfig& cfg, int trial) {
  RngStream rng = RngStream(cfg.seed, static_cast<std::uint64_t>(trial)).derive(kChannelStream);
  if (cfg.channel_source) return cfg.channel_source(trial, rng);
  return sample_channel_set(cfg.n_tx, cfg.k_pairs, cfg.eps, cfg.noise_var, rng);
}

struct Design {
  BeamformerSet bf;
  int iterations = 0;
  bool no_eligible = false;
};

Design design(Method m, const ChannelSet& cs, double P, const ExperimentConfig& cfg,
              RngStream& rng) {
  Design d;
  switch (m) {
    case Method::kSca: {
      ScaResult r = run_sca(cs, P, cfg.sca, rng);
      d.bf = std::move(r.beamformers);
      d.iterations = r.iterations;
      break;
    }
    case Method::kZf: {
      ZfDesign z = zf_design(cs, P, cfg.selection);
      d.bf = std::move(z.beamformers);
      d.no_eligible = z.alloc.no_eligible;
      break;
    }
    case Method::kSlnr:
      d.bf = slnr_beamformers(cs, P);
      break;
  }
  return d;
}

void run_one_trial(const ExperimentConfig& cfg, int trial, OutcomeGrid& grid) {
  const ChannelSet cs = draw_channels(cfg, trial);
  const RngStream base(cfg.seed, static_cast<std::uint64_t>(trial));
  RngStream truth_rng = base.derive(kTruthStream);
  const TrueChannelInstance truth = sample_true_instance(cs, truth_rng);
  const ChannelSet true_cs = truth.as_channel_set(cs);
  for (std::size_t s = 0; s < cfg.snr_db.size(); ++s) {
    const double P = cfg.power(cfg.snr_db[s]);
    for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
      const Method m = cfg.methods[mi];
      TrialOutcome& out = grid[s][mi][trial];
      try {
        RngStream rng = base.derive(design_stream(s, m, false));
        const Design d = design(m, cs, P, cfg, rng);
        const LowerBoundSsr lb = ssr_lower_bound(cs, d.bf);
        out.lb_ssr = lb.bits;
        out.degenerate = lb.degenerate;
        out.iterations = d.iterations;
        out.no_eligible = d.no_eligible;
        out.practical_ssr = ssr_exact(truth, cs, d.bf);
        if (cfg.theoretical) {
          RngStream trng = base.derive(design_stream(s, m, true));
          const Design td = design(m, true_cs, P, cfg, trng);
          out.theoretical_ssr = ssr_exact(truth, cs, td.bf);
          out.has_theoretical = true;
        }
        out.ok = true;
      } catch (const Error& e) {
        out.ok = false;
        out.init_failure = e.code() == ErrorCode::kInitializationFailure;
        out.error = e.what();
      } catch (const std::exception& e) {
        out.ok = false;
        out.error = e.what();
      }
    }
  }
}

template <typename Fn>
void for_each_trial(int trials, int threads, Fn&& fn) {
  const int n = std::max(1, std::min(threads, trials));
  if (n == 1) {
    for (int t = 0; t < trials; ++t) fn(t);
    return;
  }
  std::vector<std::thread> pool;
  for (int w = 0; w < n; ++w) {
    pool.emplace_back([&, w] {
      for (int t = w; t < trials; t += n) fn(t);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

const char* to_string(Method m) {
  switch (m) {
    case Method::kSca: return "sca";
    case Method::kZf: return "zf";
    case Method::kSlnr: return "slnr";
  }
  return "unknown";
}

std::optional<Method> parse_method(const std::string& name) {
  if (name == "sca") return Method::kSca;
  if (name == "zf") return Method::kZf;
  if (name == "slnr") return Method::kSlnr;
  return std::nullopt;
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::kInvalidConfig, msg); };
  if (k_pairs < 1 || n_tx < k_pairs) fail("need ntx >= k >= 1");
  if (!(eps >= 0.0)) fail("eps must be nonnegative");
  if (snr_db.empty()) fail("snr list is empty");
  for (double s : snr_db) {
    if (!std::isfinite(s)) fail("snr values must be finite");
  }
  if (trials < 1) fail("trials must be at least 1");
  if (methods.empty()) fail("method list is empty");
  if (!(noise_var > 0.0)) fail("noise variance must be positive");
  if (threads < 1) fail("threads must be at least 1");
  if (n_tx < 2 && std::find(methods.begin(), methods.end(), Method::kZf) != methods.end()) {
    fail("zero forcing needs ntx >= 2");
  }
  sca.validate();
}

double ExperimentConfig::power(double snr) const {
  return noise_var * std::pow(10.0, snr / 10.0);
}

void apply_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value,
                        std::string* out_path) {
  if (key == "ntx") {
    cfg.n_tx = static_cast<int>(parse_int(key, value));
  } else if (key == "k") {
    cfg.k_pairs = static_cast<int>(parse_int(key, value));
  } else if (key == "eps") {
    cfg.eps = parse_double(key, value);
  } else if (key == "snr") {
    cfg.snr_db.clear();
    for (const auto& item : split_list(value)) cfg.snr_db.push_back(parse_double(key, item));
  } else if (key == "trials") {
    cfg.trials = static_cast<int>(parse_int(key, value));
  } else if (key == "methods") {
    cfg.methods.clear();
    for (const auto& item : split_list(value)) {
      const auto m = parse_method(item);
      if (!m) bad_value(key, item);
      if (std::find(cfg.methods.begin(), cfg.methods.end(), *m) == cfg.methods.end()) {
        cfg.methods.push_back(*m);
      }
    }
  } else if (key == "seed") {
    const long long v = parse_int(key, value);
    if (v < 0) bad_value(key, value);
    cfg.seed = static_cast<std::uint64_t>(v);
  } else if (key == "out") {
    if (out_path != nullptr) *out_path = value;
  } else if (key == "threads") {
    cfg.threads = static_cast<int>(parse_int(key, value));
  } else if (key == "theoretical") {
    cfg.theoretical = parse_bool(key, value);
  } else if (key == "selection") {
    if (value == "exhaustive") cfg.selection = SelectionMode::kExhaustive;
    else if (value == "heuristic") cfg.selection = SelectionMode::kHeuristic;
    else bad_value(key, value);
  } else if (key == "max_iter") {
    cfg.sca.max_iter = static_cast<int>(parse_int(key, value));
  } else if (key == "obj_tol") {
    cfg.sca.obj_tol = parse_double(key, value);
  } else if (key == "init_attempts") {
    cfg.sca.init_attempts = static_cast<int>(parse_int(key, value));
  } else if (key == "rand_samples") {
    cfg.sca.randomization_samples = static_cast<int>(parse_int(key, value));
  } else if (key == "strict_sign_check") {
    cfg.sca.strict_sign_check = parse_bool(key, value);
  } else {
    throw Error(ErrorCode::kInvalidConfig, "unknown key '" + key + "'");
  }
}

void apply_config_text(ExperimentConfig& cfg, const std::string& text, std::string* out_path) {
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kInvalidConfig, "line " + std::to_string(lineno) + ": missing '='");
    }
    apply_config_value(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)), out_path);
  }
}

Stats summarize(const std::vector<double>& xs) {
  Stats s;
  s.count = static_cast<int>(xs.size());
  if (xs.empty()) {
    s.mean = s.stddev = std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / s.count;
  if (s.count < 2) {
    s.stddev = std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  double ss = 0.0;
  for (double x : xs) ss += (x - s.mean) * (x - s.mean);
  s.stddev = std::sqrt(ss / (s.count - 1));
  return s;
}

OutcomeGrid run_trials(const ExperimentConfig& cfg) {
  cfg.validate();
  OutcomeGrid grid(cfg.snr_db.size(),
                   std::vector<std::vector<TrialOutcome>>(
                       cfg.methods.size(), std::vector<TrialOutcome>(cfg.trials)));
  for_each_trial(cfg.trials, cfg.threads, [&](int t) { run_one_trial(cfg, t, grid); });
  return grid;
}

std::vector<ResultRecord> aggregate(const ExperimentConfig& cfg, const OutcomeGrid& grid) {
  std::vector<ResultRecord> out;
  for (std::size_t s = 0; s < cfg.snr_db.size(); ++s) {
    for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
      ResultRecord rec;
      rec.snr_db = cfg.snr_db[s];
      rec.method = cfg.methods[mi];
      rec.trials = cfg.trials;
      std::vector<double> lb, pr, th, per_user, it;
      for (const auto& o : grid[s][mi]) {
        if (!o.ok) {
          ++rec.failures;
          if (o.init_failure) ++rec.init_failures;
          continue;
        }
        if (o.degenerate) ++rec.degenerate;
        if (o.no_eligible) ++rec.no_eligible;
        lb.push_back(o.lb_ssr);
        pr.push_back(o.practical_ssr);
        if (o.has_theoretical) th.push_back(o.theoretical_ssr);
        per_user.push_back(o.lb_ssr / cfg.k_pairs);
        it.push_back(o.iterations);
      }
      rec.lb_ssr = summarize(lb);
      rec.practical_ssr = summarize(pr);
      rec.theoretical_ssr = summarize(th);
      rec.lb_ssr_per_user = summarize(per_user);
      rec.iterations = summarize(it);
      out.push_back(rec);
    }
  }
  return out;
}

std::vector<ResultRecord> run_sweep(const ExperimentConfig& cfg) {
  return aggregate(cfg, run_trials(cfg));
}

void write_results_csv(std::ostream& out, const std::vector<ResultRecord>& records) {
  out << "snr_db,method,metric,mean,stddev,trials,failures\n";
  for (const auto& r : records) {
    const std::pair<const char*, const Stats*> metrics[] = {
        {"lb_ssr", &r.lb_ssr},
        {"practical_ssr", &r.practical_ssr},
        {"theoretical_ssr", &r.theoretical_ssr},
        {"lb_ssr_per_user", &r.lb_ssr_per_user},
        {"iterations", &r.iterations},
    };
    for (const auto& [name, st] : metrics) {
      out << fmt(r.snr_db) << "," << to_string(r.method) << "," << name << "," << fmt(st->mean)
          << "," << fmt(st->stddev) << "," << r.trials << "," << r.failures << "\n";
    }
  }
}

std::vector<ConvergenceRow> run_convergence(const ExperimentConfig& cfg, int* failures) {
  cfg.validate();
  std::vector<std::vector<ConvergenceRow>> per_trial(cfg.trials);
  std::vector<char> failed(cfg.trials, 0);
  const double P = cfg.power(cfg.snr_db.front());
  for_each_trial(cfg.trials, cfg.threads, [&](int t) {
    const ChannelSet cs = draw_channels(cfg, t);
    RngStream rng = RngStream(cfg.seed, static_cast<std::uint64_t>(t))
                        .derive(design_stream(0, Method::kSca, false));
    try {
      const ScaResult r = run_sca(cs, P, cfg.sca, rng);
      for (std::size_t n = 0; n < r.trace.size(); ++n) {
        per_trial[t].push_back({t, static_cast<int>(n + 1), r.trace[n]});
      }
    } catch (const Error&) {
      failed[t] = 1;
    }
  });
  std::vector<ConvergenceRow> rows;
  for (auto& v : per_trial) rows.insert(rows.end(), v.begin(), v.end());
  if (failures != nullptr) *failures = static_cast<int>(std::count(failed.begin(), failed.end(), 1));
  return rows;
}

void write_convergence_csv(std::ostream& out, const std::vector<ConvergenceRow>& rows) {
  out << "trial,iter,objective_bits\n";
  for (const auto& r : rows) out << r.trial << "," << r.iter << "," << fmt(r.objective_bits) << "\n";
}

std::vector<RandEffectRow> run_rand_effect(const ExperimentConfig& cfg, int* failures) {
  cfg.validate();
  const std::size_t n_snr = cfg.snr_db.size();
  std::vector<std::vector<std::optional<RandEffectRow>>> cells(
      n_snr, std::vector<std::optional<RandEffectRow>>(cfg.trials));
  for_each_trial(cfg.trials, cfg.threads, [&](int t) {
    const ChannelSet cs = draw_channels(cfg, t);
    for (std::size_t s = 0; s < n_snr; ++s) {
      RngStream rng = RngStream(cfg.seed, static_cast<std::uint64_t>(t))
                          .derive(design_stream(s, Method::kSca, false));
      try {
        const ScaResult r = run_sca(cs, cfg.power(cfg.snr_db[s]), cfg.sca, rng);
        cells[s][t] = RandEffectRow{cfg.snr_db[s], t,          r.relaxed_value,
                                    r.value,       r.relaxed_value - r.value, r.rank_one};
      } catch (const Error&) {
      }
    }
  });
  std::vector<RandEffectRow> rows;
  int failed = 0;
  for (auto& row : cells) {
    for (auto& c : row) {
      if (c) rows.push_back(*c); else ++failed;
    }
  }
  if (failures != nullptr) *failures = failed;
  return rows;
}

void write_rand_effect_csv(std::ostream& out, const std::vector<RandEffectRow>& rows) {
  out << "snr_db,trial,no_rand,rand,gap,rank_one\n";
  for (const auto& r : rows) {
    out << fmt(r.snr_db) << "," << r.trial << "," << fmt(r.no_rand) << "," << fmt(r.rand) << ","
        << fmt(r.gap) << "," << (r.rank_one ? 1 : 0) << "\n";
  }
}

}  // namespace secbeam
