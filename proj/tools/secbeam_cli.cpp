// Command-line front end for the beamforming experiments.
//
// Exit codes: 0 success, 1 invalid configuration, 2 selftest failure,
// 3 more than half of the solver runs failed.

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "secbeam/harness.hpp"

namespace {

constexpr int kExitInvalidConfig = 1;
constexpr int kExitSelftest = 2;
constexpr int kExitSolverFailures = 3;

const char* const kFlagKeys[] = {"ntx", "k", "eps", "snr", "trials", "methods", "seed", "out",
                                 "threads", "theoretical", "selection"};

struct Common {
  std::string config_file;
  std::map<std::string, std::string> flags;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config_file, "key=value config file");
  for (const char* key : kFlagKeys) {
    sub->add_option(std::string("--") + key, c.flags[key], std::string("override '") + key + "'");
  }
}

secbeam::ExperimentConfig build_config(const Common& c, const CLI::App* sub, std::string& out_path,
                                       const std::vector<secbeam::Method>& default_methods) {
  secbeam::ExperimentConfig cfg;
  cfg.methods = default_methods;
  if (!c.config_file.empty()) {
    std::ifstream in(c.config_file);
    if (!in) {
      throw secbeam::Error(secbeam::ErrorCode::kInvalidConfig,
                           "cannot read config file " + c.config_file);
    }
    std::stringstream ss;
    ss << in.rdbuf();
    secbeam::apply_config_text(cfg, ss.str(), &out_path);
  }
  for (const char* key : kFlagKeys) {
    if (sub->count(std::string("--") + key) > 0) {
      secbeam::apply_config_value(cfg, key, c.flags.at(key), &out_path);
    }
  }
  cfg.validate();
  return cfg;
}

// Writes through `emit` to the chosen path, or stdout when empty.
template <typename Emit>
void write_output(const std::string& path, Emit&& emit) {
  if (path.empty()) {
    emit(std::cout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw secbeam::Error(secbeam::ErrorCode::kInvalidConfig, "cannot open output " + path);
  }
  emit(out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust secure beamforming experiments"};
  app.require_subcommand(1);

  Common sim_opts, conv_opts, rand_opts, bounds_opts;
  CLI::App* simulate = app.add_subcommand("simulate", "SNR sweep over methods");
  add_common(simulate, sim_opts);
  CLI::App* convergence = app.add_subcommand("convergence", "SCA objective traces");
  add_common(convergence, conv_opts);
  CLI::App* rand_effect = app.add_subcommand("rand-effect", "relaxed vs rank-one values");
  add_common(rand_effect, rand_opts);
  CLI::App* bounds = app.add_subcommand("compare-bounds", "lower-bound, practical and theoretical SSR");
  add_common(bounds, bounds_opts);
  CLI::App* self = app.add_subcommand("selftest", "run the invariant suites");
  std::string fault;
  self->add_option("--inject-fault", fault, "corrupt a component on purpose (waterfill)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalidConfig;
  }

  using secbeam::Method;
  const std::vector<Method> all{Method::kSca, Method::kZf, Method::kSlnr};
  try {
    if (*self) {
      secbeam::SelftestOptions opts;
      if (fault == "waterfill") {
        opts.corrupt_waterfill = [](secbeam::PowerAllocation& a) {
          if (!a.power.empty()) a.power[0] *= 1.1;
        };
      } else if (!fault.empty()) {
        std::cerr << "unknown fault '" << fault << "'\n";
        return kExitInvalidConfig;
      }
      const secbeam::SelftestReport report = secbeam::selftest(opts);
      for (const auto& c : report.checks) {
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name;
        if (!c.passed) std::cout << ": " << c.detail;
        std::cout << "\n";
      }
      return report.passed() ? 0 : kExitSelftest;
    }

    std::string out_path;
    if (*simulate || *bounds) {
      const bool is_sim = simulate->parsed();
      const Common& opts = is_sim ? sim_opts : bounds_opts;
      const std::vector<Method> defaults = is_sim ? all : std::vector<Method>{Method::kSca};
      const secbeam::ExperimentConfig cfg =
          build_config(opts, is_sim ? simulate : bounds, out_path, defaults);
      const auto records = secbeam::run_sweep(cfg);
      write_output(out_path, [&](std::ostream& os) { secbeam::write_results_csv(os, records); });
      int failures = 0;
      for (const auto& r : records) failures += r.failures;
      const int runs = cfg.trials * static_cast<int>(records.size());
      return 2 * failures > runs ? kExitSolverFailures : 0;
    }
    if (*convergence) {
      const auto cfg = build_config(conv_opts, convergence, out_path, {Method::kSca});
      int failures = 0;
      const auto rows = secbeam::run_convergence(cfg, &failures);
      write_output(out_path, [&](std::ostream& os) { secbeam::write_convergence_csv(os, rows); });
      return 2 * failures > cfg.trials ? kExitSolverFailures : 0;
    }
    if (*rand_effect) {
      const auto cfg = build_config(rand_opts, rand_effect, out_path, {Method::kSca});
      int failures = 0;
      const auto rows = secbeam::run_rand_effect(cfg, &failures);
      write_output(out_path, [&](std::ostream& os) { secbeam::write_rand_effect_csv(os, rows); });
      const int runs = cfg.trials * static_cast<int>(cfg.snr_db.size());
      return 2 * failures > runs ? kExitSolverFailures : 0;
    }
  } catch (const secbeam::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == secbeam::ErrorCode::kInvalidConfig ? kExitInvalidConfig
                                                          : kExitSolverFailures;
  }
  return 0;
}
