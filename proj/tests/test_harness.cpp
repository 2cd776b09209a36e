#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>

#include "secbeam/harness.hpp"

using namespace secbeam;

namespace {

std::string csv(const ExperimentConfig& cfg) {
  std::ostringstream os;
  write_results_csv(os, run_sweep(cfg));
  return os.str();
}

const Stats& metric(const std::vector<ResultRecord>& recs, double snr, Method m) {
  for (const auto& r : recs) {
    if (r.snr_db == snr && r.method == m) return r.lb_ssr;
  }
  FAIL("record missing");
  return recs.front().lb_ssr;
}

}  // namespace

TEST_CASE("sample statistics use the unbiased estimator") {
  const Stats s = summarize({1.0, 2.0, 3.0, 4.0});
  CHECK(s.mean == 2.5);
  CHECK(s.stddev == doctest::Approx(std::sqrt(5.0 / 3.0)).epsilon(1e-15));
  CHECK(s.count == 4);
  CHECK(std::isnan(summarize({1.0}).stddev));
  CHECK(summarize({1.0}).mean == 1.0);
  CHECK(std::isnan(summarize({}).mean));
}

TEST_CASE("method names round trip") {
  for (Method m : {Method::kSca, Method::kZf, Method::kSlnr}) {
    CHECK(parse_method(to_string(m)) == m);
  }
  CHECK(!parse_method("mrt").has_value());
}

TEST_CASE("config text and overrides") {
  ExperimentConfig cfg;
  std::string out;
  apply_config_text(cfg,
                    "# sweep\n"
                    "ntx = 8\n"
                    "k=3  # pairs\n"
                    "eps=0.2\n"
                    "snr=0, 10,20\n"
                    "methods=zf,slnr\n"
                    "trials=7\n"
                    "seed=42\n"
                    "out=results.csv\n"
                    "selection=heuristic\n"
                    "theoretical=false\n"
                    "max_iter=30\n",
                    &out);
  CHECK(cfg.n_tx == 8);
  CHECK(cfg.k_pairs == 3);
  CHECK(cfg.eps == 0.2);
  CHECK(cfg.snr_db == std::vector<double>{0.0, 10.0, 20.0});
  CHECK(cfg.methods == std::vector<Method>{Method::kZf, Method::kSlnr});
  CHECK(cfg.trials == 7);
  CHECK(cfg.seed == 42u);
  CHECK(out == "results.csv");
  CHECK(cfg.selection == SelectionMode::kHeuristic);
  CHECK(!cfg.theoretical);
  CHECK(cfg.sca.max_iter == 30);
  CHECK_NOTHROW(cfg.validate());
  apply_config_value(cfg, "trials", "3");
  CHECK(cfg.trials == 3);
  CHECK(cfg.power(10.0) == doctest::Approx(10.0));
}

TEST_CASE("bad config is rejected") {
  ExperimentConfig cfg;
  CHECK_THROWS_AS(apply_config_text(cfg, "nonsense=1\n"), Error);
  CHECK_THROWS_AS(apply_config_text(cfg, "trials=two\n"), Error);
  CHECK_THROWS_AS(apply_config_text(cfg, "no equals sign\n"), Error);
  CHECK_THROWS_AS(apply_config_value(cfg, "methods", "sca,mrt"), Error);
  ExperimentConfig bad;
  bad.trials = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = ExperimentConfig{};
  bad.snr_db.clear();
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = ExperimentConfig{};
  bad.methods.clear();
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("orthonormal fixture gives the symmetric water-filling rate") {
  ExperimentConfig cfg;
  cfg.n_tx = 4;
  cfg.k_pairs = 2;
  cfg.eps = 0.0;
  cfg.methods = {Method::kZf};
  cfg.snr_db = {0.0, 10.0};
  cfg.trials = 3;
  cfg.channel_source = [](int, RngStream&) {
    return ChannelSet::from_vectors({CVector::Unit(4, 0), CVector::Unit(4, 1)},
                                    {CVector::Unit(4, 2), CVector::Unit(4, 3)}, 0.0, {1.0, 1.0},
                                    {1.0, 1.0});
  };
  const auto recs = run_sweep(cfg);
  for (double snr : cfg.snr_db) {
    const double P = std::pow(10.0, snr / 10.0);
    CHECK(metric(recs, snr, Method::kZf).mean ==
          doctest::Approx(2.0 * std::log2(1.0 + P / 2.0)).epsilon(1e-12));
  }
}

TEST_CASE("results are byte identical across runs and thread counts") {
  ExperimentConfig cfg;
  cfg.trials = 1;
  cfg.snr_db = {5.0};
  cfg.seed = 77;
  const std::string a = csv(cfg);
  const std::string b = csv(cfg);
  CHECK(a == b);
  cfg.trials = 3;
  cfg.methods = {Method::kZf, Method::kSlnr};
  const std::string serial = csv(cfg);
  cfg.threads = 3;
  CHECK(csv(cfg) == serial);
}

TEST_CASE("csv layout") {
  ExperimentConfig cfg;
  cfg.trials = 2;
  cfg.snr_db = {0.0};
  cfg.methods = {Method::kSlnr};
  std::istringstream in(csv(cfg));
  std::string line;
  std::getline(in, line);
  CHECK(line == "snr_db,method,metric,mean,stddev,trials,failures");
  std::vector<std::string> metrics;
  while (std::getline(in, line)) {
    CHECK(line.rfind("0,slnr,", 0) == 0);
    const auto a = line.find(',', 7);
    metrics.push_back(line.substr(7, a - 7));
    CHECK(line.substr(line.size() - 4) == ",2,0");
  }
  CHECK(metrics == std::vector<std::string>{"lb_ssr", "practical_ssr", "theoretical_ssr",
                                            "lb_ssr_per_user", "iterations"});
}

TEST_CASE("lower bound grows with power") {
  ExperimentConfig cfg;
  cfg.snr_db = {0.0, 5.0, 10.0};
  cfg.trials = 6;
  cfg.theoretical = false;
  cfg.seed = 5;
  const auto recs = run_sweep(cfg);
  for (Method m : cfg.methods) {
    CHECK(metric(recs, 5.0, m).mean >= metric(recs, 0.0, m).mean);
    CHECK(metric(recs, 10.0, m).mean >= metric(recs, 5.0, m).mean);
  }
}

TEST_CASE("convergence traces and randomization rows") {
  ExperimentConfig cfg;
  cfg.trials = 3;
  cfg.snr_db = {10.0};
  int failures = -1;
  const auto rows = run_convergence(cfg, &failures);
  CHECK(failures == 0);
  REQUIRE(!rows.empty());
  for (std::size_t j = 1; j < rows.size(); ++j) {
    if (rows[j].trial == rows[j - 1].trial) {
      CHECK(rows[j].iter == rows[j - 1].iter + 1);
      CHECK(rows[j].objective_bits >= rows[j - 1].objective_bits - 1e-6);
    }
    CHECK(rows[j].iter <= cfg.sca.max_iter);
  }
  const auto rand = run_rand_effect(cfg, &failures);
  CHECK(rand.size() == 3);
  for (const auto& r : rand) {
    CHECK(r.rand <= r.no_rand + 1e-6);
    CHECK(r.gap == doctest::Approx(r.no_rand - r.rand));
    if (r.rank_one) CHECK(std::abs(r.gap) < 1e-6);
  }
}

TEST_CASE("selftest passes and catches an injected fault") {
  const SelftestReport ok = selftest();
  CHECK(ok.passed());
  SelftestOptions opts;
  opts.corrupt_waterfill = [](PowerAllocation& a) {
    if (!a.power.empty()) a.power[0] *= 1.1;
  };
  const SelftestReport bad = selftest(opts);
  CHECK(!bad.passed());
  for (const auto& c : bad.checks) {
    if (!c.passed) CHECK(c.name == "zf.kkt_certificate");
  }
}
