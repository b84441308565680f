#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "slrgap/harness.hpp"

using namespace slrgap;

namespace {

// Drops the trailing runtime_ms column from every CSV line.
std::string strip_runtime(const std::string& csv) {
  std::istringstream in(csv);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    auto pos = line.rfind(',');
    out << (pos == std::string::npos ? line : line.substr(0, pos)) << '\n';
  }
  return out.str();
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("wilson interval") {
  double lo, hi;
  wilson_interval(50, 100, &lo, &hi);
  CHECK(lo == doctest::Approx(0.404).epsilon(0.01));
  CHECK(hi == doctest::Approx(0.596).epsilon(0.01));
  wilson_interval(100, 100, &lo, &hi);
  CHECK(lo > 0.95);
  CHECK(hi == 1.0);
  wilson_interval(0, 0, &lo, &hi);
  CHECK(lo == 0.0);
  CHECK(hi == 1.0);
  // interval always contains the point estimate
  for (int s : {0, 1, 7, 99, 100}) {
    wilson_interval(s, 100, &lo, &hi);
    CHECK(lo <= s / 100.0 + 1e-12);
    CHECK(hi >= s / 100.0 - 1e-12);
  }
}

TEST_CASE("format_double round trips") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456.789, -0.0}) {
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("csv: header-only when empty, round-trip with one row") {
  ExperimentReport rep;
  CHECK(to_csv(rep) ==
        "trial_index,seed,truth,verdict,stat_left,stat_right,pred_error,sweeps,runtime_ms\n");

  TrialReport row;
  row.trial_index = 3;
  row.seed = 17;
  row.truth = "PxQ";
  row.verdict = "QxP";
  row.stat_left = 1.0 / 3.0;
  row.stat_right = 0.7;
  row.pred_error = 0.001;
  row.sweeps = 12;
  row.runtime_ms = 4.5;
  rep.rows.push_back(row);
  std::string csv = to_csv(rep);
  std::istringstream in(csv);
  std::string header, data;
  std::getline(in, header);
  std::getline(in, data);
  std::istringstream fields(data);
  std::string f;
  std::vector<std::string> parts;
  while (std::getline(fields, f, ',')) parts.push_back(f);
  REQUIRE(parts.size() == 9);
  CHECK(parts[0] == "3");
  CHECK(parts[2] == "PxQ");
  CHECK(parts[3] == "QxP");
  CHECK(std::stod(parts[4]) == row.stat_left);
}

TEST_CASE("aggregate equals recomputation from rows") {
  ExperimentReport rep;
  for (int i = 0; i < 10; ++i) {
    TrialReport r;
    r.trial_index = i;
    r.success = i % 3 == 0;
    rep.rows.push_back(r);
  }
  rep.finalize();
  CHECK(rep.aggregate.trials == 10);
  CHECK(rep.aggregate.success_count == 4);
  CHECK(rep.aggregate.success_rate == doctest::Approx(0.4));
  CHECK(rep.aggregate.wilson_lo <= 0.4);
  CHECK(rep.aggregate.wilson_hi >= 0.4);
}

TEST_CASE("config: unknown keys are rejected") {
  CHECK_THROWS_WITH_AS(parse_config_json(R"({"experiment":"warmup","typo_key":1})"),
                       doctest::Contains("typo_key"), ConfigError);
  CHECK_THROWS_WITH_AS(
      parse_config_json(R"({"experiment":"warmup","params":{"d":5,"kk":2}})"),
      doctest::Contains("kk"), ConfigError);
  CHECK_THROWS_AS(parse_config_json(R"({"experiment":"no-such"})"), ConfigError);
  CHECK_THROWS_AS(parse_config_json("not json"), ConfigError);
  CHECK_THROWS_AS(parse_config_json(R"({"experiment":"warmup","oracle":"magic"})"),
                  ConfigError);
  CHECK_THROWS_AS(
      parse_config_json(R"({"experiment":"warmup","boost":{"delta":0.9}})"), ConfigError);
}

TEST_CASE("config: defaults and theta fallback") {
  ExperimentConfig cfg = parse_config_json(
      R"({"experiment":"pair-distinguish","params":{"d":20,"k":3,"n":50},"trials":4})");
  CHECK(cfg.params.theta == doctest::Approx(0.8));  // (k+1)/(k+2)
  CHECK(cfg.trials == 4);
  CHECK(cfg.oracle == "lasso");
  CHECK(cfg.boost.iterations() == 5);
}

TEST_CASE("single-trial pair-distinguish with the exact oracle") {
  ExperimentConfig cfg = parse_config_json(R"({
    "experiment": "pair-distinguish", "oracle": "exact",
    "params": {"d": 30, "k": 3, "n": 300}, "trials": 1, "master_seed": 5})");
  ExperimentReport rep = run_experiment(cfg);
  REQUIRE(rep.rows.size() == 1);
  CHECK(rep.rows[0].truth == "PxQ");
  CHECK(rep.rows[0].verdict == "PxQ");
  CHECK(rep.aggregate.success_count == 1);
}

TEST_CASE("determinism: identical seeds give identical CSV minus runtime") {
  const std::string config = R"({
    "experiment": "pair-distinguish", "oracle": "exact", "truth": "QxP",
    "params": {"d": 25, "k": 2, "n": 200}, "trials": 8, "master_seed": 77})";
  ExperimentReport a = run_experiment(parse_config_json(config));
  ExperimentReport b = run_experiment(parse_config_json(config));
  CHECK(strip_runtime(to_csv(a)) == strip_runtime(to_csv(b)));
}

TEST_CASE("worker count does not change results") {
  std::string base = R"({
    "experiment": "warmup", "oracle": "exact", "truth": "P",
    "params": {"d": 20, "k": 2, "n": 150}, "trials": 9, "master_seed": 3)";
  ExperimentReport serial = run_experiment(parse_config_json(base + "}"));
  ExperimentReport parallel =
      run_experiment(parse_config_json(base + R"(, "workers": 4})"));
  CHECK(strip_runtime(to_csv(serial)) == strip_runtime(to_csv(parallel)));
  CHECK(serial.aggregate.success_count == parallel.aggregate.success_count);
}

TEST_CASE("concentration bound arithmetic") {
  RngStream rng(71);
  std::vector<ConcentrationRow> rows = concentration_audit({50}, {0.0, 0.4}, 10000, rng);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].bound == 2.0);  // t=0: bound 2 dominates any probability
  CHECK(rows[0].empirical == 1.0);
  CHECK(rows[0].ok);
  CHECK(rows[1].bound == doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-12));
  CHECK(rows[1].empirical <= rows[1].bound);
  CHECK_THROWS_AS(concentration_audit({50}, {0.1}, 100, rng), std::invalid_argument);
}

TEST_CASE("ldlr-grid experiment rows carry the bound values") {
  ExperimentConfig cfg = parse_config_json(
      R"({"experiment":"ldlr-grid","k_grid":[1000],"master_seed":1})");
  ExperimentReport rep = run_experiment(cfg);
  REQUIRE(rep.rows.size() == 1);
  CHECK(rep.rows[0].truth == "k=1000");
  // D = floor(1000^0.1) = 1: empty sums, bound exactly 1
  CHECK(rep.rows[0].stat_left == 1.0);
  CHECK(rep.rows[0].verdict == "pass");
}

TEST_CASE("json report mirrors the aggregate") {
  ExperimentConfig cfg = parse_config_json(R"({
    "experiment": "pair-distinguish", "oracle": "zero",
    "params": {"d": 10, "k": 2, "n": 2000}, "trials": 3, "master_seed": 9})");
  ExperimentReport rep = run_experiment(cfg);
  std::string js = to_json(rep);
  CHECK(js.find("\"aggregate\"") != std::string::npos);
  CHECK(js.find("\"success_rate\"") != std::string::npos);
  CHECK(js.find("\"trials\"") != std::string::npos);
}

}  // TEST_SUITE
