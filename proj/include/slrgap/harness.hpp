#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "slrgap/ldlr.hpp"
#include "slrgap/model.hpp"
#include "slrgap/reductions.hpp"
#include "slrgap/report.hpp"
#include "slrgap/solvers.hpp"

namespace slrgap {

struct ExperimentConfig {
  // One of: pair-distinguish, negspca-end2end, warmup, lasso-rate,
  // fact21-audit, concentration, ldlr-grid, sq-cert.
  std::string experiment;
  ModelParams params;
  std::string oracle = "lasso";  // lasso | best-subset | exact | zero
  SolverOptions solver_options;
  BoostConfig boost;
  std::int64_t trials = 1;
  std::uint64_t master_seed = 0;
  std::string output_path;  // basename; .csv and .json are appended
  int workers = 1;

  std::string truth = "PxQ";  // planted truth: P/Q for single, PxQ/QxP for pairs
  double threshold = 0.3;     // warm-up acceptance threshold
  double rate_target = 0.015; // prediction-error target for lasso-rate

  // Grids for the audit experiments.
  std::vector<int> n_grid = {50, 200};
  std::vector<double> t_grid = {0.2, 0.4};
  std::vector<std::int64_t> k_grid = {1000, 10000, 100000};
  double delta_exp = 0.1;
  double c_const = kMomentBoundC;
  double norm_bound_limit = 1.1;
};

// Parses a JSON document; unknown keys are rejected (configuration error).
ExperimentConfig parse_config_json(const std::string& json_text);

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Runs the configured experiment with per-trial sub-streams of the master
// seed, up to config.workers trials concurrently, merging rows by index.
ExperimentReport run_experiment(const ExperimentConfig& config);

struct ConcentrationRow {
  int n = 0;
  double t = 0.0;
  std::int64_t trials = 0;
  double empirical = 0.0;
  double bound = 0.0;  // 2 exp(-n t^2 / 8)
  double stderr_bin = 0.0;
  bool ok = false;  // empirical <= bound + 3 stderr
};

std::vector<ConcentrationRow> concentration_audit(const std::vector<int>& n_grid,
                                                  const std::vector<double>& t_grid,
                                                  std::int64_t trials, RngStream& rng);

SlrOracle make_oracle(const ExperimentConfig& config, double sigma2_known);

}  // namespace slrgap
