#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "slrgap/harness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitAudit = 3;

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw slrgap::ConfigError("cannot read config file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct CommonArgs {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out;
  std::int64_t trials = 0;
  int workers = 0;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "JSON config file");
    app->add_option("--seed", seed, "master seed (overrides config)")
        ->each([this](const std::string&) { seed_set = true; });
    app->add_option("--out", out, "output basename (.csv/.json appended)");
    app->add_option("--trials", trials, "trial count (overrides config)");
    app->add_option("--workers", workers, "concurrent trial workers");
  }

  slrgap::ExperimentConfig load(const std::string& default_experiment) const {
    slrgap::ExperimentConfig cfg;
    if (!config_path.empty()) {
      cfg = slrgap::parse_config_json(read_file(config_path));
    } else {
      cfg.experiment = default_experiment;
    }
    if (seed_set) cfg.master_seed = seed;
    if (!out.empty()) cfg.output_path = out;
    if (trials > 0) cfg.trials = trials;
    if (workers > 0) cfg.workers = workers;
    return cfg;
  }
};

int run_report(const slrgap::ExperimentConfig& cfg, bool audit_mode) {
  slrgap::ExperimentReport report = slrgap::run_experiment(cfg);
  std::cout << slrgap::to_csv(report);
  std::cout << "# experiment=" << report.experiment
            << " success=" << report.aggregate.success_count << "/"
            << report.aggregate.trials
            << " rate=" << slrgap::format_double(report.aggregate.success_rate)
            << " wilson95=[" << slrgap::format_double(report.aggregate.wilson_lo) << ","
            << slrgap::format_double(report.aggregate.wilson_hi) << "]\n";
  if (audit_mode && report.aggregate.success_count != report.aggregate.trials)
    return kExitAudit;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"reduction laboratory for sparse regression and spiked covariance models"};
  app.require_subcommand(1);

  CommonArgs sample_args, dist_args, exp_args, conc_args, ldlr_args, sq_args;

  // sample: draw a batch and print it as CSV (smoke-level inspection tool).
  CLI::App* sample = app.add_subcommand("sample", "draw a sample batch and print CSV");
  sample_args.attach(sample);
  std::string sample_label = "P";
  int sample_d = 10, sample_k = 2, sample_n = 5;
  double sample_theta = 0.0;
  sample->add_option("--label", sample_label, "P, Q, PxQ or QxP");
  sample->add_option("-d", sample_d, "ambient dimension");
  sample->add_option("-k", sample_k, "sparsity");
  sample->add_option("-n", sample_n, "rows");
  sample->add_option("--theta", sample_theta, "spike strength (default (k+1)/(k+2))");

  CLI::App* dist = app.add_subcommand("distinguish", "run the paired threshold test");
  dist_args.attach(dist);

  CLI::App* exp = app.add_subcommand("experiment", "run a configured Monte Carlo experiment");
  exp_args.attach(exp);

  CLI::App* conc = app.add_subcommand("concentration", "norm concentration tail audit");
  conc_args.attach(conc);

  CLI::App* ldlr = app.add_subcommand("ldlr", "likelihood-ratio norm bound grid");
  ldlr_args.attach(ldlr);

  CLI::App* sq = app.add_subcommand("sq-cert", "statistical-dimension certificate");
  sq_args.attach(sq);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (sample->parsed()) {
      slrgap::ExperimentConfig cfg = sample_args.load("pair-distinguish");
      slrgap::RngStream rng(cfg.master_seed);
      slrgap::Hypothesis label = slrgap::hypothesis_from_string(sample_label);
      slrgap::ModelParams params{sample_d, sample_k, sample_n,
                                 sample_theta > 0.0
                                     ? sample_theta
                                     : slrgap::ModelParams::default_theta(sample_k),
                                 1.0};
      params.validate();
      slrgap::SampleMatrix m;
      if (label == slrgap::Hypothesis::PxQ || label == slrgap::Hypothesis::QxP) {
        m = slrgap::sample_pair(label, params, rng);
      } else if (label == slrgap::Hypothesis::P) {
        slrgap::SpikeVector spike =
            slrgap::sample_spike(params.d, params.k, true, rng);
        m = slrgap::sample_model(
            slrgap::CovarianceSpec::negative_spike(spike, params.theta), params.n, rng);
      } else {
        m = slrgap::sample_model(slrgap::CovarianceSpec::identity(params.d + 1),
                                 params.n, rng);
      }
      std::ostringstream out;
      for (Eigen::Index r = 0; r < m.data.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.data.cols(); ++c) {
          if (c) out << ',';
          out << slrgap::format_double(m.data(r, c));
        }
        out << '\n';
      }
      if (!cfg.output_path.empty())
        slrgap::write_file(cfg.output_path + ".csv", out.str());
      else
        std::cout << out.str();
      return kExitOk;
    }
    if (dist->parsed()) {
      slrgap::ExperimentConfig cfg = dist_args.load("pair-distinguish");
      cfg.experiment = "pair-distinguish";
      return run_report(cfg, false);
    }
    if (exp->parsed()) {
      if (exp_args.config_path.empty())
        throw slrgap::ConfigError("experiment requires --config");
      return run_report(exp_args.load(""), false);
    }
    if (conc->parsed()) {
      slrgap::ExperimentConfig cfg = conc_args.load("concentration");
      cfg.experiment = "concentration";
      if (conc_args.trials == 0 && cfg.trials < 10000) cfg.trials = 100000;
      return run_report(cfg, true);
    }
    if (ldlr->parsed()) {
      slrgap::ExperimentConfig cfg = ldlr_args.load("ldlr-grid");
      cfg.experiment = "ldlr-grid";
      return run_report(cfg, true);
    }
    if (sq->parsed()) {
      slrgap::ExperimentConfig cfg = sq_args.load("sq-cert");
      cfg.experiment = "sq-cert";
      return run_report(cfg, true);
    }
  } catch (const slrgap::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitConfig;
}
