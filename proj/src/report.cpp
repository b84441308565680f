#include "slrgap/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace slrgap {

void ExperimentReport::finalize() {
  aggregate = Aggregate{};
  aggregate.trials = std::int64_t(rows.size());
  for (const auto& r : rows)
    if (r.success) ++aggregate.success_count;
  aggregate.success_rate =
      aggregate.trials > 0 ? double(aggregate.success_count) / double(aggregate.trials) : 0.0;
  wilson_interval(aggregate.success_count, aggregate.trials,
                  &aggregate.wilson_lo, &aggregate.wilson_hi);
}

void wilson_interval(std::int64_t successes, std::int64_t trials, double* lo, double* hi) {
  if (trials <= 0) {
    *lo = 0.0;
    *hi = 1.0;
    return;
  }
  const double z = 1.959963984540054;  // 97.5% normal quantile
  const double n = double(trials);
  const double p = double(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  *lo = std::max(0.0, center - half);
  *hi = std::min(1.0, center + half);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string to_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out << "trial_index,seed,truth,verdict,stat_left,stat_right,pred_error,sweeps,runtime_ms\n";
  for (const auto& r : report.rows) {
    out << r.trial_index << ',' << r.seed << ',' << r.truth << ',' << r.verdict << ','
        << format_double(r.stat_left) << ',' << format_double(r.stat_right) << ','
        << format_double(r.pred_error) << ',' << r.sweeps << ','
        << format_double(r.runtime_ms) << '\n';
  }
  return out.str();
}

std::string to_json(const ExperimentReport& report) {
  nlohmann::ordered_json j;
  j["experiment"] = report.experiment;
  j["master_seed"] = report.master_seed;
  j["aggregate"] = {{"success_count", report.aggregate.success_count},
                    {"trials", report.aggregate.trials},
                    {"success_rate", report.aggregate.success_rate},
                    {"wilson_95", {report.aggregate.wilson_lo, report.aggregate.wilson_hi}}};
  auto& rows = j["trials"] = nlohmann::ordered_json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"trial_index", r.trial_index},
                    {"seed", r.seed},
                    {"truth", r.truth},
                    {"verdict", r.verdict},
                    {"stat_left", r.stat_left},
                    {"stat_right", r.stat_right},
                    {"pred_error", r.pred_error},
                    {"sweeps", r.sweeps},
                    {"runtime_ms", r.runtime_ms},
                    {"success", r.success}});
  }
  return j.dump(2) + "\n";
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << contents;
  if (!f) throw std::runtime_error("write failed: " + path);
}

}  // namespace slrgap
