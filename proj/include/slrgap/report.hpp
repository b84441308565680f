#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace slrgap {

struct TrialReport {
  std::int64_t trial_index = 0;
  std::uint64_t seed = 0;
  std::string truth;    // hypothesis label or "-" when not applicable
  std::string verdict;  // hypothesis label or a numeric outcome tag
  double stat_left = 0.0;
  double stat_right = 0.0;
  double pred_error = -1.0;  // -1 when no truth available
  std::int64_t sweeps = 0;
  double runtime_ms = 0.0;
  bool success = false;
};

struct Aggregate {
  std::int64_t success_count = 0;
  std::int64_t trials = 0;
  double success_rate = 0.0;
  double wilson_lo = 0.0;
  double wilson_hi = 1.0;
};

struct ExperimentReport {
  std::string experiment;
  std::uint64_t master_seed = 0;
  std::vector<TrialReport> rows;
  Aggregate aggregate;

  void finalize();  // recompute aggregate from rows
};

// Wilson 95% score interval for successes/trials.
void wilson_interval(std::int64_t successes, std::int64_t trials,
                     double* lo, double* hi);

std::string format_double(double v);  // 17 significant digits, round-trip safe

std::string to_csv(const ExperimentReport& report);
std::string to_json(const ExperimentReport& report);

void write_file(const std::string& path, const std::string& contents);

}  // namespace slrgap
