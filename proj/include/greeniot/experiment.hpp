#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "greeniot/config.hpp"

namespace greeniot {

struct RawRow {
  std::string value;  // sweep point, "-" without a sweep
  std::string scheduler;
  std::uint64_t seed = 0;
  std::optional<double> objective;  // empty when the policy refused the instance
  std::optional<double> runtime_ms;
  long long rejected = 0;
  std::vector<std::string> violations;  // invariant breaches of the episode
  std::string note;
};

struct SummaryRow {
  std::string value;
  std::string scheduler;
  double mean = 0.0;
  double stddev = 0.0;  // sample deviation; 0 below two runs
  int n = 0;
};

// Groups by (value, scheduler) in order of first appearance; rows without an
// objective are left out.
std::vector<SummaryRow> aggregate(const std::vector<RawRow>& rows);

// Seed of run k; identical across sweep points and policies.
std::uint64_t episode_seed(std::uint64_t master, int run);

struct ExperimentResult {
  std::vector<RawRow> raw;
  std::vector<SummaryRow> summary;
};

using ProgressFn = std::function<void(const RawRow&)>;

ExperimentResult run_experiment(const ExperimentConfig& config, const ProgressFn& progress = {});

void write_raw_csv(std::ostream& out, const std::vector<RawRow>& rows, bool with_runtime);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);
// Writes raw.csv and summary.csv under `dir`, creating it if needed.
void write_results(const std::string& dir, const ExperimentResult& result, bool with_runtime);

}  // namespace greeniot
