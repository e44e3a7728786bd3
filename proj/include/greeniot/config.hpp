#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "greeniot/schedulers.hpp"
#include "greeniot/simulator.hpp"

namespace greeniot {

// Which node classes get effectively unlimited CPU and free computation.
enum class ResourceScenario { kLimited, kGateways, kServers, kBoth };
ResourceScenario parse_scenario(const std::string& s);
const char* scenario_name(ResourceScenario s);

// Channel inputs as configured; the linear parameters derive from them.
struct ChannelSettings {
  double path_loss_db = 30.0;
  double reference_distance = 1.0;
  double path_loss_exponent = 2.5;
  double bandwidth = 200e3;
  double noise_dbm_per_hz = -95.0;
};

struct ExperimentConfig {
  EpisodeConfig episode;
  ChannelSettings channel;
  std::string solar = "table";  // table | prose
  ResourceScenario scenario = ResourceScenario::kLimited;

  std::vector<std::string> schedulers{"milp", "rhcop", "greedy", "gmmpre", "random"};
  int runs = 50;
  std::uint64_t seed = 1;
  int workers = 1;
  bool runtime_mode = false;  // record decision wall time in the raw CSV

  // Sweep: empty axis runs a single point.
  std::string axis;
  std::vector<std::string> values;

  RhcopOptions rhcop;
  int gmmpre_window = 8;
  double random_time_limit_s = 2.0;
  double milp_time_limit_s = 600.0;
  long long milp_binary_cap = 2000;

  void validate() const;
};

// Sectioned `key = value` text; `#` starts a comment. Unknown sections or
// keys are errors.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);
// `section.key` and its value, as in the file.
void apply_setting(ExperimentConfig& config, const std::string& dotted_key,
                   const std::string& value);
void write_config(std::ostream& out, const ExperimentConfig& config);

// Sweep axis name to the setting it drives; throws ConfigError when unknown.
std::string axis_setting(const std::string& axis);

// Channel and solar choices resolved, resource scenario applied.
EpisodeConfig effective_episode(const ExperimentConfig& config);

}  // namespace greeniot
