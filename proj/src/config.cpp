#include "greeniot/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>

#include "greeniot/errors.hpp"

namespace greeniot {

ResourceScenario parse_scenario(const std::string& s) {
  if (s == "limited" || s == "none") return ResourceScenario::kLimited;
  if (s == "gateways") return ResourceScenario::kGateways;
  if (s == "servers") return ResourceScenario::kServers;
  if (s == "both") return ResourceScenario::kBoth;
  throw ConfigError("unknown resource scenario '" + s + "'");
}

const char* scenario_name(ResourceScenario s) {
  switch (s) {
    case ResourceScenario::kLimited: return "limited";
    case ResourceScenario::kGateways: return "gateways";
    case ResourceScenario::kServers: return "servers";
    case ResourceScenario::kBoth: return "both";
  }
  return "?";
}

namespace {

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
  while (std::getline(ss, item, ','))
    if (auto t = trim(item); !t.empty()) out.push_back(t);
  return out;
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
  return s;
}

double to_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  const char* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || p != end) throw ConfigError(key + ": not a number: '" + v + "'");
  return x;
}

long long to_int(const std::string& key, const std::string& v) {
  long long x = 0;
  const char* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || p != end) throw ConfigError(key + ": not an integer: '" + v + "'");
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": not a boolean: '" + v + "'");
}

// "a:b" is a collector:processor ratio; a plain number is the collector share.
double to_ratio(const std::string& key, const std::string& v) {
  const auto colon = v.find(':');
  if (colon == std::string::npos) return to_double(key, v);
  const double a = to_double(key, v.substr(0, colon));
  const double b = to_double(key, v.substr(colon + 1));
  if (!(a > 0.0 && b > 0.0)) throw ConfigError(key + ": ratio parts must be positive");
  return a / (a + b);
}

std::string num(double x) {
  std::ostringstream o;
  o.precision(17);
  o << x;
  return o.str();
}

struct Setting {
  const char* key;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

#define DBL(k, field)                                                             \
  Setting {                                                                       \
    k, [](ExperimentConfig& c, const std::string& v) { c.field = to_double(k, v); }, \
        [](const ExperimentConfig& c) { return num(c.field); }                    \
  }
#define INT(k, field)                                                                   \
  Setting {                                                                             \
    k, [](ExperimentConfig& c, const std::string& v) { c.field = to_int(k, v); },       \
        [](const ExperimentConfig& c) { return std::to_string(c.field); }               \
  }
#define BOOL(k, field)                                                                 \
  Setting {                                                                            \
    k, [](ExperimentConfig& c, const std::string& v) { c.field = to_bool(k, v); },     \
        [](const ExperimentConfig& c) { return std::string(c.field ? "true" : "false"); } \
  }

const std::vector<Setting>& registry() {
  static const std::vector<Setting> r = {
      INT("topology.gateways", episode.topology.gateways),
      INT("topology.servers", episode.topology.servers),
      INT("topology.devices_per_gateway", episode.topology.devices_per_gateway),
      DBL("topology.area_side", episode.topology.area_side),
      DBL("topology.device_radius", episode.topology.device_radius),
      DBL("topology.min_device_distance", episode.topology.min_device_distance),
      DBL("topology.device_battery", episode.topology.device_caps.battery_capacity),
      DBL("topology.device_panel", episode.topology.device_caps.panel_side),
      DBL("topology.gateway_battery", episode.topology.gateway_caps.battery_capacity),
      DBL("topology.server_battery", episode.topology.server_caps.battery_capacity),
      DBL("topology.gateway_cpu", episode.topology.gateway_caps.cpu_capacity),
      DBL("topology.server_cpu", episode.topology.server_caps.cpu_capacity),
      Setting{"topology.base_power",
              [](ExperimentConfig& c, const std::string& v) {
                c.episode.topology.gateway_caps.base_power = c.episode.topology.server_caps.base_power =
                    to_double("topology.base_power", v);
              },
              [](const ExperimentConfig& c) { return num(c.episode.topology.gateway_caps.base_power); }},
      Setting{"topology.peak_power",
              [](ExperimentConfig& c, const std::string& v) {
                c.episode.topology.gateway_caps.peak_power = c.episode.topology.server_caps.peak_power =
                    to_double("topology.peak_power", v);
              },
              [](const ExperimentConfig& c) { return num(c.episode.topology.gateway_caps.peak_power); }},
      // Panel side of gateways and servers.
      Setting{"topology.panel_side",
              [](ExperimentConfig& c, const std::string& v) {
                c.episode.topology.gateway_caps.panel_side = c.episode.topology.server_caps.panel_side =
                    to_double("topology.panel_side", v);
              },
              [](const ExperimentConfig& c) { return num(c.episode.topology.gateway_caps.panel_side); }},
      Setting{"topology.panel_efficiency",
              [](ExperimentConfig& c, const std::string& v) {
                const double e = to_double("topology.panel_efficiency", v);
                c.episode.topology.device_caps.panel_efficiency = e;
                c.episode.topology.gateway_caps.panel_efficiency = e;
                c.episode.topology.server_caps.panel_efficiency = e;
              },
              [](const ExperimentConfig& c) {
                return num(c.episode.topology.device_caps.panel_efficiency);
              }},
      DBL("topology.link_capacity", episode.topology.link_capacity),
      DBL("channel.path_loss_db", channel.path_loss_db),
      DBL("channel.reference_distance", channel.reference_distance),
      DBL("channel.path_loss_exponent", channel.path_loss_exponent),
      DBL("channel.bandwidth", channel.bandwidth),
      DBL("channel.noise_dbm_per_hz", channel.noise_dbm_per_hz),
      INT("workload.requests", episode.workload.requests),
      INT("workload.vnf_count", episode.workload.vnf_count),
      Setting{"workload.collector_ratio",
              [](ExperimentConfig& c, const std::string& v) {
                c.episode.workload.collector_ratio = to_ratio("workload.collector_ratio", v);
              },
              [](const ExperimentConfig& c) { return num(c.episode.workload.collector_ratio); }},
      DBL("workload.demand_min", episode.workload.demand_min),
      DBL("workload.demand_max", episode.workload.demand_max),
      DBL("workload.edge_probability", episode.workload.edge_probability),
      DBL("workload.bandwidth_min", episode.workload.bandwidth_min),
      DBL("workload.bandwidth_max", episode.workload.bandwidth_max),
      DBL("workload.rate", episode.workload.rate),
      BOOL("workload.reattach_dangling", episode.workload.reattach_dangling),
      Setting{"energy.solar",
              [](ExperimentConfig& c, const std::string& v) {
                if (v != "table" && v != "prose")
                  throw ConfigError("energy.solar: expected table or prose, got '" + v + "'");
                c.solar = v;
              },
              [](const ExperimentConfig& c) { return c.solar; }},
      BOOL("energy.shared_weather", episode.shared_weather),
      INT("energy.horizon", episode.horizon),
      INT("energy.history", episode.history),
      DBL("energy.initial_battery_fraction", episode.initial_battery_fraction),
      DBL("energy.sense_energy_per_bit", episode.sense_energy_per_bit),
      Setting{"energy.scenario",
              [](ExperimentConfig& c, const std::string& v) { c.scenario = parse_scenario(v); },
              [](const ExperimentConfig& c) { return std::string(scenario_name(c.scenario)); }},
      Setting{"experiment.schedulers",
              [](ExperimentConfig& c, const std::string& v) { c.schedulers = split_list(v); },
              [](const ExperimentConfig& c) { return join(c.schedulers); }},
      INT("experiment.runs", runs),
      Setting{"experiment.seed",
              [](ExperimentConfig& c, const std::string& v) {
                c.seed = static_cast<std::uint64_t>(to_int("experiment.seed", v));
              },
              [](const ExperimentConfig& c) { return std::to_string(c.seed); }},
      INT("experiment.workers", workers),
      BOOL("experiment.runtime_mode", runtime_mode),
      Setting{"experiment.axis", [](ExperimentConfig& c, const std::string& v) { c.axis = v; },
              [](const ExperimentConfig& c) { return c.axis; }},
      Setting{"experiment.values",
              [](ExperimentConfig& c, const std::string& v) { c.values = split_list(v); },
              [](const ExperimentConfig& c) { return join(c.values); }},
      INT("solver.window", rhcop.window),
      DBL("solver.rhcop_time_limit", rhcop.time_limit_s),
      INT("solver.gmm_components", rhcop.gmm_components),
      Setting{"solver.external_command",
              [](ExperimentConfig& c, const std::string& v) { c.rhcop.external_command = v; },
              [](const ExperimentConfig& c) { return c.rhcop.external_command; }},
      INT("solver.gmmpre_window", gmmpre_window),
      DBL("solver.random_time_limit", random_time_limit_s),
      DBL("solver.milp_time_limit", milp_time_limit_s),
      INT("solver.milp_binary_cap", milp_binary_cap),
  };
  return r;
}

#undef DBL
#undef INT
#undef BOOL

}  // namespace

void apply_setting(ExperimentConfig& c, const std::string& key, const std::string& value) {
  for (const auto& s : registry())
    if (key == s.key) {
      s.set(c, trim(value));
      return;
    }
  throw ConfigError("unknown setting '" + key + "'");
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig c;
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      static const char* known[] = {"topology", "channel", "workload", "energy", "experiment",
                                    "solver"};
      if (std::find(std::begin(known), std::end(known), section) == std::end(known))
        throw ConfigError(where + "unknown section '" + section + "'");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
    if (section.empty()) throw ConfigError(where + "setting outside a section");
    try {
      apply_setting(c, section + "." + trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file " + path);
  return parse_config(f);
}

void write_config(std::ostream& out, const ExperimentConfig& c) {
  std::string section;
  bool first = true;
  for (const auto& s : registry()) {
    const std::string key = s.key;
    const auto dot = key.find('.');
    if (key.substr(0, dot) != section) {
      section = key.substr(0, dot);
      out << (first ? "[" : "\n[") << section << "]\n";
      first = false;
    }
    out << key.substr(dot + 1) << " = " << s.get(c) << '\n';
  }
}

std::string axis_setting(const std::string& axis) {
  static const std::pair<const char*, const char*> axes[] = {
      {"gateways", "topology.gateways"},     {"servers", "topology.servers"},
      {"devices", "topology.devices_per_gateway"}, {"requests", "workload.requests"},
      {"window", "solver.window"},           {"panel", "topology.panel_side"},
      {"ratio", "workload.collector_ratio"}, {"scenario", "energy.scenario"},
      {"vnfs", "workload.vnf_count"},
  };
  for (const auto& [name, key] : axes)
    if (axis == name) return key;
  throw ConfigError("unknown sweep axis '" + axis + "'");
}

void ExperimentConfig::validate() const {
  if (runs < 1) throw ConfigError("runs must be at least 1");
  if (workers < 1) throw ConfigError("workers must be at least 1");
  if (schedulers.empty()) throw ConfigError("no schedulers selected");
  for (const auto& s : schedulers)
    if (s != "milp" && s != "rhcop" && s != "greedy" && s != "gmmpre" && s != "random")
      throw ConfigError("unknown scheduler '" + s + "'");
  if (!axis.empty()) {
    axis_setting(axis);
    if (values.empty()) throw ConfigError("sweep axis given without values");
  } else if (!values.empty()) {
    throw ConfigError("sweep values given without an axis");
  }
  if (episode.horizon < 1) throw ConfigError("horizon must be at least one slot");
  if (episode.history < 0) throw ConfigError("history must be non-negative");
  if (rhcop.window < 1 || gmmpre_window < 1) throw ConfigError("windows must be at least one slot");
  if (rhcop.gmm_components < 1) throw ConfigError("mixture needs at least one component");
  if (!(rhcop.time_limit_s > 0.0 && random_time_limit_s > 0.0 && milp_time_limit_s > 0.0))
    throw ConfigError("time limits must be positive");
  if (milp_binary_cap < 1) throw ConfigError("binary cap must be positive");
  if (episode.topology.gateways < 1 || episode.topology.servers < 1 ||
      episode.topology.devices_per_gateway < 1)
    throw ConfigError("need at least one gateway, server and device per gateway");
  episode.workload.validate();
  effective_episode(*this).topology.gateway_caps.validate();
  effective_episode(*this).topology.server_caps.validate();
  episode.topology.device_caps.validate();
}

EpisodeConfig effective_episode(const ExperimentConfig& c) {
  EpisodeConfig e = c.episode;
  e.solar = c.solar == "prose" ? SolarParams::prose_defaults() : SolarParams::table_defaults();
  e.topology.channel = ChannelParams::from_db(c.channel.path_loss_db, c.channel.reference_distance,
                                              c.channel.path_loss_exponent, c.channel.bandwidth,
                                              c.channel.noise_dbm_per_hz);
  // Unlimited: CPU never binds and computation costs no energy.
  auto unlimit = [](NodeCapacities& caps) {
    caps.cpu_capacity = 1e12;
    caps.peak_power = caps.base_power;
  };
  if (c.scenario == ResourceScenario::kGateways || c.scenario == ResourceScenario::kBoth)
    unlimit(e.topology.gateway_caps);
  if (c.scenario == ResourceScenario::kServers || c.scenario == ResourceScenario::kBoth)
    unlimit(e.topology.server_caps);
  return e;
}

}  // namespace greeniot
