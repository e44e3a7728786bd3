#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "greeniot/energy.hpp"
#include "greeniot/schedulers.hpp"
#include "greeniot/substrate.hpp"
#include "greeniot/workload.hpp"

namespace greeniot {

// Resource state a decision is checked against: levels after this slot's
// harvest has been stored.
struct SlotState {
  const SubstrateNetwork* network = nullptr;
  const std::vector<DagRequest>* requests = nullptr;
  std::vector<double> stored;
  std::vector<double> gains;
  double sense_energy_per_bit = 150e-9;
};

struct Violation {
  std::string tag;  // constraint family name
  std::string detail;
};

std::vector<Violation> validate_decision(const SlotState& state, const ScheduleDecision& decision);
// Energy each node spends this slot under the decision (no feasibility checks).
std::vector<double> decision_drains(const SlotState& state, const ScheduleDecision& decision);

int aos_update(int previous_age, bool served);
// max over requests of the time-average age; 0 without requests.
double minmax_objective(const std::vector<std::vector<int>>& ages);

// Every random quantity of an episode, drawn up front from the seed so that
// all policies face the same weather, arrivals and fading.
struct Realization {
  std::vector<std::vector<int>> weather;        // [slot][node]
  std::vector<std::vector<double>> arrivals;    // [slot][node], joules
  std::vector<std::vector<double>> gains;       // [slot][device]
  std::vector<std::vector<double>> history_arrivals;
  std::vector<std::vector<double>> history_gains;
};

struct EpisodeConfig {
  TopologyConfig topology;
  WorkloadConfig workload;
  SolarParams solar = SolarParams::table_defaults();
  bool shared_weather = false;
  int horizon = 12;
  int history = 500;
  double initial_battery_fraction = 0.4;
  double sense_energy_per_bit = 150e-9;
};

struct Scenario {
  SubstrateNetwork network;
  std::vector<DagRequest> requests;
  Realization realization;
  std::vector<double> initial_levels;
  int horizon = 0;
  double sense_energy_per_bit = 150e-9;
  std::uint64_t seed = 0;
};

Scenario make_scenario(const EpisodeConfig& config, std::uint64_t seed);
Realization draw_realization(const SubstrateNetwork& net, const SolarParams& solar,
                             bool shared_weather, int horizon, int history, std::uint64_t seed);
InstanceSnapshot offline_snapshot(const Scenario& scenario);

struct EpisodeResult {
  std::uint64_t seed = 0;
  std::string scheduler;
  std::vector<std::vector<int>> ages;     // [request][slot]
  std::vector<std::vector<char>> served;  // [request][slot]
  std::vector<double> average_age;        // per request
  double objective = 0.0;
  std::vector<std::vector<double>> levels;  // [slot][node], end of slot
  std::vector<std::vector<double>> stored;  // [slot][node], w
  std::vector<std::vector<double>> drains;  // [slot][node]
  std::vector<double> initial_levels;
  long long rejected_decisions = 0;
  std::vector<std::string> log;
  SchedulerStats scheduler_stats;
  double decide_ms = 0.0;

  // Battery bounds, energy conservation and age replay; empty when clean.
  std::vector<std::string> invariant_violations(const Scenario& scenario) const;
};

EpisodeResult run_episode(const Scenario& scenario, Scheduler& scheduler);

// One row per request and slot, then a summary line.
void write_episode_csv(std::ostream& out, const EpisodeResult& result);

}  // namespace greeniot
