#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "greeniot/forecast.hpp"
#include "greeniot/milp.hpp"
#include "greeniot/rng.hpp"
#include "greeniot/solvers.hpp"

namespace greeniot {

class SubstrateNetwork;
struct DagRequest;

// One slot's choices. Routing follows from the hosts: every edge runs from its
// collector's gateway to its processor's server.
struct ScheduleDecision {
  std::vector<int> uploader;                    // per gateway: device or -1
  std::vector<char> served;                     // per request
  std::vector<std::vector<char>> collector_on;  // [request][collector]
  std::vector<std::vector<int>> processor_at;   // [request][processor]: server or -1

  static ScheduleDecision empty(const SubstrateNetwork& net, const std::vector<DagRequest>& reqs);
};

// What a causal policy may see at slot t.
struct Observation {
  int slot = 0;
  int horizon = 0;
  std::vector<double> levels;       // per node, end of the previous slot
  std::vector<double> arrivals;     // per node, harvested this slot
  std::vector<double> stored;       // per node, level after storing this slot's arrival
  std::vector<double> gains;        // per device, this slot
  std::vector<int> ages;            // per request, end of the previous slot
  std::vector<double> age_sums;     // per request, ages accrued before this slot
  const SubstrateNetwork* network = nullptr;
  const std::vector<DagRequest>* requests = nullptr;
  double sense_energy_per_bit = 150e-9;
};

// Data available before the first slot. The realized future is only filled
// for the non-causal offline benchmark.
struct EpisodeContext {
  const SubstrateNetwork* network = nullptr;
  const std::vector<DagRequest>* requests = nullptr;
  int horizon = 0;
  double sense_energy_per_bit = 150e-9;
  std::vector<std::vector<double>> history_arrivals;  // [slot][node]
  std::vector<std::vector<double>> history_gains;     // [slot][device]
  std::vector<double> initial_levels;
  const std::vector<std::vector<double>>* future_arrivals = nullptr;  // [slot][node]
  const std::vector<std::vector<double>>* future_gains = nullptr;     // [slot][device]
  std::uint64_t seed = 0;
};

struct SchedulerStats {
  long long decisions = 0;
  long long fallbacks = 0;  // receding-horizon solves that fell back to greedy
  long long timeouts = 0;   // solves stopped by their time limit
  long long vetoes = 0;     // forecast-based choices rejected against true levels
  std::vector<std::string> log;
};

class Scheduler {
 public:
  virtual ~Scheduler() = default;
  virtual std::string name() const = 0;
  virtual void begin_episode(const EpisodeContext& ctx) { (void)ctx; }
  virtual ScheduleDecision decide(const Observation& obs) = 0;
  const SchedulerStats& stats() const { return stats_; }

 protected:
  SchedulerStats stats_;
};

// Greedy embedding on the current slot. `levels` are the energy levels the
// feasibility checks use; the plain policy passes the stored levels.
ScheduleDecision greedy_step(const Observation& obs, const std::vector<double>& levels);
ScheduleDecision greedy_step(const Observation& obs);

// Forecast-level greedy: the checks see each node's mean forecast arrival
// instead of its battery; each request is then re-validated on true levels.
ScheduleDecision gmmpre_step(const Observation& obs, const std::vector<double>& forecast_levels,
                             long long* vetoes = nullptr);

// Decision for window slot `t` of a solved model.
ScheduleDecision decision_from_solution(const MilpModel& model, const InstanceSnapshot& snap,
                                        const std::vector<double>& values, int t);

struct RhcopOptions {
  int window = 8;
  double time_limit_s = 2.0;
  int gmm_components = 4;
  std::string external_command;  // solve through an LP solver when set
};

// Snapshot over slots t..t+K-1: realized current slot, forecasts afterwards.
InstanceSnapshot rhcop_snapshot(const Observation& obs, const std::vector<Gmm>& arrival_models,
                                const std::vector<Gmm>& gain_models, int window);

class GreedyScheduler : public Scheduler {
 public:
  std::string name() const override { return "greedy"; }
  ScheduleDecision decide(const Observation& obs) override;
};

class GmmPreScheduler : public Scheduler {
 public:
  explicit GmmPreScheduler(int window = 8, int components = 4)
      : window_(window), components_(components) {}
  std::string name() const override { return "gmmpre"; }
  void begin_episode(const EpisodeContext& ctx) override;
  ScheduleDecision decide(const Observation& obs) override;

 private:
  int window_, components_;
  std::vector<double> forecast_levels_;
};

class RhcopScheduler : public Scheduler {
 public:
  explicit RhcopScheduler(RhcopOptions opt = {}) : opt_(std::move(opt)) {}
  std::string name() const override { return "rhcop"; }
  void begin_episode(const EpisodeContext& ctx) override;
  ScheduleDecision decide(const Observation& obs) override;

 private:
  RhcopOptions opt_;
  std::vector<Gmm> arrival_models_;
  std::vector<Gmm> gain_models_;
};

class RandomScheduler : public Scheduler {
 public:
  explicit RandomScheduler(double time_limit_s = 2.0) : time_limit_s_(time_limit_s) {}
  std::string name() const override { return "random"; }
  void begin_episode(const EpisodeContext& ctx) override;
  ScheduleDecision decide(const Observation& obs) override;

 private:
  double time_limit_s_;
  Rng rng_;
};

// Non-causal benchmark: solves the whole horizon on realized data once, then
// replays the schedule.
class OfflineMilpScheduler : public Scheduler {
 public:
  OfflineMilpScheduler(double time_limit_s = 600.0, long long variable_cap = 2000,
                       std::string external_command = {})
      : time_limit_s_(time_limit_s), cap_(variable_cap), external_(std::move(external_command)) {}
  std::string name() const override { return "milp"; }
  void begin_episode(const EpisodeContext& ctx) override;
  ScheduleDecision decide(const Observation& obs) override;
  const Solution& solution() const { return solution_; }

 private:
  double time_limit_s_;
  long long cap_;
  std::string external_;
  InstanceSnapshot snap_;
  MilpModel model_;
  Solution solution_;
};

std::unique_ptr<Scheduler> make_scheduler(const std::string& name, const RhcopOptions& rhcop,
                                          int gmmpre_window, double random_time_limit_s,
                                          double milp_time_limit_s, long long milp_variable_cap);

}  // namespace greeniot
