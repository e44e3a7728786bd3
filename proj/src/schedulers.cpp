#include "greeniot/schedulers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>

#include "greeniot/errors.hpp"
#include "greeniot/substrate.hpp"
#include "greeniot/workload.hpp"

namespace greeniot {

ScheduleDecision ScheduleDecision::empty(const SubstrateNetwork& net,
                                         const std::vector<DagRequest>& reqs) {
  ScheduleDecision d;
  d.uploader.assign(net.gateway_count(), -1);
  d.served.assign(reqs.size(), 0);
  for (const auto& dag : reqs) {
    d.collector_on.emplace_back(dag.collectors.size(), 0);
    d.processor_at.emplace_back(dag.processors.size(), -1);
  }
  return d;
}

namespace {

// Remaining resources while a slot's decision is assembled.
struct Ledger {
  std::vector<double> energy;  // per node
  std::vector<double> gcpu, scpu, sink_bw;
  std::vector<std::vector<double>> gs_bw;  // [gateway][server]
  std::vector<int> uploader;
};

// Choices made for one request: the device that starts uploading at each
// gateway that had none, and the server of every processor.
struct Plan {
  std::vector<std::pair<int, int>> new_uploaders;  // (gateway, device)
  std::vector<int> server;
};

class GreedyCore {
 public:
  explicit GreedyCore(const Observation& obs)
      : obs_(obs),
        net_(*obs.network),
        reqs_(*obs.requests),
        rates_(gateway_upload_rates(net_, reqs_)),
        kg_(net_.gateway_caps.drain_per_megacycle()),
        ks_(net_.server_caps.drain_per_megacycle()) {}

  Ledger fresh(const std::vector<double>& levels) const {
    Ledger l;
    l.energy = levels;
    l.gcpu.assign(net_.gateway_count(), net_.gateway_caps.cpu_capacity);
    l.scpu.assign(net_.server_count(), net_.server_caps.cpu_capacity);
    l.sink_bw.assign(net_.server_count(), net_.link_capacity);
    l.gs_bw.assign(net_.gateway_count(), std::vector<double>(net_.server_count(), 0.0));
    for (const auto& [i, s] : net_.gateway_server_links) l.gs_bw[i][s] = net_.link_capacity;
    l.uploader.assign(net_.gateway_count(), -1);
    return l;
  }

  double upload_cost(int d) const {
    const double rate = rates_[net_.devices[d].gateway];
    if (rate == 0.0) return 0.0;
    const double gain = obs_.gains[d];
    if (!(gain > 0.0)) return std::numeric_limits<double>::infinity();
    return required_tx_power(net_.channel, rate, gain) + obs_.sense_energy_per_bit * rate;
  }

  // Reserves request r on `l`. With `forced`, the plan's choices are checked
  // instead of searched. Leaves `l` untouched on failure.
  std::optional<Plan> embed(Ledger& l, int r, const Plan* forced) const {
    Ledger t = l;
    Plan plan;
    const auto& dag = reqs_[r];

    std::map<int, double> gw_demand;
    for (const auto& c : dag.collectors) gw_demand[c.gateway] += c.demand;
    for (const auto& [i, demand] : gw_demand) {
      const int gn = net_.gateway_node(i);
      if (t.gcpu[i] + 1e-9 < demand || t.energy[gn] + 1e-9 < demand * kg_) return std::nullopt;
      t.gcpu[i] -= demand;
      t.energy[gn] -= demand * kg_;
      if (t.uploader[i] >= 0) continue;
      int best = -1;
      if (forced) {
        for (const auto& [g, d] : forced->new_uploaders)
          if (g == i) best = d;
        if (best < 0 || !(upload_cost(best) <= t.energy[best] + 1e-12)) return std::nullopt;
      } else {
        for (int d : net_.gateways[i].devices) {
          const double c = upload_cost(d);
          if (!std::isfinite(c) || c > t.energy[d] + 1e-12) continue;
          if (best < 0 || t.energy[d] > t.energy[best]) best = d;
        }
        if (best < 0) return std::nullopt;
      }
      t.energy[best] = std::max(0.0, t.energy[best] - upload_cost(best));
      t.uploader[i] = best;
      plan.new_uploaders.emplace_back(i, best);
    }

    const int S = static_cast<int>(net_.server_count());
    for (int v = 0; v < static_cast<int>(dag.processors.size()); ++v) {
      const auto& p = dag.processors[v];
      std::map<int, double> inbound;  // gateway -> bandwidth
      for (const auto& e : dag.edges)
        if (e.processor == v) inbound[dag.collectors[e.collector].gateway] += e.bandwidth;
      auto fits = [&](int s) {
        if (t.scpu[s] + 1e-9 < p.demand) return false;
        if (t.energy[net_.server_node(s)] + 1e-9 < p.demand * ks_) return false;
        if (t.sink_bw[s] + 1e-9 < p.sink_bandwidth) return false;
        for (const auto& [i, bw] : inbound)
          if (!net_.has_gateway_server_link(i, s) || t.gs_bw[i][s] + 1e-9 < bw) return false;
        return true;
      };
      int chosen = -1;
      if (forced) {
        chosen = forced->server.at(v);
        if (!fits(chosen)) return std::nullopt;
      } else {
        for (int s = 0; s < S && chosen < 0; ++s)
          if (fits(s)) chosen = s;
        if (chosen < 0) return std::nullopt;
      }
      t.scpu[chosen] -= p.demand;
      t.energy[net_.server_node(chosen)] -= p.demand * ks_;
      t.sink_bw[chosen] -= p.sink_bandwidth;
      for (const auto& [i, bw] : inbound) t.gs_bw[i][chosen] -= bw;
      plan.server.push_back(chosen);
    }
    l = std::move(t);
    return plan;
  }

  void record(ScheduleDecision& d, int r, const Plan& plan) const {
    for (const auto& [i, dev] : plan.new_uploaders) d.uploader[i] = dev;
    d.served[r] = 1;
    std::fill(d.collector_on[r].begin(), d.collector_on[r].end(), 1);
    for (std::size_t v = 0; v < plan.server.size(); ++v) d.processor_at[r][v] = plan.server[v];
  }

  // Oldest first, request index breaking ties.
  std::vector<int> order() const {
    std::vector<int> idx(reqs_.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
      return obs_.ages.at(a) > obs_.ages.at(b);
    });
    return idx;
  }

  ScheduleDecision empty() const { return ScheduleDecision::empty(net_, reqs_); }

 private:
  const Observation& obs_;
  const SubstrateNetwork& net_;
  const std::vector<DagRequest>& reqs_;
  std::vector<double> rates_;
  double kg_, ks_;
};

void check_observation(const Observation& obs) {
  if (!obs.network || !obs.requests) throw DomainError("observation lacks network or requests");
  if (obs.stored.size() != obs.network->node_count())
    throw DomainError("observation levels do not cover every node");
  if (obs.gains.size() != obs.network->device_count())
    throw DomainError("observation gains do not cover every device");
  if (obs.ages.size() != obs.requests->size())
    throw DomainError("observation ages do not cover every request");
}

std::vector<double> column(const std::vector<std::vector<double>>& rows, std::size_t k) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(row.at(k));
  return out;
}

Gmm fit_or_point(const std::vector<double>& xs, int components) {
  if (xs.empty()) return Gmm{{{1.0, 0.0, 1.0}}};
  GmmFitOptions opt;
  opt.components = std::min<int>(components, static_cast<int>(xs.size()));
  return fit_gmm(xs, opt);
}

InstanceSnapshot current_slot_snapshot(const Observation& obs) {
  InstanceSnapshot snap;
  snap.network = obs.network;
  snap.requests = obs.requests;
  snap.horizon = 1;
  snap.arrivals = {obs.arrivals};
  snap.gains = {obs.gains};
  snap.initial_levels = obs.levels;
  snap.initial_ages = obs.ages;
  snap.sense_energy_per_bit = obs.sense_energy_per_bit;
  return snap;
}

}  // namespace

ScheduleDecision greedy_step(const Observation& obs, const std::vector<double>& levels) {
  check_observation(obs);
  GreedyCore core(obs);
  Ledger ledger = core.fresh(levels);
  ScheduleDecision d = core.empty();
  for (int r : core.order())
    if (auto plan = core.embed(ledger, r, nullptr)) core.record(d, r, *plan);
  return d;
}

ScheduleDecision greedy_step(const Observation& obs) { return greedy_step(obs, obs.stored); }

ScheduleDecision gmmpre_step(const Observation& obs, const std::vector<double>& forecast_levels,
                             long long* vetoes) {
  check_observation(obs);
  if (forecast_levels.size() != obs.stored.size())
    throw DomainError("forecast levels do not cover every node");
  GreedyCore core(obs);
  Ledger guess = core.fresh(forecast_levels);
  Ledger truth = core.fresh(obs.stored);
  ScheduleDecision d = core.empty();
  for (int r : core.order()) {
    Ledger trial = guess;
    auto plan = core.embed(trial, r, nullptr);
    if (!plan) continue;
    if (!core.embed(truth, r, &*plan)) {
      if (vetoes) ++*vetoes;
      continue;
    }
    guess = std::move(trial);
    core.record(d, r, *plan);
  }
  return d;
}

ScheduleDecision decision_from_solution(const MilpModel& model, const InstanceSnapshot& snap,
                                        const std::vector<double>& values, int t) {
  const auto& net = *snap.network;
  const auto& reqs = *snap.requests;
  const ModelLayout& L = model.layout;
  if (t < 0 || t >= L.horizon()) throw DomainError("slot outside the solved window");
  auto on = [&](int idx) { return values.at(idx) > 0.5; };
  ScheduleDecision d = ScheduleDecision::empty(net, reqs);
  for (int d_ = 0; d_ < static_cast<int>(net.device_count()); ++d_)
    if (on(L.phi(t, d_))) d.uploader[net.devices[d_].gateway] = d_;
  for (int r = 0; r < static_cast<int>(reqs.size()); ++r) {
    d.served[r] = on(L.z(t, r));
    for (int u = 0; u < static_cast<int>(reqs[r].collectors.size()); ++u)
      d.collector_on[r][u] = on(L.x(t, r, u, reqs[r].collectors[u].gateway));
    for (int v = 0; v < static_cast<int>(reqs[r].processors.size()); ++v)
      for (int s = 0; s < static_cast<int>(net.server_count()); ++s)
        if (on(L.y(t, r, v, s))) d.processor_at[r][v] = s;
  }
  return d;
}

InstanceSnapshot rhcop_snapshot(const Observation& obs, const std::vector<Gmm>& arrival_models,
                                const std::vector<Gmm>& gain_models, int window) {
  check_observation(obs);
  if (window < 1) throw DomainError("window must be at least one slot");
  const int K = std::max(1, std::min(window, obs.horizon - obs.slot));
  InstanceSnapshot snap = current_slot_snapshot(obs);
  snap.horizon = K;
  // Score the window on the whole episode's average so that past ages count.
  snap.past_age_sums = obs.age_sums;
  snap.objective_slots = std::max(obs.horizon, K);
  const std::size_t V = obs.network->node_count(), D = obs.network->device_count();
  std::vector<double> arr(V), gain(D);
  for (std::size_t n = 0; n < V; ++n)
    arr[n] = n < arrival_models.size() ? std::max(0.0, predict_mean(arrival_models[n]))
                                       : obs.arrivals[n];
  for (std::size_t d = 0; d < D; ++d)
    gain[d] = d < gain_models.size() ? std::max(0.0, predict_mean(gain_models[d])) : obs.gains[d];
  for (int k = 1; k < K; ++k) {
    snap.arrivals.push_back(arr);
    snap.gains.push_back(gain);
  }
  return snap;
}

ScheduleDecision GreedyScheduler::decide(const Observation& obs) {
  ++stats_.decisions;
  return greedy_step(obs);
}

void GmmPreScheduler::begin_episode(const EpisodeContext& ctx) {
  if (window_ < 1) throw ConfigError("forecast window must be at least one slot");
  const std::size_t V = ctx.network->node_count();
  forecast_levels_.assign(V, 0.0);
  for (std::size_t n = 0; n < V; ++n) {
    const auto w = predict_window(fit_or_point(column(ctx.history_arrivals, n), components_), window_);
    forecast_levels_[n] = std::accumulate(w.begin(), w.end(), 0.0) / w.size();
  }
}

ScheduleDecision GmmPreScheduler::decide(const Observation& obs) {
  ++stats_.decisions;
  if (forecast_levels_.size() != obs.stored.size())
    throw EpisodeError("forecasting policy used before begin_episode");
  return gmmpre_step(obs, forecast_levels_, &stats_.vetoes);
}

void RhcopScheduler::begin_episode(const EpisodeContext& ctx) {
  if (opt_.window < 1) throw ConfigError("window must be at least one slot");
  arrival_models_.clear();
  gain_models_.clear();
  if (ctx.history_arrivals.empty()) return;  // persistence forecast
  for (std::size_t n = 0; n < ctx.network->node_count(); ++n)
    arrival_models_.push_back(fit_or_point(column(ctx.history_arrivals, n), opt_.gmm_components));
  for (std::size_t d = 0; d < ctx.network->device_count(); ++d)
    gain_models_.push_back(fit_or_point(column(ctx.history_gains, d), opt_.gmm_components));
}

ScheduleDecision RhcopScheduler::decide(const Observation& obs) {
  ++stats_.decisions;
  const InstanceSnapshot snap = rhcop_snapshot(obs, arrival_models_, gain_models_, opt_.window);
  const MilpModel model = build_model(snap);
  Solution sol;
  try {
    if (!opt_.external_command.empty()) {
      sol = external_solve(export_lp(model), model, opt_.external_command);
    } else {
      SolveOptions so;
      so.time_limit_s = opt_.time_limit_s;
      sol = solve_exact(model, snap, so);
    }
  } catch (const ExternalSolverError& e) {
    stats_.log.push_back("slot " + std::to_string(obs.slot) + ": solver error: " + e.what());
  }
  if (sol.status == SolveStatus::kFeasible || sol.status == SolveStatus::kTimeout)
    ++stats_.timeouts;
  if (!sol.has_solution()) {
    ++stats_.fallbacks;
    stats_.log.push_back("slot " + std::to_string(obs.slot) + ": greedy fallback (" +
                         status_name(sol.status) + ")");
    return greedy_step(obs);
  }
  return decision_from_solution(model, snap, sol.values, 0);
}

void RandomScheduler::begin_episode(const EpisodeContext& ctx) {
  rng_ = make_rng(ctx.seed, Stream::kScheduler);
}

ScheduleDecision RandomScheduler::decide(const Observation& obs) {
  ++stats_.decisions;
  check_observation(obs);
  const int R = static_cast<int>(obs.requests->size());
  const int k = std::uniform_int_distribution<int>(0, R)(rng_);
  std::vector<int> idx(R);
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng_);
  std::vector<char> pick(R, 0);
  for (int j = 0; j < k; ++j) pick[idx[j]] = 1;

  const InstanceSnapshot snap = current_slot_snapshot(obs);
  MilpModel model = build_model(snap);
  // The drawn subset must be served; the rest are left to the solver.
  for (int r = 0; r < R; ++r)
    if (pick[r]) model.variables[model.layout.z(0, r)].lower = 1.0;
  SolveOptions so;
  so.time_limit_s = time_limit_s_;
  so.stop_at_first_feasible = true;
  so.order_by_age = false;
  const Solution sol = solve_exact(model, snap, so);
  if (!sol.has_solution()) {
    if (sol.status == SolveStatus::kTimeout) ++stats_.timeouts;
    return ScheduleDecision::empty(*obs.network, *obs.requests);
  }
  return decision_from_solution(model, snap, sol.values, 0);
}

void OfflineMilpScheduler::begin_episode(const EpisodeContext& ctx) {
  if (!ctx.future_arrivals || !ctx.future_gains)
    throw EpisodeError("offline benchmark needs the realized future");
  snap_ = InstanceSnapshot{};
  snap_.network = ctx.network;
  snap_.requests = ctx.requests;
  snap_.horizon = ctx.horizon;
  snap_.arrivals.assign(ctx.future_arrivals->begin(), ctx.future_arrivals->begin() + ctx.horizon);
  snap_.gains.assign(ctx.future_gains->begin(), ctx.future_gains->begin() + ctx.horizon);
  snap_.initial_levels = ctx.initial_levels;
  snap_.sense_energy_per_bit = ctx.sense_energy_per_bit;
  const ModelCounts counts = count_model(dimensions_of(*ctx.network, *ctx.requests, ctx.horizon));
  if (external_.empty() && counts.scheduling_binaries > cap_)
    throw SizeError("offline model has " + std::to_string(counts.scheduling_binaries) +
                    " scheduling binaries, above the cap of " + std::to_string(cap_));
  model_ = build_model(snap_);
  if (!external_.empty()) {
    solution_ = external_solve(export_lp(model_), model_, external_);
  } else {
    SolveOptions so;
    so.time_limit_s = time_limit_s_;
    solution_ = solve_exact(model_, snap_, so);
  }
  if (solution_.status != SolveStatus::kOptimal) ++stats_.timeouts;
  stats_.log.push_back(std::string("offline solve: ") + status_name(solution_.status));
}

ScheduleDecision OfflineMilpScheduler::decide(const Observation& obs) {
  ++stats_.decisions;
  if (!solution_.has_solution()) return ScheduleDecision::empty(*obs.network, *obs.requests);
  return decision_from_solution(model_, snap_, solution_.values, obs.slot);
}

std::unique_ptr<Scheduler> make_scheduler(const std::string& name, const RhcopOptions& rhcop,
                                          int gmmpre_window, double random_time_limit_s,
                                          double milp_time_limit_s, long long milp_variable_cap) {
  if (name == "greedy") return std::make_unique<GreedyScheduler>();
  if (name == "rhcop") return std::make_unique<RhcopScheduler>(rhcop);
  if (name == "random") return std::make_unique<RandomScheduler>(random_time_limit_s);
  if (name == "gmmpre") return std::make_unique<GmmPreScheduler>(gmmpre_window, rhcop.gmm_components);
  if (name == "milp")
    return std::make_unique<OfflineMilpScheduler>(milp_time_limit_s, milp_variable_cap,
                                                  rhcop.external_command);
  throw ConfigError("unknown scheduler '" + name + "'");
}

}  // namespace greeniot
