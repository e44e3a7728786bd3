#include "greeniot/simulator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <ostream>
#include <sstream>

#include "greeniot/errors.hpp"

namespace greeniot {

namespace {

constexpr double kTol = 1e-7;

std::string str(double v) {
  std::ostringstream o;
  o.precision(10);
  o << v;
  return o.str();
}

double upload_cost(const SlotState& st, const std::vector<double>& rates, int d) {
  const auto& net = *st.network;
  const double rate = rates[net.devices[d].gateway];
  if (rate == 0.0) return 0.0;
  const double gain = st.gains.at(d);
  if (!(gain > 0.0)) return std::numeric_limits<double>::infinity();
  return required_tx_power(net.channel, rate, gain) + st.sense_energy_per_bit * rate;
}

bool shape_ok(const SlotState& st, const ScheduleDecision& dec, std::vector<Violation>& out) {
  const auto& net = *st.network;
  const auto& reqs = *st.requests;
  bool ok = dec.uploader.size() == net.gateway_count() && dec.served.size() == reqs.size() &&
            dec.collector_on.size() == reqs.size() && dec.processor_at.size() == reqs.size() &&
            st.stored.size() == net.node_count() && st.gains.size() == net.device_count();
  for (std::size_t r = 0; ok && r < reqs.size(); ++r)
    ok = dec.collector_on[r].size() == reqs[r].collectors.size() &&
         dec.processor_at[r].size() == reqs[r].processors.size();
  if (!ok) out.push_back({"shape", "decision does not match the network and requests"});
  return ok;
}

}  // namespace

std::vector<Violation> validate_decision(const SlotState& st, const ScheduleDecision& dec) {
  std::vector<Violation> out;
  if (!st.network || !st.requests) {
    out.push_back({"shape", "state lacks network or requests"});
    return out;
  }
  if (!shape_ok(st, dec, out)) return out;
  const auto& net = *st.network;
  const auto& reqs = *st.requests;
  const int G = static_cast<int>(net.gateway_count());
  const int S = static_cast<int>(net.server_count());
  const auto rates = gateway_upload_rates(net, reqs);
  const double kg = net.gateway_caps.drain_per_megacycle();
  const double ks = net.server_caps.drain_per_megacycle();

  for (int i = 0; i < G; ++i) {
    const int d = dec.uploader[i];
    if (d < 0) continue;
    if (d >= static_cast<int>(net.device_count()) || net.devices[d].gateway != i) {
      out.push_back({"upload_at_most_one",
                     "gateway " + std::to_string(i) + " selects a device it does not serve"});
      continue;
    }
    const double c = upload_cost(st, rates, d);
    if (!std::isfinite(c) || c > st.stored[d] + kTol)
      out.push_back({"device_energy_balance", "device " + std::to_string(d) + " needs " + str(c) +
                                                  " J, has " + str(st.stored[d])});
  }

  std::vector<double> gload(G, 0.0), sload(S, 0.0), sink(S, 0.0);
  std::map<std::pair<int, int>, double> gs;
  for (std::size_t r = 0; r < reqs.size(); ++r) {
    const auto& dag = reqs[r];
    bool all = true;
    for (std::size_t u = 0; u < dag.collectors.size(); ++u) {
      if (dec.collector_on[r][u]) gload[dag.collectors[u].gateway] += dag.collectors[u].demand;
      else all = false;
    }
    for (std::size_t v = 0; v < dag.processors.size(); ++v) {
      const int s = dec.processor_at[r][v];
      if (s < 0) {
        all = false;
        continue;
      }
      if (s >= S) {
        out.push_back({"processor_single_host", "processor placed on unknown server"});
        continue;
      }
      sload[s] += dag.processors[v].demand;
      sink[s] += dag.processors[v].sink_bandwidth;
    }
    if (dec.served[r] && !all) {
      bool coll = std::all_of(dec.collector_on[r].begin(), dec.collector_on[r].end(),
                              [](char c) { return c != 0; });
      out.push_back({coll ? "merge_needs_processor" : "merge_needs_collector",
                     "request " + std::to_string(r) + " served without all its functions"});
    }
    for (const auto& e : dag.edges) {
      const bool from = dec.collector_on[r][e.collector] != 0;
      const int s = dec.processor_at[r][e.processor];
      if (from != (s >= 0)) {
        out.push_back({from ? "route_to_processor" : "route_from_collector",
                       "request " + std::to_string(r) + " edge " + std::to_string(e.collector) +
                           "->" + std::to_string(e.processor) + " has one end only"});
        continue;
      }
      if (!from || s >= S) continue;
      const int i = dag.collectors[e.collector].gateway;
      if (!net.has_gateway_server_link(i, s)) {
        out.push_back({"route_from_collector", "no link between gateway " + std::to_string(i) +
                                                   " and server " + std::to_string(s)});
        continue;
      }
      gs[{i, s}] += e.bandwidth;
    }
  }

  for (int i = 0; i < G; ++i) {
    if (gload[i] > net.gateway_caps.cpu_capacity + kTol)
      out.push_back({"gateway_cpu", "gateway " + std::to_string(i) + " load " + str(gload[i])});
    const int n = net.gateway_node(i);
    if (gload[i] * kg > st.stored[n] + kTol)
      out.push_back({"gateway_energy_balance", "gateway " + std::to_string(i) + " needs " +
                                                   str(gload[i] * kg) + " J, has " +
                                                   str(st.stored[n])});
    if (gload[i] > 0.0 && dec.uploader[i] < 0)
      out.push_back({"upload_required", "gateway " + std::to_string(i) + " has no uploader"});
  }
  for (int s = 0; s < S; ++s) {
    if (sload[s] > net.server_caps.cpu_capacity + kTol)
      out.push_back({"server_cpu", "server " + std::to_string(s) + " load " + str(sload[s])});
    const int n = net.server_node(s);
    if (sload[s] * ks > st.stored[n] + kTol)
      out.push_back({"server_energy_balance", "server " + std::to_string(s) + " needs " +
                                                  str(sload[s] * ks) + " J, has " +
                                                  str(st.stored[n])});
    if (sink[s] > net.link_capacity + kTol)
      out.push_back({"server_sink_bandwidth", "server " + std::to_string(s)});
  }
  for (const auto& [link, bw] : gs)
    if (bw > net.link_capacity + kTol)
      out.push_back({"gateway_server_bandwidth", "link " + std::to_string(link.first) + "-" +
                                                     std::to_string(link.second)});
  return out;
}

std::vector<double> decision_drains(const SlotState& st, const ScheduleDecision& dec) {
  const auto& net = *st.network;
  const auto& reqs = *st.requests;
  const auto rates = gateway_upload_rates(net, reqs);
  std::vector<double> drain(net.node_count(), 0.0);
  for (std::size_t i = 0; i < dec.uploader.size(); ++i)
    if (dec.uploader[i] >= 0) drain[dec.uploader[i]] += upload_cost(st, rates, dec.uploader[i]);
  const double kg = net.gateway_caps.drain_per_megacycle();
  const double ks = net.server_caps.drain_per_megacycle();
  for (std::size_t r = 0; r < reqs.size(); ++r) {
    for (std::size_t u = 0; u < reqs[r].collectors.size(); ++u)
      if (dec.collector_on[r][u])
        drain[net.gateway_node(reqs[r].collectors[u].gateway)] += reqs[r].collectors[u].demand * kg;
    for (std::size_t v = 0; v < reqs[r].processors.size(); ++v)
      if (dec.processor_at[r][v] >= 0)
        drain[net.server_node(dec.processor_at[r][v])] += reqs[r].processors[v].demand * ks;
  }
  return drain;
}

int aos_update(int previous_age, bool served) {
  if (previous_age < 0) throw DomainError("age must be non-negative");
  return served ? 1 : previous_age + 1;
}

double minmax_objective(const std::vector<std::vector<int>>& ages) {
  double best = 0.0;
  for (const auto& row : ages) {
    if (row.empty()) continue;
    double s = 0.0;
    for (int a : row) s += a;
    best = std::max(best, s / row.size());
  }
  return best;
}

Realization draw_realization(const SubstrateNetwork& net, const SolarParams& solar,
                             bool shared_weather, int horizon, int history, std::uint64_t seed) {
  if (horizon < 1) throw ConfigError("horizon must be at least one slot");
  if (history < 0) throw ConfigError("history length must be non-negative");
  solar.validate();
  const int total = history + horizon;
  const std::size_t V = net.node_count(), D = net.device_count();
  const auto pi = solar.stationary();

  std::vector<std::vector<int>> weather(total, std::vector<int>(V));
  std::vector<std::vector<double>> arrivals(total, std::vector<double>(V));
  std::vector<std::vector<double>> gains(total, std::vector<double>(D));
  for (std::size_t n = 0; n < V; ++n) {
    const std::size_t chain = shared_weather ? 0 : n;
    Rng wr = make_rng(seed, Stream::kWeather, chain);
    Weather w = sample_weather(pi, wr);
    for (int t = 0; t < total; ++t) {
      if (t > 0) w = next_weather(solar, w, wr);
      weather[t][n] = static_cast<int>(w);
    }
    Rng ar = make_rng(seed, Stream::kArrivals, n);
    const auto& caps = net.caps_of_node(static_cast<int>(n));
    for (int t = 0; t < total; ++t)
      arrivals[t][n] = sample_arrival(solar, static_cast<Weather>(weather[t][n]), caps.panel_side,
                                      caps.panel_efficiency, ar);
  }
  for (std::size_t d = 0; d < D; ++d) {
    Rng fr = make_rng(seed, Stream::kFading, d);
    std::exponential_distribution<double> fade(1.0);
    const double dist = net.device_distance(static_cast<int>(d));
    for (int t = 0; t < total; ++t) gains[t][d] = channel_gain(net.channel, dist, fade(fr));
  }

  Realization real;
  real.history_arrivals.assign(arrivals.begin(), arrivals.begin() + history);
  real.history_gains.assign(gains.begin(), gains.begin() + history);
  real.weather.assign(weather.begin() + history, weather.end());
  real.arrivals.assign(arrivals.begin() + history, arrivals.end());
  real.gains.assign(gains.begin() + history, gains.end());
  return real;
}

Scenario make_scenario(const EpisodeConfig& config, std::uint64_t seed) {
  if (!(config.initial_battery_fraction >= 0.0 && config.initial_battery_fraction <= 1.0))
    throw ConfigError("initial battery fraction must lie in [0, 1]");
  if (!(config.sense_energy_per_bit >= 0.0))
    throw ConfigError("sensing energy must be non-negative");
  Scenario sc;
  Rng topo = make_rng(seed, Stream::kTopology);
  sc.network = build_topology(config.topology, topo);
  Rng work = make_rng(seed, Stream::kWorkload);
  sc.requests = generate_workload(config.workload, work);
  Rng loc = make_rng(seed, Stream::kLocations);
  assign_vnfc_locations(sc.requests, sc.network, loc);
  sc.realization = draw_realization(sc.network, config.solar, config.shared_weather, config.horizon,
                                    config.history, seed);
  sc.horizon = config.horizon;
  sc.sense_energy_per_bit = config.sense_energy_per_bit;
  sc.seed = seed;
  sc.initial_levels.resize(sc.network.node_count());
  for (std::size_t n = 0; n < sc.initial_levels.size(); ++n)
    sc.initial_levels[n] =
        config.initial_battery_fraction * sc.network.caps_of_node(static_cast<int>(n)).battery_capacity;
  return sc;
}

InstanceSnapshot offline_snapshot(const Scenario& sc) {
  InstanceSnapshot snap;
  snap.network = &sc.network;
  snap.requests = &sc.requests;
  snap.horizon = sc.horizon;
  snap.arrivals = sc.realization.arrivals;
  snap.gains = sc.realization.gains;
  snap.initial_levels = sc.initial_levels;
  snap.sense_energy_per_bit = sc.sense_energy_per_bit;
  return snap;
}

EpisodeResult run_episode(const Scenario& sc, Scheduler& scheduler) {
  using Clock = std::chrono::steady_clock;
  const int T = sc.horizon;
  const std::size_t V = sc.network.node_count();
  const std::size_t R = sc.requests.size();
  if (T < 1) throw EpisodeError("episode needs at least one slot");
  if (sc.realization.arrivals.size() < static_cast<std::size_t>(T) ||
      sc.realization.gains.size() < static_cast<std::size_t>(T))
    throw EpisodeError("realization shorter than the horizon");

  EpisodeResult res;
  res.seed = sc.seed;
  res.scheduler = scheduler.name();
  res.initial_levels = sc.initial_levels;
  res.ages.assign(R, std::vector<int>(T, 0));
  res.served.assign(R, std::vector<char>(T, 0));

  EpisodeContext ctx;
  ctx.network = &sc.network;
  ctx.requests = &sc.requests;
  ctx.horizon = T;
  ctx.sense_energy_per_bit = sc.sense_energy_per_bit;
  ctx.history_arrivals = sc.realization.history_arrivals;
  ctx.history_gains = sc.realization.history_gains;
  ctx.initial_levels = sc.initial_levels;
  ctx.future_arrivals = &sc.realization.arrivals;
  ctx.future_gains = &sc.realization.gains;
  ctx.seed = sc.seed;
  auto start = Clock::now();
  scheduler.begin_episode(ctx);
  res.decide_ms += std::chrono::duration<double, std::milli>(Clock::now() - start).count();

  std::vector<double> level = sc.initial_levels;
  std::vector<int> age(R, 0);
  std::vector<double> age_sum(R, 0.0);
  for (int t = 0; t < T; ++t) {
    const auto& arr = sc.realization.arrivals[t];
    std::vector<double> w(V), after(V);
    for (std::size_t n = 0; n < V; ++n) {
      const double cap = sc.network.caps_of_node(static_cast<int>(n)).battery_capacity;
      w[n] = store_energy(arr[n], BatteryState{level[n], cap, 0.0});
      after[n] = level[n] + w[n];
    }
    Observation obs;
    obs.slot = t;
    obs.horizon = T;
    obs.levels = level;
    obs.arrivals = arr;
    obs.stored = after;
    obs.gains = sc.realization.gains[t];
    obs.ages = age;
    obs.age_sums = age_sum;
    obs.network = &sc.network;
    obs.requests = &sc.requests;
    obs.sense_energy_per_bit = sc.sense_energy_per_bit;

    start = Clock::now();
    ScheduleDecision dec = scheduler.decide(obs);
    res.decide_ms += std::chrono::duration<double, std::milli>(Clock::now() - start).count();

    SlotState st{&sc.network, &sc.requests, after, obs.gains, sc.sense_energy_per_bit};
    const auto bad = validate_decision(st, dec);
    if (!bad.empty()) {
      ++res.rejected_decisions;
      std::string msg = "slot " + std::to_string(t) + ": rejected (" + bad[0].tag + ": " +
                        bad[0].detail + ")";
      if (bad.size() > 1) msg += " and " + std::to_string(bad.size() - 1) + " more";
      res.log.push_back(msg);
      dec = ScheduleDecision::empty(sc.network, sc.requests);
    }
    const auto drain = decision_drains(st, dec);
    for (std::size_t n = 0; n < V; ++n) level[n] = std::max(0.0, after[n] - drain[n]);
    for (std::size_t r = 0; r < R; ++r) {
      age[r] = aos_update(age[r], dec.served[r] != 0);
      res.ages[r][t] = age[r];
      age_sum[r] += age[r];
      res.served[r][t] = dec.served[r];
    }
    res.levels.push_back(level);
    res.stored.push_back(w);
    res.drains.push_back(drain);
  }
  res.average_age = AosTrace{res.ages, res.served}.time_average();
  res.objective = minmax_objective(res.ages);
  res.scheduler_stats = scheduler.stats();
  return res;
}

std::vector<std::string> EpisodeResult::invariant_violations(const Scenario& sc) const {
  std::vector<std::string> out;
  const std::size_t V = sc.network.node_count();
  std::vector<double> prev = initial_levels;
  for (std::size_t t = 0; t < levels.size(); ++t)
    for (std::size_t n = 0; n < V; ++n) {
      const double cap = sc.network.caps_of_node(static_cast<int>(n)).battery_capacity;
      const std::string where = "slot " + std::to_string(t) + " node " + std::to_string(n);
      if (levels[t][n] < -kTol || levels[t][n] > cap + kTol)
        out.push_back(where + ": level " + str(levels[t][n]) + " outside [0, " + str(cap) + "]");
      if (stored[t][n] < -kTol || stored[t][n] > sc.realization.arrivals[t][n] + kTol ||
          prev[n] + stored[t][n] > cap + kTol)
        out.push_back(where + ": stored energy " + str(stored[t][n]) + " not admissible");
      if (std::abs(prev[n] + stored[t][n] - drains[t][n] - levels[t][n]) > 1e-6)
        out.push_back(where + ": energy not conserved");
      prev[n] = levels[t][n];
    }
  if (!AosTrace{ages, served}.replay_matches())
    out.push_back("ages do not follow the recorded services");
  if (std::abs(minmax_objective(ages) - objective) > 1e-12)
    out.push_back("objective does not match the age matrix");
  return out;
}

void write_episode_csv(std::ostream& out, const EpisodeResult& res) {
  out << "seed,scheduler,request,slot,served,age\n";
  for (std::size_t r = 0; r < res.ages.size(); ++r)
    for (std::size_t t = 0; t < res.ages[r].size(); ++t)
      out << res.seed << ',' << res.scheduler << ',' << r << ',' << t << ','
          << int(res.served[r][t]) << ',' << res.ages[r][t] << '\n';
  const auto old = out.precision(12);
  out << "# summary seed=" << res.seed << " scheduler=" << res.scheduler
      << " objective=" << res.objective << " rejected=" << res.rejected_decisions << '\n';
  out.precision(old);
}

}  // namespace greeniot
