#include "greeniot/milp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <unordered_map>

#include "greeniot/errors.hpp"
#include "greeniot/substrate.hpp"
#include "greeniot/workload.hpp"

namespace greeniot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <typename... Args>
std::string fmt(const char* pattern, Args... args) {
  char buf[96];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

int add_var(MilpModel& m, std::string name, VarKind kind, double lo, double hi) {
  m.variables.push_back({std::move(name), kind, lo, hi});
  return static_cast<int>(m.variables.size()) - 1;
}

void add_row(MilpModel& m, RowFamily fam, std::string name, std::vector<Term> terms, Sense sense,
             double rhs) {
  m.constraints.push_back({std::move(name), std::move(terms), sense, rhs, fam});
}

}  // namespace

const char* row_family_name(RowFamily f) {
  switch (f) {
    case RowFamily::kHarvestArrivalBound: return "harvest_arrival_bound";
    case RowFamily::kHarvestHeadroom: return "harvest_headroom";
    case RowFamily::kGatewayCpu: return "gateway_cpu";
    case RowFamily::kCollectorSingleHost: return "collector_single_host";
    case RowFamily::kGatewayEnergyBounds: return "gateway_energy_bounds";
    case RowFamily::kGatewayEnergyBalance: return "gateway_energy_balance";
    case RowFamily::kUploadRequired: return "upload_required";
    case RowFamily::kUploadAtMostOne: return "upload_at_most_one";
    case RowFamily::kDeviceEnergyBalance: return "device_energy_balance";
    case RowFamily::kServerCpu: return "server_cpu";
    case RowFamily::kProcessorSingleHost: return "processor_single_host";
    case RowFamily::kServerEnergyBounds: return "server_energy_bounds";
    case RowFamily::kServerEnergyBalance: return "server_energy_balance";
    case RowFamily::kMergeNeedsCollector: return "merge_needs_collector";
    case RowFamily::kMergeNeedsProcessor: return "merge_needs_processor";
    case RowFamily::kRouteFromCollector: return "route_from_collector";
    case RowFamily::kRouteToProcessor: return "route_to_processor";
    case RowFamily::kGatewayServerBandwidth: return "gateway_server_bandwidth";
    case RowFamily::kServerSinkBandwidth: return "server_sink_bandwidth";
    case RowFamily::kAgeAuxUpper: return "age_aux_upper";
    case RowFamily::kAgeAuxLower: return "age_aux_lower";
    case RowFamily::kAgeAuxUpperGate: return "age_aux_upper_gate";
    case RowFamily::kAgeUpdate: return "age_update";
    case RowFamily::kEpigraph: return "epigraph";
  }
  return "?";
}

double InstanceSnapshot::effective_psi() const {
  if (psi > 0.0) return psi;
  int max_age = 0;
  for (int a : initial_ages) max_age = std::max(max_age, a);
  return static_cast<double>(horizon + max_age);
}

void InstanceSnapshot::validate() const {
  if (!network || !requests) throw BuildError("snapshot lacks network or requests");
  if (horizon < 1) throw BuildError("snapshot horizon must be at least one slot");
  const std::size_t nodes = network->node_count();
  if (arrivals.size() != static_cast<std::size_t>(horizon))
    throw BuildError("arrival data does not cover the horizon");
  for (const auto& row : arrivals)
    if (row.size() != nodes) throw BuildError("arrival row has the wrong node count");
  if (gains.size() != static_cast<std::size_t>(horizon))
    throw BuildError("gain data does not cover the horizon");
  for (const auto& row : gains)
    if (row.size() != network->device_count()) throw BuildError("gain row has the wrong device count");
  if (initial_levels.size() != nodes) throw BuildError("initial levels do not cover every node");
  for (std::size_t n = 0; n < nodes; ++n) {
    const double cap = network->caps_of_node(static_cast<int>(n)).battery_capacity;
    if (!(initial_levels[n] >= 0.0 && initial_levels[n] <= cap + 1e-9))
      throw BuildError("initial level of node " + std::to_string(n) + " outside [0, capacity]");
  }
  if (!initial_ages.empty() && initial_ages.size() != requests->size())
    throw BuildError("initial ages do not cover every request");
  if (!past_age_sums.empty() && past_age_sums.size() != requests->size())
    throw BuildError("past age sums do not cover every request");
  if (objective_slots < 0) throw BuildError("negative averaging length");
  const double p = effective_psi();
  int max_age = 0;
  for (int a : initial_ages) max_age = std::max(max_age, a);
  if (p < horizon + max_age) throw BuildError("big-M smaller than the largest reachable age");
  for (const auto& dag : *requests) {
    auto issues = validate_dag(dag, static_cast<int>(network->gateway_count()));
    if (!issues.empty()) throw BuildError("request " + std::to_string(dag.id) + ": " + issues[0]);
  }
}

std::vector<double> gateway_upload_rates(const SubstrateNetwork& net,
                                         const std::vector<DagRequest>& requests) {
  std::vector<double> rate(net.gateway_count(), 0.0);
  for (const auto& dag : requests)
    for (const auto& c : dag.collectors) rate.at(c.gateway) = std::max(rate.at(c.gateway), c.rate);
  return rate;
}

double device_slot_cost(const InstanceSnapshot& snap, const std::vector<double>& rates, int t,
                        int d) {
  const auto& net = *snap.network;
  const double rate = rates[net.devices[d].gateway];
  const double gain = snap.gains[t][d];
  if (rate == 0.0) return 0.0;
  if (!(gain > 0.0)) return kInf;
  return required_tx_power(net.channel, rate, gain) + snap.sense_energy_per_bit * rate;
}

ModelLayout::ModelLayout(const SubstrateNetwork& net, const std::vector<DagRequest>& requests,
                         int horizon)
    : horizon_(horizon),
      D_(static_cast<int>(net.device_count())),
      G_(static_cast<int>(net.gateway_count())),
      S_(static_cast<int>(net.server_count())),
      V_(static_cast<int>(net.node_count())) {
  int off = D_;
  for (const auto& dag : requests) {
    nc_.push_back(static_cast<int>(dag.collectors.size()));
    np_.push_back(static_cast<int>(dag.processors.size()));
  }
  const int R = static_cast<int>(requests.size());
  for (int r = 0; r < R; ++r) {
    x_off_.push_back(off);
    off += nc_[r] * G_;
  }
  for (int r = 0; r < R; ++r) {
    y_off_.push_back(off);
    off += np_[r] * S_;
  }
  for (int r = 0; r < R; ++r) {
    l_off_.push_back(off);
    off += nc_[r] * np_[r] * G_ * S_;
  }
  z_off_ = off;
  off += R;
  w_off_ = off;
  off += V_;
  e_off_ = off;
  off += V_;
  a_off_ = off;
  off += R;
  lam_off_ = off;
  off += R;
  per_slot_ = off;
}

int MilpModel::find_variable(const std::string& name) const {
  for (std::size_t i = 0; i < variables.size(); ++i)
    if (variables[i].name == name) return static_cast<int>(i);
  return -1;
}

void linearize_aos(MilpModel& m, int z, int a_prev, double a_prev_value, int lambda, int a,
                   double psi, const std::string& suffix) {
  // lambda <= psi * z
  add_row(m, RowFamily::kAgeAuxUpper, "ageub_" + suffix, {{lambda, 1.0}, {z, -psi}}, Sense::kLe,
          0.0);
  // lambda >= a_prev - (1 - z) psi
  std::vector<Term> lo{{lambda, 1.0}, {z, -psi}};
  double lo_rhs = -psi;
  if (a_prev >= 0) lo.push_back({a_prev, -1.0});
  else lo_rhs += a_prev_value;
  add_row(m, RowFamily::kAgeAuxLower, "agelb_" + suffix, std::move(lo), Sense::kGe, lo_rhs);
  // lambda <= a_prev + (1 - z) psi
  std::vector<Term> hi{{lambda, 1.0}, {z, psi}};
  double hi_rhs = psi;
  if (a_prev >= 0) hi.push_back({a_prev, -1.0});
  else hi_rhs += a_prev_value;
  add_row(m, RowFamily::kAgeAuxUpperGate, "agegt_" + suffix, std::move(hi), Sense::kLe, hi_rhs);
  // a = a_prev - lambda + 1
  std::vector<Term> up{{a, 1.0}, {lambda, 1.0}};
  double up_rhs = 1.0;
  if (a_prev >= 0) up.push_back({a_prev, -1.0});
  else up_rhs += a_prev_value;
  add_row(m, RowFamily::kAgeUpdate, "ageup_" + suffix, std::move(up), Sense::kEq, up_rhs);
}

MilpModel build_model(const InstanceSnapshot& snap) {
  snap.validate();
  const auto& net = *snap.network;
  const auto& reqs = *snap.requests;
  const int T = snap.horizon;
  const int D = static_cast<int>(net.device_count());
  const int G = static_cast<int>(net.gateway_count());
  const int S = static_cast<int>(net.server_count());
  const int V = static_cast<int>(net.node_count());
  const int R = static_cast<int>(reqs.size());
  const double psi = snap.effective_psi();
  const double link_cap = net.link_capacity;
  const auto rates = gateway_upload_rates(net, reqs);

  MilpModel m;
  m.layout = ModelLayout(net, reqs, T);
  m.psi = psi;
  const ModelLayout& L = m.layout;
  m.variables.reserve(L.variable_count());

  // Variables, in layout order.
  for (int t = 0; t < T; ++t) {
    for (int d = 0; d < D; ++d) {
      const bool usable = std::isfinite(device_slot_cost(snap, rates, t, d));
      add_var(m, fmt("phi_%d_%d", t, d), VarKind::kBinary, 0.0, usable ? 1.0 : 0.0);
    }
    for (int r = 0; r < R; ++r)
      for (int u = 0; u < static_cast<int>(reqs[r].collectors.size()); ++u)
        for (int i = 0; i < G; ++i)
          add_var(m, fmt("x_%d_%d_%d_%d", t, r, u, i), VarKind::kBinary, 0.0,
                  reqs[r].collectors[u].gateway == i ? 1.0 : 0.0);
    for (int r = 0; r < R; ++r)
      for (int v = 0; v < static_cast<int>(reqs[r].processors.size()); ++v)
        for (int s = 0; s < S; ++s)
          add_var(m, fmt("y_%d_%d_%d_%d", t, r, v, s), VarKind::kBinary, 0.0, 1.0);
    for (int r = 0; r < R; ++r) {
      const int nc = static_cast<int>(reqs[r].collectors.size());
      const int np = static_cast<int>(reqs[r].processors.size());
      for (int u = 0; u < nc; ++u)
        for (int v = 0; v < np; ++v) {
          const bool edge = std::any_of(reqs[r].edges.begin(), reqs[r].edges.end(),
                                        [&](const DagEdge& e) {
                                          return e.collector == u && e.processor == v;
                                        });
          for (int i = 0; i < G; ++i)
            for (int s = 0; s < S; ++s)
              add_var(m, fmt("l_%d_%d_%d_%d_%d_%d", t, r, u, v, i, s), VarKind::kBinary, 0.0,
                      edge && net.has_gateway_server_link(i, s) ? 1.0 : 0.0);
        }
    }
    for (int r = 0; r < R; ++r) add_var(m, fmt("z_%d_%d", t, r), VarKind::kBinary, 0.0, 1.0);
    for (int n = 0; n < V; ++n) add_var(m, fmt("w_%d_%d", t, n), VarKind::kContinuous, 0.0, kInf);
    for (int n = 0; n < V; ++n)
      add_var(m, fmt("lvl_%d_%d", t, n), VarKind::kContinuous, 0.0,
              n < D ? net.device_caps.battery_capacity : kInf);
    for (int r = 0; r < R; ++r) add_var(m, fmt("a_%d_%d", t, r), VarKind::kContinuous, 0.0, kInf);
    for (int r = 0; r < R; ++r)
      add_var(m, fmt("lam_%d_%d", t, r), VarKind::kContinuous, 0.0, kInf);
  }
  m.objective_var = add_var(m, "maxage", VarKind::kContinuous, 0.0, kInf);

  const double kg = net.gateway_caps.drain_per_megacycle();
  const double ks = net.server_caps.drain_per_megacycle();

  for (int t = 0; t < T; ++t) {
    // Harvesting.
    for (int n = 0; n < V; ++n)
      add_row(m, RowFamily::kHarvestArrivalBound, fmt("harv_%d_%d", t, n), {{L.w(t, n), 1.0}},
              Sense::kLe, snap.arrivals[t][n]);
    for (int n = 0; n < V; ++n) {
      const double cap = net.caps_of_node(n).battery_capacity;
      if (t == 0)
        add_row(m, RowFamily::kHarvestHeadroom, fmt("head_%d_%d", t, n), {{L.w(t, n), 1.0}},
                Sense::kLe, cap - snap.initial_levels[n]);
      else
        add_row(m, RowFamily::kHarvestHeadroom, fmt("head_%d_%d", t, n),
                {{L.w(t, n), 1.0}, {L.e(t - 1, n), 1.0}}, Sense::kLe, cap);
    }
    // Balance rows share one shape: e_t - e_{t-1} - w_t + drain = 0.
    auto balance = [&](RowFamily fam, const char* tag, int n, std::vector<Term> drain) {
      std::vector<Term> terms{{L.e(t, n), 1.0}, {L.w(t, n), -1.0}};
      double rhs = 0.0;
      if (t == 0) rhs = snap.initial_levels[n];
      else terms.push_back({L.e(t - 1, n), -1.0});
      for (auto& d : drain) terms.push_back(d);
      add_row(m, fam, fmt("%s_%d_%d", tag, t, n), std::move(terms), Sense::kEq, rhs);
    };

    // Gateways.
    int total_collectors = 0;
    for (const auto& dag : reqs) total_collectors += static_cast<int>(dag.collectors.size());
    for (int i = 0; i < G; ++i) {
      std::vector<Term> load;
      for (int r = 0; r < R; ++r)
        for (int u = 0; u < static_cast<int>(reqs[r].collectors.size()); ++u)
          if (reqs[r].collectors[u].gateway == i)
            load.push_back({L.x(t, r, u, i), reqs[r].collectors[u].demand});
      add_row(m, RowFamily::kGatewayCpu, fmt("gcpu_%d_%d", t, i), load, Sense::kLe,
              net.gateway_caps.cpu_capacity);
      const int n = net.gateway_node(i);
      add_row(m, RowFamily::kGatewayEnergyBounds, fmt("gcap_%d_%d", t, i), {{L.e(t, n), 1.0}},
              Sense::kLe, net.gateway_caps.battery_capacity);
      std::vector<Term> drain;
      for (const auto& term : load) drain.push_back({term.var, term.coef * kg});
      balance(RowFamily::kGatewayEnergyBalance, "gbal", n, drain);
      std::vector<Term> up;
      for (int d : net.gateways[i].devices) up.push_back({L.phi(t, d), 1.0});
      std::vector<Term> req = up;
      if (total_collectors > 0)
        for (const auto& term : load) req.push_back({term.var, -1.0 / total_collectors});
      add_row(m, RowFamily::kUploadRequired, fmt("upreq_%d_%d", t, i), std::move(req), Sense::kGe,
              0.0);
      add_row(m, RowFamily::kUploadAtMostOne, fmt("upone_%d_%d", t, i), std::move(up), Sense::kLe,
              1.0);
    }
    for (int r = 0; r < R; ++r)
      for (int u = 0; u < static_cast<int>(reqs[r].collectors.size()); ++u) {
        std::vector<Term> hosts;
        for (int i = 0; i < G; ++i)
          if (reqs[r].collectors[u].gateway == i) hosts.push_back({L.x(t, r, u, i), 1.0});
        add_row(m, RowFamily::kCollectorSingleHost, fmt("chost_%d_%d_%d", t, r, u),
                std::move(hosts), Sense::kLe, 1.0);
      }

    // Devices.
    for (int d = 0; d < D; ++d) {
      const double c = device_slot_cost(snap, rates, t, d);
      std::vector<Term> drain;
      if (std::isfinite(c) && c != 0.0) drain.push_back({L.phi(t, d), c});
      balance(RowFamily::kDeviceEnergyBalance, "dbal", d, drain);
    }

    // Servers.
    for (int s = 0; s < S; ++s) {
      std::vector<Term> load, sink;
      for (int r = 0; r < R; ++r)
        for (int v = 0; v < static_cast<int>(reqs[r].processors.size()); ++v) {
          load.push_back({L.y(t, r, v, s), reqs[r].processors[v].demand});
          sink.push_back({L.y(t, r, v, s), reqs[r].processors[v].sink_bandwidth});
        }
      add_row(m, RowFamily::kServerCpu, fmt("scpu_%d_%d", t, s), load, Sense::kLe,
              net.server_caps.cpu_capacity);
      const int n = net.server_node(s);
      add_row(m, RowFamily::kServerEnergyBounds, fmt("scap_%d_%d", t, s), {{L.e(t, n), 1.0}},
              Sense::kLe, net.server_caps.battery_capacity);
      std::vector<Term> drain;
      for (const auto& term : load) drain.push_back({term.var, term.coef * ks});
      balance(RowFamily::kServerEnergyBalance, "sbal", n, drain);
      add_row(m, RowFamily::kServerSinkBandwidth, fmt("sink_%d_%d", t, s), std::move(sink),
              Sense::kLe, link_cap);
    }
    for (int r = 0; r < R; ++r)
      for (int v = 0; v < static_cast<int>(reqs[r].processors.size()); ++v) {
        std::vector<Term> hosts;
        for (int s = 0; s < S; ++s) hosts.push_back({L.y(t, r, v, s), 1.0});
        add_row(m, RowFamily::kProcessorSingleHost, fmt("phost_%d_%d_%d", t, r, v),
                std::move(hosts), Sense::kLe, 1.0);
      }

    // Completion and routing.
    for (int r = 0; r < R; ++r) {
      const auto& dag = reqs[r];
      for (int u = 0; u < static_cast<int>(dag.collectors.size()); ++u) {
        std::vector<Term> terms{{L.z(t, r), 1.0}};
        for (int i = 0; i < G; ++i)
          if (dag.collectors[u].gateway == i) terms.push_back({L.x(t, r, u, i), -1.0});
        add_row(m, RowFamily::kMergeNeedsCollector, fmt("mc_%d_%d_%d", t, r, u), std::move(terms),
                Sense::kLe, 0.0);
      }
      for (int v = 0; v < static_cast<int>(dag.processors.size()); ++v) {
        std::vector<Term> terms{{L.z(t, r), 1.0}};
        for (int s = 0; s < S; ++s) terms.push_back({L.y(t, r, v, s), -1.0});
        add_row(m, RowFamily::kMergeNeedsProcessor, fmt("mp_%d_%d_%d", t, r, v), std::move(terms),
                Sense::kLe, 0.0);
      }
      for (const auto& e : dag.edges) {
        const int u = e.collector, v = e.processor;
        for (int i = 0; i < G; ++i) {
          std::vector<Term> terms;
          for (int s = 0; s < S; ++s)
            if (net.has_gateway_server_link(i, s)) terms.push_back({L.l(t, r, u, v, i, s), 1.0});
          if (dag.collectors[u].gateway == i) terms.push_back({L.x(t, r, u, i), -1.0});
          add_row(m, RowFamily::kRouteFromCollector, fmt("rc_%d_%d_%d_%d_%d", t, r, u, v, i),
                  std::move(terms), Sense::kEq, 0.0);
        }
        for (int s = 0; s < S; ++s) {
          std::vector<Term> terms;
          for (int i = 0; i < G; ++i)
            if (net.has_gateway_server_link(i, s)) terms.push_back({L.l(t, r, u, v, i, s), 1.0});
          terms.push_back({L.y(t, r, v, s), -1.0});
          add_row(m, RowFamily::kRouteToProcessor, fmt("rp_%d_%d_%d_%d_%d", t, r, u, v, s),
                  std::move(terms), Sense::kEq, 0.0);
        }
      }
    }
    for (const auto& [i, s] : net.gateway_server_links) {
      std::vector<Term> terms;
      for (int r = 0; r < R; ++r)
        for (const auto& e : reqs[r].edges)
          terms.push_back({L.l(t, r, e.collector, e.processor, i, s), e.bandwidth});
      add_row(m, RowFamily::kGatewayServerBandwidth, fmt("gsbw_%d_%d_%d", t, i, s),
              std::move(terms), Sense::kLe, link_cap);
    }

    // Ages.
    for (int r = 0; r < R; ++r)
      linearize_aos(m, L.z(t, r), t == 0 ? -1 : L.a(t - 1, r),
                    static_cast<double>(snap.initial_age(r)), L.lam(t, r), L.a(t, r), psi,
                    fmt("%d_%d", t, r));
  }

  // Epigraph: T * eta >= past + sum_t a_t for every request.
  for (int r = 0; r < R; ++r) {
    std::vector<Term> terms{{m.objective_var, static_cast<double>(snap.averaging_slots())}};
    for (int t = 0; t < T; ++t) terms.push_back({L.a(t, r), -1.0});
    add_row(m, RowFamily::kEpigraph, fmt("peak_%d", r), std::move(terms), Sense::kGe,
            snap.past_age_sum(r));
  }
  return m;
}

ModelDimensions dimensions_of(const SubstrateNetwork& net, const std::vector<DagRequest>& requests,
                              int horizon) {
  ModelDimensions d;
  d.horizon = horizon;
  d.devices = static_cast<int>(net.device_count());
  d.gateways = static_cast<int>(net.gateway_count());
  d.servers = static_cast<int>(net.server_count());
  d.gateway_server_links = static_cast<int>(net.gateway_server_links.size());
  d.nodes = static_cast<int>(net.node_count());
  for (const auto& dag : requests)
    d.requests.push_back({static_cast<int>(dag.collectors.size()),
                          static_cast<int>(dag.processors.size()),
                          static_cast<int>(dag.edges.size())});
  return d;
}

ModelCounts count_model(const ModelDimensions& d) {
  const long long T = d.horizon, D = d.devices, G = d.gateways, S = d.servers;
  const long long R = static_cast<long long>(d.requests.size());
  long long sum_x = 0, sum_y = 0, sum_l = 0, sum_rows = 0, sum_vnf = 0;
  for (const auto& r : d.requests) {
    sum_x += static_cast<long long>(r.collectors) * G;
    sum_y += static_cast<long long>(r.processors) * S;
    sum_l += static_cast<long long>(r.collectors) * r.processors * G * S;
    sum_rows += r.collectors + r.processors + static_cast<long long>(r.edges) * G +
                static_cast<long long>(r.edges) * S;
    sum_vnf += r.collectors + r.processors;
  }
  ModelCounts c;
  c.scheduling_binaries = T * (D + sum_x + sum_y + sum_l + R);
  c.variables = c.scheduling_binaries + T * (2LL * d.nodes + 2 * R) + 1;
  c.closed_form_rows =
      T * (sum_rows + d.gateway_server_links + 4 * S + 4 * R + 2LL * d.nodes + 5 * G + D);
  c.rows = c.closed_form_rows + T * sum_vnf + R;
  return c;
}

AuditReport audit_model(const MilpModel& m, const ModelDimensions& dims) {
  AuditReport rep;
  rep.expected = count_model(dims);
  auto fail = [&](std::string why) {
    rep.ok = false;
    rep.problems.push_back(std::move(why));
  };
  const int nvars = static_cast<int>(m.variables.size());
  long long binaries = 0;
  for (const auto& v : m.variables) {
    if (v.kind == VarKind::kBinary) {
      ++binaries;
      if (!(v.lower >= 0.0 && v.upper <= 1.0 && v.lower <= v.upper))
        fail("binary " + v.name + " has bounds outside [0,1]");
    } else if (!(v.lower <= v.upper)) {
      fail("variable " + v.name + " has crossed bounds");
    }
  }
  std::vector<long long> per_family(kRowFamilyCount, 0);
  for (const auto& c : m.constraints) {
    ++per_family[static_cast<int>(c.family)];
    for (const auto& t : c.terms)
      if (t.var < 0 || t.var >= nvars) {
        fail("row " + c.name + " references an undeclared variable");
        break;
      }
  }
  rep.actual.scheduling_binaries = binaries;
  rep.actual.variables = nvars;
  rep.actual.rows = static_cast<long long>(m.constraints.size());
  rep.actual.closed_form_rows =
      rep.actual.rows - per_family[static_cast<int>(RowFamily::kMergeNeedsCollector)] -
      per_family[static_cast<int>(RowFamily::kMergeNeedsProcessor)] -
      per_family[static_cast<int>(RowFamily::kEpigraph)];
  for (int f = 0; f < kRowFamilyCount; ++f)
    rep.family_rows.emplace_back(row_family_name(static_cast<RowFamily>(f)), per_family[f]);

  if (rep.actual.scheduling_binaries != rep.expected.scheduling_binaries)
    fail("scheduling binary count differs from the closed form");
  if (rep.actual.variables != rep.expected.variables) fail("variable count differs");
  if (rep.actual.closed_form_rows != rep.expected.closed_form_rows)
    fail("constraint count differs from the closed form");
  if (rep.actual.rows != rep.expected.rows) fail("emitted row count differs");

  // Every family must be present whenever the instance has anything to constrain.
  const bool has_requests = !dims.requests.empty() && dims.horizon > 0;
  for (int f = 0; f < kRowFamilyCount; ++f) {
    const auto fam = static_cast<RowFamily>(f);
    bool needed = dims.horizon > 0;
    switch (fam) {
      case RowFamily::kGatewayCpu:
      case RowFamily::kGatewayEnergyBounds:
      case RowFamily::kGatewayEnergyBalance:
      case RowFamily::kUploadRequired:
      case RowFamily::kUploadAtMostOne: needed = needed && dims.gateways > 0; break;
      case RowFamily::kServerCpu:
      case RowFamily::kServerEnergyBounds:
      case RowFamily::kServerEnergyBalance:
      case RowFamily::kServerSinkBandwidth: needed = needed && dims.servers > 0; break;
      case RowFamily::kDeviceEnergyBalance: needed = needed && dims.devices > 0; break;
      case RowFamily::kGatewayServerBandwidth: needed = needed && dims.gateway_server_links > 0; break;
      case RowFamily::kHarvestArrivalBound:
      case RowFamily::kHarvestHeadroom: needed = needed && dims.nodes > 0; break;
      case RowFamily::kRouteFromCollector:
      case RowFamily::kRouteToProcessor: {
        bool any_edge = false;
        for (const auto& r : dims.requests) any_edge = any_edge || r.edges > 0;
        needed = has_requests && any_edge && dims.gateways > 0 && dims.servers > 0;
        break;
      }
      default: needed = has_requests; break;
    }
    if (needed && per_family[f] == 0)
      fail(std::string("no rows emitted for family ") + row_family_name(fam));
  }
  if (m.objective_var < 0 || m.objective_var >= nvars) fail("objective variable missing");
  return rep;
}

void write_audit(std::ostream& out, const AuditReport& rep) {
  out << "status " << (rep.ok ? "ok" : "failed") << '\n';
  out << "scheduling_binaries " << rep.actual.scheduling_binaries << " expected "
      << rep.expected.scheduling_binaries << '\n';
  out << "variables " << rep.actual.variables << " expected " << rep.expected.variables << '\n';
  out << "closed_form_rows " << rep.actual.closed_form_rows << " expected "
      << rep.expected.closed_form_rows << '\n';
  out << "rows " << rep.actual.rows << " expected " << rep.expected.rows << '\n';
  for (const auto& [name, n] : rep.family_rows) out << "family " << name << ' ' << n << '\n';
  for (const auto& p : rep.problems) out << "problem " << p << '\n';
}

}  // namespace greeniot
