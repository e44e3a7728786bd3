#pragma once

// Hand-built instances shared by the tests.

#include <random>
#include <vector>

#include "greeniot/milp.hpp"
#include "greeniot/rng.hpp"
#include "greeniot/simulator.hpp"
#include "greeniot/substrate.hpp"
#include "greeniot/workload.hpp"

namespace fixtures {

using namespace greeniot;

// Gateways on a line, devices 10 m from their gateway, full gateway-server mesh.
inline SubstrateNetwork line_network(int gateways, int servers, int devices_per_gateway) {
  SubstrateNetwork net;
  net.area_side = 1000.0;
  net.sink = {500.0, 500.0};
  net.device_caps = {10.0, 0.0, 0.0, 0.0, 30.0, 0.2};
  net.gateway_caps = {100.0, 1000.0, 170.0, 500.0, 30.0, 0.2};
  net.server_caps = {100.0, 1000.0, 170.0, 500.0, 30.0, 0.2};
  net.channel = ChannelParams::from_db(30.0, 1.0, 2.5, 200e3, -95.0);
  net.link_capacity = 1e9;
  for (int i = 0; i < gateways; ++i) net.gateways.push_back({{100.0 + 100.0 * i, 100.0}, {}});
  for (int s = 0; s < servers; ++s) net.servers.push_back({{100.0 + 100.0 * s, 800.0}});
  for (int i = 0; i < gateways; ++i)
    for (int k = 0; k < devices_per_gateway; ++k) {
      const int d = static_cast<int>(net.devices.size());
      net.devices.push_back({i, {100.0 + 100.0 * i, 110.0}});
      net.gateways[i].devices.push_back(d);
      net.wireless_links.emplace_back(d, i);
    }
  for (int i = 0; i < gateways; ++i)
    for (int s = 0; s < servers; ++s) net.gateway_server_links.emplace_back(i, s);
  for (int s = 0; s < servers; ++s) net.server_sink_links.push_back(s);
  return net;
}

// One collector at `gateway` feeding one processor.
inline DagRequest chain_request(int id, int gateway, double c_demand, double p_demand,
                                double bandwidth = 20e3) {
  DagRequest r;
  r.id = id;
  r.collectors.push_back({c_demand, 100e3, gateway});
  r.processors.push_back({p_demand, bandwidth});
  r.edges.push_back({0, 0, bandwidth});
  return r;
}

// Gain giving a ~0.06 J upload at 10 m.
inline double good_gain(const SubstrateNetwork& net) {
  return channel_gain(net.channel, 10.0, 1.0);
}

inline InstanceSnapshot snapshot(const SubstrateNetwork& net, const std::vector<DagRequest>& reqs,
                                 int horizon, double arrival, double level_fraction) {
  InstanceSnapshot s;
  s.network = &net;
  s.requests = &reqs;
  s.horizon = horizon;
  s.arrivals.assign(horizon, std::vector<double>(net.node_count(), arrival));
  s.gains.assign(horizon, std::vector<double>(net.device_count(), good_gain(net)));
  for (std::size_t n = 0; n < net.node_count(); ++n)
    s.initial_levels.push_back(level_fraction *
                               net.caps_of_node(static_cast<int>(n)).battery_capacity);
  return s;
}

// Random instance small enough for exhaustive enumeration. Data live in the
// struct so the snapshot's pointers stay valid.
struct TinyInstance {
  SubstrateNetwork net;
  std::vector<DagRequest> reqs;
  InstanceSnapshot snap;
};

inline void make_tiny(TinyInstance& inst, Rng& rng) {
  std::uniform_int_distribution<int> two(1, 2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int G = 1, S = two(rng), D = two(rng);
  const int R = two(rng);
  const int T = two(rng);
  inst.net = line_network(G, S, D);
  inst.reqs.clear();
  for (int r = 0; r < R; ++r)
    inst.reqs.push_back(chain_request(r, 0, 10.0 + 90.0 * u(rng), 10.0 + 90.0 * u(rng)));
  InstanceSnapshot& s = inst.snap;
  s = InstanceSnapshot{};
  s.network = &inst.net;
  s.requests = &inst.reqs;
  s.horizon = T;
  s.arrivals.assign(T, std::vector<double>(inst.net.node_count()));
  s.gains.assign(T, std::vector<double>(inst.net.device_count()));
  for (int t = 0; t < T; ++t) {
    for (auto& a : s.arrivals[t]) a = 40.0 * u(rng);
    for (int d = 0; d < D; ++d)
      s.gains[t][d] = u(rng) < 0.2 ? 0.0 : channel_gain(inst.net.channel, 10.0, 0.05 + u(rng));
  }
  for (std::size_t n = 0; n < inst.net.node_count(); ++n)
    s.initial_levels.push_back(u(rng) * inst.net.caps_of_node(static_cast<int>(n)).battery_capacity *
                               0.5);
  if (u(rng) < 0.5) {
    s.initial_ages.resize(R);
    for (auto& a : s.initial_ages) a = std::uniform_int_distribution<int>(0, 4)(rng);
  }
}

// Episode with constant arrivals and gains, history included, so forecasts
// equal the realization.
inline Scenario constant_scenario(const SubstrateNetwork& net, const std::vector<DagRequest>& reqs,
                                  int horizon, const std::vector<double>& arrival_per_node,
                                  double level_fraction, int history = 20) {
  Scenario sc;
  sc.network = net;
  sc.requests = reqs;
  sc.horizon = horizon;
  sc.seed = 1;
  const std::vector<double> g(net.device_count(), good_gain(net));
  auto& real = sc.realization;
  real.weather.assign(horizon, std::vector<int>(net.node_count(), 2));
  real.arrivals.assign(horizon, arrival_per_node);
  real.gains.assign(horizon, g);
  real.history_arrivals.assign(history, arrival_per_node);
  real.history_gains.assign(history, g);
  for (std::size_t n = 0; n < net.node_count(); ++n)
    sc.initial_levels.push_back(level_fraction *
                                net.caps_of_node(static_cast<int>(n)).battery_capacity);
  return sc;
}

// Small randomized configuration every policy, the offline one included, can
// handle quickly.
inline EpisodeConfig small_episode() {
  EpisodeConfig c;
  c.topology.gateways = 2;
  c.topology.servers = 2;
  c.topology.devices_per_gateway = 2;
  c.workload.requests = 2;
  c.horizon = 6;
  c.history = 60;
  return c;
}

}  // namespace fixtures
