#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "greeniot/rng.hpp"

namespace greeniot {

struct Position {
  double x = 0.0;
  double y = 0.0;
};

double distance(Position a, Position b);

// Physical parameters shared by a class of nodes. Power in watts, energy in
// joules, CPU in megacycles per slot, panel side in centimeters.
struct NodeCapacities {
  double battery_capacity = 0.0;
  double cpu_capacity = 0.0;
  double base_power = 0.0;
  double peak_power = 0.0;
  double panel_side = 0.0;
  double panel_efficiency = 0.2;

  // Joules drained per megacycle of load in one slot: (P1 - P0) / Cmax.
  double drain_per_megacycle() const;
  void validate() const;
};

struct ChannelParams {
  double reference_gain = 1e-3;     // C0, linear
  double reference_distance = 1.0;  // D0, meters
  double path_loss_exponent = 2.5;  // alpha
  double bandwidth = 200e3;         // B, Hz
  double noise_power = 0.0;         // watts over B

  // Builds parameters from the customary dB-style inputs.
  static ChannelParams from_db(double path_loss_db, double reference_distance,
                               double path_loss_exponent, double bandwidth,
                               double noise_density_dbm_per_hz);
  void validate() const;
};

double dbm_to_watts(double dbm);

struct Device {
  int gateway = -1;
  Position position;
};

struct Gateway {
  Position position;
  std::vector<int> devices;  // association set, device indices
};

struct Server {
  Position position;
};

// Node indexing shared by batteries, arrivals and forecasts: devices first,
// then gateways, then servers. The sink is not a battery-backed node.
class SubstrateNetwork {
 public:
  std::vector<Device> devices;
  std::vector<Gateway> gateways;
  std::vector<Server> servers;
  Position sink;

  std::vector<std::pair<int, int>> wireless_links;        // (device, gateway)
  std::vector<std::pair<int, int>> gateway_server_links;  // (gateway, server)
  std::vector<int> server_sink_links;                     // server per link

  NodeCapacities device_caps;
  NodeCapacities gateway_caps;
  NodeCapacities server_caps;
  ChannelParams channel;
  double link_capacity = 1e9;  // wired capacity, bits per second
  double area_side = 1000.0;

  std::size_t device_count() const { return devices.size(); }
  std::size_t gateway_count() const { return gateways.size(); }
  std::size_t server_count() const { return servers.size(); }
  std::size_t node_count() const {
    return devices.size() + gateways.size() + servers.size();
  }

  int device_node(int d) const { return d; }
  int gateway_node(int i) const { return static_cast<int>(devices.size()) + i; }
  int server_node(int s) const {
    return static_cast<int>(devices.size() + gateways.size()) + s;
  }
  const NodeCapacities& caps_of_node(int node) const;

  // Distance from a device to its associated gateway.
  double device_distance(int d) const;

  bool has_gateway_server_link(int gateway, int server) const;

  // Throws ConfigError listing the first broken invariant.
  void validate() const;
};

struct TopologyConfig {
  int gateways = 3;
  int servers = 3;
  int devices_per_gateway = 3;
  double area_side = 1000.0;
  // Devices are dropped uniformly (by area) in an annulus around their gateway.
  double device_radius = 20.0;
  double min_device_distance = 1.0;
  NodeCapacities device_caps{10.0, 0.0, 0.0, 0.0, 30.0, 0.2};
  NodeCapacities gateway_caps{100.0, 1000.0, 170.0, 500.0, 30.0, 0.2};
  NodeCapacities server_caps{100.0, 1000.0, 170.0, 500.0, 30.0, 0.2};
  ChannelParams channel = ChannelParams::from_db(30.0, 1.0, 2.5, 200e3, -95.0);
  double link_capacity = 1000e6;
};

SubstrateNetwork build_topology(const TopologyConfig& config, Rng& rng);

// g = h * C0 * (D / D0)^-alpha
double channel_gain(const ChannelParams& params, double distance, double fading);

// Transmit power needed to sustain `rate` bits/s over a link with power gain
// `gain`: (2^(rate/B) - 1) * noise / gain.
double required_tx_power(const ChannelParams& params, double rate, double gain);

}  // namespace greeniot
