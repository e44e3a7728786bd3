#include "greeniot/substrate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "greeniot/errors.hpp"

namespace greeniot {

double distance(Position a, Position b) { return std::hypot(a.x - b.x, a.y - b.y); }

double NodeCapacities::drain_per_megacycle() const {
  if (cpu_capacity <= 0.0) return 0.0;
  return (peak_power - base_power) / cpu_capacity;
}

void NodeCapacities::validate() const {
  if (!(battery_capacity > 0.0)) throw ConfigError("battery capacity must be positive");
  if (!(cpu_capacity >= 0.0)) throw ConfigError("cpu capacity must be non-negative");
  if (!(base_power >= 0.0 && base_power <= peak_power))
    throw ConfigError("power must satisfy 0 <= base <= peak");
  if (!(panel_side >= 0.0)) throw ConfigError("panel side must be non-negative");
  if (!(panel_efficiency > 0.0 && panel_efficiency <= 1.0))
    throw ConfigError("panel efficiency must lie in (0, 1]");
}

double dbm_to_watts(double dbm) { return std::pow(10.0, dbm / 10.0) * 1e-3; }

ChannelParams ChannelParams::from_db(double path_loss_db, double reference_distance,
                                     double path_loss_exponent, double bandwidth,
                                     double noise_density_dbm_per_hz) {
  ChannelParams p;
  p.reference_gain = std::pow(10.0, -path_loss_db / 10.0);
  p.reference_distance = reference_distance;
  p.path_loss_exponent = path_loss_exponent;
  p.bandwidth = bandwidth;
  p.noise_power = dbm_to_watts(noise_density_dbm_per_hz) * bandwidth;
  return p;
}

void ChannelParams::validate() const {
  if (!(path_loss_exponent > 0.0)) throw ConfigError("path loss exponent must be positive");
  if (!(bandwidth > 0.0)) throw ConfigError("bandwidth must be positive");
  if (!(noise_power > 0.0)) throw ConfigError("noise power must be positive");
  if (!(reference_gain > 0.0 && reference_distance > 0.0))
    throw ConfigError("reference gain and distance must be positive");
}

const NodeCapacities& SubstrateNetwork::caps_of_node(int node) const {
  if (node < static_cast<int>(devices.size())) return device_caps;
  if (node < static_cast<int>(devices.size() + gateways.size())) return gateway_caps;
  return server_caps;
}

double SubstrateNetwork::device_distance(int d) const {
  const Device& dev = devices.at(d);
  return distance(dev.position, gateways.at(dev.gateway).position);
}

bool SubstrateNetwork::has_gateway_server_link(int gateway, int server) const {
  return std::find(gateway_server_links.begin(), gateway_server_links.end(),
                   std::pair<int, int>{gateway, server}) != gateway_server_links.end();
}

void SubstrateNetwork::validate() const {
  auto in_area = [this](Position p) {
    return p.x >= 0.0 && p.y >= 0.0 && p.x <= area_side && p.y <= area_side;
  };
  std::vector<int> owner(devices.size(), -1);
  for (std::size_t i = 0; i < gateways.size(); ++i) {
    for (int d : gateways[i].devices) {
      if (d < 0 || d >= static_cast<int>(devices.size()))
        throw ConfigError("gateway " + std::to_string(i) + " lists unknown device");
      if (owner[d] != -1)
        throw ConfigError("device " + std::to_string(d) + " associated twice");
      owner[d] = static_cast<int>(i);
    }
  }
  for (std::size_t d = 0; d < devices.size(); ++d) {
    if (owner[d] == -1 || owner[d] != devices[d].gateway)
      throw ConfigError("device " + std::to_string(d) + " association inconsistent");
    if (!in_area(devices[d].position)) throw ConfigError("device outside deployment area");
  }
  for (const auto& [d, i] : wireless_links) {
    if (d < 0 || d >= static_cast<int>(devices.size()) || devices[d].gateway != i)
      throw ConfigError("wireless link does not match association");
  }
  if (wireless_links.size() != devices.size())
    throw ConfigError("every device needs exactly one wireless link");
  std::vector<int> sink_links(servers.size(), 0);
  for (int s : server_sink_links) {
    if (s < 0 || s >= static_cast<int>(servers.size()))
      throw ConfigError("sink link references unknown server");
    ++sink_links[s];
  }
  for (std::size_t s = 0; s < servers.size(); ++s)
    if (sink_links[s] != 1) throw ConfigError("every server needs exactly one sink link");
  for (const auto& g : gateways)
    if (!in_area(g.position)) throw ConfigError("gateway outside deployment area");
  for (const auto& s : servers)
    if (!in_area(s.position)) throw ConfigError("server outside deployment area");
  device_caps.validate();
  gateway_caps.validate();
  server_caps.validate();
  channel.validate();
}

SubstrateNetwork build_topology(const TopologyConfig& config, Rng& rng) {
  if (config.gateways < 0 || config.servers < 0 || config.devices_per_gateway < 0)
    throw ConfigError("node counts must be non-negative");
  if (config.gateways == 0 && config.devices_per_gateway > 0)
    throw ConfigError("devices need at least one gateway");
  if (!(config.area_side > 0.0)) throw ConfigError("area side must be positive");
  if (config.device_radius < config.min_device_distance || config.min_device_distance <= 0.0)
    throw ConfigError("device radius must be at least the minimum device distance");

  SubstrateNetwork net;
  net.area_side = config.area_side;
  net.device_caps = config.device_caps;
  net.gateway_caps = config.gateway_caps;
  net.server_caps = config.server_caps;
  net.channel = config.channel;
  net.link_capacity = config.link_capacity;
  net.sink = {config.area_side / 2.0, config.area_side / 2.0};

  std::uniform_real_distribution<double> coord(0.0, config.area_side);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  net.gateways.resize(config.gateways);
  for (auto& g : net.gateways) g.position = {coord(rng), coord(rng)};
  net.servers.resize(config.servers);
  for (auto& s : net.servers) s.position = {coord(rng), coord(rng)};

  const double r_min2 = config.min_device_distance * config.min_device_distance;
  const double r_max2 = config.device_radius * config.device_radius;
  for (int i = 0; i < config.gateways; ++i) {
    const Position centre = net.gateways[i].position;
    for (int k = 0; k < config.devices_per_gateway; ++k) {
      Position p;
      // Rejection keeps the device inside the area; the annulus always
      // intersects the square because its centre lies inside.
      do {
        const double r = std::sqrt(r_min2 + unit(rng) * (r_max2 - r_min2));
        const double theta = 2.0 * std::numbers::pi * unit(rng);
        p = {centre.x + r * std::cos(theta), centre.y + r * std::sin(theta)};
      } while (p.x < 0.0 || p.y < 0.0 || p.x > config.area_side || p.y > config.area_side);
      const int d = static_cast<int>(net.devices.size());
      net.devices.push_back({i, p});
      net.gateways[i].devices.push_back(d);
      net.wireless_links.emplace_back(d, i);
    }
  }
  for (int i = 0; i < config.gateways; ++i)
    for (int s = 0; s < config.servers; ++s) net.gateway_server_links.emplace_back(i, s);
  for (int s = 0; s < config.servers; ++s) net.server_sink_links.push_back(s);

  net.validate();
  return net;
}

double channel_gain(const ChannelParams& params, double distance, double fading) {
  if (!(distance > 0.0)) throw DomainError("channel gain needs a positive distance");
  if (!(fading >= 0.0)) throw DomainError("fading draw must be non-negative");
  return fading * params.reference_gain *
         std::pow(distance / params.reference_distance, -params.path_loss_exponent);
}

double required_tx_power(const ChannelParams& params, double rate, double gain) {
  if (!(rate >= 0.0)) throw DomainError("rate must be non-negative");
  if (!(gain > 0.0)) throw InfeasibleLinkError("zero channel gain, upload impossible");
  return (std::exp2(rate / params.bandwidth) - 1.0) * params.noise_power / gain;
}

}  // namespace greeniot
