#include <cmath>

#include "doctest.h"
#include "greeniot/errors.hpp"
#include "greeniot/substrate.hpp"
#include "../support/fixtures.hpp"

using namespace greeniot;

TEST_CASE("dBm conversion") {
  CHECK(dbm_to_watts(30.0) == doctest::Approx(1.0));
  CHECK(dbm_to_watts(0.0) == doctest::Approx(1e-3));
}

TEST_CASE("channel parameters from customary inputs") {
  const auto p = ChannelParams::from_db(30.0, 1.0, 2.5, 200e3, -95.0);
  CHECK(p.reference_gain == doctest::Approx(1e-3));
  // -95 dBm/Hz over 200 kHz
  CHECK(p.noise_power == doctest::Approx(std::pow(10.0, -12.5) * 200e3).epsilon(1e-12));
}

TEST_CASE("channel gain follows the path-loss law") {
  const auto p = ChannelParams::from_db(30.0, 1.0, 2.5, 200e3, -95.0);
  CHECK(channel_gain(p, 1.0, 1.0) == doctest::Approx(1e-3));
  CHECK(channel_gain(p, 10.0, 2.0) == doctest::Approx(2e-3 * std::pow(10.0, -2.5)));
  CHECK_THROWS_AS(channel_gain(p, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(channel_gain(p, 5.0, -1.0), DomainError);
}

TEST_CASE("required power achieves the Shannon rate") {
  const auto p = ChannelParams::from_db(30.0, 1.0, 2.5, 200e3, -95.0);
  const double g = channel_gain(p, 20.0, 0.7);
  for (double rate : {1e3, 100e3, 400e3}) {
    const double power = required_tx_power(p, rate, g);
    const double achieved = p.bandwidth * std::log2(1.0 + power * g / p.noise_power);
    CHECK(achieved == doctest::Approx(rate).epsilon(1e-9));
  }
  CHECK(required_tx_power(p, 0.0, g) == 0.0);
  CHECK_THROWS_AS(required_tx_power(p, 1e3, 0.0), InfeasibleLinkError);
}

TEST_CASE("drain per megacycle") {
  NodeCapacities c{100.0, 1000.0, 170.0, 500.0, 30.0, 0.2};
  CHECK(c.drain_per_megacycle() == doctest::Approx(0.33));
  c.base_power = 600.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("random topology respects its configuration") {
  TopologyConfig cfg;
  cfg.gateways = 4;
  cfg.servers = 2;
  cfg.devices_per_gateway = 5;
  Rng rng = make_rng(7, Stream::kTopology);
  const auto net = build_topology(cfg, rng);
  CHECK(net.gateway_count() == 4);
  CHECK(net.server_count() == 2);
  CHECK(net.device_count() == 20);
  CHECK(net.node_count() == 26);
  CHECK(net.gateway_server_links.size() == 8);
  CHECK(net.server_sink_links.size() == 2);
  for (std::size_t d = 0; d < net.device_count(); ++d) {
    const double r = net.device_distance(static_cast<int>(d));
    CHECK(r >= cfg.min_device_distance - 1e-9);
    CHECK(r <= cfg.device_radius + 1e-9);
  }
  CHECK(net.gateway_node(0) == 20);
  CHECK(net.server_node(1) == 25);
  CHECK(net.caps_of_node(21).battery_capacity == 100.0);
  CHECK(net.caps_of_node(3).battery_capacity == 10.0);
}

TEST_CASE("topology is a function of the seed") {
  TopologyConfig cfg;
  Rng a = make_rng(3, Stream::kTopology), b = make_rng(3, Stream::kTopology);
  const auto n1 = build_topology(cfg, a), n2 = build_topology(cfg, b);
  for (std::size_t d = 0; d < n1.device_count(); ++d) {
    CHECK(n1.devices[d].position.x == n2.devices[d].position.x);
    CHECK(n1.devices[d].position.y == n2.devices[d].position.y);
  }
}

TEST_CASE("validation catches broken associations") {
  auto net = fixtures::line_network(2, 1, 2);
  CHECK_NOTHROW(net.validate());
  net.devices[0].gateway = 1;
  CHECK_THROWS_AS(net.validate(), ConfigError);
  net = fixtures::line_network(2, 1, 2);
  net.server_sink_links.push_back(0);
  CHECK_THROWS_AS(net.validate(), ConfigError);
}

TEST_CASE("bad topology configuration") {
  TopologyConfig cfg;
  Rng rng(1);
  cfg.device_radius = 0.5;
  CHECK_THROWS_AS(build_topology(cfg, rng), ConfigError);
  cfg = TopologyConfig{};
  cfg.gateways = 0;
  CHECK_THROWS_AS(build_topology(cfg, rng), ConfigError);
}
