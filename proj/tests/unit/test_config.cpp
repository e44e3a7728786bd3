#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "greeniot/config.hpp"
#include "greeniot/errors.hpp"
#include "greeniot/experiment.hpp"

using namespace greeniot;

namespace {

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

ExperimentConfig tiny_experiment() {
  ExperimentConfig c;
  c.episode.topology.gateways = 1;
  c.episode.topology.servers = 1;
  c.episode.topology.devices_per_gateway = 1;
  c.episode.workload.requests = 2;
  c.episode.horizon = 4;
  c.episode.history = 30;
  c.schedulers = {"greedy", "random", "milp"};
  c.runs = 3;
  c.seed = 9;
  return c;
}

}  // namespace

TEST_CASE("configuration text") {
  const auto c = parse(R"(
# comment
[topology]
gateways = 5
panel_side = 60   # trailing comment
base_power = 100
[workload]
collector_ratio = 2:3
[energy]
solar = prose
scenario = both
[experiment]
schedulers = greedy, rhcop
axis = gateways
values = 1,3,5
[solver]
window = 4
)");
  CHECK(c.episode.topology.gateways == 5);
  CHECK(c.episode.topology.gateway_caps.panel_side == 60.0);
  CHECK(c.episode.topology.server_caps.panel_side == 60.0);
  CHECK(c.episode.topology.device_caps.panel_side == 30.0);
  CHECK(c.episode.topology.server_caps.base_power == 100.0);
  CHECK(c.episode.workload.collector_ratio == doctest::Approx(0.4));
  CHECK(c.solar == "prose");
  CHECK(c.scenario == ResourceScenario::kBoth);
  CHECK(c.schedulers == std::vector<std::string>{"greedy", "rhcop"});
  CHECK(c.values == std::vector<std::string>{"1", "3", "5"});
  CHECK(c.rhcop.window == 4);
}

TEST_CASE("configuration errors") {
  CHECK_THROWS_AS(parse("[nowhere]\n"), ConfigError);
  CHECK_THROWS_AS(parse("[topology]\ncolour = red\n"), ConfigError);
  CHECK_THROWS_AS(parse("gateways = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse("[topology]\ngateways\n"), ConfigError);
  CHECK_THROWS_AS(parse("[topology\n"), ConfigError);
  CHECK_THROWS_AS(parse("[topology]\ngateways = two\n"), ConfigError);
  CHECK_THROWS_AS(parse("[topology]\ngateways = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse("[energy]\nsolar = lunar\n"), ConfigError);
  CHECK_THROWS_AS(parse("[energy]\nscenario = infinite\n"), ConfigError);
  CHECK_THROWS_AS(parse("[experiment]\nschedulers = fifo\n"), ConfigError);
  CHECK_THROWS_AS(parse("[experiment]\naxis = colour\nvalues = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse("[experiment]\naxis = gateways\n"), ConfigError);
  CHECK_THROWS_AS(parse("[experiment]\nvalues = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse("[workload]\ncollector_ratio = 0:3\n"), ConfigError);
  CHECK_THROWS_AS(parse("[topology]\nbase_power = 600\n"), ConfigError);
  try {
    parse("[topology]\n\ngateways = x\n");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK_THROWS_AS(load_config("/nonexistent/file.cfg"), ConfigError);
}

TEST_CASE("written configuration parses back") {
  ExperimentConfig c;
  apply_setting(c, "topology.servers", "4");
  apply_setting(c, "energy.scenario", "gateways");
  apply_setting(c, "solver.external_command", "cbc {input} {output}");
  std::stringstream ss;
  write_config(ss, c);
  const auto back = parse(ss.str());
  CHECK(back.episode.topology.servers == 4);
  CHECK(back.scenario == ResourceScenario::kGateways);
  CHECK(back.rhcop.external_command == "cbc {input} {output}");
  std::stringstream again;
  write_config(again, back);
  CHECK(again.str() == ss.str());
}

TEST_CASE("scenario names") {
  CHECK(parse_scenario("none") == ResourceScenario::kLimited);
  CHECK(parse_scenario("limited") == ResourceScenario::kLimited);
  CHECK(parse_scenario("servers") == ResourceScenario::kServers);
  for (auto s : {ResourceScenario::kLimited, ResourceScenario::kGateways,
                 ResourceScenario::kServers, ResourceScenario::kBoth})
    CHECK(parse_scenario(scenario_name(s)) == s);
}

TEST_CASE("effective episode") {
  ExperimentConfig c;
  c.channel.path_loss_db = 40.0;
  c.scenario = ResourceScenario::kServers;
  const EpisodeConfig e = effective_episode(c);
  CHECK(e.topology.channel.reference_gain == doctest::Approx(1e-4));
  CHECK(e.topology.server_caps.drain_per_megacycle() == 0.0);
  CHECK(e.topology.server_caps.cpu_capacity >= 1e12);
  CHECK(e.topology.gateway_caps.drain_per_megacycle() == doctest::Approx(0.33));
  CHECK(e.solar.mean == SolarParams::table_defaults().mean);
  c.solar = "prose";
  CHECK(effective_episode(c).solar.mean == SolarParams::prose_defaults().mean);
}

TEST_CASE("sweep axes") {
  CHECK(axis_setting("gateways") == "topology.gateways");
  CHECK(axis_setting("panel") == "topology.panel_side");
  CHECK(axis_setting("window") == "solver.window");
  CHECK_THROWS_AS(axis_setting("colour"), ConfigError);
}

TEST_CASE("aggregation") {
  std::vector<RawRow> rows;
  rows.push_back({"1", "b", 1, 2.0, {}, 0, {}, ""});
  rows.push_back({"1", "a", 1, 1.0, {}, 0, {}, ""});
  rows.push_back({"1", "b", 2, 4.0, {}, 0, {}, ""});
  rows.push_back({"1", "a", 2, std::nullopt, {}, 0, {}, "refused"});
  rows.push_back({"2", "b", 1, 3.0, {}, 0, {}, ""});
  const auto s = aggregate(rows);
  REQUIRE(s.size() == 3);
  CHECK(s[0].scheduler == "b");
  CHECK(s[0].mean == 3.0);
  CHECK(s[0].stddev == doctest::Approx(std::sqrt(2.0)));
  CHECK(s[0].n == 2);
  CHECK(s[1].scheduler == "a");
  CHECK(s[1].n == 1);
  CHECK(s[1].stddev == 0.0);
  CHECK(s[2].value == "2");
  std::ostringstream os;
  write_summary_csv(os, s);
  CHECK(os.str() == "value,scheduler,mean,stddev,n\n1,b,3,1.414213562,2\n1,a,1,0,1\n2,b,3,0,1\n");
  std::ostringstream raw;
  write_raw_csv(raw, rows, false);
  CHECK(raw.str().find("1,a,2,NA,NA\n") != std::string::npos);
}

TEST_CASE("experiments are deterministic and independent of the worker count") {
  auto c = tiny_experiment();
  c.axis = "requests";
  c.values = {"1", "2"};
  const auto one = run_experiment(c);
  c.workers = 3;
  const auto three = run_experiment(c);
  REQUIRE(one.raw.size() == 2 * 3 * 3);
  std::ostringstream a, b;
  write_raw_csv(a, one.raw, false);
  write_raw_csv(b, three.raw, false);
  CHECK(a.str() == b.str());
  for (const auto& r : one.raw) {
    CHECK(r.objective.has_value());
    CHECK(r.violations.empty());
    CHECK((r.seed == episode_seed(9, 0) || r.seed == episode_seed(9, 1) ||
           r.seed == episode_seed(9, 2)));
  }
  // Same seeds across sweep points and policies.
  CHECK(one.raw[0].seed == one.raw[9].seed);
  CHECK(one.raw[0].seed == one.raw[1].seed);
  CHECK(episode_seed(9, 0) != episode_seed(9, 1));
  CHECK(one.summary.size() == 6);
}

TEST_CASE("refused instances become NA rows") {
  auto c = tiny_experiment();
  c.milp_binary_cap = 1;
  c.runs = 1;
  const auto res = run_experiment(c);
  bool found = false;
  for (const auto& r : res.raw)
    if (r.scheduler == "milp") {
      CHECK_FALSE(r.objective.has_value());
      CHECK(r.note.find("cap") != std::string::npos);
      found = true;
    }
  CHECK(found);
  for (const auto& s : res.summary)
    if (s.scheduler == "milp") CHECK(s.n == 0);
}

TEST_CASE("result files") {
  auto c = tiny_experiment();
  c.schedulers = {"greedy"};
  c.runs = 2;
  c.runtime_mode = true;
  const auto res = run_experiment(c);
  const auto dir = std::filesystem::temp_directory_path() / "greeniot-results-test";
  std::filesystem::remove_all(dir);
  write_results(dir.string(), res, true);
  std::ifstream raw(dir / "raw.csv"), sum(dir / "summary.csv");
  std::string header, line;
  std::getline(raw, header);
  CHECK(header == "value,scheduler,seed,objective,runtime_ms");
  std::getline(raw, line);
  CHECK(line.substr(line.rfind(',') + 1) != "NA");
  std::getline(sum, header);
  CHECK(header == "value,scheduler,mean,stddev,n");
  std::filesystem::remove_all(dir);
}
