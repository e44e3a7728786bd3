#include <algorithm>
#include <map>

#include "doctest.h"
#include "greeniot/config.hpp"
#include "greeniot/experiment.hpp"
#include "greeniot/simulator.hpp"

using namespace greeniot;

namespace {

ExperimentConfig reduced() {
  ExperimentConfig c;
  c.episode.workload.requests = 2;
  c.episode.horizon = 8;
  c.episode.history = 100;
  c.rhcop.window = 4;
  c.runs = 4;
  c.seed = 3;
  c.milp_binary_cap = 5000;
  return c;
}

std::map<std::string, std::vector<double>> by_policy(const ExperimentResult& res) {
  std::map<std::string, std::vector<double>> m;
  for (const auto& r : res.raw) m[r.scheduler].push_back(r.objective.value_or(-1.0));
  return m;
}

}  // namespace

TEST_CASE("full episodes for every policy are clean") {
  const auto res = run_experiment(reduced());
  for (const auto& r : res.raw) {
    CAPTURE(r.scheduler);
    CAPTURE(r.seed);
    REQUIRE(r.objective.has_value());
    CHECK(r.violations.empty());
    CHECK(r.rejected == 0);
    CHECK(*r.objective >= 1.0);
    CHECK(*r.objective <= 4.5);
  }
  const auto m = by_policy(res);
  for (std::size_t k = 0; k < m.at("milp").size(); ++k)
    for (const auto& [name, xs] : m) CHECK(m.at("milp")[k] <= xs[k] + 1e-9);
}

TEST_CASE("unlimited computation serves everything every slot") {
  auto c = reduced();
  c.scenario = ResourceScenario::kBoth;
  const auto res = run_experiment(c);
  for (const auto& r : res.raw) {
    CAPTURE(r.scheduler);
    REQUIRE(r.objective.has_value());
    CHECK(*r.objective == doctest::Approx(1.0));
  }
}

TEST_CASE("no harvest and empty batteries leave every request unserved") {
  auto c = reduced();
  c.episode.initial_battery_fraction = 0.0;
  c.episode.topology.gateway_caps.panel_side = 0.0;
  c.episode.topology.server_caps.panel_side = 0.0;
  c.schedulers = {"greedy", "random", "rhcop"};
  const auto res = run_experiment(c);
  for (const auto& r : res.raw) CHECK(*r.objective == doctest::Approx(4.5));
}

TEST_CASE("episodes replay identically") {
  const auto ep = effective_episode(reduced());
  for (const char* name : {"greedy", "gmmpre", "rhcop", "random", "milp"}) {
    auto a = make_scheduler(name, {}, 8, 2.0, 60.0, 5000);
    auto b = make_scheduler(name, {}, 8, 2.0, 60.0, 5000);
    const Scenario sc = make_scenario(ep, 99);
    const auto ra = run_episode(sc, *a);
    const auto rb = run_episode(make_scenario(ep, 99), *b);
    CHECK(ra.ages == rb.ages);
    CHECK(ra.levels == rb.levels);
  }
}
