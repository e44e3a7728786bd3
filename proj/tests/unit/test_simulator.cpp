#include <algorithm>
#include <set>
#include <sstream>

#include "doctest.h"
#include "greeniot/errors.hpp"
#include "greeniot/simulator.hpp"
#include "../support/fixtures.hpp"

using namespace greeniot;

namespace {

ScheduleDecision serve(const SubstrateNetwork& net, const std::vector<DagRequest>& reqs,
                       std::initializer_list<int> which) {
  ScheduleDecision d = ScheduleDecision::empty(net, reqs);
  for (int r : which) {
    d.served[r] = 1;
    std::fill(d.collector_on[r].begin(), d.collector_on[r].end(), 1);
    std::fill(d.processor_at[r].begin(), d.processor_at[r].end(), 0);
    for (const auto& c : reqs[r].collectors) d.uploader[c.gateway] = net.gateways[c.gateway].devices[0];
  }
  return d;
}

std::set<std::string> tags(const std::vector<Violation>& v) {
  std::set<std::string> s;
  for (const auto& x : v) s.insert(x.tag);
  return s;
}

// Scripted policy replaying fixed decisions.
class Scripted : public Scheduler {
 public:
  explicit Scripted(std::vector<ScheduleDecision> d) : d_(std::move(d)) {}
  std::string name() const override { return "scripted"; }
  ScheduleDecision decide(const Observation& obs) override { return d_.at(obs.slot); }

 private:
  std::vector<ScheduleDecision> d_;
};

}  // namespace

TEST_CASE("age recurrence") {
  CHECK(aos_update(0, false) == 1);
  CHECK(aos_update(4, false) == 5);
  CHECK(aos_update(4, true) == 1);
  CHECK_THROWS_AS(aos_update(-1, true), DomainError);
}

TEST_CASE("min-max objective examples") {
  std::vector<int> never(12);
  for (int t = 0; t < 12; ++t) never[t] = t + 1;
  CHECK(minmax_objective({never}) == doctest::Approx(6.5));
  CHECK(minmax_objective({std::vector<int>(12, 1)}) == doctest::Approx(1.0));
  CHECK(minmax_objective({{1, 1, 2}}) == doctest::Approx(4.0 / 3.0));
  CHECK(minmax_objective({{1, 2}, {1, 1}}) == doctest::Approx(1.5));
  CHECK(minmax_objective({}) == 0.0);
}

TEST_CASE("decision validation tags") {
  auto net = fixtures::line_network(1, 1, 1);
  std::vector<DagRequest> reqs{fixtures::chain_request(0, 0, 20.0, 30.0)};
  SlotState st{&net, &reqs, {5.0, 50.0, 50.0}, {fixtures::good_gain(net)}, 150e-9};

  CHECK(validate_decision(st, ScheduleDecision::empty(net, reqs)).empty());
  CHECK(validate_decision(st, serve(net, reqs, {0})).empty());

  auto d = serve(net, reqs, {0});
  d.collector_on[0][0] = 0;
  CHECK(tags(validate_decision(st, d)).count("merge_needs_collector"));
  CHECK(tags(validate_decision(st, d)).count("route_from_collector"));

  d = serve(net, reqs, {0});
  d.processor_at[0][0] = -1;
  CHECK(tags(validate_decision(st, d)).count("merge_needs_processor"));
  CHECK(tags(validate_decision(st, d)).count("route_to_processor"));

  d = serve(net, reqs, {0});
  d.uploader[0] = -1;
  CHECK(tags(validate_decision(st, d)) == std::set<std::string>{"upload_required"});

  d = serve(net, reqs, {0});
  d.processor_at[0][0] = 3;
  CHECK(tags(validate_decision(st, d)).count("processor_single_host"));

  d = serve(net, reqs, {0});
  d.served.push_back(0);
  CHECK(tags(validate_decision(st, d)) == std::set<std::string>{"shape"});

  SlotState poor = st;
  poor.stored = {5.0, 6.0, 50.0};  // collector needs 6.6 J
  CHECK(tags(validate_decision(poor, serve(net, reqs, {0}))) ==
        std::set<std::string>{"gateway_energy_balance"});
  poor.stored = {5.0, 50.0, 9.0};  // processor needs 9.9 J
  CHECK(tags(validate_decision(poor, serve(net, reqs, {0}))) ==
        std::set<std::string>{"server_energy_balance"});
  poor.stored = {0.01, 50.0, 50.0};
  CHECK(tags(validate_decision(poor, serve(net, reqs, {0}))) ==
        std::set<std::string>{"device_energy_balance"});
  poor = st;
  poor.gains = {0.0};
  CHECK(tags(validate_decision(poor, serve(net, reqs, {0}))) ==
        std::set<std::string>{"device_energy_balance"});

  auto heavy = reqs;
  heavy[0].collectors[0].demand = 1500.0;
  heavy[0].processors[0].demand = 1500.0;
  SlotState big{&net, &heavy, {5.0, 1e4, 1e4}, st.gains, 150e-9};
  CHECK(tags(validate_decision(big, serve(net, heavy, {0}))) ==
        std::set<std::string>{"gateway_cpu", "server_cpu"});

  auto thin = net;
  thin.link_capacity = 1e3;
  SlotState narrow{&thin, &reqs, st.stored, st.gains, 150e-9};
  CHECK(tags(validate_decision(narrow, serve(thin, reqs, {0}))) ==
        std::set<std::string>{"server_sink_bandwidth", "gateway_server_bandwidth"});

  auto other = fixtures::line_network(2, 1, 1);
  std::vector<DagRequest> r2{fixtures::chain_request(0, 0, 20.0, 30.0)};
  SlotState st2{&other, &r2, {5.0, 5.0, 50.0, 50.0, 50.0}, {1e-6, 1e-6}, 150e-9};
  d = serve(other, r2, {0});
  d.uploader[0] = 1;  // device of the other gateway
  CHECK(tags(validate_decision(st2, d)).count("upload_at_most_one"));
}

TEST_CASE("drains follow the placed functions") {
  auto net = fixtures::line_network(1, 1, 1);
  std::vector<DagRequest> reqs{fixtures::chain_request(0, 0, 20.0, 30.0)};
  SlotState st{&net, &reqs, {5.0, 50.0, 50.0}, {fixtures::good_gain(net)}, 150e-9};
  const auto dr = decision_drains(st, serve(net, reqs, {0}));
  const double tx = required_tx_power(net.channel, 100e3, fixtures::good_gain(net));
  CHECK(dr[0] == doctest::Approx(tx + 150e-9 * 100e3));
  CHECK(dr[1] == doctest::Approx(20.0 * 0.33));
  CHECK(dr[2] == doctest::Approx(30.0 * 0.33));
}

TEST_CASE("episode bookkeeping with a scripted policy") {
  auto net = fixtures::line_network(1, 1, 1);
  std::vector<DagRequest> reqs{fixtures::chain_request(0, 0, 20.0, 30.0)};
  // 4 J per slot; the collector costs 6.6 J, the processor 9.9 J.
  const Scenario sc = fixtures::constant_scenario(net, reqs, 4, {4.0, 4.0, 4.0}, 0.0);
  const auto on = serve(net, reqs, {0});
  const auto off = ScheduleDecision::empty(net, reqs);
  Scripted pol({on, off, on, on});
  const EpisodeResult res = run_episode(sc, pol);
  // Slot 0 holds 4 J and is rejected, slot 2 holds 12 J and succeeds, slot 3
  // leaves the server 6.1 J and is rejected.
  CHECK(res.rejected_decisions == 2);
  CHECK(res.ages[0] == std::vector<int>{1, 2, 1, 2});
  CHECK(res.objective == doctest::Approx(1.5));
  CHECK(res.invariant_violations(sc).empty());
  CHECK(res.levels[2][1] == doctest::Approx(12.0 - 6.6));
  CHECK(res.log.size() == 2);

  std::ostringstream os;
  write_episode_csv(os, res);
  const std::string csv = os.str();
  CHECK(csv.rfind("seed,scheduler,request,slot,served,age\n", 0) == 0);
  CHECK(csv.find("1,scripted,0,2,1,1\n") != std::string::npos);
  CHECK(csv.find("# summary seed=1 scheduler=scripted objective=1.5 rejected=2") !=
        std::string::npos);
}

TEST_CASE("invariant checker catches tampering") {
  auto net = fixtures::line_network(1, 1, 1);
  std::vector<DagRequest> reqs{fixtures::chain_request(0, 0, 20.0, 30.0)};
  const Scenario sc = fixtures::constant_scenario(net, reqs, 3, {50.0, 50.0, 50.0}, 0.5);
  Scripted pol({serve(net, reqs, {0}), serve(net, reqs, {0}), serve(net, reqs, {0})});
  EpisodeResult res = run_episode(sc, pol);
  REQUIRE(res.invariant_violations(sc).empty());
  CHECK(res.objective == 1.0);
  auto bad = res;
  bad.levels[1][1] += 1.0;
  CHECK_FALSE(bad.invariant_violations(sc).empty());
  bad = res;
  bad.ages[0][2] = 3;
  CHECK_FALSE(bad.invariant_violations(sc).empty());
  bad = res;
  bad.stored[0][0] = 80.0;
  CHECK_FALSE(bad.invariant_violations(sc).empty());
  bad = res;
  bad.objective = 2.0;
  CHECK_FALSE(bad.invariant_violations(sc).empty());
}

TEST_CASE("realizations") {
  const auto cfg = fixtures::small_episode();
  const Scenario a = make_scenario(cfg, 42);
  const Scenario b = make_scenario(cfg, 42);
  const Scenario c = make_scenario(cfg, 43);
  CHECK(a.realization.arrivals == b.realization.arrivals);
  CHECK(a.realization.gains == b.realization.gains);
  CHECK(a.realization.arrivals != c.realization.arrivals);
  CHECK(a.realization.arrivals.size() == 6);
  CHECK(a.realization.history_arrivals.size() == 60);
  CHECK(a.realization.history_gains.size() == 60);
  for (const auto& row : a.realization.arrivals)
    for (double x : row) CHECK(x >= 0.0);
  for (std::size_t n = 0; n < a.initial_levels.size(); ++n)
    CHECK(a.initial_levels[n] ==
          doctest::Approx(0.4 * a.network.caps_of_node(static_cast<int>(n)).battery_capacity));

  const Realization shared = draw_realization(a.network, cfg.solar, true, 6, 0, 5);
  for (const auto& row : shared.weather)
    CHECK(std::all_of(row.begin(), row.end(), [&](int w) { return w == row[0]; }));

  // Episode data do not depend on the history length.
  auto longer = cfg;
  longer.history = 100;
  const Scenario d = make_scenario(longer, 42);
  CHECK(d.network.gateways[0].position.x == a.network.gateways[0].position.x);
  CHECK(d.requests[0].collectors[0].demand == a.requests[0].collectors[0].demand);

  CHECK_THROWS_AS(draw_realization(a.network, cfg.solar, false, 0, 0, 1), ConfigError);
  auto broken = cfg;
  broken.initial_battery_fraction = 1.5;
  CHECK_THROWS_AS(make_scenario(broken, 1), ConfigError);
}

TEST_CASE("offline snapshot mirrors the scenario") {
  const Scenario sc = make_scenario(fixtures::small_episode(), 3);
  const InstanceSnapshot snap = offline_snapshot(sc);
  CHECK(snap.horizon == 6);
  CHECK(snap.arrivals == sc.realization.arrivals);
  CHECK(snap.initial_levels == sc.initial_levels);
  CHECK_NOTHROW(snap.validate());
}
