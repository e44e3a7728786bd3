#include <cmath>
#include <cstdlib>
#include <string>

#include "doctest.h"
#include "greeniot/errors.hpp"
#include "greeniot/solvers.hpp"
#include "../support/fixtures.hpp"
#include "../support/oracles.hpp"

using namespace greeniot;

namespace {

bool have_python_cbc() {
  return std::system("python3 -c 'import pulp' >/dev/null 2>&1") == 0;
}

}  // namespace

TEST_CASE("exact search agrees with exhaustive enumeration on tiny instances") {
  Rng rng(777);
  int compared = 0, feasible = 0;
  while (compared < 200) {
    fixtures::TinyInstance inst;
    fixtures::make_tiny(inst, rng);
    const MilpModel m = build_model(inst.snap);
    if (oracles::free_binaries(m) > 24) continue;
    const Solution oracle = brute_force_oracle(m);
    const Solution exact = solve_exact(m, inst.snap);
    CAPTURE(compared);
    REQUIRE(oracle.has_solution() == exact.has_solution());
    if (exact.has_solution()) {
      ++feasible;
      CHECK(exact.status == SolveStatus::kOptimal);
      CHECK(std::abs(exact.objective - oracle.objective) <= 1e-6);
      CHECK(check_solution(m, exact.values).empty());
      CHECK(check_solution(m, oracle.values).empty());
    }
    ++compared;
  }
  CHECK(feasible > 100);
}

TEST_CASE("oracle refuses large instances") {
  const auto net = fixtures::line_network(2, 2, 2);
  std::vector<DagRequest> reqs{fixtures::chain_request(0, 0, 20, 30),
                               fixtures::chain_request(1, 1, 20, 30)};
  const auto snap = fixtures::snapshot(net, reqs, 3, 10.0, 0.5);
  CHECK_THROWS_AS(brute_force_oracle(snap), SizeError);
}

TEST_CASE("ample resources serve every request every slot") {
  const auto net = fixtures::line_network(1, 1, 1);
  const std::vector<DagRequest> reqs{fixtures::chain_request(0, 0, 20, 30),
                                     fixtures::chain_request(1, 0, 20, 30)};
  const auto snap = fixtures::snapshot(net, reqs, 4, 50.0, 1.0);
  const MilpModel m = build_model(snap);
  const Solution s = solve_exact(m, snap);
  REQUIRE(s.has_solution());
  CHECK(s.objective == doctest::Approx(1.0));
}

TEST_CASE("no energy means no service") {
  const auto net = fixtures::line_network(1, 1, 1);
  const std::vector<DagRequest> reqs{fixtures::chain_request(0, 0, 20, 30)};
  const auto snap = fixtures::snapshot(net, reqs, 4, 0.0, 0.0);
  const Solution s = solve_exact(build_model(snap), snap);
  REQUIRE(s.has_solution());
  CHECK(s.objective == doctest::Approx(2.5));  // ages 1..4
}

TEST_CASE("solution checker reports violations") {
  const auto net = fixtures::line_network(1, 1, 1);
  const std::vector<DagRequest> reqs{fixtures::chain_request(0, 0, 20, 30)};
  const auto snap = fixtures::snapshot(net, reqs, 2, 5.0, 0.5);
  const MilpModel m = build_model(snap);
  const Solution s = solve_exact(m, snap);
  REQUIRE(s.has_solution());
  auto bad = s.values;
  bad[m.layout.z(0, 0)] = 0.5;
  CHECK_FALSE(check_solution(m, bad).empty());
  bad = s.values;
  bad[m.layout.a(1, 0)] += 3.0;
  CHECK_FALSE(check_solution(m, bad).empty());
  bad.pop_back();
  CHECK(check_solution(m, bad).size() == 1);
}

TEST_CASE("first feasible mode returns a valid schedule quickly") {
  const auto net = fixtures::line_network(2, 2, 1);
  const std::vector<DagRequest> reqs{fixtures::chain_request(0, 0, 20, 30),
                                     fixtures::chain_request(1, 1, 40, 60)};
  const auto snap = fixtures::snapshot(net, reqs, 3, 5.0, 0.5);
  const MilpModel m = build_model(snap);
  SolveOptions o;
  o.stop_at_first_feasible = true;
  const Solution s = solve_exact(m, snap, o);
  REQUIRE(s.has_solution());
  CHECK(check_solution(m, s.values).empty());
  CHECK(s.objective >= solve_exact(m, snap).objective - 1e-9);
}

TEST_CASE("solution text parsing") {
  const auto net = fixtures::line_network(1, 1, 1);
  const std::vector<DagRequest> reqs{fixtures::chain_request(0, 0, 20, 30)};
  const auto snap = fixtures::snapshot(net, reqs, 1, 5.0, 0.5);
  const MilpModel m = build_model(snap);
  const Solution s = parse_solution_text("status feasible\nobjective 1\nz_0_0 0.9999\n", m);
  CHECK(s.status == SolveStatus::kFeasible);
  CHECK(s.values[m.layout.z(0, 0)] == 1.0);
  CHECK_THROWS_AS(parse_solution_text("objective 1\nbogus 1\n", m), SolverOutputError);
  CHECK_THROWS_AS(parse_solution_text("z_0_0 1\n", m), SolverOutputError);
  CHECK_THROWS_AS(parse_solution_text("objective one\n", m), SolverOutputError);
  CHECK_THROWS_AS(parse_solution_text("status weird\nobjective 1\n", m), SolverOutputError);
  CHECK_THROWS_AS(parse_solution_text("status infeasible\n", m), SolverInfeasibleError);
}

TEST_CASE("external solver failure classes") {
  const auto net = fixtures::line_network(1, 1, 1);
  const std::vector<DagRequest> reqs{fixtures::chain_request(0, 0, 20, 30)};
  const auto snap = fixtures::snapshot(net, reqs, 1, 5.0, 0.5);
  const MilpModel m = build_model(snap);
  const std::string lp = export_lp(m);
  CHECK_THROWS_AS(external_solve(lp, m, "true"), SolverProcessError);
  CHECK_THROWS_AS(external_solve(lp, m, "false {input} {output}"), SolverProcessError);
  CHECK_THROWS_AS(external_solve(lp, m, "true {input} {output}"), SolverOutputError);
  CHECK_THROWS_AS(external_solve(lp, m, "test -s {input} && echo garbage > {output}"),
                  SolverOutputError);
  CHECK_THROWS_AS(
      external_solve(lp, m, "test -s {input} && printf 'status infeasible\\n' > {output}"),
      SolverInfeasibleError);
  const Solution s = external_solve(
      lp, m, "grep -q maxage {input} && printf 'objective 1\\nz_0_0 1\\n' > {output}");
  CHECK(s.status == SolveStatus::kOptimal);
  CHECK(s.objective == 1.0);
}

TEST_CASE("CBC agrees with the exact search" * doctest::skip(!have_python_cbc())) {
  Rng rng(31);
  for (int k = 0; k < 5; ++k) {
    fixtures::TinyInstance inst;
    fixtures::make_tiny(inst, rng);
    const MilpModel m = build_model(inst.snap);
    const Solution exact = solve_exact(m, inst.snap);
    const std::string cmd = std::string("python3 ") + GREENIOT_ADAPTER + " {input} {output}";
    if (!exact.has_solution()) {
      CHECK_THROWS_AS(external_solve(export_lp(m), m, cmd), SolverInfeasibleError);
      continue;
    }
    const Solution ext = external_solve(export_lp(m), m, cmd);
    CHECK(ext.objective == doctest::Approx(exact.objective).epsilon(1e-6));
    CHECK(check_solution(m, ext.values, 1e-5).empty());
  }
}
