#pragma once

#include <string>
#include <vector>

#include "greeniot/milp.hpp"

namespace greeniot {

enum class SolveStatus { kOptimal, kFeasible, kInfeasible, kTimeout };
const char* status_name(SolveStatus s);

struct Solution {
  SolveStatus status = SolveStatus::kInfeasible;
  double objective = 0.0;
  std::vector<double> values;  // one per model variable; empty without a solution
  long long nodes = 0;
  double wall_ms = 0.0;

  bool has_solution() const { return !values.empty(); }
};

struct SolveOptions {
  double time_limit_s = 60.0;
  // Return the first schedule found instead of proving optimality.
  bool stop_at_first_feasible = false;
  // Within a slot, try requests with the largest age first; otherwise by index.
  bool order_by_age = true;
};

// Depth-first branch-and-bound over the scheduling binaries, slot by slot.
// Binaries other than z and phi must keep their natural bounds (x upper bounds
// from the collector locations, l upper bounds from the edges and links).
Solution solve_exact(const MilpModel& model, const InstanceSnapshot& snapshot,
                     const SolveOptions& options = {});

// Every bound, integrality and row violation beyond `tol`; empty when feasible.
std::vector<std::string> check_solution(const MilpModel& model, const std::vector<double>& values,
                                        double tol = 1e-6);

// Exhaustive enumeration of the free binaries (at most `max_binaries`).
Solution brute_force_oracle(const MilpModel& model, int max_binaries = 24);
Solution brute_force_oracle(const InstanceSnapshot& snapshot, int max_binaries = 24);

// Runs an external LP solver. `command` contains {input} and {output}
// placeholders; the output file holds `name value` lines, an `objective <v>`
// line and optionally `status <optimal|feasible|infeasible>`.
Solution external_solve(const std::string& lp_text, const MilpModel& model,
                        const std::string& command);
Solution parse_solution_text(const std::string& text, const MilpModel& model);

}  // namespace greeniot
