#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "greeniot/errors.hpp"
#include "greeniot/solvers.hpp"

namespace greeniot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double row_activity(const Constraint& c, const std::vector<double>& x) {
  double s = 0.0;
  for (const auto& t : c.terms) s += t.coef * x[t.var];
  return s;
}

bool row_holds(const Constraint& c, double act, double tol) {
  switch (c.sense) {
    case Sense::kLe: return act <= c.rhs + tol;
    case Sense::kGe: return act >= c.rhs - tol;
    case Sense::kEq: return std::abs(act - c.rhs) <= tol;
  }
  return false;
}

}  // namespace

std::vector<std::string> check_solution(const MilpModel& model, const std::vector<double>& x,
                                        double tol) {
  std::vector<std::string> out;
  if (x.size() != model.variables.size()) {
    out.push_back("value vector has " + std::to_string(x.size()) + " entries, model has " +
                  std::to_string(model.variables.size()));
    return out;
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto& v = model.variables[i];
    if (!std::isfinite(x[i])) {
      out.push_back(v.name + " is not finite");
      continue;
    }
    if (v.kind == VarKind::kBinary && x[i] != 0.0 && x[i] != 1.0)
      out.push_back(v.name + " is not binary");
    if (x[i] < v.lower - tol || x[i] > v.upper + tol)
      out.push_back(v.name + " = " + std::to_string(x[i]) + " violates its bounds");
  }
  for (const auto& c : model.constraints) {
    const double act = row_activity(c, x);
    if (!row_holds(c, act, tol))
      out.push_back(std::string(row_family_name(c.family)) + " row " + c.name + ": activity " +
                    std::to_string(act) + " vs " + std::to_string(c.rhs));
  }
  return out;
}

namespace {

// Enumerates the free binaries slot by slot. Continuous values follow from
// the rows: harvest takes its largest allowed value, everything else its
// smallest (equality rows pin balances and ages; the epigraph pins the peak).
class Enumerator {
 public:
  Enumerator(const MilpModel& m) : m_(m) {}

  Solution run(int max_binaries) {
    const auto start = std::chrono::steady_clock::now();
    const auto& L = m_.layout;
    T_ = L.horizon();
    per_slot_ = L.per_slot();
    const int n = static_cast<int>(m_.variables.size());
    rows_of_.assign(n, {});
    for (std::size_t r = 0; r < m_.constraints.size(); ++r)
      for (const auto& t : m_.constraints[r].terms) rows_of_[t.var].push_back(static_cast<int>(r));
    ready_at_.assign(T_ + 1, {});
    for (std::size_t r = 0; r < m_.constraints.size(); ++r) {
      int hi = 0;
      for (const auto& t : m_.constraints[r].terms) hi = std::max(hi, t.var);
      const int slot = per_slot_ > 0 ? std::min(hi / per_slot_, T_) : T_;
      ready_at_[slot].push_back(static_cast<int>(r));
    }
    int free_count = 0;
    x_.assign(n, 0.0);
    known_.assign(n, 0);
    for (int v = 0; v < n; ++v) {
      const auto& var = m_.variables[v];
      if (var.kind != VarKind::kBinary) continue;
      if (var.lower < var.upper) ++free_count;
      x_[v] = var.lower;
    }
    if (free_count > max_binaries)
      throw SizeError("oracle limited to " + std::to_string(max_binaries) + " free binaries, got " +
                      std::to_string(free_count));
    slot(0);
    Solution sol;
    sol.nodes = nodes_;
    if (found_) {
      sol.status = SolveStatus::kOptimal;
      sol.objective = best_obj_;
      sol.values = best_;
    }
    sol.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                      .count();
    return sol;
  }

 private:
  // Interval for variable v from rows whose other entries are all known.
  std::pair<double, double> interval(int v) const {
    double lo = m_.variables[v].lower, hi = m_.variables[v].upper;
    for (int ri : rows_of_[v]) {
      const auto& c = m_.constraints[ri];
      double coef = 0.0, rest = 0.0;
      bool usable = true;
      for (const auto& t : c.terms) {
        if (t.var == v) coef += t.coef;
        else if (!known_[t.var]) usable = false;
        else rest += t.coef * x_[t.var];
      }
      if (!usable || coef == 0.0) continue;
      const double bound = (c.rhs - rest) / coef;
      const bool upper = (c.sense == Sense::kLe) == (coef > 0.0);
      if (c.sense == Sense::kEq) {
        lo = std::max(lo, bound);
        hi = std::min(hi, bound);
      } else if (upper) {
        hi = std::min(hi, bound);
      } else {
        lo = std::max(lo, bound);
      }
    }
    return {lo, hi};
  }

  bool settle(int v, bool take_high) {
    auto [lo, hi] = interval(v);
    if (lo > hi + 1e-6) return false;
    x_[v] = take_high ? hi : lo;
    if (!std::isfinite(x_[v])) return false;
    known_[v] = 1;
    return true;
  }

  bool rows_ok(int slot) const {
    for (int ri : ready_at_[slot]) {
      const auto& c = m_.constraints[ri];
      if (!row_holds(c, row_activity(c, x_), 1e-6)) return false;
    }
    return true;
  }

  void slot(int t) {
    const auto& L = m_.layout;
    if (t == T_) {
      const int eta = m_.objective_var;
      if (!settle(eta, false) || !rows_ok(T_)) {
        known_[eta] = 0;
        return;
      }
      known_[eta] = 0;
      if (!check_solution(m_, x_).empty()) return;
      if (!found_ || x_[eta] < best_obj_ - 1e-9) {
        found_ = true;
        best_obj_ = x_[eta];
        best_ = x_;
      }
      return;
    }
    binaries(t, t * per_slot_, t * per_slot_ + L.binaries_per_slot());
  }

  void binaries(int t, int v, int end) {
    ++nodes_;
    if (v == end) {
      continuous(t);
      return;
    }
    const auto& var = m_.variables[v];
    known_[v] = 1;
    if (var.lower < var.upper) {
      x_[v] = 0.0;
      binaries(t, v + 1, end);
      x_[v] = 1.0;
      binaries(t, v + 1, end);
      x_[v] = var.lower;
    } else {
      binaries(t, v + 1, end);
    }
    known_[v] = 0;
  }

  void continuous(int t) {
    const auto& L = m_.layout;
    const int V = L.nodes();
    const int R = L.requests();
    std::vector<int> touched;
    bool ok = true;
    for (int n = 0; n < V && ok; ++n) {
      ok = settle(L.w(t, n), true);
      touched.push_back(L.w(t, n));
    }
    for (int r = 0; r < R && ok; ++r) {
      ok = settle(L.lam(t, r), false);
      touched.push_back(L.lam(t, r));
    }
    for (int n = 0; n < V && ok; ++n) {
      ok = settle(L.e(t, n), false);
      touched.push_back(L.e(t, n));
    }
    for (int r = 0; r < R && ok; ++r) {
      ok = settle(L.a(t, r), false);
      touched.push_back(L.a(t, r));
    }
    if (ok && rows_ok(t)) slot(t + 1);
    for (int v : touched) known_[v] = 0;
  }

  const MilpModel& m_;
  int T_ = 0, per_slot_ = 0;
  std::vector<std::vector<int>> rows_of_;
  std::vector<std::vector<int>> ready_at_;
  std::vector<double> x_;
  std::vector<char> known_;
  bool found_ = false;
  double best_obj_ = kInf;
  std::vector<double> best_;
  long long nodes_ = 0;
};

}  // namespace

Solution brute_force_oracle(const MilpModel& model, int max_binaries) {
  Enumerator e(model);
  return e.run(max_binaries);
}

Solution brute_force_oracle(const InstanceSnapshot& snapshot, int max_binaries) {
  const MilpModel model = build_model(snapshot);
  return brute_force_oracle(model, max_binaries);
}

}  // namespace greeniot
