#pragma once

// Independent checks shared by the unit tests and the acceptance run.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "greeniot/milp.hpp"

namespace oracles {

using namespace greeniot;

constexpr double kInf = std::numeric_limits<double>::infinity();

// Feasible interval of lambda once z and a_prev are fixed and a is eliminated
// through the equality row. Reads nothing but the emitted rows and bounds.
struct Interval {
  double lo = -kInf, hi = kInf;
  double a_offset = 0.0, a_slope = 0.0;  // a = offset + slope * lambda
  bool well_formed = true;
};

inline Interval solve_rows(const MilpModel& m, int lam, int a, const std::map<int, double>& fixed) {
  Interval iv;
  int equalities = 0;
  for (const auto& c : m.constraints) {
    if (c.sense != Sense::kEq) continue;
    double ca = 0.0, cl = 0.0, rest = 0.0;
    for (const auto& t : c.terms) {
      if (t.var == a) ca += t.coef;
      else if (t.var == lam) cl += t.coef;
      else rest += t.coef * fixed.at(t.var);
    }
    if (ca == 0.0) iv.well_formed = false;
    else {
      iv.a_offset = (c.rhs - rest) / ca;
      iv.a_slope = -cl / ca;
    }
    ++equalities;
  }
  if (equalities != 1) iv.well_formed = false;
  if (!iv.well_formed) return iv;
  auto clip = [&](double coef, Sense s, double rhs) {
    if (coef == 0.0) {
      const bool ok = s == Sense::kLe ? 0.0 <= rhs + 1e-12
                    : s == Sense::kGe ? 0.0 >= rhs - 1e-12
                                      : std::abs(rhs) < 1e-12;
      if (!ok) iv.lo = kInf;
      return;
    }
    const double v = rhs / coef;
    if (s == Sense::kEq) {
      iv.lo = std::max(iv.lo, v);
      iv.hi = std::min(iv.hi, v);
    } else if ((s == Sense::kLe) == (coef > 0.0)) {
      iv.hi = std::min(iv.hi, v);
    } else {
      iv.lo = std::max(iv.lo, v);
    }
  };
  for (const auto& c : m.constraints) {
    if (c.sense == Sense::kEq) continue;
    double cl = 0.0, rhs = c.rhs;
    for (const auto& t : c.terms) {
      if (t.var == lam) {
        cl += t.coef;
      } else if (t.var == a) {
        cl += t.coef * iv.a_slope;
        rhs -= t.coef * iv.a_offset;
      } else {
        rhs -= t.coef * fixed.at(t.var);
      }
    }
    clip(cl, c.sense, rhs);
  }
  const auto& lv = m.variables[lam];
  clip(1.0, Sense::kGe, lv.lower);
  if (!std::isinf(lv.upper)) clip(1.0, Sense::kLe, lv.upper);
  const auto& av = m.variables[a];
  clip(iv.a_slope, Sense::kGe, av.lower - iv.a_offset);
  if (!std::isinf(av.upper)) clip(iv.a_slope, Sense::kLe, av.upper - iv.a_offset);
  return iv;
}

struct PairOutcome {
  int z = 0, a_prev = 0;
  bool unique = false;
  double lambda = 0.0, age = 0.0;
  bool matches() const {
    return unique && std::abs(lambda - (z ? a_prev : 0)) < 1e-9 &&
           std::abs(age - (z ? 1 : a_prev + 1)) < 1e-9;
  }
};

// Every (z, a_prev) in {0,1} x {1..12} with psi = 12. The previous age enters
// either as a constant or as a fixed variable.
inline std::vector<PairOutcome> linearization_table(bool variable_prev) {
  std::vector<PairOutcome> out;
  for (int zv = 0; zv <= 1; ++zv)
    for (int prev = 1; prev <= 12; ++prev) {
      MilpModel m;
      m.variables.push_back({"z", VarKind::kBinary, 0.0, 1.0});
      m.variables.push_back({"ap", VarKind::kContinuous, 0.0, kInf});
      m.variables.push_back({"lam", VarKind::kContinuous, 0.0, kInf});
      m.variables.push_back({"a", VarKind::kContinuous, 0.0, kInf});
      linearize_aos(m, 0, variable_prev ? 1 : -1, prev, 2, 3, 12.0, "k");
      const Interval iv = solve_rows(m, 2, 3, {{0, zv}, {1, prev}});
      PairOutcome p;
      p.z = zv;
      p.a_prev = prev;
      p.unique = iv.well_formed && m.constraints.size() == 4 && iv.lo <= iv.hi + 1e-12 &&
                 iv.hi - iv.lo < 1e-12;
      p.lambda = iv.lo;
      p.age = iv.a_offset + iv.a_slope * iv.lo;
      out.push_back(p);
    }
  return out;
}

inline int free_binaries(const MilpModel& m) {
  int n = 0;
  for (const auto& v : m.variables) n += v.kind == VarKind::kBinary && v.lower < v.upper;
  return n;
}

}  // namespace oracles
