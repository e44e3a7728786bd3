#include <charconv>
#include <cmath>
#include <string>
#include <unordered_set>

#include "greeniot/errors.hpp"
#include "greeniot/milp.hpp"

namespace greeniot {

namespace {

// Shortest text that parses back to the same double.
void append_number(std::string& out, double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

bool valid_name(const std::string& name) {
  if (name.empty() || name.size() > 255) return false;
  // A leading e/E reads as an exponent after a coefficient.
  const char c0 = name[0];
  if ((c0 >= '0' && c0 <= '9') || c0 == '.' || c0 == 'e' || c0 == 'E') return false;
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '_' || c == '.';
    if (!ok) return false;
  }
  return true;
}

void append_terms(std::string& out, const std::vector<Term>& terms, const MilpModel& m) {
  if (terms.empty()) {
    out += " 0 ";
    out += m.variables[m.objective_var].name;
    return;
  }
  int on_line = 0;
  for (const auto& t : terms) {
    if (on_line == 8) {
      out += "\n   ";
      on_line = 0;
    }
    out += t.coef < 0 ? " - " : " + ";
    append_number(out, std::abs(t.coef));
    out += ' ';
    out += m.variables[t.var].name;
    ++on_line;
  }
}

}  // namespace

std::string export_lp(const MilpModel& m) {
  std::unordered_set<std::string> seen;
  for (const auto& v : m.variables) {
    if (!valid_name(v.name)) throw ExportError("invalid variable name '" + v.name + "'");
    if (!seen.insert(v.name).second) throw ExportError("duplicate name '" + v.name + "'");
  }
  for (const auto& c : m.constraints) {
    if (!valid_name(c.name)) throw ExportError("invalid row name '" + c.name + "'");
    if (!seen.insert(c.name).second) throw ExportError("duplicate name '" + c.name + "'");
  }
  if (m.objective_var < 0) throw ExportError("model has no objective variable");
  if (!seen.insert("obj").second) throw ExportError("duplicate name 'obj'");

  std::string out;
  out.reserve(64 * (m.variables.size() + m.constraints.size()));
  out += "\\ min-max age of service model\n";
  out += "Minimize\n obj: ";
  out += m.variables[m.objective_var].name;
  out += "\nSubject To\n";
  for (const auto& c : m.constraints) {
    out += ' ';
    out += c.name;
    out += ':';
    append_terms(out, c.terms, m);
    out += c.sense == Sense::kLe ? " <= " : c.sense == Sense::kGe ? " >= " : " = ";
    append_number(out, c.rhs);
    out += '\n';
  }
  out += "Bounds\n";
  std::string binaries, generals;
  for (const auto& v : m.variables) {
    if (v.kind == VarKind::kBinary && v.lower == 0.0 && v.upper == 1.0) {
      binaries += ' ';
      binaries += v.name;
      binaries += '\n';
      continue;
    }
    out += ' ';
    if (v.lower == v.upper) {
      out += v.name;
      out += " = ";
      append_number(out, v.lower);
    } else if (std::isinf(v.upper)) {
      out += v.name;
      out += " >= ";
      append_number(out, v.lower);
    } else {
      append_number(out, v.lower);
      out += " <= ";
      out += v.name;
      out += " <= ";
      append_number(out, v.upper);
    }
    out += '\n';
    if (v.kind == VarKind::kBinary) {
      generals += ' ';
      generals += v.name;
      generals += '\n';
    }
  }
  if (!binaries.empty()) out += "Binaries\n" + binaries;
  if (!generals.empty()) out += "Generals\n" + generals;
  out += "End\n";
  return out;
}

}  // namespace greeniot
