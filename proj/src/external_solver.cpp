#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <sys/wait.h>
#include <unistd.h>

#include "greeniot/errors.hpp"
#include "greeniot/solvers.hpp"

namespace greeniot {

namespace fs = std::filesystem;

namespace {

std::string replace_all(std::string s, const std::string& from, const std::string& to) {
  for (std::size_t pos = 0; (pos = s.find(from, pos)) != std::string::npos; pos += to.size())
    s.replace(pos, from.size(), to);
  return s;
}

std::string shell_quote(const std::string& s) { return "'" + replace_all(s, "'", "'\\''") + "'"; }

// Scratch directory removed on scope exit.
class TempDir {
 public:
  TempDir() {
    std::string tmpl = (fs::temp_directory_path() / "greeniot-XXXXXX").string();
    if (!mkdtemp(tmpl.data())) throw SolverProcessError("cannot create a scratch directory");
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

}  // namespace

Solution parse_solution_text(const std::string& text, const MilpModel& model) {
  std::unordered_map<std::string, int> index;
  for (std::size_t i = 0; i < model.variables.size(); ++i)
    index.emplace(model.variables[i].name, static_cast<int>(i));
  Solution sol;
  sol.values.assign(model.variables.size(), 0.0);
  bool have_objective = false;
  std::string status = "optimal";
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key) || key[0] == '#') continue;
    if (key == "status") {
      if (!(ls >> status)) throw SolverOutputError("status line without a value");
      continue;
    }
    double v = 0.0;
    std::string extra;
    if (!(ls >> v) || (ls >> extra))
      throw SolverOutputError("malformed solution line " + std::to_string(lineno) + ": " + line);
    if (key == "objective") {
      sol.objective = v;
      have_objective = true;
      continue;
    }
    auto it = index.find(key);
    if (it == index.end()) throw SolverOutputError("unknown variable '" + key + "' in solution");
    if (model.variables[it->second].kind == VarKind::kBinary) v = v > 0.5 ? 1.0 : 0.0;
    sol.values[it->second] = v;
  }
  if (status == "infeasible") throw SolverInfeasibleError("external solver reports infeasibility");
  if (status != "optimal" && status != "feasible")
    throw SolverOutputError("unrecognised solver status '" + status + "'");
  if (!have_objective) throw SolverOutputError("solution lacks an objective line");
  sol.status = status == "optimal" ? SolveStatus::kOptimal : SolveStatus::kFeasible;
  return sol;
}

Solution external_solve(const std::string& lp_text, const MilpModel& model,
                        const std::string& command) {
  if (command.find("{input}") == std::string::npos || command.find("{output}") == std::string::npos)
    throw SolverProcessError("solver command needs {input} and {output} placeholders");
  const auto start = std::chrono::steady_clock::now();
  TempDir dir;
  const fs::path input = dir.path() / "model.lp";
  const fs::path output = dir.path() / "model.sol";
  {
    std::ofstream f(input);
    f << lp_text;
    if (!f) throw SolverProcessError("cannot write the LP file");
  }
  std::string cmd = replace_all(command, "{input}", shell_quote(input.string()));
  cmd = replace_all(cmd, "{output}", shell_quote(output.string()));
  const int rc = std::system(cmd.c_str());
  if (rc == -1) throw SolverProcessError("cannot launch the solver");
  if (!WIFEXITED(rc) || WEXITSTATUS(rc) != 0)
    throw SolverProcessError("solver command failed with status " + std::to_string(rc));
  std::ifstream f(output);
  if (!f) throw SolverOutputError("solver produced no solution file");
  std::stringstream buf;
  buf << f.rdbuf();
  Solution sol = parse_solution_text(buf.str(), model);
  sol.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return sol;
}

}  // namespace greeniot
