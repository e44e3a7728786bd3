#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "greeniot/config.hpp"
#include "greeniot/errors.hpp"
#include "greeniot/experiment.hpp"
#include "greeniot/milp.hpp"
#include "greeniot/simulator.hpp"
#include "greeniot/solvers.hpp"

using namespace greeniot;

namespace {

struct Common {
  std::string config_path;
  std::vector<std::string> settings;  // section.key=value
  std::uint64_t seed = 0;
  bool seed_given = false;
};

ExperimentConfig load(const Common& c) {
  ExperimentConfig cfg = c.config_path.empty() ? ExperimentConfig{} : load_config(c.config_path);
  for (const auto& s : c.settings) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects section.key=value, got " + s);
    apply_setting(cfg, s.substr(0, eq), s.substr(eq + 1));
  }
  if (c.seed_given) cfg.seed = c.seed;
  cfg.validate();
  return cfg;
}

void add_common(CLI::App* app, Common& c) {
  app->add_option("-c,--config", c.config_path, "configuration file")->check(CLI::ExistingFile);
  app->add_option("--set", c.settings, "override a setting, section.key=value");
  app->add_option_function<std::uint64_t>(
      "--seed", [&c](const std::uint64_t& s) { c.seed = s; c.seed_given = true; }, "master seed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-harvesting IoT service embedding simulator"};
  app.require_subcommand(1);

  Common run_opts;
  std::string out_dir = "results";
  std::string schedulers, axis, values, solver_cmd;
  int workers = 0, runs = 0;
  bool runtime = false, quiet = false;
  auto* run = app.add_subcommand("run", "run an experiment sweep and write CSVs");
  add_common(run, run_opts);
  run->add_option("-o,--out", out_dir, "output directory");
  run->add_option("--schedulers", schedulers, "comma-separated policies");
  run->add_option("--axis", axis, "sweep axis");
  run->add_option("--values", values, "comma-separated sweep values");
  run->add_option("--runs", runs, "episodes per point");
  run->add_option("-j,--workers", workers, "worker threads");
  run->add_option("--solver-cmd", solver_cmd, "external LP solver command with {input} {output}");
  run->add_flag("--runtime", runtime, "record decision wall time");
  run->add_flag("-q,--quiet", quiet, "no progress output");

  Common ep_opts;
  std::string ep_sched = "greedy";
  int ep_run = 0;
  auto* episode = app.add_subcommand("episode", "run one episode and print its age trace");
  add_common(episode, ep_opts);
  episode->add_option("-s,--scheduler", ep_sched, "policy");
  episode->add_option("--run", ep_run, "run index under the master seed");

  Common lp_opts;
  std::string lp_out;
  int lp_run = 0;
  bool audit = false;
  auto* lp = app.add_subcommand("export-lp", "write the full-horizon model of one episode");
  add_common(lp, lp_opts);
  lp->add_option("-o,--out", lp_out, "LP file (stdout when omitted)");
  lp->add_option("--run", lp_run, "run index under the master seed");
  lp->add_flag("--audit", audit, "print the model-size audit instead");

  Common show_opts;
  auto* show = app.add_subcommand("show-config", "print the effective configuration");
  add_common(show, show_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      ExperimentConfig cfg = load(run_opts);
      if (!schedulers.empty()) apply_setting(cfg, "experiment.schedulers", schedulers);
      if (!axis.empty()) apply_setting(cfg, "experiment.axis", axis);
      if (!values.empty()) apply_setting(cfg, "experiment.values", values);
      if (runs > 0) cfg.runs = runs;
      if (workers > 0) cfg.workers = workers;
      if (!solver_cmd.empty()) cfg.rhcop.external_command = solver_cmd;
      if (runtime) cfg.runtime_mode = true;
      cfg.validate();
      ProgressFn progress;
      if (!quiet)
        progress = [](const RawRow& r) {
          std::cerr << r.value << ' ' << r.scheduler << " seed " << r.seed << ": "
                    << (r.objective ? std::to_string(*r.objective) : "NA (" + r.note + ")")
                    << (r.violations.empty() ? "" : " INVARIANT VIOLATIONS") << '\n';
        };
      const ExperimentResult res = run_experiment(cfg, progress);
      write_results(out_dir, res, cfg.runtime_mode);
      write_summary_csv(std::cout, res.summary);
      long long bad = 0;
      for (const auto& r : res.raw) bad += static_cast<long long>(r.violations.size());
      if (bad) {
        std::cerr << bad << " invariant violations\n";
        return 3;
      }
    } else if (*episode) {
      const ExperimentConfig cfg = load(ep_opts);
      const Scenario sc = make_scenario(effective_episode(cfg), episode_seed(cfg.seed, ep_run));
      auto sched = make_scheduler(ep_sched, cfg.rhcop, cfg.gmmpre_window, cfg.random_time_limit_s,
                                  cfg.milp_time_limit_s, cfg.milp_binary_cap);
      const EpisodeResult res = run_episode(sc, *sched);
      write_episode_csv(std::cout, res);
      for (const auto& line : res.log) std::cerr << line << '\n';
      for (const auto& line : res.scheduler_stats.log) std::cerr << line << '\n';
    } else if (*lp) {
      const ExperimentConfig cfg = load(lp_opts);
      const Scenario sc = make_scenario(effective_episode(cfg), episode_seed(cfg.seed, lp_run));
      const InstanceSnapshot snap = offline_snapshot(sc);
      const MilpModel model = build_model(snap);
      if (audit) {
        write_audit(std::cout, audit_model(model, dimensions_of(sc.network, sc.requests, sc.horizon)));
      } else if (lp_out.empty()) {
        std::cout << export_lp(model);
      } else {
        std::ofstream f(lp_out);
        f << export_lp(model);
        if (!f) throw ExportError("cannot write " + lp_out);
      }
    } else if (*show) {
      write_config(std::cout, load(show_opts));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
