#include "greeniot/experiment.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "greeniot/errors.hpp"

namespace greeniot {

std::uint64_t episode_seed(std::uint64_t master, int run) {
  return derive_seed(master, {static_cast<std::uint64_t>(run)});
}

std::vector<SummaryRow> aggregate(const std::vector<RawRow>& rows) {
  std::vector<SummaryRow> out;
  std::map<std::pair<std::string, std::string>, std::size_t> where;
  std::vector<std::vector<double>> samples;
  for (const auto& r : rows) {
    auto key = std::make_pair(r.value, r.scheduler);
    auto it = where.find(key);
    if (it == where.end()) {
      it = where.emplace(key, out.size()).first;
      out.push_back({r.value, r.scheduler, 0.0, 0.0, 0});
      samples.emplace_back();
    }
    if (r.objective) samples[it->second].push_back(*r.objective);
  }
  for (std::size_t k = 0; k < out.size(); ++k) {
    const auto& xs = samples[k];
    out[k].n = static_cast<int>(xs.size());
    if (xs.empty()) {
      out[k].mean = std::nan("");
      continue;
    }
    double s = 0.0;
    for (double x : xs) s += x;
    const double m = s / xs.size();
    double v = 0.0;
    for (double x : xs) v += (x - m) * (x - m);
    out[k].mean = m;
    out[k].stddev = xs.size() > 1 ? std::sqrt(v / (xs.size() - 1)) : 0.0;
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& config, const ProgressFn& progress) {
  config.validate();
  std::vector<std::string> points = config.values;
  if (config.axis.empty()) points = {"-"};
  const std::string key = config.axis.empty() ? "" : axis_setting(config.axis);

  std::vector<ExperimentConfig> point_cfg;
  for (const auto& v : points) {
    ExperimentConfig c = config;
    if (!key.empty()) apply_setting(c, key, v);
    c.axis.clear();
    c.values.clear();
    c.validate();
    point_cfg.push_back(std::move(c));
  }

  const int P = static_cast<int>(points.size());
  const int N = config.runs;
  const int M = static_cast<int>(config.schedulers.size());
  std::vector<RawRow> raw(static_cast<std::size_t>(P) * N * M);
  std::atomic<int> next{0};
  std::mutex lock;
  std::exception_ptr failure;

  auto work = [&] {
    for (;;) {
      const int job = next.fetch_add(1);
      if (job >= P * N) return;
      {
        std::lock_guard<std::mutex> g(lock);
        if (failure) return;
      }
      const int p = job / N, k = job % N;
      try {
        const ExperimentConfig& c = point_cfg[p];
        const std::uint64_t seed = episode_seed(config.seed, k);
        const Scenario sc = make_scenario(effective_episode(c), seed);
        for (int m = 0; m < M; ++m) {
          RawRow& row = raw[(static_cast<std::size_t>(p) * N + k) * M + m];
          row.value = points[p];
          row.scheduler = c.schedulers[m];
          row.seed = seed;
          auto sched = make_scheduler(c.schedulers[m], c.rhcop, c.gmmpre_window,
                                      c.random_time_limit_s, c.milp_time_limit_s,
                                      c.milp_binary_cap);
          try {
            const EpisodeResult res = run_episode(sc, *sched);
            row.objective = res.objective;
            row.runtime_ms = res.decide_ms;
            row.rejected = res.rejected_decisions;
            row.violations = res.invariant_violations(sc);
          } catch (const SizeError& e) {
            row.note = e.what();
          }
          if (progress) {
            std::lock_guard<std::mutex> g(lock);
            progress(row);
          }
        }
      } catch (...) {
        std::lock_guard<std::mutex> g(lock);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  const int W = std::max(1, std::min(config.workers, P * N));
  if (W == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < W; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  ExperimentResult res;
  res.raw = std::move(raw);
  res.summary = aggregate(res.raw);
  return res;
}

namespace {

std::string fmt_num(double x) {
  if (std::isnan(x)) return "NA";
  std::ostringstream o;
  o.precision(10);
  o << x;
  return o.str();
}

}  // namespace

void write_raw_csv(std::ostream& out, const std::vector<RawRow>& rows, bool with_runtime) {
  out << "value,scheduler,seed,objective,runtime_ms\n";
  for (const auto& r : rows)
    out << r.value << ',' << r.scheduler << ',' << r.seed << ','
        << (r.objective ? fmt_num(*r.objective) : "NA") << ','
        << (with_runtime && r.runtime_ms ? fmt_num(*r.runtime_ms) : "NA") << '\n';
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "value,scheduler,mean,stddev,n\n";
  for (const auto& r : rows)
    out << r.value << ',' << r.scheduler << ',' << fmt_num(r.mean) << ','
        << (r.n ? fmt_num(r.stddev) : "NA") << ',' << r.n << '\n';
}

void write_results(const std::string& dir, const ExperimentResult& result, bool with_runtime) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir + ": " + ec.message());
  std::ofstream raw(fs::path(dir) / "raw.csv");
  std::ofstream sum(fs::path(dir) / "summary.csv");
  if (!raw || !sum) throw ConfigError("cannot write results under " + dir);
  write_raw_csv(raw, result.raw, with_runtime);
  write_summary_csv(sum, result.summary);
  if (!raw || !sum) throw ConfigError("write failed under " + dir);
}

}  // namespace greeniot
