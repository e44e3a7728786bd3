#include "greeniot/workload.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "greeniot/errors.hpp"
#include "greeniot/substrate.hpp"

namespace greeniot {

double DagRequest::collector_demand() const {
  double s = 0.0;
  for (const auto& c : collectors) s += c.demand;
  return s;
}

double DagRequest::processor_demand() const {
  double s = 0.0;
  for (const auto& p : processors) s += p.demand;
  return s;
}

void WorkloadConfig::validate() const {
  if (requests < 0) throw ConfigError("request count must be non-negative");
  if (vnf_count < 2) throw ConfigError("a DAG needs at least two VNFs");
  if (collector_ratio >= 0.0) {
    const int nc = static_cast<int>(std::lround(collector_ratio * vnf_count));
    if (nc < 1 || nc > vnf_count - 1)
      throw ConfigError("collector ratio leaves no collector or no processor");
  }
  if (!(demand_min >= 0.0 && demand_min <= demand_max))
    throw ConfigError("bad compute demand range");
  if (!(bandwidth_min >= 0.0 && bandwidth_min <= bandwidth_max))
    throw ConfigError("bad bandwidth range");
  if (!(edge_probability >= 0.0 && edge_probability <= 1.0))
    throw ConfigError("edge probability must lie in [0, 1]");
  if (!(rate >= 0.0)) throw ConfigError("collector rate must be non-negative");
}

DagRequest generate_dag(const WorkloadConfig& config, int id, Rng& rng) {
  config.validate();
  const int n = config.vnf_count;
  int nc;
  if (config.collector_ratio >= 0.0) {
    nc = static_cast<int>(std::lround(config.collector_ratio * n));
  } else {
    nc = std::uniform_int_distribution<int>(1, n - 1)(rng);
  }
  const int np = n - nc;

  std::uniform_real_distribution<double> demand(config.demand_min, config.demand_max);
  std::uniform_real_distribution<double> bw(config.bandwidth_min, config.bandwidth_max);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> pick_p(0, np - 1);

  DagRequest dag;
  dag.id = id;
  for (int u = 0; u < nc; ++u) dag.collectors.push_back({demand(rng), config.rate, -1});
  for (int v = 0; v < np; ++v) {
    const double d = demand(rng);
    dag.processors.push_back({d, bw(rng)});
  }
  for (int u = 0; u < nc; ++u) {
    const bool connect = unit(rng) < config.edge_probability;
    const int v = pick_p(rng);
    const double b = bw(rng);
    if (connect || config.reattach_dangling) dag.edges.push_back({u, v, b});
  }
  return dag;
}

std::vector<DagRequest> generate_workload(const WorkloadConfig& config, Rng& rng) {
  std::vector<DagRequest> dags;
  for (int r = 0; r < config.requests; ++r) dags.push_back(generate_dag(config, r, rng));
  return dags;
}

void assign_vnfc_locations(std::vector<DagRequest>& dags, const SubstrateNetwork& network,
                           Rng& rng) {
  const int g = static_cast<int>(network.gateway_count());
  if (g < 1) throw ConfigError("collector placement needs at least one gateway");
  std::uniform_int_distribution<int> pick(0, g - 1);
  for (auto& dag : dags)
    for (auto& c : dag.collectors) c.gateway = pick(rng);
}

std::vector<std::string> validate_dag(const DagRequest& dag, int gateway_count) {
  std::vector<std::string> issues;
  const int nc = static_cast<int>(dag.collectors.size());
  const int np = static_cast<int>(dag.processors.size());
  if (nc < 1) issues.push_back("no collector VNF");
  if (np < 1) issues.push_back("no processor VNF");
  std::vector<int> out_degree(nc, 0);
  for (std::size_t e = 0; e < dag.edges.size(); ++e) {
    const auto& edge = dag.edges[e];
    if (edge.collector < 0 || edge.collector >= nc || edge.processor < 0 ||
        edge.processor >= np) {
      issues.push_back("edge " + std::to_string(e) + " has an endpoint out of range");
      continue;
    }
    if (edge.bandwidth < 0.0) issues.push_back("edge " + std::to_string(e) + " has negative bandwidth");
    ++out_degree[edge.collector];
    for (std::size_t f = 0; f < e; ++f)
      if (dag.edges[f].collector == edge.collector && dag.edges[f].processor == edge.processor)
        issues.push_back("duplicate edge " + std::to_string(e));
  }
  for (int u = 0; u < nc; ++u) {
    if (out_degree[u] == 0) issues.push_back("dangling collector " + std::to_string(u));
    const auto& c = dag.collectors[u];
    if (c.demand < 0.0 || c.rate < 0.0)
      issues.push_back("collector " + std::to_string(u) + " has a negative demand or rate");
    if (gateway_count >= 0 && (c.gateway < 0 || c.gateway >= gateway_count))
      issues.push_back("collector " + std::to_string(u) + " has no valid gateway");
  }
  for (int v = 0; v < np; ++v) {
    const auto& p = dag.processors[v];
    if (p.demand < 0.0 || p.sink_bandwidth < 0.0)
      issues.push_back("processor " + std::to_string(v) + " has a negative demand or bandwidth");
  }
  return issues;
}

void write_dags(std::ostream& out, const std::vector<DagRequest>& dags) {
  const auto old = out.precision(17);
  for (const auto& dag : dags) {
    out << "request " << dag.id << '\n';
    for (const auto& c : dag.collectors)
      out << "collector " << c.demand << ' ' << c.rate << ' ' << c.gateway << '\n';
    for (const auto& p : dag.processors)
      out << "processor " << p.demand << ' ' << p.sink_bandwidth << '\n';
    for (const auto& e : dag.edges)
      out << "edge " << e.collector << ' ' << e.processor << ' ' << e.bandwidth << '\n';
    out << "end\n";
  }
  out.precision(old);
}

std::vector<DagRequest> read_dags(std::istream& in) {
  std::vector<DagRequest> dags;
  DagRequest cur;
  bool open = false;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string kw;
    if (!(ls >> kw) || kw[0] == '#') continue;
    auto fail = [&](const std::string& why) {
      throw ConfigError("dag text line " + std::to_string(lineno) + ": " + why);
    };
    if (kw == "request") {
      if (open) fail("nested request");
      cur = DagRequest{};
      if (!(ls >> cur.id)) fail("missing id");
      open = true;
    } else if (kw == "end") {
      if (!open) fail("end without request");
      dags.push_back(cur);
      open = false;
    } else if (!open) {
      fail("entry outside a request");
    } else if (kw == "collector") {
      VnfC c;
      if (!(ls >> c.demand >> c.rate >> c.gateway)) fail("malformed collector");
      cur.collectors.push_back(c);
    } else if (kw == "processor") {
      VnfP p;
      if (!(ls >> p.demand >> p.sink_bandwidth)) fail("malformed processor");
      cur.processors.push_back(p);
    } else if (kw == "edge") {
      DagEdge e;
      if (!(ls >> e.collector >> e.processor >> e.bandwidth)) fail("malformed edge");
      cur.edges.push_back(e);
    } else {
      fail("unknown keyword '" + kw + "'");
    }
  }
  if (open) throw ConfigError("dag text ends inside a request");
  return dags;
}

bool AosTrace::replay_matches(const std::vector<int>& initial) const {
  if (served.size() != age.size()) return false;
  for (std::size_t r = 0; r < age.size(); ++r) {
    if (served[r].size() != age[r].size()) return false;
    int prev = initial.empty() ? 0 : initial.at(r);
    for (std::size_t t = 0; t < age[r].size(); ++t) {
      const int expect = served[r][t] ? 1 : prev + 1;
      if (age[r][t] != expect) return false;
      prev = expect;
    }
  }
  return true;
}

std::vector<double> AosTrace::time_average() const {
  std::vector<double> out;
  for (const auto& row : age) {
    double s = 0.0;
    for (int a : row) s += a;
    out.push_back(row.empty() ? 0.0 : s / static_cast<double>(row.size()));
  }
  return out;
}

}  // namespace greeniot
