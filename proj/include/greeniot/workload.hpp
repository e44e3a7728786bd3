#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "greeniot/rng.hpp"

namespace greeniot {

class SubstrateNetwork;

struct VnfC {
  double demand = 0.0;  // megacycles
  double rate = 0.0;    // bits/s pulled from one associated device
  int gateway = -1;     // fixed location
};

struct VnfP {
  double demand = 0.0;
  double sink_bandwidth = 0.0;  // bits/s on the edge to the merger
};

// Collector -> processor edge.
struct DagEdge {
  int collector = 0;
  int processor = 0;
  double bandwidth = 0.0;
};

struct DagRequest {
  int id = 0;
  std::vector<VnfC> collectors;
  std::vector<VnfP> processors;
  std::vector<DagEdge> edges;

  std::size_t edge_count() const { return edges.size(); }
  double collector_demand() const;
  double processor_demand() const;
};

struct WorkloadConfig {
  int requests = 3;
  int vnf_count = 5;
  // Fraction of VNFs that are collectors; negative draws the split uniformly.
  double collector_ratio = -1.0;
  double demand_min = 10.0;
  double demand_max = 100.0;
  double edge_probability = 0.9;
  double bandwidth_min = 10e3;
  double bandwidth_max = 50e3;
  double rate = 100e3;
  bool reattach_dangling = true;

  void validate() const;
};

DagRequest generate_dag(const WorkloadConfig& config, int id, Rng& rng);
std::vector<DagRequest> generate_workload(const WorkloadConfig& config, Rng& rng);

// Places every collector on a uniformly random gateway.
void assign_vnfc_locations(std::vector<DagRequest>& dags, const SubstrateNetwork& network,
                           Rng& rng);

// Empty when the request is well formed. Pass the gateway count to also check
// collector locations; -1 skips that check.
std::vector<std::string> validate_dag(const DagRequest& dag, int gateway_count = -1);

// Line format:
//   request <id>
//   collector <demand> <rate> <gateway>
//   processor <demand> <sink_bandwidth>
//   edge <collector> <processor> <bandwidth>
//   end
void write_dags(std::ostream& out, const std::vector<DagRequest>& dags);
std::vector<DagRequest> read_dags(std::istream& in);

// Ages per request and slot with the served flags that produced them.
struct AosTrace {
  std::vector<std::vector<int>> age;      // [request][slot]
  std::vector<std::vector<char>> served;  // [request][slot]

  // True when every age follows from the previous one and the served flag,
  // starting from the given initial ages (zero when empty).
  bool replay_matches(const std::vector<int>& initial = {}) const;
  // Mean age over slots per request.
  std::vector<double> time_average() const;
};

}  // namespace greeniot
