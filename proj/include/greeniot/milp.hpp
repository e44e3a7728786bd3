#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace greeniot {

class SubstrateNetwork;
struct DagRequest;

enum class VarKind { kBinary, kContinuous };

struct Variable {
  std::string name;
  VarKind kind = VarKind::kContinuous;
  double lower = 0.0;
  double upper = 0.0;  // may be +infinity for continuous variables
};

enum class Sense { kLe, kGe, kEq };

// Constraint families, one per kind of physical or logical restriction.
enum class RowFamily {
  kHarvestArrivalBound,
  kHarvestHeadroom,
  kGatewayCpu,
  kCollectorSingleHost,
  kGatewayEnergyBounds,
  kGatewayEnergyBalance,
  kUploadRequired,
  kUploadAtMostOne,
  kDeviceEnergyBalance,
  kServerCpu,
  kProcessorSingleHost,
  kServerEnergyBounds,
  kServerEnergyBalance,
  kMergeNeedsCollector,
  kMergeNeedsProcessor,
  kRouteFromCollector,
  kRouteToProcessor,
  kGatewayServerBandwidth,
  kServerSinkBandwidth,
  kAgeAuxUpper,
  kAgeAuxLower,
  kAgeAuxUpperGate,
  kAgeUpdate,
  kEpigraph,
};
inline constexpr int kRowFamilyCount = static_cast<int>(RowFamily::kEpigraph) + 1;
const char* row_family_name(RowFamily f);

struct Term {
  int var = 0;
  double coef = 0.0;
};

struct Constraint {
  std::string name;
  std::vector<Term> terms;
  Sense sense = Sense::kLe;
  double rhs = 0.0;
  RowFamily family = RowFamily::kEpigraph;
};

// Everything the model needs about one planning window. Slot k of the window
// stores arrivals[k][node] before the slot-k decision; gains[k][device] is the
// power gain from a device to its gateway during slot k.
struct InstanceSnapshot {
  const SubstrateNetwork* network = nullptr;
  const std::vector<DagRequest>* requests = nullptr;
  int horizon = 0;
  std::vector<std::vector<double>> arrivals;
  std::vector<std::vector<double>> gains;
  std::vector<double> initial_levels;  // per node, joules
  std::vector<int> initial_ages;       // per request; empty means all zero
  double sense_energy_per_bit = 150e-9;
  double psi = 0.0;  // big-M; zero picks horizon + max initial age
  // Receding windows: ages already accrued before the window, per request,
  // and the slot count the objective averages over (zero means horizon).
  std::vector<double> past_age_sums;
  int objective_slots = 0;

  int initial_age(int r) const { return initial_ages.empty() ? 0 : initial_ages.at(r); }
  double past_age_sum(int r) const { return past_age_sums.empty() ? 0.0 : past_age_sums.at(r); }
  int averaging_slots() const { return objective_slots > 0 ? objective_slots : horizon; }
  double effective_psi() const;
  // Throws BuildError when a data array does not cover the window.
  void validate() const;
};

// Rate a device at gateway i must upload at: the largest collector rate
// located at i over all requests (0 when nothing is located there).
std::vector<double> gateway_upload_rates(const SubstrateNetwork& net,
                                         const std::vector<DagRequest>& requests);

// Per-slot energy (J) device d spends uploading, +infinity when the gain is 0.
double device_slot_cost(const InstanceSnapshot& snap, const std::vector<double>& rates, int t,
                        int d);

// Index arithmetic over the variable vector.
class ModelLayout {
 public:
  ModelLayout() = default;
  ModelLayout(const SubstrateNetwork& net, const std::vector<DagRequest>& requests, int horizon);

  int horizon() const { return horizon_; }
  int requests() const { return static_cast<int>(nc_.size()); }
  int nodes() const { return V_; }
  int per_slot() const { return per_slot_; }

  int phi(int t, int d) const { return t * per_slot_ + d; }
  int x(int t, int r, int u, int i) const { return t * per_slot_ + x_off_[r] + u * G_ + i; }
  int y(int t, int r, int v, int s) const { return t * per_slot_ + y_off_[r] + v * S_ + s; }
  int l(int t, int r, int u, int v, int i, int s) const {
    return t * per_slot_ + l_off_[r] + ((u * np_[r] + v) * G_ + i) * S_ + s;
  }
  int z(int t, int r) const { return t * per_slot_ + z_off_ + r; }
  int w(int t, int n) const { return t * per_slot_ + w_off_ + n; }
  int e(int t, int n) const { return t * per_slot_ + e_off_ + n; }
  int a(int t, int r) const { return t * per_slot_ + a_off_ + r; }
  int lam(int t, int r) const { return t * per_slot_ + lam_off_ + r; }
  int eta() const { return horizon_ * per_slot_; }
  int variable_count() const { return horizon_ * per_slot_ + 1; }
  int binaries_per_slot() const { return w_off_; }

 private:
  int horizon_ = 0, D_ = 0, G_ = 0, S_ = 0, V_ = 0;
  std::vector<int> nc_, np_, x_off_, y_off_, l_off_;
  int z_off_ = 0, w_off_ = 0, e_off_ = 0, a_off_ = 0, lam_off_ = 0, per_slot_ = 0;
};

struct MilpModel {
  std::vector<Variable> variables;
  std::vector<Constraint> constraints;
  int objective_var = -1;  // minimize this single variable
  ModelLayout layout;
  double psi = 0.0;

  int find_variable(const std::string& name) const;
};

MilpModel build_model(const InstanceSnapshot& snapshot);

// The four age rows for one request and slot. When a_prev < 0 the previous age
// is the constant `a_prev_value`.
void linearize_aos(MilpModel& model, int z, int a_prev, double a_prev_value, int lambda, int a,
                   double psi, const std::string& suffix);

struct RequestDims {
  int collectors = 0;
  int processors = 0;
  int edges = 0;  // collector -> processor edges only
};

struct ModelDimensions {
  int horizon = 0;
  int devices = 0;
  int gateways = 0;
  int servers = 0;
  std::vector<RequestDims> requests;
  int gateway_server_links = 0;
  int nodes = 0;  // devices + gateways + servers
};

ModelDimensions dimensions_of(const SubstrateNetwork& net, const std::vector<DagRequest>& requests,
                              int horizon);

struct ModelCounts {
  long long scheduling_binaries = 0;  // closed-form decision-variable count
  long long variables = 0;            // binaries plus continuous plus epigraph
  long long closed_form_rows = 0;     // closed-form constraint count
  long long rows = 0;                 // rows actually emitted
};

ModelCounts count_model(const ModelDimensions& dims);

struct AuditReport {
  bool ok = true;
  std::vector<std::string> problems;
  std::vector<std::pair<std::string, long long>> family_rows;
  ModelCounts expected;
  ModelCounts actual;
};

AuditReport audit_model(const MilpModel& model, const ModelDimensions& dims);
void write_audit(std::ostream& out, const AuditReport& report);

// CPLEX-style LP text.
std::string export_lp(const MilpModel& model);

}  // namespace greeniot
