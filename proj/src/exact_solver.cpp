#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "greeniot/errors.hpp"
#include "greeniot/solvers.hpp"
#include "greeniot/substrate.hpp"
#include "greeniot/workload.hpp"

namespace greeniot {

const char* status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kFeasible: return "feasible";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kTimeout: return "timeout";
  }
  return "?";
}

namespace {

using Clock = std::chrono::steady_clock;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = 1e-9;

struct OutOfTime {};

// Sum of ages over m slots, starting from age a, with n services placed as
// well as possible.
double best_age_sum(double a, int m, int n) {
  if (n <= 0) return m * a + m * (m + 1) / 2.0;
  double best = kInf;
  for (int p = 0; p <= m - n; ++p) {
    const int len = m - p;
    const int q = len / n, rem = len % n;
    const double segs = rem * (q + 1.0) * (q + 2.0) / 2.0 + (n - rem) * q * (q + 1.0) / 2.0;
    best = std::min(best, p * a + p * (p + 1) / 2.0 + segs);
  }
  return best;
}

// One processor that must be placed when its request is served.
struct Item {
  int r = 0, v = 0;
  double demand = 0.0;
  double sink_bw = 0.0;
  std::vector<std::pair<int, double>> in_edges;  // (collector gateway, bandwidth)
};

// Level-vector memo of failed states; a state dominated by a failed one fails.
class FailMemo {
 public:
  explicit FailMemo(int slots) : seen_(slots) {}
  bool dominated(int t, const std::vector<double>& lv) const {
    for (const auto& f : seen_[t]) {
      bool all = true;
      for (std::size_t k = 0; k < lv.size() && all; ++k) all = lv[k] <= f[k] + kEps;
      if (all) return true;
    }
    return false;
  }
  void add(int t, const std::vector<double>& lv) { seen_[t].push_back(lv); }

 private:
  std::vector<std::vector<std::vector<double>>> seen_;
};

struct DeviceCert {
  std::vector<int> choice;   // per slot, -1 when nobody uploads
  std::vector<double> level;  // per associated device, after the last slot
};

struct ServerCert {
  std::vector<std::vector<int>> assign;  // per slot, server per item
  std::vector<double> level;
};

struct Frame {
  std::vector<double> gw_level;
  std::vector<int> age;
  std::vector<double> age_sum;
  std::vector<DeviceCert> dev;
  ServerCert srv;
  double srv_upper = 0.0;
  std::vector<double> dev_upper;
};

class Searcher {
 public:
  Searcher(const MilpModel& m, const InstanceSnapshot& s, const SolveOptions& o)
      : m_(m), s_(s), net_(*s.network), reqs_(*s.requests), opt_(o) {}

  Solution run();

 private:
  void setup();
  void dfs(int t, const Frame& f);
  bool lower_bound_prunes(int t, const Frame& f) const;
  bool make_child(int t, const Frame& f, unsigned mask, Frame& out);
  bool need_upload(int t, int i) const;
  std::vector<Item> items_of(int t) const;

  bool extend_devices(int i, int t, const DeviceCert& prev, DeviceCert& out);
  bool exact_devices(int i, int t, DeviceCert& out);
  bool extend_servers(int t, const ServerCert& prev, ServerCert& out);
  bool exact_servers(int t, ServerCert& out);
  void slot_options(int t, const std::vector<double>& stored,
                    std::vector<std::pair<std::vector<double>, std::vector<int>>>& out);
  bool greedy_slot(const std::vector<Item>& items, std::vector<double>& lv,
                   std::vector<int>& assign) const;

  void record_leaf(const Frame& f);
  std::vector<double> build_values() const;
  void tick();

  const MilpModel& m_;
  const InstanceSnapshot& s_;
  const SubstrateNetwork& net_;
  const std::vector<DagRequest>& reqs_;
  SolveOptions opt_;

  int T_ = 0, R_ = 0, G_ = 0, S_ = 0, D_ = 0;
  double avg_slots_ = 1.0;
  double kg_ = 0, ks_ = 0, link_cap_ = 0, gcap_ = 0, scap_ = 0, dcap_ = 0;
  double gcpu_ = 0, scpu_ = 0;
  std::vector<std::vector<double>> dev_cost_;  // [t][d]
  std::vector<std::vector<double>> gw_load_;   // [r][i]
  std::vector<std::vector<char>> has_coll_;    // [r][i]
  std::vector<double> proc_demand_;            // [r]
  std::vector<std::vector<Item>> items_;       // [r]
  std::vector<char> servable_;
  std::vector<std::vector<char>> z_lo_, z_hi_;  // [t][r]
  std::vector<std::vector<double>> fut_;        // [t][node], arrivals from t on
  std::vector<double> min_cost_from_;           // per gateway per t, flattened [t*G+i]

  std::vector<unsigned> path_;  // served mask per slot on the current branch
  bool have_incumbent_ = false;
  double incumbent_ = kInf;
  std::vector<unsigned> best_path_;
  std::vector<DeviceCert> best_dev_;
  ServerCert best_srv_;
  bool stop_ = false;
  bool timed_out_ = false;
  long long nodes_ = 0;
  long long ticks_ = 0;
  Clock::time_point deadline_;
};

void Searcher::tick() {
  if ((++ticks_ & 255) == 0 && Clock::now() > deadline_) throw OutOfTime{};
}

void Searcher::setup() {
  const auto& L = m_.layout;
  T_ = s_.horizon;
  avg_slots_ = s_.averaging_slots();
  R_ = static_cast<int>(reqs_.size());
  G_ = static_cast<int>(net_.gateway_count());
  S_ = static_cast<int>(net_.server_count());
  D_ = static_cast<int>(net_.device_count());
  if (R_ > 24) throw SizeError("exact solver supports at most 24 requests");
  kg_ = net_.gateway_caps.drain_per_megacycle();
  ks_ = net_.server_caps.drain_per_megacycle();
  link_cap_ = net_.link_capacity;
  gcap_ = net_.gateway_caps.battery_capacity;
  scap_ = net_.server_caps.battery_capacity;
  dcap_ = net_.device_caps.battery_capacity;
  gcpu_ = net_.gateway_caps.cpu_capacity;
  scpu_ = net_.server_caps.cpu_capacity;

  // Only z and phi bounds may be tightened by callers.
  for (int t = 0; t < T_; ++t)
    for (int r = 0; r < R_; ++r) {
      for (int u = 0; u < static_cast<int>(reqs_[r].collectors.size()); ++u)
        for (int i = 0; i < G_; ++i)
          if (m_.variables[L.x(t, r, u, i)].lower > 0.0)
            throw BuildError("exact solver cannot honour a forced collector activation");
      for (int v = 0; v < static_cast<int>(reqs_[r].processors.size()); ++v)
        for (int s = 0; s < S_; ++s)
          if (m_.variables[L.y(t, r, v, s)].lower > 0.0 ||
              m_.variables[L.y(t, r, v, s)].upper < 1.0)
            throw BuildError("exact solver cannot honour fixed processor placements");
    }

  const auto rates = gateway_upload_rates(net_, reqs_);
  dev_cost_.assign(T_, std::vector<double>(D_, kInf));
  for (int t = 0; t < T_; ++t)
    for (int d = 0; d < D_; ++d) {
      const auto& var = m_.variables[L.phi(t, d)];
      if (var.lower > 0.0) throw BuildError("exact solver cannot honour a forced upload");
      if (var.upper >= 1.0) dev_cost_[t][d] = device_slot_cost(s_, rates, t, d);
    }

  gw_load_.assign(R_, std::vector<double>(G_, 0.0));
  has_coll_.assign(R_, std::vector<char>(G_, 0));
  proc_demand_.assign(R_, 0.0);
  items_.assign(R_, {});
  servable_.assign(R_, 1);
  for (int r = 0; r < R_; ++r) {
    const auto& dag = reqs_[r];
    for (const auto& c : dag.collectors) {
      gw_load_[r][c.gateway] += c.demand;
      has_coll_[r][c.gateway] = 1;
    }
    for (int v = 0; v < static_cast<int>(dag.processors.size()); ++v) {
      Item it;
      it.r = r;
      it.v = v;
      it.demand = dag.processors[v].demand;
      it.sink_bw = dag.processors[v].sink_bandwidth;
      for (const auto& e : dag.edges)
        if (e.processor == v) it.in_edges.emplace_back(dag.collectors[e.collector].gateway, e.bandwidth);
      proc_demand_[r] += it.demand;
      if (it.demand > scpu_ + kEps || it.sink_bw > link_cap_ + kEps || S_ == 0) servable_[r] = 0;
      items_[r].push_back(std::move(it));
    }
    for (int i = 0; i < G_; ++i)
      if (has_coll_[r][i] && (gw_load_[r][i] > gcpu_ + kEps || net_.gateways[i].devices.empty()))
        servable_[r] = 0;
  }

  z_lo_.assign(T_, std::vector<char>(R_, 0));
  z_hi_.assign(T_, std::vector<char>(R_, 1));
  for (int t = 0; t < T_; ++t)
    for (int r = 0; r < R_; ++r) {
      const auto& var = m_.variables[L.z(t, r)];
      z_lo_[t][r] = var.lower > 0.5;
      z_hi_[t][r] = var.upper > 0.5;
    }

  const int V = static_cast<int>(net_.node_count());
  fut_.assign(T_ + 1, std::vector<double>(V, 0.0));
  for (int t = T_ - 1; t >= 0; --t)
    for (int n = 0; n < V; ++n) fut_[t][n] = fut_[t + 1][n] + s_.arrivals[t][n];
  min_cost_from_.assign((T_ + 1) * G_, kInf);
  for (int t = T_ - 1; t >= 0; --t)
    for (int i = 0; i < G_; ++i) {
      double c = min_cost_from_[(t + 1) * G_ + i];
      for (int d : net_.gateways[i].devices) c = std::min(c, dev_cost_[t][d]);
      min_cost_from_[t * G_ + i] = c;
    }
}

bool Searcher::need_upload(int t, int i) const {
  for (int r = 0; r < R_; ++r)
    if ((path_[t] >> r & 1u) && has_coll_[r][i]) return true;
  return false;
}

std::vector<Item> Searcher::items_of(int t) const {
  std::vector<Item> out;
  for (int r = 0; r < R_; ++r)
    if (path_[t] >> r & 1u) out.insert(out.end(), items_[r].begin(), items_[r].end());
  return out;
}

// ---- devices -------------------------------------------------------------

bool Searcher::extend_devices(int i, int t, const DeviceCert& prev, DeviceCert& out) {
  const auto& devs = net_.gateways[i].devices;
  out = prev;
  out.choice.push_back(-1);
  for (std::size_t k = 0; k < devs.size(); ++k)
    out.level[k] = std::min(out.level[k] + s_.arrivals[t][devs[k]], dcap_);
  if (!need_upload(t, i)) return true;
  int best = -1;
  double best_left = -kInf;
  for (std::size_t k = 0; k < devs.size(); ++k) {
    const double left = out.level[k] - dev_cost_[t][devs[k]];
    if (left >= -kEps && left > best_left) {
      best_left = left;
      best = static_cast<int>(k);
    }
  }
  if (best >= 0) {
    out.choice[t] = devs[best];
    out.level[best] -= dev_cost_[t][devs[best]];
    return true;
  }
  return exact_devices(i, t, out);
}

bool Searcher::exact_devices(int i, int t, DeviceCert& out) {
  const auto& devs = net_.gateways[i].devices;
  const int nd = static_cast<int>(devs.size());
  std::vector<char> need(t + 1);
  for (int tau = 0; tau <= t; ++tau) need[tau] = need_upload(tau, i);
  FailMemo memo(t + 1);
  std::vector<int> choice(t + 1, -1);
  std::vector<double> final_level;

  auto covers = [&](int k, int tau, double level) {
    for (int sig = tau; sig <= t; ++sig) {
      if (sig > tau) level = std::min(level + s_.arrivals[sig][devs[k]], dcap_);
      if (need[sig]) level -= dev_cost_[sig][devs[k]];
      if (!(level >= -kEps)) return false;
    }
    return true;
  };

  auto rec = [&](auto&& self, int tau, const std::vector<double>& lv) -> bool {
    tick();
    if (tau > t) {
      final_level = lv;
      return true;
    }
    if (memo.dominated(tau, lv)) return false;
    std::vector<double> st(nd);
    for (int k = 0; k < nd; ++k) st[k] = std::min(lv[k] + s_.arrivals[tau][devs[k]], dcap_);
    if (!need[tau]) {
      choice[tau] = -1;
      if (self(self, tau + 1, st)) return true;
      memo.add(tau, lv);
      return false;
    }
    for (int k = 0; k < nd; ++k)
      if (covers(k, tau, st[k])) {
        // This device alone can carry every remaining upload.
        std::vector<double> fl = st;
        double level = st[k];
        for (int sig = tau; sig <= t; ++sig) {
          if (sig > tau) {
            for (int j = 0; j < nd; ++j)
              if (j != k) fl[j] = std::min(fl[j] + s_.arrivals[sig][devs[j]], dcap_);
            level = std::min(level + s_.arrivals[sig][devs[k]], dcap_);
          }
          choice[sig] = need[sig] ? devs[k] : -1;
          if (need[sig]) level -= dev_cost_[sig][devs[k]];
        }
        fl[k] = level;
        final_level = fl;
        return true;
      }
    std::vector<int> order(nd);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return st[a] - dev_cost_[tau][devs[a]] > st[b] - dev_cost_[tau][devs[b]];
    });
    for (int k : order) {
      const double left = st[k] - dev_cost_[tau][devs[k]];
      if (!(left >= -kEps)) break;
      std::vector<double> nx = st;
      nx[k] = left;
      choice[tau] = devs[k];
      if (self(self, tau + 1, nx)) return true;
    }
    memo.add(tau, lv);
    return false;
  };

  std::vector<double> init(nd);
  for (int k = 0; k < nd; ++k) init[k] = s_.initial_levels[net_.device_node(devs[k])];
  if (!rec(rec, 0, init)) return false;
  out.choice = choice;
  out.level = final_level;
  return true;
}

// ---- servers -------------------------------------------------------------

namespace {

struct SlotUse {
  std::vector<double> cpu, sink;
  std::vector<double> gs;  // [i*S + s]
};

bool fits(const Item& it, int s, const SlotUse& u, const std::vector<double>& stored, double ks,
          double scpu, double cap_link, int S, const SubstrateNetwork& net) {
  if (u.cpu[s] + it.demand > scpu + kEps) return false;
  if (stored[s] - ks * (u.cpu[s] + it.demand) < -kEps) return false;
  if (u.sink[s] + it.sink_bw > cap_link + kEps) return false;
  for (const auto& [i, bw] : it.in_edges) {
    if (!net.has_gateway_server_link(i, s)) return false;
    if (u.gs[i * S + s] + bw > cap_link + kEps) return false;
  }
  return true;
}

void place(const Item& it, int s, SlotUse& u, int S, double sign) {
  u.cpu[s] += sign * it.demand;
  u.sink[s] += sign * it.sink_bw;
  for (const auto& [i, bw] : it.in_edges) u.gs[i * S + s] += sign * bw;
}

}  // namespace

bool Searcher::greedy_slot(const std::vector<Item>& items, std::vector<double>& lv,
                           std::vector<int>& assign) const {
  std::vector<int> order(items.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return items[a].demand > items[b].demand; });
  SlotUse u{std::vector<double>(S_, 0.0), std::vector<double>(S_, 0.0),
            std::vector<double>(G_ * S_, 0.0)};
  assign.assign(items.size(), -1);
  for (int k : order) {
    int best = -1;
    double best_left = -kInf;
    for (int s = 0; s < S_; ++s) {
      if (!fits(items[k], s, u, lv, ks_, scpu_, link_cap_, S_, net_)) continue;
      const double left = lv[s] - ks_ * (u.cpu[s] + items[k].demand);
      if (left > best_left) {
        best_left = left;
        best = s;
      }
    }
    if (best < 0) return false;
    place(items[k], best, u, S_, 1.0);
    assign[k] = best;
  }
  for (int s = 0; s < S_; ++s) lv[s] -= ks_ * u.cpu[s];
  return true;
}

bool Searcher::extend_servers(int t, const ServerCert& prev, ServerCert& out) {
  out = prev;
  for (int s = 0; s < S_; ++s)
    out.level[s] = std::min(out.level[s] + s_.arrivals[t][net_.server_node(s)], scap_);
  const auto items = items_of(t);
  std::vector<int> assign;
  std::vector<double> lv = out.level;
  if (greedy_slot(items, lv, assign)) {
    out.level = lv;
    out.assign.push_back(assign);
    return true;
  }
  return exact_servers(t, out);
}

// All Pareto-maximal level vectors reachable in slot t from `stored`.
void Searcher::slot_options(int t, const std::vector<double>& stored,
                            std::vector<std::pair<std::vector<double>, std::vector<int>>>& out) {
  const auto items = items_of(t);
  out.clear();
  SlotUse u{std::vector<double>(S_, 0.0), std::vector<double>(S_, 0.0),
            std::vector<double>(G_ * S_, 0.0)};
  std::vector<int> assign(items.size(), -1);
  auto rec = [&](auto&& self, std::size_t k) -> void {
    tick();
    if (k == items.size()) {
      std::vector<double> lv(S_);
      for (int s = 0; s < S_; ++s) lv[s] = stored[s] - ks_ * u.cpu[s];
      for (const auto& o : out) {
        bool dom = true;
        for (int s = 0; s < S_ && dom; ++s) dom = lv[s] <= o.first[s] + kEps;
        if (dom) return;
      }
      std::erase_if(out, [&](const auto& o) {
        for (int s = 0; s < S_; ++s)
          if (o.first[s] > lv[s] + kEps) return false;
        return true;
      });
      out.emplace_back(std::move(lv), assign);
      return;
    }
    for (int s = 0; s < S_; ++s) {
      if (!fits(items[k], s, u, stored, ks_, scpu_, link_cap_, S_, net_)) continue;
      // Servers in identical condition are interchangeable for this item.
      bool twin = false;
      for (int q = 0; q < s && !twin; ++q) {
        twin = stored[q] == stored[s] && u.cpu[q] == u.cpu[s] && u.sink[q] == u.sink[s];
        for (int i = 0; i < G_ && twin; ++i) twin = u.gs[i * S_ + q] == u.gs[i * S_ + s];
      }
      if (twin) continue;
      place(items[k], s, u, S_, 1.0);
      assign[k] = s;
      self(self, k + 1);
      place(items[k], s, u, S_, -1.0);
    }
  };
  rec(rec, 0);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return std::accumulate(a.first.begin(), a.first.end(), 0.0) >
           std::accumulate(b.first.begin(), b.first.end(), 0.0);
  });
}

bool Searcher::exact_servers(int t, ServerCert& out) {
  FailMemo memo(t + 1);
  std::vector<std::vector<int>> assign(t + 1);
  std::vector<double> final_level;
  auto rec = [&](auto&& self, int tau, const std::vector<double>& lv) -> bool {
    tick();
    if (tau > t) {
      final_level = lv;
      return true;
    }
    if (memo.dominated(tau, lv)) return false;
    std::vector<double> st(S_);
    for (int s = 0; s < S_; ++s)
      st[s] = std::min(lv[s] + s_.arrivals[tau][net_.server_node(s)], scap_);
    std::vector<std::pair<std::vector<double>, std::vector<int>>> opts;
    slot_options(tau, st, opts);
    for (auto& [next, a] : opts) {
      assign[tau] = a;
      if (self(self, tau + 1, next)) return true;
    }
    memo.add(tau, lv);
    return false;
  };
  std::vector<double> init(S_);
  for (int s = 0; s < S_; ++s) init[s] = s_.initial_levels[net_.server_node(s)];
  if (!rec(rec, 0, init)) return false;
  out.assign = assign;
  out.level = final_level;
  return true;
}

// ---- outer search --------------------------------------------------------

bool Searcher::lower_bound_prunes(int t, const Frame& f) const {
  const int m = T_ - t;
  const double target = have_incumbent_ ? incumbent_ * avg_slots_ - 1e-7 : kInf;
  std::vector<int> n_min(R_, 0);
  for (int r = 0; r < R_; ++r) {
    int n = 0;
    while (n <= m && !(f.age_sum[r] + best_age_sum(f.age[r], m, n) < target)) ++n;
    if (n > m) return true;
    if (n > 0 && !servable_[r]) return true;
    n_min[r] = n;
  }
  if (!have_incumbent_) return false;
  double srv_need = 0.0;
  for (int r = 0; r < R_; ++r) srv_need += n_min[r] * ks_ * proc_demand_[r];
  double srv_avail = f.srv_upper;
  for (int s = 0; s < S_; ++s) srv_avail += fut_[t][net_.server_node(s)];
  if (srv_need > srv_avail + 1e-7) return true;
  for (int i = 0; i < G_; ++i) {
    double need = 0.0;
    int uploads = 0;
    for (int r = 0; r < R_; ++r) {
      need += n_min[r] * kg_ * gw_load_[r][i];
      if (has_coll_[r][i]) uploads = std::max(uploads, n_min[r]);
    }
    if (need > f.gw_level[i] + fut_[t][net_.gateway_node(i)] + 1e-7) return true;
    if (uploads > 0) {
      const double cmin = min_cost_from_[t * G_ + i];
      double avail = f.dev_upper[i];
      for (int d : net_.gateways[i].devices) avail += fut_[t][net_.device_node(d)];
      if (uploads * cmin > avail + 1e-7) return true;
    }
  }
  return false;
}

bool Searcher::make_child(int t, const Frame& f, unsigned mask, Frame& out) {
  path_[t] = mask;
  out.gw_level.resize(G_);
  for (int i = 0; i < G_; ++i) {
    double load = 0.0;
    for (int r = 0; r < R_; ++r)
      if (mask >> r & 1u) load += gw_load_[r][i];
    if (load > gcpu_ + kEps) return false;
    const double lvl = std::min(f.gw_level[i] + s_.arrivals[t][net_.gateway_node(i)], gcap_) -
                       kg_ * load;
    if (lvl < -kEps) return false;
    out.gw_level[i] = lvl;
  }
  out.srv.assign.clear();
  if (!extend_servers(t, f.srv, out.srv)) return false;
  out.dev.resize(G_);
  for (int i = 0; i < G_; ++i)
    if (!extend_devices(i, t, f.dev[i], out.dev[i])) return false;

  double load = 0.0, srv_arr = 0.0;
  for (int r = 0; r < R_; ++r)
    if (mask >> r & 1u) load += proc_demand_[r];
  for (int s = 0; s < S_; ++s) srv_arr += s_.arrivals[t][net_.server_node(s)];
  out.srv_upper = std::min(f.srv_upper + srv_arr, S_ * scap_) - ks_ * load;
  out.dev_upper.resize(G_);
  for (int i = 0; i < G_; ++i) {
    const auto& devs = net_.gateways[i].devices;
    double arr = 0.0, cmin = kInf;
    for (int d : devs) {
      arr += s_.arrivals[t][net_.device_node(d)];
      cmin = std::min(cmin, dev_cost_[t][d]);
    }
    out.dev_upper[i] = std::min(f.dev_upper[i] + arr, devs.size() * dcap_) -
                       (need_upload(t, i) ? cmin : 0.0);
  }
  out.age.resize(R_);
  out.age_sum.resize(R_);
  for (int r = 0; r < R_; ++r) {
    out.age[r] = (mask >> r & 1u) ? 1 : f.age[r] + 1;
    out.age_sum[r] = f.age_sum[r] + out.age[r];
  }
  return true;
}

void Searcher::record_leaf(const Frame& f) {
  double worst = 0.0;
  for (int r = 0; r < R_; ++r) worst = std::max(worst, f.age_sum[r] / avg_slots_);
  if (have_incumbent_ && !(worst < incumbent_ - 1e-9)) return;
  have_incumbent_ = true;
  incumbent_ = worst;
  best_path_ = path_;
  best_dev_ = f.dev;
  best_srv_ = f.srv;
  if (opt_.stop_at_first_feasible) stop_ = true;
}

void Searcher::dfs(int t, const Frame& f) {
  ++nodes_;
  tick();
  if (t == T_) {
    record_leaf(f);
    return;
  }
  if (lower_bound_prunes(t, f)) return;

  std::vector<int> order(R_);
  std::iota(order.begin(), order.end(), 0);
  if (opt_.order_by_age)
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return f.age[a] > f.age[b]; });

  Frame child;
  for (long long k = (1LL << R_) - 1; k >= 0 && !stop_; --k) {
    unsigned mask = 0;
    for (int j = 0; j < R_; ++j)
      if (k >> (R_ - 1 - j) & 1) mask |= 1u << order[j];
    bool allowed = true;
    for (int r = 0; r < R_ && allowed; ++r) {
      const bool on = mask >> r & 1u;
      allowed = on ? (z_hi_[t][r] && servable_[r]) : !z_lo_[t][r];
    }
    if (!allowed) continue;
    if (!make_child(t, f, mask, child)) continue;
    dfs(t + 1, child);
    if (have_incumbent_ && lower_bound_prunes(t, f)) return;
  }
}

std::vector<double> Searcher::build_values() const {
  const auto& L = m_.layout;
  std::vector<double> val(m_.variables.size(), 0.0);
  const int V = static_cast<int>(net_.node_count());
  std::vector<double> level = s_.initial_levels;
  std::vector<int> age(R_);
  for (int r = 0; r < R_; ++r) age[r] = s_.initial_age(r);

  for (int t = 0; t < T_; ++t) {
    const unsigned mask = best_path_[t];
    std::vector<double> drain(V, 0.0);
    for (int r = 0; r < R_; ++r) {
      if (!(mask >> r & 1u)) continue;
      const auto& dag = reqs_[r];
      val[L.z(t, r)] = 1.0;
      for (int u = 0; u < static_cast<int>(dag.collectors.size()); ++u) {
        const int i = dag.collectors[u].gateway;
        val[L.x(t, r, u, i)] = 1.0;
        drain[net_.gateway_node(i)] += kg_ * dag.collectors[u].demand;
      }
    }
    // Processor placements in the order items_of produced them.
    std::size_t k = 0;
    for (int r = 0; r < R_; ++r) {
      if (!(mask >> r & 1u)) continue;
      const auto& dag = reqs_[r];
      std::vector<int> host(dag.processors.size());
      for (std::size_t v = 0; v < dag.processors.size(); ++v) {
        host[v] = best_srv_.assign[t][k++];
        val[L.y(t, r, static_cast<int>(v), host[v])] = 1.0;
        drain[net_.server_node(host[v])] += ks_ * dag.processors[v].demand;
      }
      for (const auto& e : dag.edges)
        val[L.l(t, r, e.collector, e.processor, dag.collectors[e.collector].gateway,
                host[e.processor])] = 1.0;
    }
    for (int i = 0; i < G_; ++i) {
      const int d = best_dev_[i].choice[t];
      if (d >= 0) {
        val[L.phi(t, d)] = 1.0;
        drain[net_.device_node(d)] += dev_cost_[t][d];
      }
    }
    for (int n = 0; n < V; ++n) {
      const double cap = net_.caps_of_node(n).battery_capacity;
      const double w = std::max(0.0, std::min(s_.arrivals[t][n], cap - level[n]));
      val[L.w(t, n)] = w;
      level[n] = level[n] + w - drain[n];
      val[L.e(t, n)] = level[n];
    }
    for (int r = 0; r < R_; ++r) {
      const bool on = mask >> r & 1u;
      val[L.lam(t, r)] = on ? age[r] : 0.0;
      age[r] = on ? 1 : age[r] + 1;
      val[L.a(t, r)] = age[r];
    }
  }
  val[m_.objective_var] = incumbent_;
  return val;
}

Solution Searcher::run() {
  const auto start = Clock::now();
  deadline_ = start + std::chrono::duration_cast<Clock::duration>(
                          std::chrono::duration<double>(opt_.time_limit_s));
  s_.validate();
  setup();
  path_.assign(T_, 0);

  Frame root;
  root.gw_level.resize(G_);
  for (int i = 0; i < G_; ++i) root.gw_level[i] = s_.initial_levels[net_.gateway_node(i)];
  root.age.resize(R_);
  root.age_sum.resize(R_);
  for (int r = 0; r < R_; ++r) {
    root.age[r] = s_.initial_age(r);
    root.age_sum[r] = s_.past_age_sum(r);
  }
  root.dev.resize(G_);
  root.dev_upper.resize(G_);
  for (int i = 0; i < G_; ++i) {
    for (int d : net_.gateways[i].devices) {
      root.dev[i].level.push_back(s_.initial_levels[net_.device_node(d)]);
      root.dev_upper[i] += s_.initial_levels[net_.device_node(d)];
    }
  }
  root.srv.level.resize(S_);
  for (int s = 0; s < S_; ++s) {
    root.srv.level[s] = s_.initial_levels[net_.server_node(s)];
    root.srv_upper += root.srv.level[s];
  }

  try {
    dfs(0, root);
  } catch (const OutOfTime&) {
    timed_out_ = true;
  }

  Solution sol;
  sol.nodes = nodes_;
  if (have_incumbent_) {
    sol.values = build_values();
    sol.objective = incumbent_;
    sol.status = (timed_out_ || stop_) ? SolveStatus::kFeasible : SolveStatus::kOptimal;
  } else {
    sol.status = timed_out_ ? SolveStatus::kTimeout : SolveStatus::kInfeasible;
  }
  sol.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  return sol;
}

}  // namespace

Solution solve_exact(const MilpModel& model, const InstanceSnapshot& snapshot,
                     const SolveOptions& options) {
  Searcher s(model, snapshot, options);
  return s.run();
}

}  // namespace greeniot
