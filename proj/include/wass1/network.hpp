#pragma once

// Flow networks on the N x N grid (G_0 for the taxicab metric, G_1 for the
// Chebyshev metric, G_L for the Euclidean metric) and the support-restricted
// bipartite network used as a reference formulation.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <cstdlib>
#include <istream>
#include <limits>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "wass1/directions.hpp"
#include "wass1/error.hpp"
#include "wass1/histogram.hpp"

namespace wass1 {

using NodeId = std::int32_t;
using ArcId = std::int64_t;

enum class MetricKind { l1, linf, l2 };

inline std::string_view to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::l1: return "l1";
    case MetricKind::linf: return "linf";
    case MetricKind::l2: return "l2";
  }
  return "?";
}

inline MetricKind parse_metric_kind(std::string_view s) {
  if (s == "l1") return MetricKind::l1;
  if (s == "linf") return MetricKind::linf;
  if (s == "l2") return MetricKind::l2;
  throw Error(ErrorCode::value, "unknown metric '" + std::string(s) + "' (expected l1, linf or l2)");
}

/// Ground distance between bin centres separated by (dx, dy).
inline double ground_distance(MetricKind kind, std::int64_t dx, std::int64_t dy) {
  dx = std::abs(dx);
  dy = std::abs(dy);
  switch (kind) {
    case MetricKind::l1: return static_cast<double>(dx + dy);
    case MetricKind::linf: return static_cast<double>(std::max(dx, dy));
    case MetricKind::l2: return std::sqrt(static_cast<double>(dx * dx + dy * dy));
  }
  return 0.0;
}

/// Ground metric plus, for l2, the step bound L of the direction set V_L.
struct GroundMetric {
  MetricKind kind = MetricKind::l1;
  int L = 0;

  static GroundMetric l1() { return {MetricKind::l1, 0}; }
  static GroundMetric linf() { return {MetricKind::linf, 0}; }
  static GroundMetric l2(int L) { return {MetricKind::l2, L}; }
  static GroundMetric l2_exact(int side) { return {MetricKind::l2, side - 1}; }

  /// Parameter of the direction set inducing the grid network.
  int direction_parameter() const {
    switch (kind) {
      case MetricKind::l1: return 0;
      case MetricKind::linf: return 1;
      case MetricKind::l2: return L;
    }
    return 0;
  }

  /// Whether the grid network reproduces the ground distance exactly on a side-N grid.
  bool is_exact(int side) const { return kind != MetricKind::l2 || L >= side - 1; }

  void validate(int side) const {
    if (side < 2) throw Error(ErrorCode::out_of_range, "grid side must be at least 2");
    if (kind == MetricKind::l2 && (L < 1 || L > side - 1))
      throw Error(ErrorCode::out_of_range, "l2 parameter L=" + std::to_string(L) + " outside [1, " +
                                               std::to_string(side - 1) + "]");
  }

  std::string label() const {
    return kind == MetricKind::l2 ? "l2(L=" + std::to_string(L) + ")" : std::string(to_string(kind));
  }

  friend bool operator==(const GroundMetric&, const GroundMetric&) = default;
};

struct Arc {
  NodeId tail = 0;
  NodeId head = 0;
  double cost = 0.0;
};

/// Directed network with non-negative arc costs, arcs stored grouped by tail.
class FlowNetwork {
 public:
  FlowNetwork() = default;

  /// Arcs are stably regrouped by tail; relative order within a tail is kept.
  FlowNetwork(NodeId node_count, std::span<const Arc> arcs) : node_count_(node_count) {
    if (node_count < 0) throw Error(ErrorCode::value, "negative node count");
    first_.assign(static_cast<std::size_t>(node_count) + 1, 0);
    for (const Arc& a : arcs) {
      check_arc(a);
      ++first_[static_cast<std::size_t>(a.tail) + 1];
    }
    for (std::size_t u = 0; u < static_cast<std::size_t>(node_count); ++u) first_[u + 1] += first_[u];
    tail_.resize(arcs.size());
    head_.resize(arcs.size());
    cost_.resize(arcs.size());
    std::vector<ArcId> fill(first_.begin(), first_.end() - 1);
    for (const Arc& a : arcs) {
      const ArcId e = fill[a.tail]++;
      tail_[e] = a.tail;
      head_[e] = a.head;
      cost_[e] = a.cost;
    }
    finish();
  }

  /// Adopts arrays already grouped by tail: arcs of node u occupy [first[u], first[u+1]).
  FlowNetwork(NodeId node_count, std::vector<ArcId> first, std::vector<NodeId> tail, std::vector<NodeId> head,
              std::vector<double> cost)
      : node_count_(node_count), first_(std::move(first)), tail_(std::move(tail)), head_(std::move(head)),
        cost_(std::move(cost)) {
    if (node_count < 0 || first_.size() != static_cast<std::size_t>(node_count) + 1 || first_.front() != 0 ||
        first_.back() != static_cast<ArcId>(head_.size()) || tail_.size() != head_.size() ||
        cost_.size() != head_.size())
      throw Error(ErrorCode::value, "inconsistent network arrays");
    for (NodeId u = 0; u < node_count_; ++u) {
      for (ArcId e = first_[u]; e < first_[static_cast<std::size_t>(u) + 1]; ++e) {
        if (tail_[e] != u) throw Error(ErrorCode::value, "arcs not grouped by tail");
        check_arc({tail_[e], head_[e], cost_[e]});
      }
    }
    finish();
  }

  NodeId node_count() const noexcept { return node_count_; }
  ArcId arc_count() const noexcept { return static_cast<ArcId>(head_.size()); }
  NodeId tail(ArcId e) const { return tail_[e]; }
  NodeId head(ArcId e) const { return head_[e]; }
  double cost(ArcId e) const { return cost_[e]; }
  ArcId first_out(NodeId u) const { return first_[u]; }
  ArcId end_out(NodeId u) const { return first_[static_cast<std::size_t>(u) + 1]; }

  std::span<const NodeId> tails() const noexcept { return tail_; }
  std::span<const NodeId> heads() const noexcept { return head_; }
  std::span<const double> costs() const noexcept { return cost_; }

  double max_cost() const noexcept { return max_cost_; }
  /// True when every cost is a small non-negative integer (exact in int64).
  bool has_integral_costs() const noexcept { return integral_; }

 private:
  void check_arc(const Arc& a) const {
    if (a.tail < 0 || a.tail >= node_count_ || a.head < 0 || a.head >= node_count_)
      throw Error(ErrorCode::value, "arc endpoint out of range");
    if (a.tail == a.head) throw Error(ErrorCode::value, "self-loop at node " + std::to_string(a.tail));
    if (!(a.cost >= 0.0) || !std::isfinite(a.cost))
      throw Error(ErrorCode::value, "arc cost must be finite and non-negative");
  }

  void finish() {
    max_cost_ = 0.0;
    integral_ = true;
    for (double c : cost_) {
      max_cost_ = std::max(max_cost_, c);
      if (integral_ && (c != std::floor(c) || c > 1e15)) integral_ = false;
    }
  }

  NodeId node_count_ = 0;
  std::vector<ArcId> first_{0};
  std::vector<NodeId> tail_;
  std::vector<NodeId> head_;
  std::vector<double> cost_;
  double max_cost_ = 0.0;
  bool integral_ = true;
};

inline constexpr ArcId default_arc_cap = 200'000'000;

/// Number of grid arcs (i, i + j), j in the metric's direction set, both ends on the grid.
inline ArcId edge_count(int side, const GroundMetric& metric) {
  metric.validate(side);
  const std::int64_t n = side;
  switch (metric.kind) {
    case MetricKind::l1: return 4 * n * (n - 1);
    case MetricKind::linf: return 4 * n * (n - 1) + 4 * (n - 1) * (n - 1);
    case MetricKind::l2: break;
  }
  ArcId total = 4 * n * (n - 1);
  for (int a = 1; a <= metric.L; ++a)
    for (int b = 1; b <= metric.L; ++b)
      if (std::gcd(a, b) == 1) total += 4 * (n - a) * (n - b);
  return total;
}

/// Builds the reduced grid network for the metric. Node i1*N + i2 is grid point
/// (i1, i2). Arcs are tail-major, then in direction-angle order. Refuses to
/// build networks with more than arc_cap arcs.
inline FlowNetwork build_grid_network(int side, const GroundMetric& metric, ArcId arc_cap = default_arc_cap) {
  const ArcId expected = edge_count(side, metric);
  if (expected > arc_cap)
    throw Error(ErrorCode::out_of_range, "network for N=" + std::to_string(side) + " " + metric.label() +
                                             " needs " + std::to_string(expected) + " arcs, cap is " +
                                             std::to_string(arc_cap));
  const auto dirs = direction_set(metric.direction_parameter());
  std::vector<double> step_cost(dirs.size());
  for (std::size_t k = 0; k < dirs.size(); ++k)
    step_cost[k] = metric.kind == MetricKind::l2 ? ground_distance(MetricKind::l2, dirs[k].d1, dirs[k].d2) : 1.0;

  const NodeId nodes = side * side;
  std::vector<ArcId> first(static_cast<std::size_t>(nodes) + 1, 0);
  std::vector<NodeId> tails, heads;
  std::vector<double> costs;
  tails.reserve(static_cast<std::size_t>(expected));
  heads.reserve(static_cast<std::size_t>(expected));
  costs.reserve(static_cast<std::size_t>(expected));
  for (int i1 = 0; i1 < side; ++i1) {
    for (int i2 = 0; i2 < side; ++i2) {
      const NodeId u = i1 * side + i2;
      for (std::size_t k = 0; k < dirs.size(); ++k) {
        const int j1 = i1 + dirs[k].d1;
        const int j2 = i2 + dirs[k].d2;
        if (j1 < 0 || j1 >= side || j2 < 0 || j2 >= side) continue;
        tails.push_back(u);
        heads.push_back(j1 * side + j2);
        costs.push_back(step_cost[k]);
      }
      first[static_cast<std::size_t>(u) + 1] = static_cast<ArcId>(heads.size());
    }
  }
  return FlowNetwork(nodes, std::move(first), std::move(tails), std::move(heads), std::move(costs));
}

/// Support-restricted bipartite instance: sources are bins with b > 0,
/// sinks bins with b < 0, and every source is joined to every sink.
struct BipartiteInstance {
  FlowNetwork network;
  std::vector<Mass> supply;
  std::vector<int> grid_index;  // grid bin of each network node
};

inline BipartiteInstance build_bipartite_network(const BalancedPair& pair, MetricKind kind) {
  const std::size_t cells = static_cast<std::size_t>(pair.side) * static_cast<std::size_t>(pair.side);
  if (pair.side <= 0 || pair.mu.size() != cells || pair.nu.size() != cells)
    throw Error(ErrorCode::dimension, "pair masses do not match grid side");
  Mass smu = 0, snu = 0;
  for (std::size_t k = 0; k < cells; ++k) {
    smu += pair.mu[k];
    snu += pair.nu[k];
  }
  if (smu != snu) throw Error(ErrorCode::value, "pair is not balanced");

  BipartiteInstance inst;
  std::vector<int> sources, sinks;
  for (std::size_t k = 0; k < cells; ++k) {
    const Mass b = pair.mu[k] - pair.nu[k];
    if (b > 0) sources.push_back(static_cast<int>(k));
    if (b < 0) sinks.push_back(static_cast<int>(k));
  }
  inst.grid_index = sources;
  inst.grid_index.insert(inst.grid_index.end(), sinks.begin(), sinks.end());
  for (int g : inst.grid_index) inst.supply.push_back(pair.mu[g] - pair.nu[g]);

  std::vector<Arc> arcs;
  arcs.reserve(sources.size() * sinks.size());
  const NodeId offset = static_cast<NodeId>(sources.size());
  for (std::size_t s = 0; s < sources.size(); ++s) {
    for (std::size_t t = 0; t < sinks.size(); ++t) {
      const int dx = sources[s] / pair.side - sinks[t] / pair.side;
      const int dy = sources[s] % pair.side - sinks[t] % pair.side;
      arcs.push_back({static_cast<NodeId>(s), offset + static_cast<NodeId>(t), ground_distance(kind, dx, dy)});
    }
  }
  inst.network = FlowNetwork(static_cast<NodeId>(inst.grid_index.size()), arcs);
  return inst;
}

// DIMACS minimum-cost flow text format:
//   c comment
//   p min <nodes> <arcs>
//   n <id> <supply>            (1-based ids, omitted nodes have supply 0)
//   a <tail> <head> <low> <cap> <cost>
// Arcs are written with low = 0 and cap = total positive supply, which is
// never binding for an uncapacitated instance.

struct DimacsInstance {
  FlowNetwork network;
  std::vector<Mass> supply;
};

inline void write_dimacs(std::ostream& out, const FlowNetwork& net, std::span<const Mass> supply) {
  if (supply.size() != static_cast<std::size_t>(net.node_count()))
    throw Error(ErrorCode::dimension, "supply length does not match node count");
  Mass cap = 0;
  for (Mass b : supply)
    if (b > 0) cap += b;
  cap = std::max<Mass>(cap, 1);
  out << "c uncapacitated min-cost flow instance\n";
  out << "p min " << net.node_count() << ' ' << net.arc_count() << '\n';
  for (std::size_t u = 0; u < supply.size(); ++u)
    if (supply[u] != 0) out << "n " << u + 1 << ' ' << supply[u] << '\n';
  char buf[64];
  for (ArcId e = 0; e < net.arc_count(); ++e) {
    std::snprintf(buf, sizeof buf, "%.17g", net.cost(e));
    out << "a " << net.tail(e) + 1 << ' ' << net.head(e) + 1 << " 0 " << cap << ' ' << buf << '\n';
  }
}

inline DimacsInstance read_dimacs(std::istream& in) {
  std::string line;
  std::int64_t nodes = -1, arc_total = -1;
  std::vector<Mass> supply;
  std::vector<Arc> arcs;
  std::vector<Mass> caps;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& msg) {
    throw Error(ErrorCode::parse, "dimacs line " + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == 'c') continue;
    std::istringstream ls(line);
    char tag = 0;
    ls >> tag;
    if (tag == 'p') {
      std::string kind;
      if (!(ls >> kind >> nodes >> arc_total) || kind != "min" || nodes < 0 || arc_total < 0)
        fail("bad problem line");
      if (nodes > std::numeric_limits<NodeId>::max()) fail("too many nodes");
      supply.assign(static_cast<std::size_t>(nodes), 0);
      arcs.reserve(static_cast<std::size_t>(arc_total));
    } else if (tag == 'n') {
      std::int64_t id = 0;
      Mass b = 0;
      if (nodes < 0) fail("node line before problem line");
      if (!(ls >> id >> b) || id < 1 || id > nodes) fail("bad node line");
      supply[static_cast<std::size_t>(id - 1)] += b;
    } else if (tag == 'a') {
      std::int64_t u = 0, v = 0;
      Mass low = 0, cap = 0;
      double cost = 0;
      if (nodes < 0) fail("arc line before problem line");
      if (!(ls >> u >> v >> low >> cap >> cost) || u < 1 || u > nodes || v < 1 || v > nodes) fail("bad arc line");
      if (low != 0) fail("lower bounds are not supported");
      arcs.push_back({static_cast<NodeId>(u - 1), static_cast<NodeId>(v - 1), cost});
      caps.push_back(cap);
    } else {
      fail("unknown line type");
    }
  }
  if (nodes < 0) throw Error(ErrorCode::parse, "dimacs input has no problem line");
  if (static_cast<std::int64_t>(arcs.size()) != arc_total)
    throw Error(ErrorCode::parse, "dimacs arc count mismatch: header says " + std::to_string(arc_total) +
                                      ", found " + std::to_string(arcs.size()));
  Mass positive = 0;
  for (Mass b : supply)
    if (b > 0) positive += b;
  for (Mass cap : caps)
    if (cap >= 0 && cap < positive)
      throw Error(ErrorCode::value, "arc capacity " + std::to_string(cap) +
                                        " could bind; only uncapacitated instances are supported");
  return {FlowNetwork(static_cast<NodeId>(nodes), arcs), std::move(supply)};
}

}  // namespace wass1
