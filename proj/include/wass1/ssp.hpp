#pragma once

// Successive shortest paths with Johnson potentials. Slower than the network
// simplex; kept as an independent cross-check on small instances.

#include <algorithm>
#include <functional>
#include <limits>
#include <queue>
#include <span>
#include <utility>
#include <vector>

#include "wass1/solution.hpp"

namespace wass1 {

inline FlowSolution solve_ssp(const FlowNetwork& net, std::span<const Mass> supply) {
  detail::check_supply(net, supply);
  const NodeId n = net.node_count();
  const ArcId m = net.arc_count();
  constexpr double inf = std::numeric_limits<double>::infinity();

  // Incoming arcs, for residual reverse arcs.
  std::vector<ArcId> in_first(static_cast<std::size_t>(n) + 1, 0);
  for (ArcId e = 0; e < m; ++e) ++in_first[static_cast<std::size_t>(net.head(e)) + 1];
  for (NodeId u = 0; u < n; ++u) in_first[u + 1] += in_first[u];
  std::vector<ArcId> in_arcs(static_cast<std::size_t>(m));
  {
    std::vector<ArcId> fill(in_first.begin(), in_first.end() - 1);
    for (ArcId e = 0; e < m; ++e) in_arcs[fill[net.head(e)]++] = e;
  }

  FlowSolution sol;
  sol.flows.assign(static_cast<std::size_t>(m), 0);
  std::vector<double> pi(static_cast<std::size_t>(n), 0.0);  // reduced cost c + pi(u) - pi(v) >= 0
  std::vector<Mass> excess(supply.begin(), supply.end());
  std::vector<double> dist(static_cast<std::size_t>(n));
  std::vector<ArcId> pred_arc(static_cast<std::size_t>(n));
  std::vector<char> pred_forward(static_cast<std::size_t>(n));
  std::vector<char> settled(static_cast<std::size_t>(n));
  std::vector<NodeId> settled_order;
  using Entry = std::pair<double, NodeId>;

  while (true) {
    std::fill(dist.begin(), dist.end(), inf);
    std::fill(settled.begin(), settled.end(), 0);
    settled_order.clear();
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    for (NodeId u = 0; u < n; ++u) {
      if (excess[u] > 0) {
        dist[u] = 0.0;
        pred_arc[u] = -1;
        heap.push({0.0, u});
      }
    }
    if (heap.empty()) break;

    NodeId sink = -1;
    while (!heap.empty()) {
      const auto [d, u] = heap.top();
      heap.pop();
      if (settled[u] || d > dist[u]) continue;
      settled[u] = 1;
      settled_order.push_back(u);
      if (excess[u] < 0) {
        sink = u;
        break;
      }
      for (ArcId e = net.first_out(u); e < net.end_out(u); ++e) {
        const NodeId v = net.head(e);
        if (settled[v]) continue;
        const double nd = d + std::max(0.0, net.cost(e) + pi[u] - pi[v]);
        if (nd < dist[v]) {
          dist[v] = nd;
          pred_arc[v] = e;
          pred_forward[v] = 1;
          heap.push({nd, v});
        }
      }
      for (ArcId k = in_first[u]; k < in_first[static_cast<std::size_t>(u) + 1]; ++k) {
        const ArcId e = in_arcs[k];
        if (sol.flows[e] == 0) continue;
        const NodeId v = net.tail(e);
        if (settled[v]) continue;
        const double nd = d + std::max(0.0, -net.cost(e) + pi[u] - pi[v]);
        if (nd < dist[v]) {
          dist[v] = nd;
          pred_arc[v] = e;
          pred_forward[v] = 0;
          heap.push({nd, v});
        }
      }
    }
    if (sink < 0) {
      sol.status = SolveStatus::infeasible;
      break;
    }

    const double dsink = dist[sink];
    for (NodeId u = 0; u < n; ++u) pi[u] += settled[u] ? dist[u] : dsink;

    Mass delta = -excess[sink];
    NodeId v = sink;
    while (pred_arc[v] >= 0) {
      const ArcId e = pred_arc[v];
      if (pred_forward[v]) {
        v = net.tail(e);
      } else {
        delta = std::min(delta, sol.flows[e]);
        v = net.head(e);
      }
    }
    delta = std::min(delta, excess[v]);
    for (NodeId w = sink; pred_arc[w] >= 0;) {
      const ArcId e = pred_arc[w];
      if (pred_forward[w]) {
        sol.flows[e] += delta;
        w = net.tail(e);
      } else {
        sol.flows[e] -= delta;
        w = net.head(e);
      }
    }
    excess[v] -= delta;
    excess[sink] += delta;
    ++sol.iterations;
  }

  sol.potentials.resize(static_cast<std::size_t>(n));
  for (NodeId u = 0; u < n; ++u) sol.potentials[u] = -pi[u];
  if (sol.status == SolveStatus::optimal) evaluate_objective(net, sol);
  return sol;
}

}  // namespace wass1
