#pragma once

#include <functional>
#include <limits>
#include <queue>
#include <utility>
#include <vector>

#include "wass1/network.hpp"

namespace wass1 {

/// Single-source shortest-path costs over the arcs of net; unreachable nodes get +inf.
inline std::vector<double> dijkstra(const FlowNetwork& net, NodeId source) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(static_cast<std::size_t>(net.node_count()), inf);
  using Entry = std::pair<double, NodeId>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  dist[source] = 0.0;
  heap.push({0.0, source});
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    for (ArcId e = net.first_out(u); e < net.end_out(u); ++e) {
      const NodeId v = net.head(e);
      const double nd = d + net.cost(e);
      if (nd < dist[v]) {
        dist[v] = nd;
        heap.push({nd, v});
      }
    }
  }
  return dist;
}

}  // namespace wass1
