#pragma once

// Wasserstein-1 distances between grid histograms via reduced flow networks,
// together with the closed-form error bounds for the Euclidean approximation.

#include <chrono>
#include <cmath>
#include <optional>
#include <string>

#include "wass1/histogram.hpp"
#include "wass1/network.hpp"
#include "wass1/network_simplex.hpp"
#include "wass1/shortest_path.hpp"
#include "wass1/ssp.hpp"

namespace wass1 {

/// Bounds on the worst-case relative error of G_L under the Euclidean metric.
struct BoundReport {
  int L = 0;
  double gamma_lower = 0.0;
  double gamma_upper = 0.0;
  double gamma_bar = 0.0;
  double asymptotic = 0.0;
};

inline BoundReport gamma_bounds(int L) {
  if (L < 1) throw Error(ErrorCode::out_of_range, "bound parameter L must be at least 1");
  const double l = L;
  const double root = std::sqrt(1.0 + l * l);
  const double s = l / root;  // cosine of the widest angle between adjacent directions
  BoundReport r;
  r.L = L;
  r.gamma_lower = 1.0 - std::sqrt(1.0 + 4.0 * l * l) / (l + root);
  r.gamma_bar = 1.0 - std::sqrt(0.5 + s / 2.0);
  const double c = 1.0 / (2.0 + std::sqrt(2.0 + 2.0 * s));
  r.gamma_upper = c * (1.0 - s);
  r.asymptotic = 1.0 / (8.0 * l * l) - 11.0 / (128.0 * l * l * l * l);
  return r;
}

/// (approx - exact) / approx, clamped to 0 when the gap is round-off.
inline double relative_error(double approx, double exact) {
  if (exact <= 0.0) {
    if (approx > 0.0) throw Error(ErrorCode::value, "relative error needs a positive exact value");
    return 0.0;
  }
  const double gap = approx - exact;
  if (gap < 0.0) {
    if (-gap <= 1e-9 * exact) return 0.0;
    throw Error(ErrorCode::value, "approximation is below the exact value");
  }
  return gap / approx;
}

enum class SolverKind { network_simplex, ssp };

struct WassersteinOptions {
  ArcId arc_cap = default_arc_cap;
  SolverKind solver = SolverKind::network_simplex;
  double certificate_eps = 1e-9;
};

struct DistanceResult {
  double value = 0.0;       // transport cost of the balanced integer masses
  double normalized = 0.0;  // value / total balanced mass
  std::optional<std::int64_t> integral_value;
  Mass total_mass = 0;
  GroundMetric metric;
  bool exact = false;
  std::optional<BoundReport> bounds;  // set for approximate l2
  NodeId nodes = 0;
  ArcId arcs = 0;
  double build_seconds = 0.0;
  double solve_seconds = 0.0;
  std::int64_t iterations = 0;
  Certificate certificate;
};

namespace detail {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

inline FlowSolution solve_with(SolverKind solver, const FlowNetwork& net, std::span<const Mass> b) {
  return solver == SolverKind::ssp ? solve_ssp(net, b) : solve_network_simplex(net, b);
}

inline void finish_result(DistanceResult& r, const FlowNetwork& net, std::span<const Mass> b, const FlowSolution& sol,
                          const WassersteinOptions& opt) {
  if (sol.status == SolveStatus::infeasible) throw Error(ErrorCode::infeasible, "supplies cannot be routed");
  if (sol.status == SolveStatus::numeric_limit)
    throw Error(ErrorCode::overflow, "solver hit a numeric limit on " + r.metric.label());
  r.certificate = verify_optimality(net, b, sol, opt.certificate_eps);
  if (!r.certificate.passed)
    throw Error(ErrorCode::certificate,
                "optimality check failed (conservation " + std::to_string(r.certificate.max_conservation_violation) +
                    ", min reduced cost " + std::to_string(r.certificate.min_reduced_cost) + ", slack " +
                    std::to_string(r.certificate.max_slack_on_flow_arcs) + ")");
  r.value = sol.objective;
  r.integral_value = sol.integral_objective;
  r.normalized = r.total_mass > 0 ? r.value / static_cast<double>(r.total_mass) : 0.0;
  r.nodes = net.node_count();
  r.arcs = net.arc_count();
  r.iterations = sol.iterations;
}

}  // namespace detail

/// Balanced pair version: solves on the reduced grid network of the metric.
inline DistanceResult wasserstein(const BalancedPair& pair, const GroundMetric& metric,
                                  const WassersteinOptions& opt = {}) {
  metric.validate(pair.side);
  DistanceResult r;
  r.metric = metric;
  r.total_mass = pair.total();
  r.exact = metric.is_exact(pair.side);
  if (!r.exact) r.bounds = gamma_bounds(metric.L);

  auto t0 = detail::Clock::now();
  const FlowNetwork net = build_grid_network(pair.side, metric, opt.arc_cap);
  const auto b = supplies(pair);
  r.build_seconds = detail::seconds_since(t0);

  t0 = detail::Clock::now();
  const FlowSolution sol = detail::solve_with(opt.solver, net, b);
  r.solve_seconds = detail::seconds_since(t0);
  detail::finish_result(r, net, b, sol, opt);
  return r;
}

inline DistanceResult wasserstein(const Histogram2D& mu, const Histogram2D& nu, const GroundMetric& metric,
                                  const WassersteinOptions& opt = {}) {
  return wasserstein(balance(mu, nu), metric, opt);
}

/// Reference value on the support-restricted bipartite network; always exact.
inline DistanceResult wasserstein_bipartite(const BalancedPair& pair, MetricKind kind,
                                            const WassersteinOptions& opt = {}) {
  DistanceResult r;
  r.metric = kind == MetricKind::l2 ? GroundMetric::l2_exact(pair.side) : GroundMetric{kind, 0};
  r.total_mass = pair.total();
  r.exact = true;

  auto t0 = detail::Clock::now();
  const BipartiteInstance inst = build_bipartite_network(pair, kind);
  r.build_seconds = detail::seconds_since(t0);
  t0 = detail::Clock::now();
  const FlowSolution sol = detail::solve_with(opt.solver, inst.network, inst.supply);
  r.solve_seconds = detail::seconds_since(t0);
  detail::finish_result(r, inst.network, inst.supply, sol, opt);
  return r;
}

inline DistanceResult wasserstein_bipartite(const Histogram2D& mu, const Histogram2D& nu, MetricKind kind,
                                            const WassersteinOptions& opt = {}) {
  return wasserstein_bipartite(balance(mu, nu), kind, opt);
}

/// Relative error of G_L for a unit mass at (0, 0) against a unit mass at
/// (2L, 1); both values come from the solver.
inline double witness_error(int L, int side) {
  if (L < 1) throw Error(ErrorCode::out_of_range, "witness needs L >= 1");
  if (side <= 2 * L)
    throw Error(ErrorCode::out_of_range,
                "grid side " + std::to_string(side) + " too small for witness with L=" + std::to_string(L));
  BalancedPair pair;
  pair.side = side;
  pair.mu.assign(static_cast<std::size_t>(side) * side, 0);
  pair.nu.assign(static_cast<std::size_t>(side) * side, 0);
  pair.mu[0] = 1;
  pair.nu[static_cast<std::size_t>(2 * L) * side + 1] = 1;
  const double approx = wasserstein(pair, GroundMetric::l2(L)).value;
  const double exact = wasserstein(pair, GroundMetric::l2_exact(side)).value;
  return relative_error(approx, exact);
}

inline constexpr int default_gamma_exact_cap = 32;

/// max over ordered pairs x != y of 1 - d(x, y) / c_G(x, y), where c_G is the
/// shortest-path cost in the grid network of the metric.
inline double gamma_exact(int side, const GroundMetric& metric, int side_cap = default_gamma_exact_cap) {
  if (side > side_cap)
    throw Error(ErrorCode::out_of_range, "gamma_exact is limited to N <= " + std::to_string(side_cap));
  const FlowNetwork net = build_grid_network(side, metric);
  double worst = -std::numeric_limits<double>::infinity();
  for (NodeId s = 0; s < net.node_count(); ++s) {
    const auto dist = dijkstra(net, s);
    for (NodeId t = 0; t < net.node_count(); ++t) {
      if (t == s) continue;
      const double ground = ground_distance(metric.kind, s / side - t / side, s % side - t % side);
      worst = std::max(worst, 1.0 - ground / dist[t]);
    }
  }
  return worst;
}

inline double gamma_exact(int side, int L, int side_cap = default_gamma_exact_cap) {
  return gamma_exact(side, GroundMetric::l2(L), side_cap);
}

}  // namespace wass1
