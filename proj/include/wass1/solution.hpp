#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "wass1/network.hpp"

namespace wass1 {

enum class SolveStatus { optimal, infeasible, numeric_limit };

inline std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::numeric_limit: return "numeric-limit";
  }
  return "?";
}

/// Result of an uncapacitated min-cost flow solve. Potentials follow the
/// convention reduced_cost(u, v) = cost(u, v) - phi(u) + phi(v).
struct FlowSolution {
  SolveStatus status = SolveStatus::optimal;
  double objective = 0.0;
  /// Exact objective when every arc cost is integral.
  std::optional<std::int64_t> integral_objective;
  std::vector<Mass> flows;
  std::vector<double> potentials;
  std::int64_t iterations = 0;
};

/// Neumaier-compensated sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Sets objective (and integral_objective for integer costs) from the flows.
inline void evaluate_objective(const FlowNetwork& net, FlowSolution& sol) {
  CompensatedSum sum;
  std::int64_t exact = 0;
  bool exact_ok = net.has_integral_costs();
  for (ArcId e = 0; e < net.arc_count(); ++e) {
    const Mass f = sol.flows[e];
    if (f == 0) continue;
    sum.add(static_cast<double>(f) * net.cost(e));
    if (exact_ok) {
      std::int64_t term = 0;
      if (__builtin_mul_overflow(f, static_cast<std::int64_t>(net.cost(e)), &term) ||
          __builtin_add_overflow(exact, term, &exact))
        exact_ok = false;
    }
  }
  sol.objective = sum.value();
  if (exact_ok) {
    sol.integral_objective = exact;
    sol.objective = static_cast<double>(exact);
  } else {
    sol.integral_objective.reset();
  }
}

struct Certificate {
  bool feasible = false;
  std::int64_t max_conservation_violation = 0;
  double min_reduced_cost = 0.0;
  double max_slack_on_flow_arcs = 0.0;
  double duality_gap = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

/// Checks conservation, dual feasibility, complementary slackness and strong
/// duality. The reduced-cost tolerance is eps * (1 + max arc cost); the
/// duality-gap tolerance is eps * (1 + |objective|).
inline Certificate verify_optimality(const FlowNetwork& net, std::span<const Mass> supply, const FlowSolution& sol,
                                     double eps = 1e-9) {
  Certificate cert;
  const auto n = static_cast<std::size_t>(net.node_count());
  if (supply.size() != n || sol.flows.size() != static_cast<std::size_t>(net.arc_count()) ||
      sol.potentials.size() != n || sol.status != SolveStatus::optimal) {
    cert.max_conservation_violation = std::numeric_limits<std::int64_t>::max();
    return cert;
  }

  std::vector<Mass> balance(supply.begin(), supply.end());
  bool nonneg = true;
  for (ArcId e = 0; e < net.arc_count(); ++e) {
    const Mass f = sol.flows[e];
    if (f < 0) nonneg = false;
    balance[net.tail(e)] -= f;
    balance[net.head(e)] += f;
  }
  for (Mass r : balance) cert.max_conservation_violation = std::max(cert.max_conservation_violation, std::abs(r));
  cert.feasible = nonneg && cert.max_conservation_violation == 0;

  cert.tolerance = eps * (1.0 + net.max_cost());
  cert.min_reduced_cost = std::numeric_limits<double>::infinity();
  for (ArcId e = 0; e < net.arc_count(); ++e) {
    const double rc = net.cost(e) - sol.potentials[net.tail(e)] + sol.potentials[net.head(e)];
    cert.min_reduced_cost = std::min(cert.min_reduced_cost, rc);
    if (sol.flows[e] > 0) cert.max_slack_on_flow_arcs = std::max(cert.max_slack_on_flow_arcs, std::abs(rc));
  }
  if (net.arc_count() == 0) cert.min_reduced_cost = 0.0;

  CompensatedSum dual;
  for (std::size_t u = 0; u < n; ++u)
    if (supply[u] != 0) dual.add(static_cast<double>(supply[u]) * sol.potentials[u]);
  cert.duality_gap = std::abs(dual.value() - sol.objective);

  cert.passed = cert.feasible && cert.min_reduced_cost >= -cert.tolerance &&
                cert.max_slack_on_flow_arcs <= cert.tolerance &&
                cert.duality_gap <= eps * (1.0 + std::abs(sol.objective));
  return cert;
}

namespace detail {

inline void check_supply(const FlowNetwork& net, std::span<const Mass> supply) {
  if (supply.size() != static_cast<std::size_t>(net.node_count()))
    throw Error(ErrorCode::dimension, "supply length " + std::to_string(supply.size()) + " does not match " +
                                          std::to_string(net.node_count()) + " nodes");
  Mass sum = 0;
  for (Mass b : supply)
    if (__builtin_add_overflow(sum, b, &sum)) throw Error(ErrorCode::overflow, "supply sum overflows");
  if (sum != 0) throw Error(ErrorCode::value, "supplies sum to " + std::to_string(sum) + ", expected 0");
}

inline Mass positive_supply(std::span<const Mass> supply) {
  Mass s = 0;
  for (Mass b : supply)
    if (b > 0) s += b;
  return s;
}

}  // namespace detail

}  // namespace wass1
