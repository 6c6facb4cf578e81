#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "wass1/network_simplex.hpp"
#include "wass1/ssp.hpp"
#include "wass1/wasserstein.hpp"

namespace {

using namespace wass1;

ArcId find_arc(const FlowNetwork& net, NodeId u, NodeId v) {
  for (ArcId e = net.first_out(u); e < net.end_out(u); ++e)
    if (net.head(e) == v) return e;
  return -1;
}

std::vector<Mass> random_supply(std::mt19937_64& rng, NodeId n, int max_mass) {
  std::uniform_int_distribution<Mass> d(0, max_mass);
  std::vector<Mass> mu(n), nu(n);
  for (auto& x : mu) x = d(rng);
  for (auto& x : nu) x = d(rng);
  mu[0] += 1;
  nu[n - 1] += 1;
  Mass sm = std::accumulate(mu.begin(), mu.end(), Mass{0});
  Mass sn = std::accumulate(nu.begin(), nu.end(), Mass{0});
  std::vector<Mass> b(n);
  for (NodeId u = 0; u < n; ++u) b[u] = mu[u] * sn - nu[u] * sm;
  return b;
}

void expect_certified(const FlowNetwork& net, const std::vector<Mass>& b, const FlowSolution& sol) {
  ASSERT_EQ(sol.status, SolveStatus::optimal);
  const auto cert = verify_optimality(net, b, sol);
  EXPECT_TRUE(cert.passed) << "conservation " << cert.max_conservation_violation << " min rc "
                           << cert.min_reduced_cost << " slack " << cert.max_slack_on_flow_arcs << " gap "
                           << cert.duality_gap;
}

TEST(Simplex, SingleArc) {
  const std::vector<Arc> arcs{{0, 1, 3.0}};
  const FlowNetwork net(2, arcs);
  const std::vector<Mass> b{5, -5};
  const auto sol = solve_network_simplex(net, b);
  ASSERT_EQ(sol.status, SolveStatus::optimal);
  EXPECT_EQ(sol.flows, (std::vector<Mass>{5}));
  EXPECT_EQ(sol.objective, 15.0);
  EXPECT_EQ(sol.integral_objective, 15);
  expect_certified(net, b, sol);
}

TEST(Simplex, ZeroSupplyGivesZeroFlow) {
  const auto net = build_grid_network(4, GroundMetric::linf());
  const std::vector<Mass> b(16, 0);
  const auto sol = solve_network_simplex(net, b);
  ASSERT_EQ(sol.status, SolveStatus::optimal);
  EXPECT_EQ(sol.objective, 0.0);
  EXPECT_TRUE(std::all_of(sol.flows.begin(), sol.flows.end(), [](Mass f) { return f == 0; }));
  expect_certified(net, b, sol);
}

TEST(Simplex, PathPrefersCheaperRoute) {
  // 0 -> 1 -> 2 costs 2, direct 0 -> 2 costs 3.
  const std::vector<Arc> arcs{{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 3.0}};
  const FlowNetwork net(3, arcs);
  const std::vector<Mass> b{4, 0, -4};
  for (const auto& sol : {solve_network_simplex(net, b), solve_ssp(net, b)}) {
    ASSERT_EQ(sol.status, SolveStatus::optimal);
    EXPECT_EQ(sol.integral_objective, 8);
    expect_certified(net, b, sol);
  }
}

TEST(Simplex, StarThroughHub) {
  // Leaves 1..4 send to leaves 5..8 through hub 0.
  std::vector<Arc> arcs;
  for (NodeId u = 1; u <= 8; ++u) {
    arcs.push_back({u, 0, static_cast<double>(u)});
    arcs.push_back({0, u, static_cast<double>(u)});
  }
  const FlowNetwork net(9, arcs);
  const std::vector<Mass> b{0, 1, 2, 3, 4, -4, -3, -2, -1};
  const auto sol = solve_network_simplex(net, b);
  ASSERT_EQ(sol.status, SolveStatus::optimal);
  // Every unit pays its own leaf cost on both ends.
  EXPECT_EQ(sol.integral_objective, 1 * 1 + 2 * 2 + 3 * 3 + 4 * 4 + 4 * 5 + 3 * 6 + 2 * 7 + 1 * 8);
  expect_certified(net, b, sol);
}

TEST(Simplex, InfeasibleWhenDisconnected) {
  const std::vector<Arc> arcs{{0, 1, 1.0}, {2, 3, 1.0}};
  const FlowNetwork net(4, arcs);
  const std::vector<Mass> b{1, 0, 0, -1};
  EXPECT_EQ(solve_network_simplex(net, b).status, SolveStatus::infeasible);
  EXPECT_EQ(solve_ssp(net, b).status, SolveStatus::infeasible);
  // Arc direction matters too.
  const std::vector<Mass> back{0, 1, -1};
  const std::vector<Arc> one_way{{0, 1, 1.0}, {2, 1, 1.0}};
  const FlowNetwork net2(3, one_way);
  EXPECT_EQ(solve_network_simplex(net2, back).status, SolveStatus::infeasible);
  EXPECT_EQ(solve_ssp(net2, back).status, SolveStatus::infeasible);
}

TEST(Simplex, SupplyErrors) {
  const std::vector<Arc> arcs{{0, 1, 1.0}};
  const FlowNetwork net(2, arcs);
  const std::vector<Mass> unbalanced{1, 0};
  const std::vector<Mass> short_b{1};
  EXPECT_THROW(solve_network_simplex(net, unbalanced), Error);
  EXPECT_THROW(solve_network_simplex(net, short_b), Error);
  EXPECT_THROW(solve_ssp(net, unbalanced), Error);
}

TEST(Simplex, IterationLimitReportsNumericLimit) {
  const auto net = build_grid_network(8, GroundMetric::l1());
  std::vector<Mass> b(64, 0);
  b[0] = 1;
  b[63] = -1;
  SimplexOptions opt;
  opt.max_iterations = 1;
  EXPECT_EQ(solve_network_simplex(net, b, opt).status, SolveStatus::numeric_limit);
}

TEST(SimplexVsSsp, RandomGridInstances) {
  std::mt19937_64 rng(2024);
  int count = 0;
  for (int n : {4, 8, 16}) {
    for (const auto& metric : {GroundMetric::l1(), GroundMetric::linf(), GroundMetric::l2(2),
                               GroundMetric::l2_exact(n)}) {
      const auto net = build_grid_network(n, metric);
      const int trials = n == 16 ? 6 : 15;
      for (int t = 0; t < trials; ++t) {
        const auto b = random_supply(rng, net.node_count(), t % 2 ? 255 : 3);
        const auto a = solve_network_simplex(net, b);
        const auto s = solve_ssp(net, b);
        expect_certified(net, b, a);
        expect_certified(net, b, s);
        if (net.has_integral_costs()) {
          ASSERT_TRUE(a.integral_objective && s.integral_objective);
          EXPECT_EQ(*a.integral_objective, *s.integral_objective);
        } else {
          EXPECT_NEAR(a.objective, s.objective, 1e-9 * (1 + s.objective));
        }
        ++count;
      }
    }
  }
  EXPECT_GE(count, 100);
}

TEST(SimplexVsSsp, RandomSparseNetworks) {
  std::mt19937_64 rng(77);
  for (int t = 0; t < 60; ++t) {
    const NodeId n = 2 + t % 12;
    std::uniform_int_distribution<NodeId> node(0, n - 1);
    std::uniform_int_distribution<int> cost(0, 20);
    std::vector<Arc> arcs;
    for (int k = 0; k < 3 * n; ++k) {
      const NodeId u = node(rng), v = node(rng);
      if (u != v) arcs.push_back({u, v, static_cast<double>(cost(rng))});
    }
    const FlowNetwork net(n, arcs);
    const auto b = random_supply(rng, n, 5);
    const auto a = solve_network_simplex(net, b);
    const auto s = solve_ssp(net, b);
    ASSERT_EQ(a.status, s.status) << "trial " << t;
    if (a.status == SolveStatus::optimal) {
      EXPECT_EQ(a.integral_objective, s.integral_objective);
      expect_certified(net, b, a);
    }
  }
}

TEST(Simplex, TreeStaysConsistent) {
  std::mt19937_64 rng(3);
  SimplexOptions opt;
  opt.check_tree = true;
  for (const auto& metric : {GroundMetric::l1(), GroundMetric::l2(3)}) {
    const auto net = build_grid_network(8, metric);
    for (int t = 0; t < 5; ++t) {
      const auto b = random_supply(rng, net.node_count(), 20);
      const auto sol = solve_network_simplex(net, b, opt);
      EXPECT_EQ(sol.status, SolveStatus::optimal);
      expect_certified(net, b, sol);
    }
  }
}

TEST(Simplex, BlockSizeDoesNotChangeObjective) {
  std::mt19937_64 rng(8);
  const auto net = build_grid_network(8, GroundMetric::linf());
  const auto b = random_supply(rng, net.node_count(), 50);
  const auto ref = solve_network_simplex(net, b);
  for (std::int64_t block : {1, 7, 1000000}) {
    SimplexOptions opt;
    opt.block_size = block;
    EXPECT_EQ(solve_network_simplex(net, b, opt).integral_objective, ref.integral_objective);
  }
}

TEST(Monotonicity, MoreDirectionsNeverIncreaseCost) {
  std::mt19937_64 rng(13);
  const int n = 8;
  for (int t = 0; t < 10; ++t) {
    const auto b = random_supply(rng, n * n, 30);
    double prev = std::numeric_limits<double>::infinity();
    // G0 under unit costs is the taxicab cost, an upper bound on Euclidean.
    for (const auto& metric : {GroundMetric::l1(), GroundMetric::l2(1), GroundMetric::l2(2), GroundMetric::l2(4),
                               GroundMetric::l2(7)}) {
      const auto net = build_grid_network(n, metric);
      const auto sol = solve_network_simplex(net, b);
      ASSERT_EQ(sol.status, SolveStatus::optimal);
      EXPECT_LE(sol.objective, prev * (1 + 1e-12));
      prev = sol.objective;
    }
  }
}

TEST(ScaleEquivariance, MultiplyingSupplyScalesObjective) {
  std::mt19937_64 rng(21);
  for (const auto& metric : {GroundMetric::l1(), GroundMetric::l2(3)}) {
    const auto net = build_grid_network(6, metric);
    const auto b = random_supply(rng, net.node_count(), 10);
    auto b7 = b;
    for (auto& x : b7) x *= 7;
    const auto s1 = solve_network_simplex(net, b);
    const auto s7 = solve_network_simplex(net, b7);
    EXPECT_NEAR(s7.objective, 7 * s1.objective, 1e-9 * s7.objective);
  }
}

TEST(Certificate, RejectsSuboptimalFlow) {
  const int n = 4;
  const auto net = build_grid_network(n, GroundMetric::l1());
  std::vector<Mass> b(16, 0);
  b[0] = 2;
  b[15] = -2;
  auto sol = solve_network_simplex(net, b);
  ASSERT_TRUE(verify_optimality(net, b, sol).passed);
  // Push one unit around the square 5 -> 6 -> 10 -> 9 -> 5: still feasible, costs 4 more.
  const NodeId cyc[] = {5, 6, 10, 9, 5};
  for (int k = 0; k < 4; ++k) {
    const ArcId e = find_arc(net, cyc[k], cyc[k + 1]);
    ASSERT_GE(e, 0);
    sol.flows[e] += 1;
  }
  evaluate_objective(net, sol);
  const auto cert = verify_optimality(net, b, sol);
  EXPECT_TRUE(cert.feasible);
  EXPECT_FALSE(cert.passed);
}

TEST(Certificate, RejectsZeroPotentials) {
  const auto net = build_grid_network(4, GroundMetric::l1());
  std::vector<Mass> b(16, 0);
  b[0] = 1;
  b[15] = -1;
  auto sol = solve_network_simplex(net, b);
  std::fill(sol.potentials.begin(), sol.potentials.end(), 0.0);
  const auto cert = verify_optimality(net, b, sol);
  EXPECT_TRUE(cert.feasible);
  EXPECT_GT(cert.duality_gap, 1.0);
  EXPECT_FALSE(cert.passed);
}

TEST(Certificate, RejectsConservationViolation) {
  const auto net = build_grid_network(4, GroundMetric::l1());
  std::vector<Mass> b(16, 0);
  b[0] = 1;
  b[15] = -1;
  auto sol = solve_network_simplex(net, b);
  sol.flows[0] += 1;
  const auto cert = verify_optimality(net, b, sol);
  EXPECT_FALSE(cert.feasible);
  EXPECT_EQ(cert.max_conservation_violation, 1);
  EXPECT_FALSE(cert.passed);
}

TEST(Objective, CompensatedSumIsAccurate) {
  CompensatedSum s;
  s.add(1e16);
  s.add(1.0);
  s.add(-1e16);
  EXPECT_EQ(s.value(), 1.0);
}

}  // namespace
