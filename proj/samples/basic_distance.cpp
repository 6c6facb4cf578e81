// Computes W1 between two histograms under each ground metric.
//
//   basic_distance samples/data/blob_a.csv samples/data/blob_b.csv

#include <cstdio>

#include "wass1/wass1.hpp"

int main(int argc, char** argv) {
  if (argc != 3) {
    std::fprintf(stderr, "usage: %s a.csv b.csv\n", argv[0]);
    return 2;
  }
  try {
    const auto mu = wass1::load_histogram(argv[1], wass1::detect_format(argv[1]));
    const auto nu = wass1::load_histogram(argv[2], wass1::detect_format(argv[2]));
    const int n = mu.side();
    for (const auto& metric : {wass1::GroundMetric::l1(), wass1::GroundMetric::linf(), wass1::GroundMetric::l2(3),
                               wass1::GroundMetric::l2_exact(n)}) {
      const auto r = wass1::wasserstein(mu, nu, metric);
      std::printf("%-12s emd=%.6f  (%s, %lld arcs, %.4fs)\n", metric.label().c_str(), r.normalized,
                  r.exact ? "exact" : "approx", static_cast<long long>(r.arcs), r.solve_seconds);
    }
  } catch (const wass1::Error& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 1;
  }
  return 0;
}
