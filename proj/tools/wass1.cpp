// wass1: Wasserstein-1 distances between 2D histograms on reduced flow networks.
//
//   wass1 dist a.csv b.csv --metric l2 --L 3 [--json]
//   wass1 bench dir/ --metric l2 --L 2,3,5 --out report.csv
//   wass1 bounds --L 2,3,5,10
//   wass1 netinfo --N 32 --metric l2 [--L 31] [--dimacs out.min]
//   wass1 solve instance.min

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "wass1/wass1.hpp"

namespace {

using json = nlohmann::json;
using namespace wass1;

constexpr int kSchemaVersion = 1;
constexpr int kUsageError = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

ArcId arc_cap_from_env() {
  const char* env = std::getenv("WASS1_ARC_CAP");
  if (!env || !*env) return default_arc_cap;
  char* end = nullptr;
  const long long v = std::strtoll(env, &end, 10);
  if (*end != '\0' || v <= 0) throw UsageError("WASS1_ARC_CAP must be a positive integer");
  return v;
}

std::optional<HistogramFormat> parse_format(const std::string& s) {
  if (s.empty() || s == "auto") return std::nullopt;
  if (s == "csv-grid") return HistogramFormat::csv_grid;
  if (s == "pgm") return HistogramFormat::pgm;
  throw UsageError("unknown format '" + s + "'");
}

GroundMetric metric_for(MetricKind kind, std::optional<int> L, int side) {
  if (kind != MetricKind::l2) {
    if (L) throw UsageError("--L only applies to --metric l2");
    return {kind, 0};
  }
  if (L && (*L < 1 || *L > side - 1))
    throw UsageError("--L must be in [1, " + std::to_string(side - 1) + "] for N=" + std::to_string(side));
  return L ? GroundMetric::l2(*L) : GroundMetric::l2_exact(side);
}

std::string g9(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

json bounds_json(const BoundReport& b) {
  return {{"L", b.L},
          {"gamma_lower", b.gamma_lower},
          {"gamma_upper", b.gamma_upper},
          {"gamma_bar", b.gamma_bar},
          {"asymptotic", b.asymptotic}};
}

json certificate_json(const Certificate& c) {
  return {{"passed", c.passed},
          {"feasible", c.feasible},
          {"max_conservation_violation", c.max_conservation_violation},
          {"min_reduced_cost", c.min_reduced_cost},
          {"max_slack_on_flow_arcs", c.max_slack_on_flow_arcs},
          {"duality_gap", c.duality_gap}};
}

json result_json(const DistanceResult& r, int side) {
  json j = {{"schema_version", kSchemaVersion},
            {"N", side},
            {"metric", std::string(to_string(r.metric.kind))},
            {"value", r.value},
            {"normalized", r.normalized},
            {"total_mass", r.total_mass},
            {"exact", r.exact},
            {"nodes", r.nodes},
            {"arcs", r.arcs},
            {"iterations", r.iterations},
            {"build_seconds", r.build_seconds},
            {"solve_seconds", r.solve_seconds},
            {"certificate", certificate_json(r.certificate)}};
  j["L"] = r.metric.kind == MetricKind::l2 ? json(r.metric.L) : json(nullptr);
  j["bounds"] = r.bounds ? bounds_json(*r.bounds) : json(nullptr);
  return j;
}

void print_bounds_row(const BoundReport& b) {
  std::printf("%6d  %12.6f%%  %12.6f%%  %12.6f%%  %12.6f%%\n", b.L, 100 * b.gamma_lower, 100 * b.gamma_upper,
              100 * b.gamma_bar, 100 * b.asymptotic);
}

struct DistArgs {
  std::string file_a, file_b, metric = "l1", format, solver = "simplex";
  std::optional<int> L;
  bool json = false, reference = false;
};

int cmd_dist(const DistArgs& a) {
  const auto fa = parse_format(a.format);
  const Histogram2D mu = load_histogram(a.file_a, fa.value_or(detect_format(a.file_a)));
  const Histogram2D nu = load_histogram(a.file_b, fa.value_or(detect_format(a.file_b)));
  if (mu.side() != nu.side())
    throw Error(ErrorCode::dimension,
                "side mismatch " + std::to_string(mu.side()) + " vs " + std::to_string(nu.side()));
  const GroundMetric metric = metric_for(parse_metric_kind(a.metric), a.L, mu.side());
  WassersteinOptions opt;
  opt.arc_cap = arc_cap_from_env();
  opt.solver = a.solver == "ssp" ? SolverKind::ssp : SolverKind::network_simplex;
  const BalancedPair pair = balance(mu, nu);
  const DistanceResult r = wasserstein(pair, metric, opt);
  std::optional<DistanceResult> ref;
  if (a.reference) ref = wasserstein_bipartite(pair, metric.kind, opt);

  if (a.json) {
    json j = result_json(r, mu.side());
    if (ref) j["reference"] = {{"value", ref->value}, {"arcs", ref->arcs}, {"solve_seconds", ref->solve_seconds}};
    std::cout << j.dump(2) << "\n";
    return 0;
  }
  std::printf("metric        %s\n", metric.label().c_str());
  std::printf("grid          %dx%d\n", mu.side(), mu.side());
  std::printf("exact         %s\n", r.exact ? "yes" : "no");
  std::printf("value         %s\n", g9(r.value).c_str());
  std::printf("normalized    %s\n", g9(r.normalized).c_str());
  std::printf("total_mass    %lld\n", static_cast<long long>(r.total_mass));
  std::printf("network       %d nodes, %lld arcs\n", r.nodes, static_cast<long long>(r.arcs));
  std::printf("solve_seconds %.6f (build %.6f)\n", r.solve_seconds, r.build_seconds);
  std::printf("certificate   %s\n", r.certificate.passed ? "passed" : "FAILED");
  if (r.bounds) {
    std::printf("bound         relative error <= %.6f%% (gamma_bar), Gamma in [%.6f%%, %.6f%%]\n",
                100 * r.bounds->gamma_bar, 100 * r.bounds->gamma_lower, 100 * r.bounds->gamma_upper);
  }
  if (ref) {
    std::printf("reference     %s (bipartite, %lld arcs)\n", g9(ref->value).c_str(),
                static_cast<long long>(ref->arcs));
    if (r.exact) std::printf("ref_rel_diff  %.3e\n", std::abs(r.value - ref->value) / std::max(1.0, ref->value));
  }
  return 0;
}

struct BenchArgs {
  std::string dir, metric = "l1", pairs = "all", out, glob = "*", format;
  std::vector<int> Ls;
  int threads = 1, exact_cap = 64;
  bool no_timings = false;
};

int cmd_bench(const BenchArgs& a) {
  BenchConfig cfg;
  cfg.metric = parse_metric_kind(a.metric);
  if (cfg.metric != MetricKind::l2 && !a.Ls.empty()) throw UsageError("--L only applies to --metric l2");
  cfg.Ls = a.Ls;
  if (a.pairs != "all") {
    try {
      const long k = std::stol(a.pairs);
      if (k <= 0) throw UsageError("--pairs must be 'all' or a positive integer");
      cfg.max_pairs = static_cast<std::size_t>(k);
    } catch (const std::logic_error&) {
      throw UsageError("--pairs must be 'all' or a positive integer");
    }
  }
  cfg.threads = a.threads;
  cfg.exact_cap = a.exact_cap;
  cfg.arc_cap = arc_cap_from_env();
  for (int L : cfg.Ls)
    if (L < 1) throw UsageError("--L values must be at least 1");

  const auto images = load_bench_directory(a.dir, a.glob, parse_format(a.format));
  const auto records = run_bench(images, cfg);
  const auto aggs = aggregate(records);

  if (!a.out.empty()) {
    std::ofstream out(a.out, std::ios::binary);
    if (!out) throw Error(ErrorCode::io, "cannot write " + a.out);
    out << bench_csv(records, aggs, !a.no_timings);
  }
  const auto npairs = enumerate_pairs(images.size(), cfg.max_pairs).size();
  std::printf("%zu images, %zu pairs, N=%d\n", images.size(), npairs, images.front().histogram.side());
  std::printf("%-6s %5s %10s %12s %12s %12s %10s %10s %10s\n", "metric", "L", "arcs", "solve_avg", "solve_std",
              "solve_max", "gamma_bar", "err_mean", "err_max");
  for (const auto& g : aggs) {
    std::printf("%-6s %5s %10lld %12.6f %12.6f %12.6f %10s %10s %10s\n", g.metric.c_str(),
                g.L ? std::to_string(*g.L).c_str() : "-", static_cast<long long>(g.arcs), g.solve_seconds.mean,
                g.solve_seconds.stddev, g.solve_seconds.max,
                g.gamma_bar ? (g9(100 * *g.gamma_bar) + "%").c_str() : "-",
                g.error_count ? (g9(100 * g.relative_error.mean) + "%").c_str() : "-",
                g.error_count ? (g9(100 * g.relative_error.max) + "%").c_str() : "-");
  }
  return 0;
}

int cmd_bounds(const std::vector<int>& Ls, bool as_json) {
  std::vector<BoundReport> reports;
  for (int L : Ls) {
    if (L < 1) throw UsageError("--L values must be at least 1");
    reports.push_back(gamma_bounds(L));
  }
  if (as_json) {
    json j = {{"schema_version", kSchemaVersion}, {"bounds", json::array()}};
    for (const auto& b : reports) j["bounds"].push_back(bounds_json(b));
    std::cout << j.dump(2) << "\n";
    return 0;
  }
  std::printf("%6s  %13s  %13s  %13s  %13s\n", "L", "gamma_lower", "gamma_upper", "gamma_bar", "asymptotic");
  for (const auto& b : reports) print_bounds_row(b);
  return 0;
}

int cmd_netinfo(int side, const std::string& metric_name, std::optional<int> L, const std::string& dimacs,
                bool as_json) {
  const GroundMetric metric = metric_for(parse_metric_kind(metric_name), L, side);
  metric.validate(side);
  const ArcId arcs = edge_count(side, metric);
  const double n4 = std::pow(static_cast<double>(side), 4);
  const double density = static_cast<double>(arcs) / n4;
  const double limit = 6.0 / (std::numbers::pi * std::numbers::pi);
  if (!dimacs.empty()) {
    const FlowNetwork net = build_grid_network(side, metric, arc_cap_from_env());
    std::ofstream out(dimacs, std::ios::binary);
    if (!out) throw Error(ErrorCode::io, "cannot write " + dimacs);
    write_dimacs(out, net, std::vector<Mass>(static_cast<std::size_t>(net.node_count()), 0));
  }
  if (as_json) {
    json j = {{"schema_version", kSchemaVersion},
              {"N", side},
              {"metric", std::string(to_string(metric.kind))},
              {"nodes", static_cast<std::int64_t>(side) * side},
              {"arcs", arcs},
              {"directions", direction_count(metric.direction_parameter())},
              {"density", density},
              {"density_limit", limit},
              {"exact", metric.is_exact(side)}};
    j["L"] = metric.kind == MetricKind::l2 ? json(metric.L) : json(nullptr);
    std::cout << j.dump(2) << "\n";
    return 0;
  }
  std::printf("metric      %s\n", metric.label().c_str());
  std::printf("nodes       %lld\n", static_cast<long long>(side) * side);
  std::printf("arcs        %lld\n", static_cast<long long>(arcs));
  std::printf("directions  %lld\n", static_cast<long long>(direction_count(metric.direction_parameter())));
  std::printf("density     %.6f (arcs / N^4; 6/pi^2 = %.6f)\n", density, limit);
  std::printf("exact       %s\n", metric.is_exact(side) ? "yes" : "no");
  return 0;
}

int cmd_solve(const std::string& path, const std::string& solver, bool as_json) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path);
  const DimacsInstance inst = read_dimacs(in);
  const FlowSolution sol =
      solver == "ssp" ? solve_ssp(inst.network, inst.supply) : solve_network_simplex(inst.network, inst.supply);
  const Certificate cert = verify_optimality(inst.network, inst.supply, sol);
  if (as_json) {
    json j = {{"schema_version", kSchemaVersion},
              {"status", std::string(to_string(sol.status))},
              {"nodes", inst.network.node_count()},
              {"arcs", inst.network.arc_count()},
              {"iterations", sol.iterations}};
    j["objective"] = sol.status == SolveStatus::optimal ? json(sol.objective) : json(nullptr);
    j["certificate"] = sol.status == SolveStatus::optimal ? certificate_json(cert) : json(nullptr);
    std::cout << j.dump(2) << "\n";
  } else {
    std::printf("status      %s\n", std::string(to_string(sol.status)).c_str());
    if (sol.status == SolveStatus::optimal) {
      std::printf("objective   %s\n", g9(sol.objective).c_str());
      std::printf("certificate %s\n", cert.passed ? "passed" : "FAILED");
    }
  }
  if (sol.status != SolveStatus::optimal) return 1;
  return cert.passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wasserstein-1 distances between 2D histograms on reduced flow networks"};
  app.require_subcommand(1);
  const std::vector<std::string> metrics{"l1", "linf", "l2"};

  DistArgs dist;
  auto* dist_cmd = app.add_subcommand("dist", "distance between two histograms");
  dist_cmd->add_option("file_a", dist.file_a, "first histogram")->required()->check(CLI::ExistingFile);
  dist_cmd->add_option("file_b", dist.file_b, "second histogram")->required()->check(CLI::ExistingFile);
  dist_cmd->add_option("--metric", dist.metric, "ground distance")->check(CLI::IsMember(metrics));
  dist_cmd->add_option("--L", dist.L, "l2 step bound, 1..N-1 (default N-1, exact)");
  dist_cmd->add_option("--format", dist.format, "csv-grid or pgm (default: by extension)")
      ->check(CLI::IsMember({"auto", "csv-grid", "pgm"}));
  dist_cmd->add_option("--solver", dist.solver, "simplex or ssp")->check(CLI::IsMember({"simplex", "ssp"}));
  dist_cmd->add_flag("--json", dist.json, "JSON output");
  dist_cmd->add_flag("--reference", dist.reference, "also solve the bipartite formulation");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "all-pairs benchmark over a directory");
  bench_cmd->add_option("directory", bench.dir, "directory of histograms")->required();
  bench_cmd->add_option("--metric", bench.metric, "ground distance")->check(CLI::IsMember(metrics));
  bench_cmd->add_option("--L", bench.Ls, "comma-separated l2 step bounds")->delimiter(',');
  bench_cmd->add_option("--pairs", bench.pairs, "'all' or the number of pairs to run");
  bench_cmd->add_option("--out", bench.out, "CSV report path");
  bench_cmd->add_option("--glob", bench.glob, "file name pattern");
  bench_cmd->add_option("--format", bench.format, "csv-grid or pgm (default: by extension)")
      ->check(CLI::IsMember({"auto", "csv-grid", "pgm"}));
  bench_cmd->add_option("--threads", bench.threads, "worker threads")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--exact-cap", bench.exact_cap, "largest N for the exact l2 reference");
  bench_cmd->add_flag("--no-timings", bench.no_timings, "leave timing columns empty");

  std::vector<int> bound_Ls{2, 3, 5, 10};
  bool bounds_json = false;
  auto* bounds_cmd = app.add_subcommand("bounds", "closed-form error bounds for G_L");
  bounds_cmd->add_option("--L", bound_Ls, "comma-separated step bounds")->delimiter(',');
  bounds_cmd->add_flag("--json", bounds_json, "JSON output");

  int net_side = 0;
  std::string net_metric = "l1", net_dimacs;
  std::optional<int> net_L;
  bool net_json = false;
  auto* net_cmd = app.add_subcommand("netinfo", "node and arc counts of a grid network");
  net_cmd->add_option("--N", net_side, "grid side")->required();
  net_cmd->add_option("--metric", net_metric, "ground distance")->check(CLI::IsMember(metrics));
  net_cmd->add_option("--L", net_L, "l2 step bound (default N-1)");
  net_cmd->add_option("--dimacs", net_dimacs, "export the network in DIMACS format");
  net_cmd->add_flag("--json", net_json, "JSON output");

  std::string solve_path, solve_solver = "simplex";
  bool solve_json = false;
  auto* solve_cmd = app.add_subcommand("solve", "solve a DIMACS min-cost flow instance");
  solve_cmd->add_option("file", solve_path, "DIMACS file")->required()->check(CLI::ExistingFile);
  solve_cmd->add_option("--solver", solve_solver, "simplex or ssp")->check(CLI::IsMember({"simplex", "ssp"}));
  solve_cmd->add_flag("--json", solve_json, "JSON output");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*dist_cmd) return cmd_dist(dist);
    if (*bench_cmd) return cmd_bench(bench);
    if (*bounds_cmd) return cmd_bounds(bound_Ls, bounds_json);
    if (*net_cmd) return cmd_netinfo(net_side, net_metric, net_L, net_dimacs, net_json);
    if (*solve_cmd) return cmd_solve(solve_path, solve_solver, solve_json);
  } catch (const UsageError& e) {
    std::cerr << "wass1: usage error: " << e.what() << "\n";
    return kUsageError;
  } catch (const wass1::Error& e) {
    std::cerr << "wass1: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
