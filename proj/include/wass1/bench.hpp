#pragma once

// Pairwise benchmark over a directory of histograms: one record per
// (pair, metric, L) plus mean/stddev/max rows per (metric, L).

#include <fnmatch.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "wass1/wasserstein.hpp"

namespace wass1 {

struct BenchImage {
  std::string id;
  Histogram2D histogram;
};

struct BenchConfig {
  MetricKind metric = MetricKind::l1;
  std::vector<int> Ls;                  // l2 only; empty means exact only
  std::optional<std::size_t> max_pairs; // first k pairs in enumeration order
  int exact_cap = 64;                   // compute the l2 exact reference only for N <= exact_cap
  int threads = 1;
  ArcId arc_cap = default_arc_cap;
};

struct BenchRecord {
  std::string image_a;
  std::string image_b;
  int N = 0;
  std::string metric;
  std::optional<int> L;
  double value = 0.0;
  double normalized = 0.0;
  std::optional<double> relative_error;
  std::optional<double> gamma_bar;
  ArcId arcs = 0;
  double build_seconds = 0.0;
  double solve_seconds = 0.0;
};

struct BenchStat {
  double mean = 0.0;
  double stddev = 0.0;
  double max = 0.0;
};

struct BenchAggregate {
  std::string metric;
  std::optional<int> L;
  int N = 0;
  std::size_t count = 0;
  BenchStat value, relative_error, build_seconds, solve_seconds;
  std::size_t error_count = 0;
  std::optional<double> gamma_bar;
  ArcId arcs = 0;
};

/// All unordered pairs (i, j), i < j, in lexicographic order, optionally truncated.
inline std::vector<std::pair<std::size_t, std::size_t>> enumerate_pairs(std::size_t n,
                                                                       std::optional<std::size_t> limit = {}) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      if (limit && out.size() >= *limit) return out;
      out.emplace_back(i, j);
    }
  return out;
}

/// Loads every regular file whose name matches pattern, sorted by name.
inline std::vector<BenchImage> load_bench_directory(const std::filesystem::path& dir, const std::string& pattern,
                                                    std::optional<HistogramFormat> format = {}) {
  if (!std::filesystem::is_directory(dir)) throw Error(ErrorCode::io, dir.string() + " is not a directory");
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    if (fnmatch(pattern.c_str(), entry.path().filename().c_str(), 0) == 0) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.size() < 2)
    throw Error(ErrorCode::value, "need at least two histograms matching '" + pattern + "' in " + dir.string() +
                                      ", found " + std::to_string(files.size()));
  std::vector<BenchImage> images;
  for (const auto& f : files) {
    images.push_back({f.filename().string(), load_histogram(f, format.value_or(detect_format(f)))});
    if (images.back().histogram.side() != images.front().histogram.side())
      throw Error(ErrorCode::dimension, "mixed sizes: " + images.front().id + " is " +
                                            std::to_string(images.front().histogram.side()) + ", " +
                                            images.back().id + " is " +
                                            std::to_string(images.back().histogram.side()));
  }
  return images;
}

namespace detail {

inline BenchRecord make_record(const BenchImage& a, const BenchImage& b, const DistanceResult& r) {
  BenchRecord rec;
  rec.image_a = a.id;
  rec.image_b = b.id;
  rec.N = a.histogram.side();
  rec.metric = std::string(to_string(r.metric.kind));
  if (r.metric.kind == MetricKind::l2) rec.L = r.metric.L;
  rec.value = r.value;
  rec.normalized = r.normalized;
  if (r.bounds) rec.gamma_bar = r.bounds->gamma_bar;
  rec.arcs = r.arcs;
  rec.build_seconds = r.build_seconds;
  rec.solve_seconds = r.solve_seconds;
  return rec;
}

inline std::vector<BenchRecord> bench_pair(const BenchImage& a, const BenchImage& b, const BenchConfig& cfg) {
  const int side = a.histogram.side();
  const BalancedPair pair = balance(a.histogram, b.histogram);
  WassersteinOptions opt;
  opt.arc_cap = cfg.arc_cap;
  std::vector<BenchRecord> out;
  if (cfg.metric != MetricKind::l2) {
    out.push_back(make_record(a, b, wasserstein(pair, GroundMetric{cfg.metric, 0}, opt)));
    return out;
  }
  std::optional<double> exact;
  if (side <= cfg.exact_cap || cfg.Ls.empty()) {
    const DistanceResult r = wasserstein(pair, GroundMetric::l2_exact(side), opt);
    exact = r.value;
    out.push_back(make_record(a, b, r));
  }
  for (int L : cfg.Ls) {
    if (L == side - 1 && exact) continue;
    const DistanceResult r = wasserstein(pair, GroundMetric::l2(L), opt);
    BenchRecord rec = make_record(a, b, r);
    if (exact) rec.relative_error = relative_error(r.value, *exact);
    out.push_back(std::move(rec));
  }
  return out;
}

inline BenchStat stat_of(const std::vector<double>& xs) {
  BenchStat s;
  if (xs.empty()) return s;
  double sum = 0.0;
  s.max = xs.front();
  for (double x : xs) {
    sum += x;
    s.max = std::max(s.max, x);
  }
  s.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return s;
}

inline std::string fmt9(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

}  // namespace detail

/// Runs every pair on a pool of cfg.threads workers. Record order depends
/// only on the inputs: pairs in enumeration order, exact reference first.
inline std::vector<BenchRecord> run_bench(const std::vector<BenchImage>& images, const BenchConfig& cfg) {
  if (images.size() < 2) throw Error(ErrorCode::value, "need at least two histograms");
  for (int L : cfg.Ls) GroundMetric::l2(L).validate(images.front().histogram.side());
  const auto pairs = enumerate_pairs(images.size(), cfg.max_pairs);
  std::vector<std::vector<BenchRecord>> per_pair(pairs.size());
  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::optional<Error> first_error;
  auto worker = [&] {
    for (std::size_t k = next++; k < pairs.size(); k = next++) {
      try {
        per_pair[k] = detail::bench_pair(images[pairs[k].first], images[pairs[k].second], cfg);
      } catch (const Error& e) {
        std::lock_guard lock(err_mu);
        if (!first_error) first_error = e;
      }
    }
  };
  const int nthreads = std::max(1, std::min<int>(cfg.threads, static_cast<int>(pairs.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (first_error) throw *first_error;

  std::vector<BenchRecord> records;
  for (auto& v : per_pair)
    for (auto& r : v) records.push_back(std::move(r));
  return records;
}

inline std::vector<BenchAggregate> aggregate(const std::vector<BenchRecord>& records) {
  std::map<std::pair<std::string, int>, std::vector<const BenchRecord*>> groups;
  std::vector<std::pair<std::string, int>> order;
  for (const auto& r : records) {
    auto key = std::make_pair(r.metric, r.L.value_or(-1));
    if (!groups.count(key)) order.push_back(key);
    groups[key].push_back(&r);
  }
  std::vector<BenchAggregate> out;
  for (const auto& key : order) {
    const auto& g = groups[key];
    BenchAggregate a;
    a.metric = key.first;
    if (key.second >= 0) a.L = key.second;
    a.N = g.front()->N;
    a.count = g.size();
    a.gamma_bar = g.front()->gamma_bar;
    a.arcs = g.front()->arcs;
    std::vector<double> v, e, b, s;
    for (const auto* r : g) {
      v.push_back(r->value);
      b.push_back(r->build_seconds);
      s.push_back(r->solve_seconds);
      if (r->relative_error) e.push_back(*r->relative_error);
    }
    a.value = detail::stat_of(v);
    a.relative_error = detail::stat_of(e);
    a.error_count = e.size();
    a.build_seconds = detail::stat_of(b);
    a.solve_seconds = detail::stat_of(s);
    out.push_back(a);
  }
  return out;
}

/// CSV report: one "record" row per BenchRecord followed by mean/stddev/max
/// rows per (metric, L). Reals use 9 significant digits; timing columns are
/// left empty when with_timings is false so the report is reproducible.
inline std::string bench_csv(const std::vector<BenchRecord>& records, const std::vector<BenchAggregate>& aggregates,
                             bool with_timings = true) {
  using detail::fmt9;
  std::string out =
      "row_type,image_a,image_b,N,metric,L,value,normalized,relative_error,gamma_bar,arcs,build_seconds,"
      "solve_seconds\n";
  auto opt_int = [](const std::optional<int>& x) { return x ? std::to_string(*x) : std::string(); };
  auto opt_real = [&](const std::optional<double>& x) { return x ? fmt9(*x) : std::string(); };
  auto timing = [&](double x) { return with_timings ? fmt9(x) : std::string(); };
  for (const auto& r : records) {
    out += "record," + r.image_a + "," + r.image_b + "," + std::to_string(r.N) + "," + r.metric + "," +
           opt_int(r.L) + "," + fmt9(r.value) + "," + fmt9(r.normalized) + "," + opt_real(r.relative_error) + "," +
           opt_real(r.gamma_bar) + "," + std::to_string(r.arcs) + "," + timing(r.build_seconds) + "," +
           timing(r.solve_seconds) + "\n";
  }
  for (const auto& a : aggregates) {
    static constexpr const char* row_names[] = {"mean", "stddev", "max"};
    for (int k = 0; k < 3; ++k) {
      auto pick = [k](const BenchStat& s) { return k == 0 ? s.mean : k == 1 ? s.stddev : s.max; };
      const std::string err = a.error_count ? fmt9(pick(a.relative_error)) : std::string();
      out += std::string(row_names[k]) + ",,," + std::to_string(a.N) + "," + a.metric + "," + opt_int(a.L) + "," +
             fmt9(pick(a.value)) + ",," + err + "," + opt_real(a.gamma_bar) + "," + std::to_string(a.arcs) + "," +
             timing(pick(a.build_seconds)) + "," + timing(pick(a.solve_seconds)) + "\n";
    }
  }
  return out;
}

}  // namespace wass1
