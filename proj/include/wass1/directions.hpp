#pragma once

// Coprime lattice step sets and the Farey machinery behind them.
//
// V_0 holds the four axis unit steps. For L >= 1, V_L adds every step
// (d1, d2) with both coordinates non-zero, |d1|, |d2| <= L and
// gcd(|d1|, |d2|) = 1. The first-octant part of V_L, ordered by slope d2/d1,
// is in bijection with the Farey sequence of order L.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <string>
#include <vector>

#include "wass1/error.hpp"

namespace wass1 {

struct Direction {
  int d1 = 0;
  int d2 = 0;

  friend auto operator<=>(const Direction&, const Direction&) = default;
};

struct FareyFraction {
  std::int64_t numerator = 0;
  std::int64_t denominator = 1;

  double value() const { return static_cast<double>(numerator) / static_cast<double>(denominator); }
  friend bool operator==(const FareyFraction&, const FareyFraction&) = default;
};

inline bool is_visible(int d1, int d2) {
  if (d1 == 0 && d2 == 0) throw Error(ErrorCode::value, "zero vector has no visibility");
  return std::gcd(std::abs(d1), std::abs(d2)) == 1;
}

namespace detail {

// 0 for angles in [0, pi), 1 for [pi, 2pi).
inline int half_plane(const Direction& d) { return (d.d2 < 0 || (d.d2 == 0 && d.d1 < 0)) ? 1 : 0; }

inline std::int64_t cross(const Direction& a, const Direction& b) {
  return std::int64_t{a.d1} * b.d2 - std::int64_t{a.d2} * b.d1;
}

}  // namespace detail

/// Strict counter-clockwise angle order starting at (1, 0), exact integer arithmetic.
inline bool angle_less(const Direction& a, const Direction& b) {
  const int ha = detail::half_plane(a);
  const int hb = detail::half_plane(b);
  if (ha != hb) return ha < hb;
  return detail::cross(a, b) > 0;
}

/// V_0 for L == 0, V_L otherwise, sorted by angle.
inline std::vector<Direction> direction_set(int L) {
  if (L < 0) throw Error(ErrorCode::out_of_range, "direction parameter L must be non-negative");
  std::vector<Direction> dirs{{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  for (int a = -L; a <= L; ++a) {
    if (a == 0) continue;
    for (int b = -L; b <= L; ++b) {
      if (b != 0 && std::gcd(std::abs(a), std::abs(b)) == 1) dirs.push_back({a, b});
    }
  }
  std::sort(dirs.begin(), dirs.end(), angle_less);
  return dirs;
}

/// Number of elements of V_L without materialising it.
inline std::int64_t direction_count(int L) {
  if (L < 0) throw Error(ErrorCode::out_of_range, "direction parameter L must be non-negative");
  std::int64_t n = 4;
  for (int a = 1; a <= L; ++a)
    for (int b = 1; b <= L; ++b)
      if (std::gcd(a, b) == 1) n += 4;
  return n;
}

/// All reduced fractions in [0, 1] with denominator <= L, increasing.
inline std::vector<FareyFraction> farey_sequence(int L) {
  if (L < 1) throw Error(ErrorCode::out_of_range, "Farey order must be at least 1");
  std::vector<FareyFraction> seq;
  std::int64_t a = 0, b = 1, c = 1, d = L;
  seq.push_back({a, b});
  while (c <= L) {
    const std::int64_t k = (L + b) / d;
    const std::int64_t e = k * c - a;
    const std::int64_t f = k * d - b;
    a = c;
    b = d;
    c = e;
    d = f;
    seq.push_back({a, b});
  }
  return seq;
}

/// First-octant directions (d1 >= d2 >= 0) of V_L in increasing slope order.
inline std::vector<Direction> octant_directions(int L) {
  std::vector<Direction> out;
  for (const auto& f : farey_sequence(L))
    out.push_back({static_cast<int>(f.denominator), static_cast<int>(f.numerator)});
  return out;
}

struct ConeDecomposition {
  std::int64_t A = 0;
  Direction i;
  std::int64_t B = 0;
  Direction j;
};

/// Writes k (with k1 >= k2 >= 0, k != 0) as A*i + B*j where i, j are
/// slope-adjacent first-octant directions of V_L bracketing k, i.e.
/// slope(i) <= slope(k) <= slope(j) and i1*j2 - i2*j1 = 1.
inline ConeDecomposition cone_decompose(Direction k, int L) {
  if (L < 1) throw Error(ErrorCode::out_of_range, "cone decomposition needs L >= 1");
  if (!(k.d1 >= k.d2 && k.d2 >= 0) || k.d1 == 0)
    throw Error(ErrorCode::value, "vector (" + std::to_string(k.d1) + "," + std::to_string(k.d2) +
                                      ") is not a non-zero first-octant vector");
  const auto oct = octant_directions(L);
  // Slopes compare as k2/k1 vs p/q via cross products; pick the pair with
  // slope(i) <= slope(k) < slope(j), or the last pair when slope(k) == 1.
  std::size_t idx = 0;
  while (idx + 2 < oct.size() && detail::cross(oct[idx + 1], k) >= 0) ++idx;
  const Direction i = oct[idx];
  const Direction j = oct[idx + 1];
  const std::int64_t det = detail::cross(i, j);  // == 1 by Farey adjacency
  ConeDecomposition out;
  out.i = i;
  out.j = j;
  out.A = (std::int64_t{k.d1} * j.d2 - std::int64_t{k.d2} * j.d1) / det;
  out.B = (std::int64_t{i.d1} * k.d2 - std::int64_t{i.d2} * k.d1) / det;
  return out;
}

}  // namespace wass1
