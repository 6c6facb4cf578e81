#pragma once

// Two-dimensional histograms on an N x N grid, their file formats, and the
// integer balancing that turns a pair of histograms into a supply vector.

#include <cctype>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wass1/error.hpp"

namespace wass1 {

using Mass = std::int64_t;

/// Non-negative integer masses on an N x N grid, row-major: (i1, i2) -> i1*N + i2.
class Histogram2D {
 public:
  Histogram2D(int side, std::vector<Mass> masses) : side_(side), masses_(std::move(masses)) {
    if (side_ <= 0) throw Error(ErrorCode::dimension, "histogram side must be positive");
    if (masses_.size() != static_cast<std::size_t>(side_) * static_cast<std::size_t>(side_))
      throw Error(ErrorCode::dimension, "mass count " + std::to_string(masses_.size()) +
                                            " does not match side " + std::to_string(side_));
    for (Mass m : masses_) {
      if (m < 0) throw Error(ErrorCode::value, "negative mass " + std::to_string(m));
      if (__builtin_add_overflow(total_, m, &total_))
        throw Error(ErrorCode::overflow, "total mass exceeds 64-bit range");
    }
    if (total_ == 0) throw Error(ErrorCode::empty, "total mass is zero");
  }

  int side() const noexcept { return side_; }
  std::span<const Mass> masses() const noexcept { return masses_; }
  Mass total() const noexcept { return total_; }
  Mass at(int i1, int i2) const { return masses_[static_cast<std::size_t>(i1) * side_ + i2]; }

  friend bool operator==(const Histogram2D&, const Histogram2D&) = default;

 private:
  int side_;
  std::vector<Mass> masses_;
  Mass total_ = 0;
};

/// A pair of histograms with equal totals, reduced by the gcd of all entries.
struct BalancedPair {
  int side = 0;
  std::vector<Mass> mu;
  std::vector<Mass> nu;

  Mass total() const { return std::accumulate(mu.begin(), mu.end(), Mass{0}); }
  friend bool operator==(const BalancedPair&, const BalancedPair&) = default;
};

enum class HistogramFormat { csv_grid, pgm };

namespace detail {

inline bool is_blank(char c) { return c == ' ' || c == '\t'; }

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && is_blank(s.front())) s.remove_prefix(1);
  while (!s.empty() && (is_blank(s.back()) || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Parses a non-negative integer token. Tokens that look numeric but are
// negative or fractional are value errors; anything else is a parse error.
inline Mass parse_mass(std::string_view tok, std::string_view where) {
  if (tok.empty()) throw Error(ErrorCode::parse, "empty field in " + std::string(where));
  Mass v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec == std::errc::result_out_of_range)
    throw Error(ErrorCode::overflow, "value '" + std::string(tok) + "' exceeds 64-bit range");
  if (ec == std::errc() && ptr == tok.data() + tok.size()) {
    if (v < 0) throw Error(ErrorCode::value, "negative entry '" + std::string(tok) + "'");
    return v;
  }
  double d = 0;
  auto [dptr, dec] = std::from_chars(tok.data(), tok.data() + tok.size(), d);
  if (dec == std::errc() && dptr == tok.data() + tok.size())
    throw Error(ErrorCode::value, "non-integer entry '" + std::string(tok) + "'");
  throw Error(ErrorCode::parse, "malformed entry '" + std::string(tok) + "' in " + std::string(where));
}

}  // namespace detail

/// csv-grid: N lines of N comma-separated non-negative integers.
inline Histogram2D parse_csv_grid(std::string_view text) {
  std::vector<std::string_view> lines;
  for (std::size_t pos = 0; pos < text.size();) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    lines.push_back(detail::trim(text.substr(pos, eol - pos)));
    pos = eol + 1;
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();

  std::vector<std::vector<Mass>> rows;
  for (std::string_view line : lines) {
    if (line.empty()) throw Error(ErrorCode::parse, "blank line inside csv grid");
    std::vector<Mass> row;
    std::size_t start = 0;
    while (true) {
      std::size_t comma = line.find(',', start);
      std::string_view field =
          detail::trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
      row.push_back(detail::parse_mass(field, "row " + std::to_string(rows.size() + 1)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw Error(ErrorCode::parse, "ragged csv grid: row " + std::to_string(rows.size() + 1) + " has " +
                                        std::to_string(row.size()) + " fields, expected " +
                                        std::to_string(rows.front().size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorCode::parse, "csv grid is empty");
  if (rows.size() != rows.front().size())
    throw Error(ErrorCode::dimension, "grid is " + std::to_string(rows.size()) + "x" +
                                          std::to_string(rows.front().size()) + ", expected square");
  std::vector<Mass> masses;
  masses.reserve(rows.size() * rows.size());
  for (auto& r : rows) masses.insert(masses.end(), r.begin(), r.end());
  return Histogram2D(static_cast<int>(rows.size()), std::move(masses));
}

/// Netpbm grayscale, P2 (ASCII) or P5 (binary), maxval <= 65535.
inline Histogram2D parse_pgm(std::string_view data) {
  std::size_t pos = 0;
  auto skip_space_and_comments = [&] {
    while (pos < data.size()) {
      char c = data[pos];
      if (c == '#') {
        while (pos < data.size() && data[pos] != '\n') ++pos;
      } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f') {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto next_token = [&]() -> std::string_view {
    skip_space_and_comments();
    std::size_t start = pos;
    while (pos < data.size() && !std::isspace(static_cast<unsigned char>(data[pos])) && data[pos] != '#') ++pos;
    if (start == pos) throw Error(ErrorCode::parse, "unexpected end of pgm data");
    return data.substr(start, pos - start);
  };

  if (data.size() < 2 || data[0] != 'P' || (data[1] != '2' && data[1] != '5'))
    throw Error(ErrorCode::parse, "missing P2/P5 magic");
  const bool binary = data[1] == '5';
  pos = 2;
  const Mass width = detail::parse_mass(next_token(), "pgm header");
  const Mass height = detail::parse_mass(next_token(), "pgm header");
  const Mass maxval = detail::parse_mass(next_token(), "pgm header");
  if (width <= 0 || height <= 0) throw Error(ErrorCode::dimension, "pgm has zero extent");
  if (width != height)
    throw Error(ErrorCode::dimension,
                "pgm is " + std::to_string(width) + "x" + std::to_string(height) + ", expected square");
  if (maxval <= 0 || maxval > 65535) throw Error(ErrorCode::value, "pgm maxval must be in [1, 65535]");
  if (width > 1 << 15) throw Error(ErrorCode::dimension, "pgm side too large");

  const std::size_t count = static_cast<std::size_t>(width * height);
  std::vector<Mass> masses(count);
  if (binary) {
    // Exactly one whitespace byte separates the header from the raster.
    if (pos >= data.size() || !std::isspace(static_cast<unsigned char>(data[pos])))
      throw Error(ErrorCode::parse, "missing separator before pgm raster");
    ++pos;
    const std::size_t bytes = maxval < 256 ? 1 : 2;
    if (data.size() - pos < count * bytes) throw Error(ErrorCode::parse, "truncated pgm raster");
    for (std::size_t k = 0; k < count; ++k) {
      const auto* p = reinterpret_cast<const unsigned char*>(data.data() + pos + k * bytes);
      masses[k] = bytes == 1 ? Mass{p[0]} : (Mass{p[0]} << 8) | Mass{p[1]};
    }
  } else {
    for (std::size_t k = 0; k < count; ++k) masses[k] = detail::parse_mass(next_token(), "pgm raster");
  }
  for (Mass m : masses)
    if (m > maxval) throw Error(ErrorCode::value, "pixel " + std::to_string(m) + " exceeds maxval");
  return Histogram2D(static_cast<int>(width), std::move(masses));
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

/// Guesses the format from the extension: .pgm/.pnm -> pgm, anything else csv-grid.
inline HistogramFormat detect_format(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return (ext == ".pgm" || ext == ".pnm") ? HistogramFormat::pgm : HistogramFormat::csv_grid;
}

inline Histogram2D load_histogram(const std::filesystem::path& path, HistogramFormat format) {
  const std::string data = read_file(path);
  try {
    return format == HistogramFormat::pgm ? parse_pgm(data) : parse_csv_grid(data);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + std::string(e.what()).substr(to_string(e.code()).size() + 2));
  }
}

inline std::string to_csv_grid(const Histogram2D& h) {
  std::string out;
  for (int i1 = 0; i1 < h.side(); ++i1) {
    for (int i2 = 0; i2 < h.side(); ++i2) {
      if (i2) out += ',';
      out += std::to_string(h.at(i1, i2));
    }
    out += '\n';
  }
  return out;
}

inline void save_csv_grid(const Histogram2D& h, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path.string());
  out << to_csv_grid(h);
}

/// Cross-multiplies each histogram by the other's total, then divides all
/// entries by their common gcd. Overflow is reported, never wrapped.
inline BalancedPair balance(const Histogram2D& mu, const Histogram2D& nu) {
  if (mu.side() != nu.side())
    throw Error(ErrorCode::dimension,
                "side mismatch " + std::to_string(mu.side()) + " vs " + std::to_string(nu.side()));
  const Mass mu_total = mu.total();
  const Mass nu_total = nu.total();
  const Mass g_tot = std::gcd(mu_total, nu_total);
  // Dividing both factors by gcd(totals) first keeps intermediates small
  // and yields the same reduced pair.
  const Mass mu_factor = nu_total / g_tot;
  const Mass nu_factor = mu_total / g_tot;

  BalancedPair pair;
  pair.side = mu.side();
  pair.mu.resize(mu.masses().size());
  pair.nu.resize(nu.masses().size());
  Mass g = 0;
  Mass check_mu = 0;
  for (std::size_t k = 0; k < pair.mu.size(); ++k) {
    if (__builtin_mul_overflow(mu.masses()[k], mu_factor, &pair.mu[k]) ||
        __builtin_mul_overflow(nu.masses()[k], nu_factor, &pair.nu[k]))
      throw Error(ErrorCode::overflow, "balanced masses exceed 64-bit range");
    if (__builtin_add_overflow(check_mu, pair.mu[k], &check_mu))
      throw Error(ErrorCode::overflow, "balanced total exceeds 64-bit range");
    g = std::gcd(g, std::gcd(pair.mu[k], pair.nu[k]));
  }
  if (g > 1) {
    for (auto& m : pair.mu) m /= g;
    for (auto& m : pair.nu) m /= g;
  }
  return pair;
}

/// b = mu - nu.
inline std::vector<Mass> supplies(const BalancedPair& pair) {
  std::vector<Mass> b(pair.mu.size());
  for (std::size_t k = 0; k < b.size(); ++k) b[k] = pair.mu[k] - pair.nu[k];
  return b;
}

}  // namespace wass1
