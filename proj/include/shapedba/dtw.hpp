#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "shapedba/error.hpp"
#include "shapedba/matrix.hpp"

namespace shapedba {

struct IndexPair {
  std::size_t i = 0;
  std::size_t j = 0;
  friend bool operator==(const IndexPair&, const IndexPair&) = default;
};

/// Monotone unit-step alignment between two series, from (0, 0) to
/// (L1 - 1, L2 - 1).
struct WarpingPath {
  std::vector<IndexPair> pairs;

  std::size_t size() const noexcept { return pairs.size(); }

  /// The same alignment seen from the other series.
  WarpingPath transposed() const {
    WarpingPath t;
    t.pairs.reserve(pairs.size());
    for (auto p : pairs) t.pairs.push_back({p.j, p.i});
    return t;
  }

  friend bool operator==(const WarpingPath&, const WarpingPath&) = default;
};

/// Checks boundary, unit-step monotonicity and length bounds.
inline bool is_valid_path(const WarpingPath& path, std::size_t l1, std::size_t l2) {
  const auto& p = path.pairs;
  if (p.empty() || l1 == 0 || l2 == 0) return false;
  if (p.front() != IndexPair{0, 0} || p.back() != IndexPair{l1 - 1, l2 - 1}) return false;
  for (std::size_t k = 1; k < p.size(); ++k) {
    const std::size_t di = p[k].i - p[k - 1].i;
    const std::size_t dj = p[k].j - p[k - 1].j;
    if (p[k].i < p[k - 1].i || p[k].j < p[k - 1].j) return false;
    if (di > 1 || dj > 1 || di + dj == 0) return false;
  }
  return p.size() >= std::max(l1, l2) && p.size() <= l1 + l2 - 1;
}

/// Result of an alignment-based measure. `distance` is the square root of
/// the optimal path sum of squared step costs.
struct DistanceOutcome {
  double distance = 0.0;
  std::optional<WarpingPath> path;
};

enum class PathMode { with_path, distance_only };

namespace detail {

inline void require_nonempty(std::span<const double> x, std::span<const double> y,
                             const char* what) {
  if (x.empty() || y.empty()) throw InvalidArgument(std::string(what) + ": empty series");
}

/// Cumulative-cost table of the DTW recursion over step costs cost(i, j).
///
/// Rows are filled in strips of four with a one-column skew, so the four
/// serial min/add chains overlap. Every cell evaluates the same expression
/// as the row-by-row recursion, so the table is bit-for-bit the same.
template <class Cost>
Matrix dp_table(std::size_t n, std::size_t m, Cost&& cost) {
  Matrix acc(n, m);
  acc(0, 0) = cost(0, 0);
  for (std::size_t j = 1; j < m; ++j) acc(0, j) = cost(0, j) + acc(0, j - 1);
  for (std::size_t i = 1; i < n; ++i) acc(i, 0) = cost(i, 0) + acc(i - 1, 0);
  if (m == 1) return acc;

  const auto cell = [&](std::size_t i, std::size_t j) {
    acc(i, j) = cost(i, j) + std::min(acc(i - 1, j - 1), std::min(acc(i - 1, j), acc(i, j - 1)));
  };
  constexpr std::size_t kStrip = 4;
  std::size_t i0 = 1;
  for (; i0 + kStrip <= n; i0 += kStrip) {
    // step t fills (i0 + r, t - r); ramp in, steady state, ramp out
    for (std::size_t t = 1; t < kStrip; ++t) {
      for (std::size_t r = 0; r < t; ++r) {
        if (t - r < m) cell(i0 + r, t - r);
      }
    }
    for (std::size_t t = kStrip; t < m; ++t) {
      cell(i0, t);
      cell(i0 + 1, t - 1);
      cell(i0 + 2, t - 2);
      cell(i0 + 3, t - 3);
    }
    for (std::size_t t = std::max(m, kStrip); t < m + kStrip - 1; ++t) {
      for (std::size_t r = t - m + 1; r < kStrip; ++r) {
        if (t - r >= 1) cell(i0 + r, t - r);
      }
    }
  }
  for (; i0 < n; ++i0) {
    for (std::size_t j = 1; j < m; ++j) cell(i0, j);
  }
  return acc;
}

/// Same recursion as dp_table keeping two rows; returns the final cell.
template <class Cost>
double dp_final(std::size_t n, std::size_t m, Cost&& cost) {
  std::vector<double> prev(m), cur(m);
  cur[0] = cost(0, 0);
  for (std::size_t j = 1; j < m; ++j) cur[j] = cost(0, j) + cur[j - 1];
  for (std::size_t i = 1; i < n; ++i) {
    std::swap(prev, cur);
    cur[0] = cost(i, 0) + prev[0];
    for (std::size_t j = 1; j < m; ++j) {
      cur[j] = cost(i, j) + std::min(prev[j - 1], std::min(prev[j], cur[j - 1]));
    }
  }
  return cur[m - 1];
}

/// Backtrace preferring the diagonal, then the step decreasing i, then the
/// step decreasing j.
inline WarpingPath backtrace(const Matrix& acc) {
  std::size_t i = acc.rows() - 1;
  std::size_t j = acc.cols() - 1;
  WarpingPath path;
  path.pairs.reserve(acc.rows() + acc.cols());
  path.pairs.push_back({i, j});
  while (i > 0 || j > 0) {
    if (i == 0) {
      --j;
    } else if (j == 0) {
      --i;
    } else {
      const double diag = acc(i - 1, j - 1);
      const double up = acc(i - 1, j);
      const double left = acc(i, j - 1);
      if (diag <= up && diag <= left) {
        --i;
        --j;
      } else if (up <= left) {
        --i;
      } else {
        --j;
      }
    }
    path.pairs.push_back({i, j});
  }
  std::reverse(path.pairs.begin(), path.pairs.end());
  return path;
}

/// Optimal path sum (no square root) plus the optional path.
struct Alignment {
  double cost = 0.0;
  std::optional<WarpingPath> path;
};

template <class Cost>
Alignment align(std::size_t n, std::size_t m, Cost&& cost, PathMode mode) {
  if (mode == PathMode::distance_only) return {dp_final(n, m, cost), std::nullopt};
  const Matrix acc = dp_table(n, m, cost);
  return {acc(n - 1, m - 1), backtrace(acc)};
}

inline Alignment align_matrix(const Matrix& cost, PathMode mode) {
  return align(cost.rows(), cost.cols(),
               [&cost](std::size_t i, std::size_t j) { return cost(i, j); }, mode);
}

inline double squared_difference(double a, double b) noexcept {
  const double d = a - b;
  return d * d;
}

inline Alignment dtw_alignment(std::span<const double> x, std::span<const double> y,
                               PathMode mode) {
  require_nonempty(x, y, "dtw");
  return align(x.size(), y.size(),
               [x, y](std::size_t i, std::size_t j) { return squared_difference(x[i], y[j]); },
               mode);
}

}  // namespace detail

/// Lock-step Euclidean distance; lengths must match.
inline double euclidean_distance(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw LengthMismatch(x.size(), y.size(), "euclidean_distance");
  double s = 0.0;
  for (std::size_t t = 0; t < x.size(); ++t) s += detail::squared_difference(x[t], y[t]);
  return std::sqrt(s);
}

/// DTW with squared step costs and a single square root on the optimal sum.
/// No warping window; lengths may differ.
inline DistanceOutcome dtw(std::span<const double> x, std::span<const double> y,
                           PathMode mode = PathMode::with_path) {
  auto a = detail::dtw_alignment(x, y, mode);
  return {std::sqrt(a.cost), std::move(a.path)};
}

/// Optimal path sum of squared differences, i.e. dtw(x, y)^2 before rounding.
inline double dtw_squared(std::span<const double> x, std::span<const double> y) {
  return detail::dtw_alignment(x, y, PathMode::distance_only).cost;
}

/// Sum of step costs cost(i, j) along a path.
template <class Cost>
double path_cost(const WarpingPath& path, Cost&& cost) {
  double s = 0.0;
  for (auto p : path.pairs) s += cost(p.i, p.j);
  return s;
}

}  // namespace shapedba
