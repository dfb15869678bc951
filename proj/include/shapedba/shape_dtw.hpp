#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "shapedba/dtw.hpp"
#include "shapedba/error.hpp"
#include "shapedba/matrix.hpp"

namespace shapedba {

/// Neighbourhood settings of ShapeDTW. Only the identity descriptor is
/// supported, so the descriptor dimension equals `reach`.
struct ShapeDescriptorConfig {
  std::size_t reach = 30;

  void validate() const {
    if (reach < 1) throw InvalidArgument("ShapeDTW reach must be >= 1");
  }
};

/// Series padded by replicating its first value floor(reach / 2) times on the
/// left and its last value reach - 1 - floor(reach / 2) times on the right.
inline std::vector<double> pad_edges(std::span<const double> x, std::size_t reach) {
  ShapeDescriptorConfig{reach}.validate();
  if (x.empty()) throw InvalidArgument("pad_edges: empty series");
  const std::size_t left = reach / 2;
  const std::size_t right = reach - 1 - left;
  std::vector<double> out;
  out.reserve(x.size() + reach - 1);
  out.insert(out.end(), left, x.front());
  out.insert(out.end(), x.begin(), x.end());
  out.insert(out.end(), right, x.back());
  return out;
}

/// One window of `reach` padded samples per time stamp; window t starts at
/// padded index t.
inline std::vector<std::vector<double>> extract_subsequences(std::span<const double> x,
                                                             std::size_t reach) {
  const std::vector<double> padded = pad_edges(x, reach);
  std::vector<std::vector<double>> out;
  out.reserve(x.size());
  for (std::size_t t = 0; t < x.size(); ++t) {
    out.emplace_back(padded.begin() + static_cast<std::ptrdiff_t>(t),
                     padded.begin() + static_cast<std::ptrdiff_t>(t + reach));
  }
  return out;
}

namespace detail {

inline Alignment shape_dtw_naive_alignment(std::span<const double> x, std::span<const double> y,
                                           std::size_t reach, PathMode mode) {
  require_nonempty(x, y, "shape_dtw");
  const auto sx = extract_subsequences(x, reach);
  const auto sy = extract_subsequences(y, reach);
  Matrix cost(x.size(), y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < y.size(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < reach; ++k) s += squared_difference(sx[i][k], sy[j][k]);
      cost(i, j) = s;
    }
  }
  return align_matrix(cost, mode);
}

}  // namespace detail

/// Step costs of ShapeDTW with the identity descriptor, computed without
/// materialising descriptors.
///
/// The squared-difference matrix of the two padded series is built once;
/// cell (i, j) of the result then sums its diagonal run starting at (i, j)
/// of length `reach`. The shifts are added one at a time, k = 0..reach-1,
/// so every cell sees the same summation order as the descriptor form.
inline Matrix shape_cost_matrix(std::span<const double> x, std::span<const double> y,
                                std::size_t reach) {
  detail::require_nonempty(x, y, "shape_dtw");
  const std::vector<double> px = pad_edges(x, reach);
  const std::vector<double> py = pad_edges(y, reach);
  const std::size_t n = x.size();
  const std::size_t m = y.size();

  Matrix sq(px.size(), py.size());
  for (std::size_t a = 0; a < px.size(); ++a) {
    const auto row = sq.row(a);
    const double xa = px[a];
    for (std::size_t b = 0; b < py.size(); ++b) row[b] = detail::squared_difference(xa, py[b]);
  }

  // Row-major sweep, four shifts fused per pass over the output row. The
  // parenthesisation keeps the left-to-right order in k.
  Matrix acc(n, m, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double* __restrict dst = acc.row(i).data();
    std::size_t k = 0;
    for (; k + 4 <= reach; k += 4) {
      const double* __restrict s0 = sq.row(i + k).data() + k;
      const double* __restrict s1 = sq.row(i + k + 1).data() + k + 1;
      const double* __restrict s2 = sq.row(i + k + 2).data() + k + 2;
      const double* __restrict s3 = sq.row(i + k + 3).data() + k + 3;
      for (std::size_t j = 0; j < m; ++j) dst[j] = (((dst[j] + s0[j]) + s1[j]) + s2[j]) + s3[j];
    }
    for (; k < reach; ++k) {
      const double* __restrict src = sq.row(i + k).data() + k;
      for (std::size_t j = 0; j < m; ++j) dst[j] += src[j];
    }
  }
  return acc;
}

/// ShapeDTW by explicit descriptor extraction. Reference implementation.
inline DistanceOutcome shape_dtw_naive(std::span<const double> x, std::span<const double> y,
                                       std::size_t reach, PathMode mode = PathMode::with_path) {
  auto a = detail::shape_dtw_naive_alignment(x, y, reach, mode);
  return {std::sqrt(a.cost), std::move(a.path)};
}

namespace detail {

inline Alignment shape_dtw_alignment(std::span<const double> x, std::span<const double> y,
                                     std::size_t reach, PathMode mode) {
  return align_matrix(shape_cost_matrix(x, y, reach), mode);
}

}  // namespace detail

/// ShapeDTW through shape_cost_matrix. Same value and path as
/// shape_dtw_naive; reach = 1 is plain DTW.
inline DistanceOutcome shape_dtw_efficient(std::span<const double> x, std::span<const double> y,
                                           std::size_t reach,
                                           PathMode mode = PathMode::with_path) {
  auto a = detail::shape_dtw_alignment(x, y, reach, mode);
  return {std::sqrt(a.cost), std::move(a.path)};
}

inline DistanceOutcome shape_dtw(std::span<const double> x, std::span<const double> y,
                                 std::size_t reach, PathMode mode = PathMode::with_path) {
  return shape_dtw_efficient(x, y, reach, mode);
}

/// Optimal path sum before the square root.
inline double shape_dtw_squared(std::span<const double> x, std::span<const double> y,
                                std::size_t reach) {
  return detail::shape_dtw_alignment(x, y, reach, PathMode::distance_only).cost;
}

}  // namespace shapedba
