#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>

#include "shapedba/dtw.hpp"
#include "shapedba/error.hpp"
#include "shapedba/matrix.hpp"
#include "shapedba/parallel.hpp"
#include "shapedba/sbd.hpp"
#include "shapedba/series.hpp"
#include "shapedba/shape_dtw.hpp"
#include "shapedba/soft_dtw.hpp"

namespace shapedba {

enum class MetricKind { euclidean, dtw, soft_dtw, shape_dtw, sbd };

/// A similarity measure together with its parameters.
struct Metric {
  MetricKind kind = MetricKind::dtw;
  std::size_t reach = 30;  // shape_dtw
  double gamma = 1.0;      // soft_dtw

  static Metric euclidean() { return {MetricKind::euclidean}; }
  static Metric dtw() { return {MetricKind::dtw}; }
  static Metric soft_dtw(double gamma) { return {MetricKind::soft_dtw, 30, gamma}; }
  static Metric shape_dtw(std::size_t reach) { return {MetricKind::shape_dtw, reach}; }
  static Metric sbd() { return {MetricKind::sbd}; }
};

inline std::string_view to_string(MetricKind k) {
  switch (k) {
    case MetricKind::euclidean: return "euclidean";
    case MetricKind::dtw: return "dtw";
    case MetricKind::soft_dtw: return "soft_dtw";
    case MetricKind::shape_dtw: return "shape_dtw";
    case MetricKind::sbd: return "sbd";
  }
  return "?";
}

/// Distance value under `metric`: ED, DTW and ShapeDTW are square-rooted
/// path sums, soft-DTW is the raw (possibly negative) soft path sum, SBD is
/// in [0, 2].
inline double distance(const Metric& metric, std::span<const double> x, std::span<const double> y) {
  switch (metric.kind) {
    case MetricKind::euclidean: return euclidean_distance(x, y);
    case MetricKind::dtw: return std::sqrt(dtw_squared(x, y));
    case MetricKind::soft_dtw: return soft_dtw(x, y, metric.gamma);
    case MetricKind::shape_dtw: return std::sqrt(shape_dtw_squared(x, y, metric.reach));
    case MetricKind::sbd: return sbd(x, y).distance;
  }
  throw InvalidArgument("unknown metric");
}

/// N x N matrix of distance(metric, series_i, series_j). The upper triangle
/// is computed and mirrored, so the result is exactly symmetric and does
/// not depend on `workers` (0 = hardware concurrency).
inline Matrix pairwise_distances(std::span<const TimeSeries> series, const Metric& metric,
                                 std::size_t workers = 1) {
  const std::size_t n = series.size();
  Matrix out(n, n, 0.0);
  parallel_for(n, resolve_workers(workers), [&](std::size_t i) {
    // SoftDTW(x, x) is negative, every other measure is zero on the diagonal.
    const std::size_t first = metric.kind == MetricKind::soft_dtw ? i : i + 1;
    for (std::size_t j = first; j < n; ++j) {
      try {
        out(i, j) = distance(metric, series[i], series[j]);
      } catch (const Error& e) {
        throw Error("pairwise_distances: pair (" + std::to_string(i) + ", " +
                    std::to_string(j) + "): " + e.what());
      }
    }
  });
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) out(j, i) = out(i, j);
  }
  return out;
}

inline Matrix pairwise_distances(const LabeledDataset& d, const Metric& metric,
                                 std::size_t workers = 1) {
  return pairwise_distances(std::span<const TimeSeries>(d.series()), metric, workers);
}

}  // namespace shapedba
