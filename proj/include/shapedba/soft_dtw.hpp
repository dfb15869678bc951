#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "shapedba/dtw.hpp"
#include "shapedba/error.hpp"
#include "shapedba/matrix.hpp"

namespace shapedba {

/// Below this temperature softmin is replaced by the hard minimum.
inline constexpr double kHardMinGamma = 1e-6;

namespace detail {

inline void require_gamma(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw InvalidArgument("soft-DTW: gamma must be a positive finite number");
  }
}

inline double softmin3(double a, double b, double c, double gamma) noexcept {
  const double m = std::min(a, std::min(b, c));
  if (gamma < kHardMinGamma || m == std::numeric_limits<double>::infinity()) return m;
  const double s = std::exp(-(a - m) / gamma) + std::exp(-(b - m) / gamma) +
                   std::exp(-(c - m) / gamma);
  return m - gamma * std::log(s);
}

/// Forward table R of size (n + 2) x (m + 2), 1-based interior, with the
/// border rows/columns used by the backward pass.
inline Matrix soft_dtw_forward(std::span<const double> x, std::span<const double> y,
                               double gamma) {
  const std::size_t n = x.size();
  const std::size_t m = y.size();
  constexpr double inf = std::numeric_limits<double>::infinity();
  Matrix r(n + 2, m + 2, inf);
  r(0, 0) = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      r(i, j) = squared_difference(x[i - 1], y[j - 1]) +
                softmin3(r(i - 1, j - 1), r(i - 1, j), r(i, j - 1), gamma);
    }
  }
  return r;
}

}  // namespace detail

/// -gamma * log(sum(exp(-v / gamma))), shifted by min(v) for stability.
inline double softmin(std::span<const double> values, double gamma) {
  if (values.empty()) throw InvalidArgument("softmin: empty input");
  detail::require_gamma(gamma);
  const double m = *std::min_element(values.begin(), values.end());
  if (gamma < kHardMinGamma || m == std::numeric_limits<double>::infinity()) return m;
  double s = 0.0;
  for (double v : values) s += std::exp(-(v - m) / gamma);
  return m - gamma * std::log(s);
}

/// Soft-DTW over squared step costs. Can be negative; not a metric.
inline double soft_dtw(std::span<const double> x, std::span<const double> y, double gamma) {
  detail::require_nonempty(x, y, "soft_dtw");
  detail::require_gamma(gamma);
  const std::size_t n = x.size();
  const std::size_t m = y.size();
  constexpr double inf = std::numeric_limits<double>::infinity();
  // Two-row version of soft_dtw_forward; same arithmetic.
  std::vector<double> prev(m + 1, inf), cur(m + 1, inf);
  cur[0] = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    std::swap(prev, cur);
    cur[0] = inf;
    for (std::size_t j = 1; j <= m; ++j) {
      cur[j] = detail::squared_difference(x[i - 1], y[j - 1]) +
               detail::softmin3(prev[j - 1], prev[j], cur[j - 1], gamma);
    }
  }
  return cur[m];
}

struct SoftDtwGradient {
  double value = 0.0;
  std::vector<double> gradient;  // d value / d x, one entry per sample of x
};

/// Soft-DTW value and its gradient with respect to the first argument,
/// from the backward recursion on the expected-alignment matrix.
inline SoftDtwGradient soft_dtw_value_and_gradient(std::span<const double> x,
                                                   std::span<const double> y, double gamma) {
  detail::require_nonempty(x, y, "soft_dtw_gradient");
  detail::require_gamma(gamma);
  const std::size_t n = x.size();
  const std::size_t m = y.size();
  constexpr double inf = std::numeric_limits<double>::infinity();

  Matrix r = detail::soft_dtw_forward(x, y, gamma);
  const double value = r(n, m);

  for (std::size_t i = 1; i <= n + 1; ++i) r(i, m + 1) = -inf;
  for (std::size_t j = 1; j <= m + 1; ++j) r(n + 1, j) = -inf;
  r(n + 1, m + 1) = value;

  const auto delta = [&](std::size_t i, std::size_t j) {
    return (i >= 1 && i <= n && j >= 1 && j <= m)
               ? detail::squared_difference(x[i - 1], y[j - 1])
               : 0.0;
  };

  Matrix e(n + 2, m + 2, 0.0);
  e(n + 1, m + 1) = 1.0;
  for (std::size_t j = m; j >= 1; --j) {
    for (std::size_t i = n; i >= 1; --i) {
      const double rij = r(i, j);
      const double a = std::exp((r(i + 1, j) - rij - delta(i + 1, j)) / gamma);
      const double b = std::exp((r(i, j + 1) - rij - delta(i, j + 1)) / gamma);
      const double c = std::exp((r(i + 1, j + 1) - rij - delta(i + 1, j + 1)) / gamma);
      e(i, j) = e(i + 1, j) * a + e(i, j + 1) * b + e(i + 1, j + 1) * c;
    }
  }

  std::vector<double> grad(n, 0.0);
  for (std::size_t i = 1; i <= n; ++i) {
    double g = 0.0;
    for (std::size_t j = 1; j <= m; ++j) g += e(i, j) * 2.0 * (x[i - 1] - y[j - 1]);
    grad[i - 1] = g;
  }
  return {value, std::move(grad)};
}

inline std::vector<double> soft_dtw_gradient(std::span<const double> x, std::span<const double> y,
                                             double gamma) {
  return soft_dtw_value_and_gradient(x, y, gamma).gradient;
}

}  // namespace shapedba
