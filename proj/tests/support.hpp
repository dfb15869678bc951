#pragma once

// Test-only oracles and data generators. Nothing here calls into the code
// paths it is used to check.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "shapedba/random.hpp"
#include "shapedba/series.hpp"

namespace shapedba::support {

inline std::vector<double> random_values(Engine& engine, std::size_t len, double scale = 1.0) {
  std::vector<double> v(len);
  for (double& x : v) x = scale * standard_normal(engine);
  return v;
}

inline TimeSeries random_series(Engine& engine, std::size_t len, double scale = 1.0) {
  return TimeSeries(random_values(engine, len, scale));
}

inline std::size_t random_length(Engine& engine, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(uniform_index(engine, hi - lo + 1));
}

/// Minimum over every monotone unit-step path from (0, 0) to (n-1, m-1) of
/// the step costs summed in path order. Exponential; tiny inputs only.
inline double brute_force_min_path(std::size_t n, std::size_t m,
                                   const std::function<double(std::size_t, std::size_t)>& cost) {
  double best = std::numeric_limits<double>::infinity();
  std::function<void(std::size_t, std::size_t, double)> walk = [&](std::size_t i, std::size_t j,
                                                                    double acc) {
    acc += cost(i, j);
    if (i == n - 1 && j == m - 1) {
      if (acc < best) best = acc;
      return;
    }
    if (i + 1 < n && j + 1 < m) walk(i + 1, j + 1, acc);
    if (i + 1 < n) walk(i + 1, j, acc);
    if (j + 1 < m) walk(i, j + 1, acc);
  };
  walk(0, 0, 0.0);
  return best;
}

/// Windows of the edge-padded series, built independently of the library.
inline std::vector<double> window(std::span<const double> x, std::size_t t, std::size_t reach) {
  const long left = static_cast<long>(reach / 2);
  std::vector<double> w;
  for (std::size_t k = 0; k < reach; ++k) {
    long idx = static_cast<long>(t + k) - left;
    if (idx < 0) idx = 0;
    if (idx >= static_cast<long>(x.size())) idx = static_cast<long>(x.size()) - 1;
    w.push_back(x[static_cast<std::size_t>(idx)]);
  }
  return w;
}

/// O(L^2) time-domain cross-correlation, same indexing as the library.
inline std::vector<double> naive_cross_correlation(std::span<const double> x, std::span<const double> y) {
  const long len = static_cast<long>(x.size());
  std::vector<double> out;
  for (long s = -(len - 1); s <= len - 1; ++s) {
    double acc = 0.0;
    for (long t = 0; t < len; ++t) {
      const long u = t - s;
      if (u >= 0 && u < len) acc += x[static_cast<std::size_t>(t)] * y[static_cast<std::size_t>(u)];
    }
    out.push_back(acc);
  }
  return out;
}

struct PairCounts {
  double tp = 0, tn = 0, fp = 0, fn = 0;
};

/// Confusion counts over every unordered pair of items.
template <class A, class B>
PairCounts brute_pair_counts(const std::vector<A>& y, const std::vector<B>& yhat) {
  PairCounts c;
  for (std::size_t i = 0; i < y.size(); ++i) {
    for (std::size_t j = i + 1; j < y.size(); ++j) {
      const bool same_true = y[i] == y[j];
      const bool same_pred = yhat[i] == yhat[j];
      if (same_true && same_pred) c.tp += 1;
      else if (!same_true && !same_pred) c.tn += 1;
      else if (same_pred) c.fp += 1;
      else c.fn += 1;
    }
  }
  return c;
}

/// RI = (TP + TN) / all pairs, straight from pair counts.
template <class A, class B>
double brute_rand_index(const std::vector<A>& y, const std::vector<B>& yhat) {
  const auto c = brute_pair_counts(y, yhat);
  return (c.tp + c.tn) / (c.tp + c.tn + c.fp + c.fn);
}

/// ARI = (RI - E[RI]) / (1 - E[RI]) with E[RI] from the pair marginals
/// under the permutation model: P(same in both) = P(same true) * P(same pred).
template <class A, class B>
double brute_adjusted_rand_index(const std::vector<A>& y, const std::vector<B>& yhat) {
  const auto c = brute_pair_counts(y, yhat);
  const double pairs = c.tp + c.tn + c.fp + c.fn;
  const double same_true = (c.tp + c.fn) / pairs;
  const double same_pred = (c.tp + c.fp) / pairs;
  const double expected = same_true * same_pred + (1 - same_true) * (1 - same_pred);
  const double ri = (c.tp + c.tn) / pairs;
  if (expected == 1.0) return 0.0;
  return (ri - expected) / (1.0 - expected);
}

/// Two-sided signed-rank p by enumerating all 2^n sign patterns of the
/// given ranks.
inline double enumerate_signed_rank_p(const std::vector<double>& ranks, double w_plus) {
  const std::size_t n = ranks.size();
  const std::uint64_t total = std::uint64_t{1} << n;
  std::uint64_t low = 0, high = 0;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    double w = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (std::uint64_t{1} << i)) w += ranks[i];
    }
    if (w <= w_plus + 1e-9) ++low;
    if (w >= w_plus - 1e-9) ++high;
  }
  const double p = 2.0 * static_cast<double>(std::min(low, high)) / static_cast<double>(total);
  return std::min(1.0, p);
}

// ---------------------------------------------------------------------------
// Synthetic labelled datasets

/// Three classes of sine motifs (1, 2 and 3 periods) under a random smooth
/// monotone time warp, plus Gaussian noise. Series are z-normalised.
inline LabeledDataset warped_sines(std::size_t per_class, std::size_t length, double noise,
                                   std::uint64_t seed, std::size_t classes = 3) {
  constexpr double kPi = 3.14159265358979323846;
  Engine engine(splitmix64(seed));
  std::vector<TimeSeries> series;
  std::vector<int> labels;
  for (std::size_t i = 0; i < per_class * classes; ++i) {
    const std::size_t c = i % classes;
    const double alpha = uniform_real(engine, -0.25, 0.25);  // |alpha| * pi < 1 keeps it monotone
    std::vector<double> v(length);
    for (std::size_t t = 0; t < length; ++t) {
      const double u = static_cast<double>(t) / static_cast<double>(length - 1);
      const double warped = u + alpha * std::sin(kPi * u) / kPi;
      v[t] = std::sin(2.0 * kPi * static_cast<double>(c + 1) * warped) + noise * standard_normal(engine);
    }
    series.push_back(z_normalize(v));
    labels.push_back(static_cast<int>(c));
  }
  return LabeledDataset("WarpedSines", std::move(series), std::move(labels));
}

/// Cylinder-Bell-Funnel series of length 128.
inline LabeledDataset cylinder_bell_funnel(std::size_t per_class, std::uint64_t seed) {
  Engine engine(splitmix64(seed ^ 0xcbf));
  std::vector<TimeSeries> series;
  std::vector<int> labels;
  constexpr std::size_t kLen = 128;
  for (std::size_t i = 0; i < 3 * per_class; ++i) {
    const int c = static_cast<int>(i % 3);
    const double a = uniform_real(engine, 16.0, 32.0);
    const double b = a + uniform_real(engine, 32.0, 96.0);
    const double amp = 6.0 + standard_normal(engine);
    std::vector<double> v(kLen);
    for (std::size_t t = 0; t < kLen; ++t) {
      const double tt = static_cast<double>(t + 1);
      const double in = (tt >= a && tt <= b) ? 1.0 : 0.0;
      double shape = in;
      if (c == 1) shape = in * (tt - a) / (b - a);
      if (c == 2) shape = in * (b - tt) / (b - a);
      v[t] = amp * shape + standard_normal(engine);
    }
    series.push_back(z_normalize(v));
    labels.push_back(c);
  }
  return LabeledDataset("CBF", std::move(series), std::move(labels));
}

/// Six control-chart patterns (normal, cyclic, trends, shifts), length 60.
inline LabeledDataset synthetic_control(std::size_t per_class, std::uint64_t seed) {
  constexpr double kPi = 3.14159265358979323846;
  Engine engine(splitmix64(seed ^ 0x5c));
  std::vector<TimeSeries> series;
  std::vector<int> labels;
  constexpr std::size_t kLen = 60;
  for (std::size_t i = 0; i < 6 * per_class; ++i) {
    const int c = static_cast<int>(i % 6);
    const double amp = uniform_real(engine, 10.0, 15.0);
    const double period = uniform_real(engine, 10.0, 15.0);
    const double slope = uniform_real(engine, 0.2, 0.5);
    const double jump = uniform_real(engine, 7.5, 20.0);
    const double at = uniform_real(engine, kLen / 3.0, 2.0 * kLen / 3.0);
    std::vector<double> v(kLen);
    for (std::size_t t = 0; t < kLen; ++t) {
      const double tt = static_cast<double>(t);
      double x = 30.0 + 2.0 * uniform_real(engine, -3.0, 3.0);
      switch (c) {
        case 1: x += amp * std::sin(2.0 * kPi * tt / period); break;
        case 2: x += slope * tt; break;
        case 3: x -= slope * tt; break;
        case 4: x += tt >= at ? jump : 0.0; break;
        case 5: x -= tt >= at ? jump : 0.0; break;
        default: break;
      }
      v[t] = x;
    }
    series.push_back(z_normalize(v));
    labels.push_back(c);
  }
  return LabeledDataset("SyntheticControl", std::move(series), std::move(labels));
}

/// Two classes of the same waveform differing only by a phase shift.
inline LabeledDataset phase_shifted_classes(std::size_t per_class, std::size_t length, std::uint64_t seed) {
  constexpr double kPi = 3.14159265358979323846;
  Engine engine(splitmix64(seed ^ 0x9a));
  std::vector<TimeSeries> series;
  std::vector<int> labels;
  for (std::size_t i = 0; i < 2 * per_class; ++i) {
    const int c = static_cast<int>(i % 2);
    const double offset = (c == 0 ? 0.25 : 0.65) * static_cast<double>(length);
    const double width = 0.08 * static_cast<double>(length);
    std::vector<double> v(length);
    for (std::size_t t = 0; t < length; ++t) {
      const double z = (static_cast<double>(t) - offset) / width;
      // a bump followed by a dip: same shape in both classes
      v[t] = std::exp(-z * z) - std::exp(-(z - 2.0) * (z - 2.0)) + 0.05 * standard_normal(engine);
    }
    (void)kPi;
    series.push_back(z_normalize(v));
    labels.push_back(c);
  }
  return LabeledDataset("PhaseShift", std::move(series), std::move(labels));
}

}  // namespace shapedba::support
