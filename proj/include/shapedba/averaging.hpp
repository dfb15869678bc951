#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "shapedba/dtw.hpp"
#include "shapedba/error.hpp"
#include "shapedba/pairwise.hpp"
#include "shapedba/parallel.hpp"
#include "shapedba/random.hpp"
#include "shapedba/series.hpp"
#include "shapedba/shape_dtw.hpp"
#include "shapedba/soft_dtw.hpp"

namespace shapedba {

enum class AveragingMethod { mean, dba, soft_dba, shape_dba };

inline std::string_view to_string(AveragingMethod m) {
  switch (m) {
    case AveragingMethod::mean: return "mean";
    case AveragingMethod::dba: return "dba";
    case AveragingMethod::soft_dba: return "soft_dba";
    case AveragingMethod::shape_dba: return "shape_dba";
  }
  return "?";
}

inline AveragingMethod parse_averaging_method(std::string_view s) {
  if (s == "mean") return AveragingMethod::mean;
  if (s == "dba") return AveragingMethod::dba;
  if (s == "soft_dba" || s == "softdba") return AveragingMethod::soft_dba;
  if (s == "shape_dba" || s == "shapedba") return AveragingMethod::shape_dba;
  throw InvalidArgument("unknown averaging method '" + std::string(s) + "'");
}

/// Start from a member drawn with the given seed.
struct RandomMember {
  std::uint64_t seed = 0;
};
/// Start from an explicit series (warm start).
struct ProvidedSeries {
  TimeSeries series;
};
/// Start from the member with the smallest summed distance to the others.
struct Medoid {};

using Initialization = std::variant<RandomMember, ProvidedSeries, Medoid>;

struct AveragingConfig {
  AveragingMethod method = AveragingMethod::dba;
  std::size_t max_iterations = 30;
  double tolerance = 1e-5;  // relative objective change
  std::size_t reach = 30;   // shape_dba
  double gamma = 1.0;       // soft_dba
  Initialization init = RandomMember{0};
  std::size_t workers = 1;  // per-member alignments; 0 = hardware concurrency

  void validate() const {
    if (max_iterations < 1) throw InvalidArgument("max_iterations must be >= 1");
    if (!(tolerance >= 0.0)) throw InvalidArgument("tolerance must be >= 0");
    if (method == AveragingMethod::shape_dba && reach < 1) {
      throw InvalidArgument("shape_dba needs reach >= 1");
    }
    if (method == AveragingMethod::soft_dba && !(gamma > 0.0)) {
      throw InvalidArgument("soft_dba needs gamma > 0");
    }
  }
};

/// An average series and how it was reached.
///
/// objective_trace[t] is the objective of the average produced by iteration
/// t + 1; the returned average is the last accepted one.
struct BarycenterResult {
  TimeSeries average;
  std::vector<double> objective_trace;
  std::size_t iterations_run = 0;
  bool converged = false;
};

/// For every time stamp of the average, the member values aligned to it.
using AssociationTable = std::vector<std::vector<double>>;

inline void check_paths(std::size_t avg_len, std::span<const TimeSeries> set,
                        std::span<const WarpingPath> paths) {
  if (set.size() != paths.size()) throw LengthMismatch(set.size(), paths.size(), "barycenter paths");
  for (std::size_t m = 0; m < set.size(); ++m) {
    if (!is_valid_path(paths[m], avg_len, set[m].size())) {
      throw Error("barycenter: path " + std::to_string(m) + " does not align the average with its member");
    }
  }
}

inline AssociationTable associate(std::size_t avg_len, std::span<const TimeSeries> set,
                                  std::span<const WarpingPath> paths) {
  check_paths(avg_len, set, paths);
  AssociationTable table(avg_len);
  for (std::size_t m = 0; m < set.size(); ++m) {
    for (auto p : paths[m].pairs) table[p.i].push_back(set[m][p.j]);
  }
  return table;
}

/// New average value at t is the mean of every member value aligned to t.
inline TimeSeries barycenter_update(const TimeSeries& average, std::span<const TimeSeries> set,
                                    std::span<const WarpingPath> paths) {
  const std::size_t len = average.size();
  check_paths(len, set, paths);
  std::vector<double> sum(len, 0.0);
  std::vector<std::size_t> count(len, 0);
  for (std::size_t m = 0; m < set.size(); ++m) {
    for (auto p : paths[m].pairs) {
      sum[p.i] += set[m][p.j];
      ++count[p.i];
    }
  }
  for (std::size_t t = 0; t < len; ++t) {
    if (count[t] == 0) {
      throw std::logic_error("barycenter_update: time stamp " + std::to_string(t) + " has no aligned values");
    }
    sum[t] /= static_cast<double>(count[t]);
  }
  return TimeSeries(std::move(sum));
}

/// Element-wise mean of equal-length series.
inline TimeSeries arithmetic_mean(std::span<const TimeSeries> set) {
  if (set.empty()) throw InvalidArgument("arithmetic_mean: empty set");
  const std::size_t len = set.front().size();
  std::vector<double> sum(len, 0.0);
  for (const auto& s : set) {
    if (s.size() != len) throw LengthMismatch(len, s.size(), "arithmetic_mean");
    for (std::size_t t = 0; t < len; ++t) sum[t] += s[t];
  }
  for (double& v : sum) v /= static_cast<double>(set.size());
  return TimeSeries(std::move(sum));
}

inline Metric averaging_metric(const AveragingConfig& cfg) {
  switch (cfg.method) {
    case AveragingMethod::mean: return Metric::euclidean();
    case AveragingMethod::dba: return Metric::dtw();
    case AveragingMethod::soft_dba: return Metric::soft_dtw(cfg.gamma);
    case AveragingMethod::shape_dba: return Metric::shape_dtw(cfg.reach);
  }
  throw InvalidArgument("unknown averaging method");
}

/// The series an averaging run starts from.
inline TimeSeries initial_average(std::span<const TimeSeries> set, const AveragingConfig& cfg) {
  if (set.empty()) throw InvalidArgument("averaging: empty set");
  if (const auto* r = std::get_if<RandomMember>(&cfg.init)) {
    Engine engine(splitmix64(r->seed));
    return set[static_cast<std::size_t>(uniform_index(engine, set.size()))];
  }
  if (const auto* p = std::get_if<ProvidedSeries>(&cfg.init)) return p->series;

  const Matrix d = pairwise_distances(set, averaging_metric(cfg), cfg.workers);
  std::size_t best = 0;
  double best_sum = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < set.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < set.size(); ++j) s += d(i, j);
    if (s < best_sum) {
      best_sum = s;
      best = i;
    }
  }
  return set[best];
}

namespace detail {

struct AlignedSet {
  std::vector<WarpingPath> paths;
  double objective = 0.0;
};

/// Aligns every member to the average. Member alignments are independent;
/// the objective is reduced afterwards in member order.
template <class Aligner>
AlignedSet align_all(const TimeSeries& average, std::span<const TimeSeries> set,
                     std::size_t workers, Aligner&& aligner) {
  std::vector<Alignment> found(set.size());
  parallel_for(set.size(), resolve_workers(workers), [&](std::size_t m) {
    found[m] = aligner(average.values(), set[m].values());
  });
  AlignedSet out;
  out.paths.reserve(set.size());
  for (auto& a : found) {
    out.objective += a.cost;
    out.paths.push_back(std::move(*a.path));
  }
  return out;
}

/// Shared alternation of DBA and ShapeDBA: realign, then replace every time
/// stamp by the mean of its associated member values. An update that raises
/// the objective is discarded and the loop stops.
template <class Aligner>
BarycenterResult aligned_barycenter(std::span<const TimeSeries> set, const AveragingConfig& cfg,
                                    Aligner&& aligner) {
  cfg.validate();
  TimeSeries average = initial_average(set, cfg);
  AlignedSet current = align_all(average, set, cfg.workers, aligner);

  BarycenterResult result{average, {}, 0, false};
  for (std::size_t it = 0; it < cfg.max_iterations; ++it) {
    if (current.objective == 0.0) {
      // Nothing to improve. The update could only add rounding noise.
      result.objective_trace.push_back(0.0);
      ++result.iterations_run;
      result.converged = true;
      break;
    }
    TimeSeries candidate = barycenter_update(average, set, current.paths);
    AlignedSet next = align_all(candidate, set, cfg.workers, aligner);
    if (next.objective > current.objective) {
      result.converged = true;
      break;
    }
    const double previous = current.objective;
    average = std::move(candidate);
    current = std::move(next);
    result.objective_trace.push_back(current.objective);
    ++result.iterations_run;
    if (previous - current.objective <= cfg.tolerance * previous) {
      result.converged = true;
      break;
    }
  }
  result.average = std::move(average);
  return result;
}

}  // namespace detail

/// DTW barycenter averaging. Objective: sum of squared DTW distances.
inline BarycenterResult dba(std::span<const TimeSeries> set, AveragingConfig cfg) {
  cfg.method = AveragingMethod::dba;
  return detail::aligned_barycenter(set, cfg, [](std::span<const double> a, std::span<const double> b) {
    return detail::dtw_alignment(a, b, PathMode::with_path);
  });
}

/// Barycenter averaging with ShapeDTW alignments. The update averages raw
/// member values at the aligned indices; reach = 1 reproduces dba exactly.
inline BarycenterResult shape_dba(std::span<const TimeSeries> set, AveragingConfig cfg) {
  cfg.method = AveragingMethod::shape_dba;
  const std::size_t reach = cfg.reach;
  return detail::aligned_barycenter(set, cfg, [reach](std::span<const double> a, std::span<const double> b) {
    return detail::shape_dtw_alignment(a, b, reach, PathMode::with_path);
  });
}

namespace detail {

inline double soft_objective(const std::vector<double>& c, std::span<const TimeSeries> set,
                             double gamma, std::size_t workers) {
  std::vector<double> values(set.size());
  parallel_for(set.size(), workers, [&](std::size_t m) { values[m] = soft_dtw(c, set[m], gamma); });
  double f = 0.0;
  for (double v : values) f += v;
  return f;
}

}  // namespace detail

/// Soft-DTW barycenter by gradient descent on F(c) = sum_i soft_dtw(c, x_i).
///
/// Each iteration tries a step along the mean gradient and halves it until F
/// does not increase, so the accepted trace is non-increasing. Members must
/// share the length of the starting series.
inline BarycenterResult soft_dba(std::span<const TimeSeries> set, AveragingConfig cfg) {
  cfg.method = AveragingMethod::soft_dba;
  cfg.validate();
  TimeSeries start = initial_average(set, cfg);
  for (const auto& s : set) {
    if (s.size() != start.size()) throw LengthMismatch(start.size(), s.size(), "soft_dba");
  }
  const std::size_t workers = resolve_workers(cfg.workers);
  const std::size_t n = set.size();
  const std::size_t len = start.size();
  constexpr int kMaxHalvings = 40;

  std::vector<double> c = start.data();
  double f = detail::soft_objective(c, set, cfg.gamma, workers);
  double step = 0.5;

  BarycenterResult result{start, {}, 0, false};
  std::vector<SoftDtwGradient> parts(n);
  std::vector<double> grad(len), candidate(len);
  for (std::size_t it = 0; it < cfg.max_iterations; ++it) {
    parallel_for(n, workers, [&](std::size_t m) {
      parts[m] = soft_dtw_value_and_gradient(c, set[m], cfg.gamma);
    });
    std::fill(grad.begin(), grad.end(), 0.0);
    for (const auto& p : parts) {
      for (std::size_t t = 0; t < len; ++t) grad[t] += p.gradient[t];
    }
    for (double& g : grad) g /= static_cast<double>(n);

    bool accepted = false;
    double fc = f;
    step = std::min(1.0, 2.0 * step);
    for (int h = 0; h < kMaxHalvings; ++h, step *= 0.5) {
      for (std::size_t t = 0; t < len; ++t) candidate[t] = c[t] - step * grad[t];
      fc = detail::soft_objective(candidate, set, cfg.gamma, workers);
      if (fc <= f) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      result.converged = true;
      break;
    }
    const double previous = f;
    c = candidate;
    f = fc;
    result.objective_trace.push_back(f);
    ++result.iterations_run;
    if (previous - f <= cfg.tolerance * std::max(std::abs(previous), 1e-12)) {
      result.converged = true;
      break;
    }
  }
  result.average = TimeSeries(std::move(c));
  return result;
}

/// Element-wise mean wrapped as a single-iteration averaging run.
inline BarycenterResult mean_average(std::span<const TimeSeries> set) {
  TimeSeries avg = arithmetic_mean(set);
  double objective = 0.0;
  for (const auto& s : set) {
    const double d = euclidean_distance(avg, s);
    objective += d * d;
  }
  return {std::move(avg), {objective}, 1, true};
}

/// Dispatches on cfg.method.
inline BarycenterResult average(std::span<const TimeSeries> set, const AveragingConfig& cfg) {
  switch (cfg.method) {
    case AveragingMethod::mean: return mean_average(set);
    case AveragingMethod::dba: return dba(set, cfg);
    case AveragingMethod::soft_dba: return soft_dba(set, cfg);
    case AveragingMethod::shape_dba: return shape_dba(set, cfg);
  }
  throw InvalidArgument("unknown averaging method");
}

}  // namespace shapedba
