#pragma once

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "shapedba/averaging.hpp"
#include "shapedba/error.hpp"
#include "shapedba/pairwise.hpp"
#include "shapedba/parallel.hpp"
#include "shapedba/random.hpp"
#include "shapedba/sbd.hpp"
#include "shapedba/series.hpp"

namespace shapedba {

/// Which (similarity measure, averaging method) pair k-means runs with.
enum class Coupling {
  med,        // Euclidean distance + arithmetic mean
  dba,        // DTW + DBA
  soft_dba,   // soft-DTW + soft-DTW barycenter
  shape_dba,  // ShapeDTW + ShapeDBA
  kshape      // SBD + shape extraction
};

inline std::string_view to_string(Coupling c) {
  switch (c) {
    case Coupling::med: return "MED";
    case Coupling::dba: return "DBA";
    case Coupling::soft_dba: return "SoftDBA";
    case Coupling::shape_dba: return "ShapeDBA";
    case Coupling::kshape: return "KShape";
  }
  return "?";
}

inline Coupling parse_coupling(std::string_view s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  if (lower == "med") return Coupling::med;
  if (lower == "dba") return Coupling::dba;
  if (lower == "softdba" || lower == "soft_dba") return Coupling::soft_dba;
  if (lower == "shapedba" || lower == "shape_dba") return Coupling::shape_dba;
  if (lower == "kshape" || lower == "k-shape" || lower == "k_shape") return Coupling::kshape;
  throw InvalidArgument("unknown coupling '" + std::string(s) + "'");
}

inline constexpr Coupling kAllCouplings[] = {Coupling::med, Coupling::dba, Coupling::soft_dba,
                                             Coupling::shape_dba, Coupling::kshape};

struct ClusteringConfig {
  std::optional<std::size_t> k;  // defaults to the number of distinct labels
  Coupling coupling = Coupling::shape_dba;
  std::uint64_t seed = 0;
  std::optional<std::vector<std::size_t>> initial_centroid_indices;
  std::size_t max_iterations = 50;
  std::size_t inner_iterations = 5;  // barycenter iterations per centroid update
  double inner_tolerance = 1e-5;
  std::size_t reach = 30;
  double gamma = 1.0;
  std::size_t workers = 1;  // 0 = hardware concurrency
};

struct ClusteringResult {
  std::vector<std::size_t> assignments;
  std::vector<TimeSeries> centroids;
  double inertia = 0.0;
  std::vector<double> inertia_trace;  // one entry per assignment step
  std::size_t iterations_run = 0;
  bool converged = false;
  double runtime_seconds = 0.0;
  double assign_seconds = 0.0;
  double update_seconds = 0.0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> initial_indices;
};

inline Metric coupling_metric(Coupling c, std::size_t reach, double gamma) {
  switch (c) {
    case Coupling::med: return Metric::euclidean();
    case Coupling::dba: return Metric::dtw();
    case Coupling::soft_dba: return Metric::soft_dtw(gamma);
    case Coupling::shape_dba: return Metric::shape_dtw(reach);
    case Coupling::kshape: return Metric::sbd();
  }
  throw InvalidArgument("unknown coupling");
}

/// k distinct member indices drawn from a generator keyed by
/// (dataset name, seed). Does not depend on the coupling, which is what
/// lets every method start from the same centroids.
inline std::vector<std::size_t> init_clusters(const LabeledDataset& dataset, std::size_t k,
                                              std::uint64_t seed) {
  if (k < 1) throw InvalidArgument("k must be >= 1");
  if (k > dataset.size()) {
    throw InvalidArgument("k = " + std::to_string(k) + " exceeds dataset size " +
                          std::to_string(dataset.size()));
  }
  Engine engine = make_engine(dataset.name(), seed);
  return sample_without_replacement(engine, dataset.size(), k);
}

namespace detail {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Assignment {
  std::vector<std::size_t> labels;
  std::vector<double> own_distance;  // distance to the assigned centroid
  bool repaired = false;
};

/// Nearest centroid per series (lowest id on ties), then empty clusters are
/// each given the series farthest from its centroid among clusters with more
/// than one member (lowest index on ties).
inline Assignment assign(std::span<const TimeSeries> series, std::span<const TimeSeries> centroids,
                         const Metric& metric, std::size_t workers) {
  const std::size_t n = series.size();
  const std::size_t k = centroids.size();
  Matrix d(n, k);
  parallel_for(n, workers, [&](std::size_t i) {
    for (std::size_t c = 0; c < k; ++c) d(i, c) = distance(metric, series[i], centroids[c]);
  });

  Assignment a{std::vector<std::size_t>(n), std::vector<double>(n), false};
  std::vector<std::size_t> size(k, 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < k; ++c) {
      if (d(i, c) < d(i, best)) best = c;
    }
    a.labels[i] = best;
    a.own_distance[i] = d(i, best);
    ++size[best];
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (size[c] != 0) continue;
    std::size_t victim = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (size[a.labels[i]] < 2) continue;
      if (victim == n || a.own_distance[i] > a.own_distance[victim]) victim = i;
    }
    if (victim == n) throw Error("empty cluster repair failed: no cluster can spare a member");
    --size[a.labels[victim]];
    a.labels[victim] = c;
    a.own_distance[victim] = d(victim, c);
    ++size[c];
    a.repaired = true;
  }
  return a;
}

inline double sum(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

/// Lloyd iterations shared by every coupling.
///
/// `update(members, old_centroid)` returns the new centroid of one cluster.
/// The loop ends when an assignment step changes nothing (and needed no
/// empty-cluster repair) or after max_iterations updates; the returned
/// assignments always come from the last assignment step.
template <class Update>
ClusteringResult lloyd(const LabeledDataset& data, std::vector<std::size_t> init_indices,
                       const Metric& metric, const ClusteringConfig& cfg, Update&& update) {
  const auto started = Clock::now();
  const std::size_t workers = resolve_workers(cfg.workers);
  const std::size_t k = init_indices.size();
  std::span<const TimeSeries> series(data.series());

  ClusteringResult result;
  result.seed = cfg.seed;
  result.initial_indices = init_indices;
  for (std::size_t idx : init_indices) result.centroids.push_back(series[idx]);

  auto phase = Clock::now();
  Assignment current = assign(series, result.centroids, metric, workers);
  result.assign_seconds += seconds_since(phase);
  result.inertia_trace.push_back(sum(current.own_distance));

  for (std::size_t it = 0; it < cfg.max_iterations; ++it) {
    phase = Clock::now();
    std::vector<std::vector<TimeSeries>> members(k);
    for (std::size_t i = 0; i < series.size(); ++i) members[current.labels[i]].push_back(series[i]);
    std::vector<std::optional<TimeSeries>> fresh(k);
    parallel_for(k, workers, [&](std::size_t c) {
      fresh[c] = update(std::span<const TimeSeries>(members[c]), result.centroids[c]);
    });
    for (std::size_t c = 0; c < k; ++c) result.centroids[c] = std::move(*fresh[c]);
    result.update_seconds += seconds_since(phase);

    phase = Clock::now();
    Assignment next = assign(series, result.centroids, metric, workers);
    result.assign_seconds += seconds_since(phase);
    result.inertia_trace.push_back(sum(next.own_distance));
    ++result.iterations_run;

    const bool unchanged = next.labels == current.labels && !next.repaired;
    current = std::move(next);
    if (unchanged) {
      result.converged = true;
      break;
    }
  }
  result.assignments = std::move(current.labels);
  result.inertia = result.inertia_trace.back();
  result.runtime_seconds = seconds_since(started);
  return result;
}

inline std::size_t resolve_k(const LabeledDataset& data, const ClusteringConfig& cfg) {
  const std::size_t k = cfg.k.value_or(data.distinct_labels().size());
  if (k < 1) throw InvalidArgument("k must be >= 1");
  if (k > data.size()) {
    throw InvalidArgument("k = " + std::to_string(k) + " exceeds dataset size " +
                          std::to_string(data.size()));
  }
  return k;
}

inline std::vector<std::size_t> resolve_init(const LabeledDataset& data, std::size_t k,
                                             const ClusteringConfig& cfg) {
  if (!cfg.initial_centroid_indices) return init_clusters(data, k, cfg.seed);
  const auto& idx = *cfg.initial_centroid_indices;
  if (idx.size() != k) throw InvalidArgument("expected " + std::to_string(k) + " initial indices");
  std::vector<std::size_t> sorted = idx;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw InvalidArgument("initial indices must be distinct");
  }
  if (sorted.back() >= data.size()) throw InvalidArgument("initial index out of range");
  return idx;
}

}  // namespace detail

/// Shape extraction of k-shape: members are aligned to the current centroid
/// by their SBD shift and z-normalised; the new centroid is the dominant
/// eigenvector of their centred scatter matrix, signed to correlate
/// positively with the previous centroid, then z-normalised.
inline TimeSeries shape_extraction(std::span<const TimeSeries> members, const TimeSeries& previous) {
  if (members.empty()) throw InvalidArgument("shape_extraction: empty cluster");
  const std::size_t len = previous.size();
  const bool zero_centroid =
      std::all_of(previous.begin(), previous.end(), [](double v) { return v == 0.0; });

  Eigen::MatrixXd aligned(static_cast<Eigen::Index>(members.size()), static_cast<Eigen::Index>(len));
  for (std::size_t m = 0; m < members.size(); ++m) {
    if (members[m].size() != len) throw LengthMismatch(len, members[m].size(), "shape_extraction");
    std::vector<double> a = members[m].data();
    if (!zero_centroid) a = shift_series(members[m], sbd(previous, members[m]).shift);
    const TimeSeries z = z_normalize(a);
    for (std::size_t t = 0; t < len; ++t) {
      aligned(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(t)) = z[t];
    }
  }

  const auto l = static_cast<Eigen::Index>(len);
  const Eigen::MatrixXd scatter = aligned.transpose() * aligned;
  const Eigen::MatrixXd centering =
      Eigen::MatrixXd::Identity(l, l) - Eigen::MatrixXd::Constant(l, l, 1.0 / static_cast<double>(len));
  const Eigen::MatrixXd m = centering * scatter * centering;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(0.5 * (m + m.transpose()));
  Eigen::VectorXd v = solver.eigenvectors().col(l - 1);

  Eigen::VectorXd reference(l);
  if (zero_centroid) {
    reference = aligned.colwise().sum().transpose();
  } else {
    for (Eigen::Index t = 0; t < l; ++t) reference(t) = previous[static_cast<std::size_t>(t)];
  }
  if (v.dot(reference) < 0.0) v = -v;
  return z_normalize(std::span<const double>(v.data(), len));
}

/// k-shape: SBD assignment with shape-extraction centroids, under the same
/// shared initialisation, stopping and empty-cluster rules as kmeans.
/// Expects equal-length z-normalised series.
inline ClusteringResult kshape(const LabeledDataset& data, ClusteringConfig cfg) {
  cfg.coupling = Coupling::kshape;
  if (!data.equal_length()) throw InvalidArgument("kshape needs equal-length series");
  const std::size_t k = detail::resolve_k(data, cfg);
  auto init = detail::resolve_init(data, k, cfg);
  return detail::lloyd(data, std::move(init), Metric::sbd(), cfg,
                       [](std::span<const TimeSeries> members, const TimeSeries& old) {
                         return shape_extraction(members, old);
                       });
}

/// k-means with the configured coupling. Centroid updates warm-start the
/// averaging method from the current centroid with cfg.inner_iterations.
inline ClusteringResult kmeans(const LabeledDataset& data, ClusteringConfig cfg) {
  if (cfg.coupling == Coupling::kshape) return kshape(data, cfg);
  if (cfg.coupling == Coupling::med && !data.equal_length()) {
    throw InvalidArgument("MED needs equal-length series");
  }
  const std::size_t k = detail::resolve_k(data, cfg);
  auto init = detail::resolve_init(data, k, cfg);
  const Metric metric = coupling_metric(cfg.coupling, cfg.reach, cfg.gamma);

  return detail::lloyd(data, std::move(init), metric, cfg,
                       [&cfg](std::span<const TimeSeries> members, const TimeSeries& old) {
                         if (cfg.coupling == Coupling::med) return arithmetic_mean(members);
                         // A lone member is its own DTW / ShapeDTW barycenter (objective 0);
                         // a warm start from a distant centroid can stall short of it.
                         if (members.size() == 1 && cfg.coupling != Coupling::soft_dba) return members[0];
                         AveragingConfig ac;
                         ac.max_iterations = cfg.inner_iterations;
                         ac.tolerance = cfg.inner_tolerance;
                         ac.reach = cfg.reach;
                         ac.gamma = cfg.gamma;
                         ac.init = ProvidedSeries{old};
                         switch (cfg.coupling) {
                           case Coupling::dba: return dba(members, ac).average;
                           case Coupling::soft_dba: return soft_dba(members, ac).average;
                           default: return shape_dba(members, ac).average;
                         }
                       });
}

}  // namespace shapedba
