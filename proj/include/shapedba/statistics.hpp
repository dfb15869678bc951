#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "shapedba/error.hpp"

namespace shapedba {

/// p-values at or above this are reported as not significant.
inline constexpr double kSignificanceLevel = 0.05;

/// Mean ranks of `values` (1 = smallest); ties share the mean of their ranks.
inline std::vector<double> average_tied_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t lo = 0; lo < order.size();) {
    std::size_t hi = lo + 1;
    while (hi < order.size() && values[order[hi]] == values[order[lo]]) ++hi;
    const double r = 0.5 * static_cast<double>(lo + 1 + hi);  // mean of lo+1 .. hi
    for (std::size_t k = lo; k < hi; ++k) ranks[order[k]] = r;
    lo = hi;
  }
  return ranks;
}

struct WilcoxonResult {
  double p_value = 1.0;
  double statistic = 0.0;   // W+, sum of ranks of positive differences
  std::size_t n_used = 0;   // non-zero differences
  bool exact = false;
  bool insufficient = false;  // fewer than 5 non-zero differences; p forced to 1
};

/// Two-sided Wilcoxon signed-rank test on paired samples. Zero differences
/// are dropped and tied |differences| get averaged ranks. Up to 25 pairs
/// the null distribution is enumerated exactly; above, a normal
/// approximation with tie and continuity corrections is used.
inline WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw LengthMismatch(a.size(), b.size(), "wilcoxon_signed_rank");
  std::vector<double> diff;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    if (d != 0.0) diff.push_back(d);
  }
  WilcoxonResult res;
  res.n_used = diff.size();
  if (diff.size() < 5) {
    res.insufficient = true;
    return res;
  }

  std::vector<double> mags(diff.size());
  std::transform(diff.begin(), diff.end(), mags.begin(), [](double d) { return std::abs(d); });
  const std::vector<double> ranks = average_tied_ranks(mags);
  for (std::size_t i = 0; i < diff.size(); ++i) {
    if (diff[i] > 0.0) res.statistic += ranks[i];
  }

  const std::size_t n = diff.size();
  if (n <= 25) {
    // Tied ranks are multiples of 1/2, so doubled ranks are integers.
    std::vector<std::size_t> doubled(n);
    std::size_t total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      doubled[i] = static_cast<std::size_t>(std::llround(2.0 * ranks[i]));
      total += doubled[i];
    }
    std::vector<double> ways(total + 1, 0.0);
    ways[0] = 1.0;
    std::size_t reach = 0;
    for (std::size_t r : doubled) {
      reach += r;
      for (std::size_t s = reach; s >= r; --s) ways[s] += ways[s - r];
    }
    const auto observed = static_cast<std::size_t>(std::llround(2.0 * res.statistic));
    const double all = std::ldexp(1.0, static_cast<int>(n));
    double low = 0.0, high = 0.0;
    for (std::size_t s = 0; s <= total; ++s) {
      if (s <= observed) low += ways[s];
      if (s >= observed) high += ways[s];
    }
    res.p_value = std::min(1.0, 2.0 * std::min(low, high) / all);
    res.exact = true;
    return res;
  }

  const double nn = static_cast<double>(n);
  const double mean = nn * (nn + 1.0) / 4.0;
  double tie_term = 0.0;
  std::vector<double> sorted = ranks;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t lo = 0; lo < sorted.size();) {
    std::size_t hi = lo;
    while (hi < sorted.size() && sorted[hi] == sorted[lo]) ++hi;
    const double t = static_cast<double>(hi - lo);
    tie_term += t * t * t - t;
    lo = hi;
  }
  const double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term / 48.0;
  const double z = std::max(0.0, std::abs(res.statistic - mean) - 0.5) / std::sqrt(var);
  res.p_value = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  return res;
}

/// Holm step-down adjustment; adjusted values are monotone in the order of
/// the raw p-values and clipped to 1.
inline std::vector<double> holm_correction(std::span<const double> p) {
  for (double v : p) {
    if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument("holm_correction: p-value outside [0, 1]");
  }
  const std::size_t m = p.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
  std::vector<double> out(m);
  double running = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double adj = std::min(1.0, static_cast<double>(m - k) * p[order[k]]);
    running = std::max(running, adj);
    out[order[k]] = running;
  }
  return out;
}

struct WinTieLoss {
  std::size_t wins = 0;
  std::size_t ties = 0;
  std::size_t losses = 0;
  friend bool operator==(const WinTieLoss&, const WinTieLoss&) = default;
};

/// Per-position comparison of a against b; ties are exact equality.
/// With higher_is_better = false (runtimes) a smaller a is a win.
inline WinTieLoss win_tie_loss(std::span<const double> a, std::span<const double> b,
                               bool higher_is_better = true) {
  if (a.size() != b.size()) throw LengthMismatch(a.size(), b.size(), "win_tie_loss");
  WinTieLoss w;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == b[i]) {
      ++w.ties;
    } else if ((a[i] > b[i]) == higher_is_better) {
      ++w.wins;
    } else {
      ++w.losses;
    }
  }
  return w;
}

/// One clustering run's score.
struct ScoreRecord {
  std::string dataset;
  std::string method;
  std::uint64_t seed = 0;
  double ari = 0.0;
  double runtime_seconds = 0.0;
};

/// Seed-averaged scores of one (dataset, method) cell.
struct CellScore {
  double ari = 0.0;
  double runtime_seconds = 0.0;
  std::size_t seeds = 0;
};

/// Collection of run scores, at most one per (dataset, method, seed).
/// Methods and datasets keep their order of first appearance.
class ScorePanel {
 public:
  void add(ScoreRecord r) {
    if (!(r.ari >= -0.5 - 1e-12 && r.ari <= 1.0 + 1e-12)) {
      throw InvalidArgument("ARI " + std::to_string(r.ari) + " outside [-0.5, 1]");
    }
    const Key key{r.dataset, r.method, r.seed};
    if (!seen_.emplace(key, records_.size()).second) {
      throw InvalidArgument("duplicate record for (" + r.dataset + ", " + r.method + ", " +
                            std::to_string(r.seed) + ")");
    }
    remember(methods_, r.method);
    remember(datasets_, r.dataset);
    records_.push_back(std::move(r));
  }

  bool contains(const std::string& dataset, const std::string& method, std::uint64_t seed) const {
    return seen_.count(Key{dataset, method, seed}) != 0;
  }

  const std::vector<ScoreRecord>& records() const noexcept { return records_; }
  const std::vector<std::string>& methods() const noexcept { return methods_; }
  const std::vector<std::string>& datasets() const noexcept { return datasets_; }

  std::optional<CellScore> cell(const std::string& dataset, const std::string& method) const {
    CellScore c;
    for (const auto& r : records_) {
      if (r.dataset != dataset || r.method != method) continue;
      c.ari += r.ari;
      c.runtime_seconds += r.runtime_seconds;
      ++c.seeds;
    }
    if (c.seeds == 0) return std::nullopt;
    c.ari /= static_cast<double>(c.seeds);
    c.runtime_seconds /= static_cast<double>(c.seeds);
    return c;
  }

  /// Datasets on which every listed method has at least one record.
  std::vector<std::string> complete_datasets(std::span<const std::string> methods) const {
    std::vector<std::string> out;
    for (const auto& d : datasets_) {
      if (std::all_of(methods.begin(), methods.end(),
                      [&](const std::string& m) { return cell(d, m).has_value(); })) {
        out.push_back(d);
      }
    }
    return out;
  }

 private:
  using Key = std::tuple<std::string, std::string, std::uint64_t>;

  static void remember(std::vector<std::string>& v, const std::string& s) {
    if (std::find(v.begin(), v.end(), s) == v.end()) v.push_back(s);
  }

  std::vector<ScoreRecord> records_;
  std::map<Key, std::size_t> seen_;
  std::vector<std::string> methods_;
  std::vector<std::string> datasets_;
};

enum class Score { ari, runtime };

/// Seed-averaged score of `method` on each of `datasets`.
inline std::vector<double> score_column(const ScorePanel& panel, const std::string& method,
                                        std::span<const std::string> datasets, Score score) {
  std::vector<double> out;
  out.reserve(datasets.size());
  for (const auto& d : datasets) {
    const auto c = panel.cell(d, method);
    if (!c) throw InvalidArgument("no score for method '" + method + "' on dataset '" + d + "'");
    out.push_back(score == Score::ari ? c->ari : c->runtime_seconds);
  }
  return out;
}

/// Mean per-dataset rank of every method (1 = best). Higher ARI is better;
/// for runtimes lower is better. Every method must be scored on every
/// dataset.
inline std::map<std::string, double> average_ranks(const ScorePanel& panel, Score score = Score::ari) {
  const auto& methods = panel.methods();
  const auto& datasets = panel.datasets();
  std::map<std::string, double> out;
  for (const auto& m : methods) out[m] = 0.0;
  if (datasets.empty()) return out;

  std::vector<std::vector<double>> columns;
  for (const auto& m : methods) columns.push_back(score_column(panel, m, datasets, score));
  for (std::size_t d = 0; d < datasets.size(); ++d) {
    std::vector<double> row;
    for (const auto& col : columns) row.push_back(score == Score::ari ? -col[d] : col[d]);
    const auto r = average_tied_ranks(row);
    for (std::size_t k = 0; k < methods.size(); ++k) out[methods[k]] += r[k];
  }
  for (auto& [_, v] : out) v /= static_cast<double>(datasets.size());
  return out;
}

struct MeanScore {
  double ari = 0.0;
  double runtime_seconds = 0.0;
};

/// Mean over datasets of the seed-averaged ARI and runtime of every method.
inline std::map<std::string, MeanScore> mean_scores(const ScorePanel& panel) {
  std::map<std::string, MeanScore> out;
  const auto& datasets = panel.datasets();
  for (const auto& m : panel.methods()) {
    const auto ari = score_column(panel, m, datasets, Score::ari);
    const auto rt = score_column(panel, m, datasets, Score::runtime);
    const double n = static_cast<double>(datasets.size());
    out[m] = {std::accumulate(ari.begin(), ari.end(), 0.0) / n,
              std::accumulate(rt.begin(), rt.end(), 0.0) / n};
  }
  return out;
}

}  // namespace shapedba
