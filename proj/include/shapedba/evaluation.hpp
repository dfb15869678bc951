#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "shapedba/error.hpp"

namespace shapedba {

/// Co-occurrence counts between true classes (rows) and predicted clusters
/// (columns). Label values are mapped to dense row/column ids in ascending
/// order.
struct ContingencyTable {
  std::vector<std::vector<std::size_t>> counts;
  std::vector<std::size_t> row_sums;
  std::vector<std::size_t> col_sums;
  std::size_t total = 0;
};

template <class A, class B>
ContingencyTable contingency_table(std::span<const A> truth, std::span<const B> predicted) {
  if (truth.size() != predicted.size()) {
    throw LengthMismatch(truth.size(), predicted.size(), "contingency_table");
  }
  std::map<A, std::size_t> rows;
  std::map<B, std::size_t> cols;
  for (const auto& v : truth) rows.emplace(v, 0);
  for (const auto& v : predicted) cols.emplace(v, 0);
  std::size_t r = 0, c = 0;
  for (auto& [_, id] : rows) id = r++;
  for (auto& [_, id] : cols) id = c++;

  ContingencyTable t;
  t.counts.assign(r, std::vector<std::size_t>(c, 0));
  t.row_sums.assign(r, 0);
  t.col_sums.assign(c, 0);
  t.total = truth.size();
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const std::size_t a = rows.at(truth[i]);
    const std::size_t b = cols.at(predicted[i]);
    ++t.counts[a][b];
    ++t.row_sums[a];
    ++t.col_sums[b];
  }
  return t;
}

namespace detail {

inline double choose2(std::size_t n) {
  return 0.5 * static_cast<double>(n) * static_cast<double>(n > 0 ? n - 1 : 0);
}

template <class A, class B>
ContingencyTable checked_table(std::span<const A> truth, std::span<const B> predicted) {
  if (truth.size() != predicted.size()) {
    throw LengthMismatch(truth.size(), predicted.size(), "rand index");
  }
  if (truth.size() < 2) throw InvalidArgument("rand index needs at least two items");
  return contingency_table(truth, predicted);
}

struct PairSums {
  double index = 0.0;  // pairs together in both partitions
  double rows = 0.0;   // pairs together in the true partition
  double cols = 0.0;   // pairs together in the predicted partition
  double pairs = 0.0;  // all pairs
};

inline PairSums pair_sums(const ContingencyTable& t) {
  PairSums s;
  for (const auto& row : t.counts) {
    for (std::size_t v : row) s.index += choose2(v);
  }
  for (std::size_t v : t.row_sums) s.rows += choose2(v);
  for (std::size_t v : t.col_sums) s.cols += choose2(v);
  s.pairs = choose2(t.total);
  return s;
}

}  // namespace detail

/// Fraction of item pairs on which the two partitions agree.
template <class A, class B>
double rand_index(std::span<const A> truth, std::span<const B> predicted) {
  const auto s = detail::pair_sums(detail::checked_table(truth, predicted));
  // agreements = together-together + apart-apart
  const double agree = s.pairs + 2.0 * s.index - s.rows - s.cols;
  return agree / s.pairs;
}

/// Rand index corrected for chance under the permutation model, in the
/// contingency-table form. Returns 0 when the correction is undefined
/// (both partitions trivial in the same way).
template <class A, class B>
double adjusted_rand_index(std::span<const A> truth, std::span<const B> predicted) {
  const auto s = detail::pair_sums(detail::checked_table(truth, predicted));
  const double expected = s.rows * s.cols / s.pairs;
  const double max_index = 0.5 * (s.rows + s.cols);
  const double denom = max_index - expected;
  if (denom == 0.0) return 0.0;
  return (s.index - expected) / denom;
}

template <class A, class B>
double rand_index(const std::vector<A>& truth, const std::vector<B>& predicted) {
  return rand_index(std::span<const A>(truth), std::span<const B>(predicted));
}

template <class A, class B>
double adjusted_rand_index(const std::vector<A>& truth, const std::vector<B>& predicted) {
  return adjusted_rand_index(std::span<const A>(truth), std::span<const B>(predicted));
}

}  // namespace shapedba
