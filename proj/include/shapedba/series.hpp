#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <iostream>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "shapedba/error.hpp"

namespace shapedba {

/// An ordered, non-empty sequence of finite samples.
///
/// Immutable once built; copies are cheap enough for the dataset sizes the
/// library targets and make sharing across worker threads trivial.
class TimeSeries {
 public:
  explicit TimeSeries(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw DataError("time series must contain at least one sample");
    for (std::size_t t = 0; t < values_.size(); ++t) {
      if (!std::isfinite(values_[t])) {
        throw DataError("time series sample " + std::to_string(t) + " is not finite");
      }
    }
  }

  TimeSeries(std::initializer_list<double> values)
      : TimeSeries(std::vector<double>(values)) {}

  explicit TimeSeries(std::span<const double> values)
      : TimeSeries(std::vector<double>(values.begin(), values.end())) {}

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t t) const noexcept { return values_[t]; }

  std::span<const double> values() const noexcept { return values_; }
  const std::vector<double>& data() const noexcept { return values_; }
  operator std::span<const double>() const noexcept { return values_; }

  auto begin() const noexcept { return values_.begin(); }
  auto end() const noexcept { return values_.end(); }

  friend bool operator==(const TimeSeries&, const TimeSeries&) = default;

 private:
  std::vector<double> values_;
};

/// A named collection of series with one integer class label each.
class LabeledDataset {
 public:
  LabeledDataset(std::string name, std::vector<TimeSeries> series, std::vector<int> labels)
      : name_(std::move(name)), series_(std::move(series)), labels_(std::move(labels)) {
    if (series_.empty()) throw DataError("dataset '" + name_ + "' has no records");
    if (series_.size() != labels_.size()) {
      throw DataError("dataset '" + name_ + "': " + std::to_string(series_.size()) +
                      " series but " + std::to_string(labels_.size()) + " labels");
    }
    equal_length_ = std::all_of(series_.begin(), series_.end(), [&](const TimeSeries& s) {
      return s.size() == series_.front().size();
    });
  }

  const std::string& name() const noexcept { return name_; }
  std::size_t size() const noexcept { return series_.size(); }
  const std::vector<TimeSeries>& series() const noexcept { return series_; }
  const TimeSeries& operator[](std::size_t i) const noexcept { return series_[i]; }
  const std::vector<int>& labels() const noexcept { return labels_; }
  bool equal_length() const noexcept { return equal_length_; }

  /// Length of the longest member series.
  std::size_t max_length() const noexcept {
    std::size_t m = 0;
    for (const auto& s : series_) m = std::max(m, s.size());
    return m;
  }

  std::vector<int> distinct_labels() const {
    std::set<int> s(labels_.begin(), labels_.end());
    return {s.begin(), s.end()};
  }

 private:
  std::string name_;
  std::vector<TimeSeries> series_;
  std::vector<int> labels_;
  bool equal_length_ = true;
};

/// Zero mean, unit population standard deviation. Series whose standard
/// deviation is below 1e-12 map to all zeros.
inline TimeSeries z_normalize(std::span<const double> x) {
  if (x.empty()) throw DataError("z_normalize: empty series");
  for (double v : x) {
    if (!std::isfinite(v)) throw DataError("z_normalize: non-finite sample");
  }
  const double n = static_cast<double>(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / n);

  std::vector<double> out(x.size(), 0.0);
  if (sd < 1e-12) return TimeSeries(std::move(out));
  for (std::size_t t = 0; t < x.size(); ++t) out[t] = (x[t] - mean) / sd;
  return TimeSeries(std::move(out));
}

inline LabeledDataset z_normalize(const LabeledDataset& d) {
  std::vector<TimeSeries> out;
  out.reserve(d.size());
  for (const auto& s : d.series()) out.push_back(z_normalize(s.values()));
  return LabeledDataset(d.name(), std::move(out), d.labels());
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && ws(s.front())) s.remove_prefix(1);
  while (!s.empty() && ws(s.back())) s.remove_suffix(1);
  return s;
}

inline bool parse_double(std::string_view field, double& out) {
  field = trim(field);
  if (field.empty()) return false;
  if (field.front() == '+') field.remove_prefix(1);
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

}  // namespace detail

/// Reads a UCR archive TSV file: one record per line, label first, then the
/// samples, all tab separated. The dataset name defaults to the file stem.
inline LabeledDataset load_ucr_tsv(const std::filesystem::path& path, std::string name = {}) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read '" + path.string() + "'");
  if (name.empty()) name = path.stem().string();

  std::vector<TimeSeries> series;
  std::vector<int> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view body = detail::trim(line);
    if (body.empty()) continue;

    const auto where = [&] { return path.string() + ":" + std::to_string(line_no) + ": "; };
    std::vector<double> values;
    double label = 0.0;
    bool first = true;
    std::size_t pos = 0;
    while (pos <= body.size()) {
      const std::size_t tab = body.find('\t', pos);
      const std::string_view field =
          body.substr(pos, tab == std::string_view::npos ? std::string_view::npos : tab - pos);
      double v = 0.0;
      if (!detail::parse_double(field, v)) {
        throw DataError(where() + "non-numeric field '" + std::string(field) + "'");
      }
      if (!std::isfinite(v)) {
        throw DataError(where() + "missing or non-finite value '" + std::string(field) + "'");
      }
      if (first) {
        label = v;
        first = false;
      } else {
        values.push_back(v);
      }
      if (tab == std::string_view::npos) break;
      pos = tab + 1;
    }
    if (values.empty()) throw DataError(where() + "record has no samples");
    const double rounded = std::round(label);
    if (std::abs(label - rounded) > 1e-9) {
      throw DataError(where() + "label is not an integer");
    }
    labels.push_back(static_cast<int>(rounded));
    series.emplace_back(std::move(values));
  }
  if (series.empty()) throw DataError("'" + path.string() + "': no records");
  return LabeledDataset(std::move(name), std::move(series), std::move(labels));
}

namespace detail {

inline void append_double(std::string& out, double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

}  // namespace detail

/// Writes series in UCR TSV format with the shortest round-tripping decimal
/// representation of every sample.
inline void write_ucr_tsv(const std::filesystem::path& path, std::span<const TimeSeries> series,
                          std::span<const int> labels) {
  if (series.size() != labels.size()) throw LengthMismatch(series.size(), labels.size(), "write_ucr_tsv");
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  std::string line;
  for (std::size_t i = 0; i < series.size(); ++i) {
    line = std::to_string(labels[i]);
    for (double v : series[i]) {
      line.push_back('\t');
      detail::append_double(line, v);
    }
    line.push_back('\n');
    out << line;
  }
  if (!out) throw DataError("write to '" + path.string() + "' failed");
}

inline void write_ucr_tsv(const std::filesystem::path& path, const LabeledDataset& d) {
  write_ucr_tsv(path, d.series(), d.labels());
}

/// Concatenates train then test. A differing label alphabet is reported on
/// `warn` (when non-null) but is not an error.
inline LabeledDataset merge_train_test(const LabeledDataset& train, const LabeledDataset& test,
                                       std::ostream* warn = &std::cerr) {
  if (warn != nullptr && train.distinct_labels() != test.distinct_labels()) {
    *warn << "warning: train and test label sets differ for dataset '" << train.name() << "'\n";
  }
  std::vector<TimeSeries> series = train.series();
  series.insert(series.end(), test.series().begin(), test.series().end());
  std::vector<int> labels = train.labels();
  labels.insert(labels.end(), test.labels().begin(), test.labels().end());
  return LabeledDataset(train.name(), std::move(series), std::move(labels));
}

}  // namespace shapedba
