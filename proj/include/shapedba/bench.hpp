#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "shapedba/averaging.hpp"
#include "shapedba/clustering.hpp"
#include "shapedba/error.hpp"
#include "shapedba/evaluation.hpp"
#include "shapedba/series.hpp"
#include "shapedba/statistics.hpp"

namespace shapedba::bench {

namespace fs = std::filesystem;

inline constexpr std::string_view kRecordHeader =
    "dataset,method,seed,ari,runtime_seconds,iterations,k,n,length";
inline constexpr std::string_view kMetaHeader =
    "dataset,method,seed,initial_indices,converged,assign_seconds,update_seconds";

/// Everything a benchmark campaign needs.
struct ExperimentConfig {
  fs::path datasets_dir;
  std::vector<std::string> datasets;  // empty: every dataset found in datasets_dir
  std::set<std::string> excluded;
  std::vector<Coupling> methods{std::begin(kAllCouplings), std::end(kAllCouplings)};
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  std::size_t reach = 30;
  double gamma = 1.0;
  std::size_t max_iterations = 50;
  std::size_t inner_iterations = 5;
  std::size_t workers = 1;
  fs::path out_dir = "results";
  bool resume = false;

  void validate() const {
    if (methods.empty()) throw InvalidArgument("no methods selected");
    if (seeds.empty()) throw InvalidArgument("no seeds selected");
    std::set<std::uint64_t> s(seeds.begin(), seeds.end());
    if (s.size() != seeds.size()) throw InvalidArgument("seeds must be distinct");
    std::set<Coupling> m(methods.begin(), methods.end());
    if (m.size() != methods.size()) throw InvalidArgument("methods must be distinct");
    if (reach < 1) throw InvalidArgument("reach must be >= 1");
    if (!(gamma > 0.0)) throw InvalidArgument("gamma must be > 0");
  }
};

/// One row of results.csv.
struct RunRecord {
  std::string dataset;
  std::string method;
  std::uint64_t seed = 0;
  double ari = 0.0;
  double runtime_seconds = 0.0;
  std::size_t iterations = 0;
  std::size_t k = 0;
  std::size_t n = 0;
  std::size_t length = 0;
};

inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  for (;;) {
    const std::size_t next = s.find(sep, pos);
    out.emplace_back(shapedba::detail::trim(s.substr(pos, next == std::string_view::npos ? next : next - pos)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

template <class T>
T parse_number(std::string_view s, std::string_view what) {
  s = shapedba::detail::trim(s);
  T value{};
  if constexpr (std::is_floating_point_v<T>) {
    if (!shapedba::detail::parse_double(s, value)) throw InvalidArgument("bad " + std::string(what) + " '" + std::string(s) + "'");
  } else {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw InvalidArgument("bad " + std::string(what) + " '" + std::string(s) + "'");
    }
  }
  return value;
}

inline std::string to_csv(const RunRecord& r) {
  std::ostringstream os;
  os << r.dataset << ',' << r.method << ',' << r.seed << ',' << format_double(r.ari) << ','
     << format_double(r.runtime_seconds) << ',' << r.iterations << ',' << r.k << ',' << r.n << ','
     << r.length;
  return os.str();
}

/// Parses one results.csv row; nullopt for malformed (e.g. truncated) rows.
inline std::optional<RunRecord> parse_record(std::string_view line) {
  const auto f = split(line, ',');
  if (f.size() != 9) return std::nullopt;
  try {
    RunRecord r;
    r.dataset = f[0];
    r.method = f[1];
    r.seed = parse_number<std::uint64_t>(f[2], "seed");
    r.ari = parse_number<double>(f[3], "ari");
    r.runtime_seconds = parse_number<double>(f[4], "runtime");
    r.iterations = parse_number<std::size_t>(f[5], "iterations");
    r.k = parse_number<std::size_t>(f[6], "k");
    r.n = parse_number<std::size_t>(f[7], "n");
    r.length = parse_number<std::size_t>(f[8], "length");
    return r;
  } catch (const Error&) {
    return std::nullopt;
  }
}

inline std::vector<RunRecord> read_records(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw DataError("cannot read '" + file.string() + "'");
  std::vector<RunRecord> out;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      if (shapedba::detail::trim(line) == kRecordHeader) continue;
    }
    if (shapedba::detail::trim(line).empty()) continue;
    if (auto r = parse_record(line)) out.push_back(std::move(*r));
  }
  return out;
}

inline ScorePanel to_panel(const std::vector<RunRecord>& records) {
  ScorePanel panel;
  for (const auto& r : records) panel.add({r.dataset, r.method, r.seed, r.ari, r.runtime_seconds});
  return panel;
}

/// "5" means seeds 0..4; "3,7,11" lists them.
inline std::vector<std::uint64_t> parse_seeds(std::string_view s) {
  const auto parts = split(s, ',');
  std::vector<std::uint64_t> out;
  if (parts.size() == 1) {
    const auto n = parse_number<std::uint64_t>(parts[0], "seed count");
    for (std::uint64_t i = 0; i < n; ++i) out.push_back(i);
    return out;
  }
  for (const auto& p : parts) {
    if (!p.empty()) out.push_back(parse_number<std::uint64_t>(p, "seed"));
  }
  return out;
}

inline std::vector<Coupling> parse_methods(std::string_view s) {
  std::vector<Coupling> out;
  for (const auto& p : split(s, ',')) {
    if (!p.empty()) out.push_back(parse_coupling(p));
  }
  return out;
}

/// Dataset names from a file, one per line; '#' starts a comment.
inline std::set<std::string> read_name_list(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw DataError("cannot read '" + file.string() + "'");
  std::set<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    std::string_view v = line;
    if (auto hash = v.find('#'); hash != std::string_view::npos) v = v.substr(0, hash);
    v = shapedba::detail::trim(v);
    if (!v.empty()) out.emplace(v);
  }
  return out;
}

/// Applies a flat `key = value` file. Recognised keys: datasets_dir,
/// datasets, exclude, methods, seeds, reach, gamma, max_iterations,
/// inner_iterations, workers, out, resume.
inline void apply_config_file(const fs::path& file, ExperimentConfig& cfg) {
  std::ifstream in(file);
  if (!in) throw DataError("cannot read config '" + file.string() + "'");
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view v = line;
    if (auto hash = v.find('#'); hash != std::string_view::npos) v = v.substr(0, hash);
    v = shapedba::detail::trim(v);
    if (v.empty()) continue;
    const auto eq = v.find('=');
    if (eq == std::string_view::npos) {
      throw InvalidArgument(file.string() + ":" + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key(shapedba::detail::trim(v.substr(0, eq)));
    const std::string value(shapedba::detail::trim(v.substr(eq + 1)));
    if (key == "datasets_dir") cfg.datasets_dir = value;
    else if (key == "datasets") {
      cfg.datasets.clear();
      for (auto& d : split(value, ',')) if (!d.empty()) cfg.datasets.push_back(d);
    } else if (key == "exclude") cfg.excluded = read_name_list(value);
    else if (key == "methods") cfg.methods = parse_methods(value);
    else if (key == "seeds") cfg.seeds = parse_seeds(value);
    else if (key == "reach") cfg.reach = parse_number<std::size_t>(value, "reach");
    else if (key == "gamma") cfg.gamma = parse_number<double>(value, "gamma");
    else if (key == "max_iterations") cfg.max_iterations = parse_number<std::size_t>(value, "max_iterations");
    else if (key == "inner_iterations") cfg.inner_iterations = parse_number<std::size_t>(value, "inner_iterations");
    else if (key == "workers") cfg.workers = parse_number<std::size_t>(value, "workers");
    else if (key == "out") cfg.out_dir = value;
    else if (key == "resume") cfg.resume = (value == "1" || value == "true" || value == "yes");
    else throw InvalidArgument(file.string() + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
  }
}

/// Sub-directories of `dir` that hold <Name>/<Name>_TRAIN.tsv, sorted.
inline std::vector<std::string> discover_datasets(const fs::path& dir) {
  std::vector<std::string> out;
  if (!fs::is_directory(dir)) throw DataError("'" + dir.string() + "' is not a directory");
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_directory()) continue;
    const std::string name = entry.path().filename().string();
    if (fs::exists(entry.path() / (name + "_TRAIN.tsv"))) out.push_back(name);
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Loads <dir>/<name>/<name>_TRAIN.tsv (+ _TEST.tsv when present),
/// z-normalises every series and merges the splits, train first.
inline LabeledDataset load_ucr_dataset(const fs::path& dir, const std::string& name,
                                       std::ostream* warn = &std::cerr) {
  const fs::path base = dir / name;
  LabeledDataset train = z_normalize(load_ucr_tsv(base / (name + "_TRAIN.tsv"), name));
  const fs::path test_file = base / (name + "_TEST.tsv");
  if (!fs::exists(test_file)) return train;
  LabeledDataset test = z_normalize(load_ucr_tsv(test_file, name));
  return merge_train_test(train, test, warn);
}

inline std::string join_indices(const std::vector<std::size_t>& idx) {
  std::string s;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (i) s.push_back(' ');
    s += std::to_string(idx[i]);
  }
  return s;
}

/// Runs one (dataset, coupling) cell under the given initial indices.
inline std::pair<RunRecord, ClusteringResult> run_cell(const LabeledDataset& data, Coupling method,
                                                       std::uint64_t seed,
                                                       const std::vector<std::size_t>& init,
                                                       const ExperimentConfig& cfg) {
  ClusteringConfig cc;
  cc.k = init.size();
  cc.coupling = method;
  cc.seed = seed;
  cc.initial_centroid_indices = init;
  cc.max_iterations = cfg.max_iterations;
  cc.inner_iterations = cfg.inner_iterations;
  cc.reach = cfg.reach;
  cc.gamma = cfg.gamma;
  cc.workers = cfg.workers;
  ClusteringResult res = kmeans(data, cc);
  RunRecord r;
  r.dataset = data.name();
  r.method = std::string(to_string(method));
  r.seed = seed;
  r.ari = adjusted_rand_index(data.labels(), res.assignments);
  r.runtime_seconds = res.runtime_seconds;
  r.iterations = res.iterations_run;
  r.k = init.size();
  r.n = data.size();
  r.length = data.max_length();
  return {std::move(r), std::move(res)};
}

namespace detail {

inline std::string meta_key(const std::string& d, const std::string& m, const std::string& s) {
  return d + '\x1f' + m + '\x1f' + s;
}

/// Rewrites results.csv and runs_meta.csv keeping only complete rows, so a
/// campaign killed mid-write can be resumed.
inline std::vector<RunRecord> recover(const fs::path& results, const fs::path& meta) {
  std::vector<RunRecord> records;
  if (fs::exists(results)) records = read_records(results);
  {
    std::ofstream out(results, std::ios::trunc);
    out << kRecordHeader << '\n';
    for (const auto& r : records) out << to_csv(r) << '\n';
  }
  std::set<std::string> keep;
  for (const auto& r : records) keep.insert(meta_key(r.dataset, r.method, std::to_string(r.seed)));
  std::vector<std::string> meta_rows;
  if (fs::exists(meta)) {
    std::ifstream in(meta);
    std::string line;
    while (std::getline(in, line)) {
      const auto f = split(line, ',');
      if (f.size() != 7 || !keep.count(meta_key(f[0], f[1], f[2]))) continue;
      meta_rows.push_back(line);
      keep.erase(meta_key(f[0], f[1], f[2]));
    }
  }
  std::ofstream out(meta, std::ios::trunc);
  out << kMetaHeader << '\n';
  for (const auto& l : meta_rows) out << l << '\n';
  return records;
}

}  // namespace detail

/// Runs the shared-initialisation protocol over every selected dataset,
/// seed and method, appending one flushed row per run to
/// <out>/results.csv and <out>/runs_meta.csv. Failing datasets are logged
/// and skipped.
inline ScorePanel run_benchmark(const ExperimentConfig& cfg, std::ostream& log = std::cerr) {
  cfg.validate();
  fs::create_directories(cfg.out_dir);
  const fs::path results = cfg.out_dir / "results.csv";
  const fs::path meta = cfg.out_dir / "runs_meta.csv";

  std::vector<RunRecord> existing;
  if (cfg.resume) {
    existing = detail::recover(results, meta);
  } else {
    std::ofstream(results, std::ios::trunc) << kRecordHeader << '\n';
    std::ofstream(meta, std::ios::trunc) << kMetaHeader << '\n';
  }
  ScorePanel panel = to_panel(existing);

  std::ofstream results_out(results, std::ios::app);
  std::ofstream meta_out(meta, std::ios::app);
  if (!results_out || !meta_out) throw DataError("cannot write to '" + cfg.out_dir.string() + "'");

  std::vector<std::string> names = cfg.datasets.empty() ? discover_datasets(cfg.datasets_dir) : cfg.datasets;
  for (const auto& name : names) {
    if (cfg.excluded.count(name)) {
      log << "skipping excluded dataset " << name << '\n';
      continue;
    }
    try {
      const LabeledDataset data = load_ucr_dataset(cfg.datasets_dir, name, &log);
      const std::size_t k = data.distinct_labels().size();
      for (std::uint64_t seed : cfg.seeds) {
        const std::vector<std::size_t> init = init_clusters(data, k, seed);
        for (Coupling method : cfg.methods) {
          const std::string mname(to_string(method));
          if (panel.contains(name, mname, seed)) continue;
          auto [record, res] = run_cell(data, method, seed, init, cfg);
          panel.add({record.dataset, record.method, record.seed, record.ari, record.runtime_seconds});
          results_out << to_csv(record) << '\n' << std::flush;
          meta_out << name << ',' << mname << ',' << seed << ',' << join_indices(res.initial_indices)
                   << ',' << (res.converged ? 1 : 0) << ',' << format_double(res.assign_seconds) << ','
                   << format_double(res.update_seconds) << '\n'
                   << std::flush;
          log << name << " seed=" << seed << ' ' << mname << " ari=" << record.ari
              << " time=" << record.runtime_seconds << "s\n";
        }
      }
    } catch (const std::exception& e) {
      log << "dataset " << name << " failed: " << e.what() << '\n';
    }
  }
  return panel;
}

/// Checks runs_meta.csv: every method run on a (dataset, seed) received the
/// same initial indices. Returns the offending keys (empty = audit passed).
inline std::vector<std::string> audit_shared_initialization(const fs::path& meta_file) {
  std::ifstream in(meta_file);
  if (!in) throw DataError("cannot read '" + meta_file.string() + "'");
  std::map<std::string, std::string> first;
  std::set<std::string> bad;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    const auto f = split(line, ',');
    if (f.size() != 7) continue;
    const std::string key = f[0] + " seed " + f[2];
    auto [it, inserted] = first.emplace(key, f[3]);
    if (!inserted && it->second != f[3]) bad.insert(key);
  }
  return {bad.begin(), bad.end()};
}

/// Writes the comparison tables derived from <results_dir>/results.csv into
/// `out_dir` and returns the written paths:
///   summary_ari_per_dataset.csv      seed-averaged ARI, NA for gaps
///   summary_runtime_per_dataset.csv  seed-averaged runtime, NA for gaps
///   summary_pairwise_ari.csv         win/tie/loss, Wilcoxon p, Holm p
///   summary_pairwise_runtime.csv     same with lower runtime winning
///   summary_ranks.csv                average ranks (ARI and runtime)
///   summary_means.csv                mean ARI and runtime, best ARI first
///   summary_runtime_ratios.csv       runtime ratios per method pair
/// With a single method only the first table is written.
inline std::vector<fs::path> summarize(const fs::path& results_dir, fs::path out_dir = {}) {
  if (out_dir.empty()) out_dir = results_dir;
  fs::create_directories(out_dir);
  const ScorePanel panel = to_panel(read_records(results_dir / "results.csv"));
  const auto& methods = panel.methods();
  const auto& datasets = panel.datasets();
  std::vector<fs::path> written;

  const auto per_dataset = [&](const char* file, Score score) {
    const fs::path p = out_dir / file;
    std::ofstream out(p);
    out << "dataset";
    for (const auto& m : methods) out << ',' << m;
    out << '\n';
    for (const auto& d : datasets) {
      out << d;
      for (const auto& m : methods) {
        const auto c = panel.cell(d, m);
        out << ',' << (c ? format_double(score == Score::ari ? c->ari : c->runtime_seconds) : "NA");
      }
      out << '\n';
    }
    written.push_back(p);
  };
  per_dataset("summary_ari_per_dataset.csv", Score::ari);
  if (methods.size() < 2) return written;
  per_dataset("summary_runtime_per_dataset.csv", Score::runtime);

  const auto pairwise = [&](const char* file, Score score) {
    struct Row {
      std::string a, b;
      WinTieLoss wtl;
      WilcoxonResult w;
      std::size_t n = 0;
    };
    std::vector<Row> rows;
    for (std::size_t i = 0; i < methods.size(); ++i) {
      for (std::size_t j = i + 1; j < methods.size(); ++j) {
        const std::vector<std::string> pair{methods[i], methods[j]};
        const auto common = panel.complete_datasets(pair);
        const auto a = score_column(panel, methods[i], common, score);
        const auto b = score_column(panel, methods[j], common, score);
        rows.push_back({methods[i], methods[j], win_tie_loss(a, b, score == Score::ari),
                        wilcoxon_signed_rank(a, b), common.size()});
      }
    }
    std::vector<double> p;
    for (const auto& r : rows) p.push_back(r.w.p_value);
    const auto holm = holm_correction(p);
    const fs::path path = out_dir / file;
    std::ofstream out(path);
    out << "method_a,method_b,datasets,wins,ties,losses,p_value,holm_p_value,significant,exact\n";
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const auto& row = rows[r];
      out << row.a << ',' << row.b << ',' << row.n << ',' << row.wtl.wins << ',' << row.wtl.ties << ','
          << row.wtl.losses << ',' << format_double(row.w.p_value) << ',' << format_double(holm[r]) << ','
          << (row.w.p_value < kSignificanceLevel ? 1 : 0) << ',' << (row.w.exact ? 1 : 0) << '\n';
    }
    written.push_back(path);
  };
  pairwise("summary_pairwise_ari.csv", Score::ari);
  pairwise("summary_pairwise_runtime.csv", Score::runtime);

  // Ranks and means need every method on every dataset: restrict to the
  // complete datasets.
  const auto complete = panel.complete_datasets(methods);
  ScorePanel full;
  for (const auto& r : panel.records()) {
    if (std::find(complete.begin(), complete.end(), r.dataset) != complete.end()) full.add(r);
  }
  {
    const fs::path p = out_dir / "summary_ranks.csv";
    std::ofstream out(p);
    out << "method,datasets,ari_rank,runtime_rank\n";
    const auto ari = average_ranks(full, Score::ari);
    const auto rt = average_ranks(full, Score::runtime);
    for (const auto& m : methods) {
      out << m << ',' << complete.size() << ',' << (complete.empty() ? "NA" : format_double(ari.at(m))) << ','
          << (complete.empty() ? "NA" : format_double(rt.at(m))) << '\n';
    }
    written.push_back(p);
  }
  {
    const fs::path p = out_dir / "summary_means.csv";
    std::ofstream out(p);
    out << "method,datasets,mean_ari,mean_runtime_seconds\n";
    if (!complete.empty()) {
      const auto means = mean_scores(full);
      std::vector<std::string> order = methods;
      std::stable_sort(order.begin(), order.end(), [&](const std::string& a, const std::string& b) {
        return means.at(a).ari > means.at(b).ari;
      });
      for (const auto& m : order) {
        out << m << ',' << complete.size() << ',' << format_double(means.at(m).ari) << ','
            << format_double(means.at(m).runtime_seconds) << '\n';
      }
    }
    written.push_back(p);
  }
  {
    const fs::path p = out_dir / "summary_runtime_ratios.csv";
    std::ofstream out(p);
    out << "method_a,method_b,datasets,ratio_of_means,mean_of_ratios\n";
    for (const auto& a : methods) {
      for (const auto& b : methods) {
        if (a == b) continue;
        const std::vector<std::string> pair{a, b};
        const auto common = panel.complete_datasets(pair);
        if (common.empty()) continue;
        const auto ra = score_column(panel, a, common, Score::runtime);
        const auto rb = score_column(panel, b, common, Score::runtime);
        double sa = 0.0, sb = 0.0, ratios = 0.0;
        for (std::size_t d = 0; d < common.size(); ++d) {
          sa += ra[d];
          sb += rb[d];
          ratios += ra[d] / rb[d];
        }
        out << a << ',' << b << ',' << common.size() << ',' << format_double(sa / sb) << ','
            << format_double(ratios / static_cast<double>(common.size())) << '\n';
      }
    }
    written.push_back(p);
  }
  return written;
}

/// Parameters of the `average` command.
struct AverageRequest {
  fs::path input;
  fs::path output;
  AveragingConfig config;
};

/// Averages every series of a UCR TSV file. Writes the prototype as a single
/// record with label 0 and the objective trace to <output>.trace.csv.
inline BarycenterResult average_command(const AverageRequest& req) {
  const LabeledDataset data = load_ucr_tsv(req.input);
  if (req.config.method == AveragingMethod::mean && !data.equal_length()) {
    std::size_t lo = data[0].size(), hi = lo;
    for (const auto& s : data.series()) {
      lo = std::min(lo, s.size());
      hi = std::max(hi, s.size());
    }
    throw LengthMismatch(lo, hi, "mean averaging of '" + req.input.string() + "'");
  }
  BarycenterResult res = average(data.series(), req.config);
  const std::vector<TimeSeries> proto{res.average};
  const std::vector<int> label{0};
  write_ucr_tsv(req.output, proto, label);

  fs::path trace = req.output;
  trace += ".trace.csv";
  std::ofstream out(trace);
  out << "iteration,objective\n";
  for (std::size_t i = 0; i < res.objective_trace.size(); ++i) {
    out << (i + 1) << ',' << format_double(res.objective_trace[i]) << '\n';
  }
  return res;
}

}  // namespace shapedba::bench
