// Command-line front end: average, cluster, benchmark, summarize.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "shapedba/bench.hpp"
#include "shapedba/shapedba.hpp"

namespace fs = std::filesystem;
using namespace shapedba;

namespace {

int run_average(const bench::AverageRequest& req) {
  const BarycenterResult res = bench::average_command(req);
  std::cout << "wrote " << req.output.string() << " (" << res.average.size() << " samples, "
            << res.iterations_run << " iterations, converged=" << (res.converged ? "yes" : "no") << ")\n";
  return 0;
}

struct ClusterArgs {
  fs::path input;
  fs::path test;
  fs::path out = "cluster_out";
  std::string method = "ShapeDBA";
  std::optional<std::size_t> k;
  std::uint64_t seed = 0;
  std::size_t reach = 30;
  double gamma = 1.0;
  std::size_t max_iterations = 50;
  std::size_t inner_iterations = 5;
  std::size_t workers = 1;
  bool raw = false;
};

int run_cluster(const ClusterArgs& a) {
  LabeledDataset data = load_ucr_tsv(a.input);
  if (!a.test.empty()) data = merge_train_test(data, load_ucr_tsv(a.test));
  if (!a.raw) data = z_normalize(data);

  ClusteringConfig cfg;
  cfg.k = a.k;
  cfg.coupling = parse_coupling(a.method);
  cfg.seed = a.seed;
  cfg.reach = a.reach;
  cfg.gamma = a.gamma;
  cfg.max_iterations = a.max_iterations;
  cfg.inner_iterations = a.inner_iterations;
  cfg.workers = a.workers;
  const ClusteringResult res = kmeans(data, cfg);

  fs::create_directories(a.out);
  {
    std::ofstream out(a.out / "assignments.csv");
    out << "index,label,cluster\n";
    for (std::size_t i = 0; i < data.size(); ++i) {
      out << i << ',' << data.labels()[i] << ',' << res.assignments[i] << '\n';
    }
  }
  std::vector<int> ids(res.centroids.size());
  for (std::size_t c = 0; c < ids.size(); ++c) ids[c] = static_cast<int>(c);
  write_ucr_tsv(a.out / "centroids.tsv", res.centroids, ids);

  std::cout << "method=" << to_string(cfg.coupling) << " k=" << res.centroids.size()
            << " ari=" << adjusted_rand_index(data.labels(), res.assignments)
            << " iterations=" << res.iterations_run << " runtime_seconds=" << res.runtime_seconds
            << " initial_indices=" << bench::join_indices(res.initial_indices) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Elastic averaging and time series k-means experiments"};
  app.require_subcommand(1);

  // average
  bench::AverageRequest avg;
  std::string avg_method = "shape_dba";
  std::string avg_init = "random";
  std::uint64_t avg_seed = 0;
  auto* average = app.add_subcommand("average", "Average every series of a UCR TSV file");
  average->add_option("input", avg.input, "UCR TSV input")->required()->check(CLI::ExistingFile);
  average->add_option("-o,--output", avg.output, "Prototype TSV output")->required();
  average->add_option("-m,--method", avg_method, "mean | dba | soft_dba | shape_dba")->capture_default_str();
  average->add_option("--reach", avg.config.reach, "ShapeDTW reach")->capture_default_str();
  average->add_option("--gamma", avg.config.gamma, "Soft-DTW gamma")->capture_default_str();
  average->add_option("--max-iterations", avg.config.max_iterations)->capture_default_str();
  average->add_option("--tolerance", avg.config.tolerance, "Relative objective change")->capture_default_str();
  average->add_option("--init", avg_init, "random | medoid")->capture_default_str();
  average->add_option("--seed", avg_seed, "Seed of the random-member start")->capture_default_str();
  average->add_option("--workers", avg.config.workers, "Alignment threads (0 = all cores)")->capture_default_str();

  // cluster
  ClusterArgs cl;
  auto* cluster = app.add_subcommand("cluster", "Cluster one dataset with one coupling");
  cluster->add_option("input", cl.input, "UCR TSV (train split)")->required()->check(CLI::ExistingFile);
  cluster->add_option("--test", cl.test, "Optional test split merged after the input")->check(CLI::ExistingFile);
  cluster->add_option("--method", cl.method, "MED | DBA | SoftDBA | ShapeDBA | KShape")->capture_default_str();
  cluster->add_option("--k", cl.k, "Clusters (default: number of labels)");
  cluster->add_option("--seed", cl.seed)->capture_default_str();
  cluster->add_option("--reach", cl.reach)->capture_default_str();
  cluster->add_option("--gamma", cl.gamma)->capture_default_str();
  cluster->add_option("--max-iterations", cl.max_iterations)->capture_default_str();
  cluster->add_option("--inner-iterations", cl.inner_iterations)->capture_default_str();
  cluster->add_option("--workers", cl.workers)->capture_default_str();
  cluster->add_option("--out", cl.out, "Output directory")->capture_default_str();
  cluster->add_flag("--raw", cl.raw, "Skip z-normalisation");

  // benchmark
  bench::ExperimentConfig ex;
  fs::path config_file, exclude_file;
  std::string methods, seeds, datasets_list;
  auto* benchmark = app.add_subcommand("benchmark", "Run the shared-initialisation clustering campaign");
  benchmark->add_option("--config", config_file, "key = value config file")->check(CLI::ExistingFile);
  auto* o_datasets = benchmark->add_option("--datasets", ex.datasets_dir, "Directory of <Name>/<Name>_TRAIN.tsv");
  auto* o_only = benchmark->add_option("--only", datasets_list, "Comma separated dataset names");
  auto* o_exclude = benchmark->add_option("--exclude", exclude_file, "File of dataset names to skip");
  auto* o_methods = benchmark->add_option("--methods", methods, "Comma separated couplings");
  auto* o_seeds = benchmark->add_option("--seeds", seeds, "Seed count or comma separated list");
  auto* o_reach = benchmark->add_option("--reach", ex.reach, "ShapeDTW reach (default 30)");
  auto* o_gamma = benchmark->add_option("--gamma", ex.gamma, "Soft-DTW gamma (default 1.0)");
  auto* o_iter = benchmark->add_option("--max-iterations", ex.max_iterations);
  auto* o_inner = benchmark->add_option("--inner-iterations", ex.inner_iterations);
  auto* o_workers = benchmark->add_option("--workers", ex.workers);
  auto* o_out = benchmark->add_option("--out", ex.out_dir, "Output directory");
  auto* o_resume = benchmark->add_flag("--resume", ex.resume, "Skip runs already in results.csv");

  // summarize
  fs::path sum_in, sum_out;
  auto* summarize = app.add_subcommand("summarize", "Write comparison tables from results.csv");
  summarize->add_option("results", sum_in, "Directory holding results.csv")->required();
  summarize->add_option("--out", sum_out, "Output directory (default: the results directory)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*average) {
      avg.config.method = parse_averaging_method(avg_method);
      if (avg_init == "random") {
        avg.config.init = RandomMember{avg_seed};
      } else if (avg_init == "medoid") {
        avg.config.init = Medoid{};
      } else {
        throw InvalidArgument("unknown --init '" + avg_init + "'");
      }
      return run_average(avg);
    }
    if (*cluster) return run_cluster(cl);
    if (*benchmark) {
      // Flags override the config file: apply the file to a copy, then
      // re-apply every flag that was given.
      bench::ExperimentConfig cfg;
      if (!config_file.empty()) bench::apply_config_file(config_file, cfg);
      if (o_datasets->count()) cfg.datasets_dir = ex.datasets_dir;
      if (o_only->count()) {
        cfg.datasets.clear();
        for (auto& d : bench::split(datasets_list, ',')) if (!d.empty()) cfg.datasets.push_back(d);
      }
      if (o_exclude->count()) cfg.excluded = bench::read_name_list(exclude_file);
      if (o_methods->count()) cfg.methods = bench::parse_methods(methods);
      if (o_seeds->count()) cfg.seeds = bench::parse_seeds(seeds);
      if (o_reach->count()) cfg.reach = ex.reach;
      if (o_gamma->count()) cfg.gamma = ex.gamma;
      if (o_iter->count()) cfg.max_iterations = ex.max_iterations;
      if (o_inner->count()) cfg.inner_iterations = ex.inner_iterations;
      if (o_workers->count()) cfg.workers = ex.workers;
      if (o_out->count()) cfg.out_dir = ex.out_dir;
      if (o_resume->count()) cfg.resume = true;
      if (cfg.datasets_dir.empty()) throw InvalidArgument("--datasets is required");
      const ScorePanel panel = bench::run_benchmark(cfg, std::cerr);
      std::cout << panel.records().size() << " records in " << (cfg.out_dir / "results.csv").string() << '\n';
      const auto bad = bench::audit_shared_initialization(cfg.out_dir / "runs_meta.csv");
      if (!bad.empty()) {
        std::cerr << "shared initialisation audit failed for " << bad.size() << " (dataset, seed) cells\n";
        return 2;
      }
      return 0;
    }
    if (*summarize) {
      for (const auto& p : bench::summarize(sum_in, sum_out)) std::cout << p.string() << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
