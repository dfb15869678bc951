#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "shapedba/clustering.hpp"
#include "shapedba/evaluation.hpp"
#include "support.hpp"

using namespace shapedba;

namespace {

LabeledDataset counting_dataset(std::size_t n) {
  std::vector<TimeSeries> s;
  std::vector<int> l;
  for (std::size_t i = 0; i < n; ++i) {
    s.push_back(TimeSeries{static_cast<double>(i)});
    l.push_back(static_cast<int>(i % 2));
  }
  return LabeledDataset("Fixture", std::move(s), std::move(l));
}

/// Two classes: an upward sine burst early, or a downward one late. Offset
/// alone would not do, unconstrained warping absorbs it.
LabeledDataset separated_bursts(std::size_t per_class, std::size_t length, std::uint64_t seed) {
  constexpr double kPi = 3.14159265358979323846;
  Engine e(seed);
  std::vector<TimeSeries> s;
  std::vector<int> l;
  for (std::size_t i = 0; i < 2 * per_class; ++i) {
    const int c = static_cast<int>(i % 2);
    const std::size_t start = c == 0 ? length / 10 : 6 * length / 10;
    std::vector<double> v(length);
    for (std::size_t t = 0; t < length; ++t) {
      const double u = (static_cast<double>(t) - static_cast<double>(start)) / (0.25 * static_cast<double>(length));
      const double polarity = c == 0 ? 1.0 : -1.0;
      v[t] = (u >= 0.0 && u <= 1.0 ? polarity * std::sin(2.0 * kPi * u) : 0.0) + 0.05 * standard_normal(e);
    }
    s.push_back(z_normalize(v));
    l.push_back(c);
  }
  return LabeledDataset("Bursts", std::move(s), std::move(l));
}

bool same_result(const ClusteringResult& a, const ClusteringResult& b) {
  return a.assignments == b.assignments && a.centroids == b.centroids && a.inertia_trace == b.inertia_trace &&
         a.iterations_run == b.iterations_run && a.converged == b.converged &&
         a.initial_indices == b.initial_indices;
}

}  // namespace

TEST(InitClusters, DeterministicAndDistinct) {
  const LabeledDataset d = counting_dataset(100);
  EXPECT_EQ(init_clusters(d, 5, 7), init_clusters(d, 5, 7));
  auto idx = init_clusters(d, 5, 7);
  std::sort(idx.begin(), idx.end());
  EXPECT_EQ(std::adjacent_find(idx.begin(), idx.end()), idx.end());
}

TEST(InitClusters, FullDrawIsPermutation) {
  const LabeledDataset d = counting_dataset(30);
  auto idx = init_clusters(d, 30, 3);
  std::sort(idx.begin(), idx.end());
  for (std::size_t i = 0; i < 30; ++i) EXPECT_EQ(idx[i], i);
  EXPECT_THROW(init_clusters(d, 31, 3), InvalidArgument);
  EXPECT_THROW(init_clusters(d, 0, 3), InvalidArgument);
}

TEST(InitClusters, SeedFixture) {
  const LabeledDataset d = counting_dataset(100);
  const auto a = init_clusters(d, 5, 0);
  const auto b = init_clusters(d, 5, 1);
  EXPECT_EQ(a, (std::vector<std::size_t>{66, 91, 56, 52, 99}));
  EXPECT_EQ(b, (std::vector<std::size_t>{72, 99, 15, 49, 82}));
  EXPECT_NE(a, b);
}

TEST(InitClusters, IndependentOfCoupling) {
  const LabeledDataset d = support::warped_sines(5, 40, 0.1, 1);
  for (Coupling c : kAllCouplings) {
    ClusteringConfig cfg;
    cfg.coupling = c;
    cfg.seed = 4;
    cfg.max_iterations = 0;
    cfg.reach = 5;
    const auto r = kmeans(d, cfg);
    EXPECT_EQ(r.initial_indices, init_clusters(d, 3, 4)) << to_string(c);
    ASSERT_EQ(r.centroids.size(), 3u);
    for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(r.centroids[k], d[r.initial_indices[k]]);
  }
}

TEST(Assign, NearestWithLowestIdOnTies) {
  const std::vector<TimeSeries> series{TimeSeries{0.0}, TimeSeries{1.0}, TimeSeries{2.0}};
  const std::vector<TimeSeries> cent{TimeSeries{0.5}, TimeSeries{1.5}, TimeSeries{0.5}};
  const auto a = detail::assign(series, cent, Metric::euclidean(), 1);
  // series 0 and 1 tie on 0 and 2 and both go to 0; the repair of the empty
  // cluster 2 takes the lowest-index member among the equally farthest
  EXPECT_TRUE(a.repaired);
  EXPECT_EQ(a.labels, (std::vector<std::size_t>{2, 0, 1}));
  std::vector<std::size_t> sizes(3, 0);
  for (auto l : a.labels) ++sizes[l];
  for (auto s : sizes) EXPECT_EQ(s, 1u);
}

TEST(Assign, RepairMovesFarthestMember) {
  const std::vector<TimeSeries> series{TimeSeries{0.0}, TimeSeries{0.1}, TimeSeries{5.0}, TimeSeries{5.2},
                                       TimeSeries{9.0}};
  const std::vector<TimeSeries> cent{TimeSeries{0.0}, TimeSeries{5.0}, TimeSeries{100.0}};
  const auto a = detail::assign(series, cent, Metric::euclidean(), 1);
  EXPECT_TRUE(a.repaired);
  EXPECT_EQ(a.labels, (std::vector<std::size_t>{0, 0, 1, 1, 2}));
}

TEST(Kmeans, SeparatedBurstsShapeDba) {
  const LabeledDataset d = separated_bursts(20, 80, 3);
  ClusteringConfig cfg;
  cfg.k = 2;
  cfg.coupling = Coupling::shape_dba;
  cfg.reach = 10;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    cfg.seed = seed;
    const auto r = kmeans(d, cfg);
    EXPECT_DOUBLE_EQ(adjusted_rand_index(d.labels(), r.assignments), 1.0) << "seed " << seed;
  }
}

TEST(Kmeans, SingleClusterGetsCouplingAverage) {
  const LabeledDataset d = support::warped_sines(4, 30, 0.1, 2);
  const std::span<const TimeSeries> all(d.series());
  for (Coupling c : {Coupling::med, Coupling::dba, Coupling::soft_dba, Coupling::shape_dba}) {
    ClusteringConfig cfg;
    cfg.k = 1;
    cfg.coupling = c;
    cfg.reach = 5;
    const auto r = kmeans(d, cfg);
    EXPECT_TRUE(std::all_of(r.assignments.begin(), r.assignments.end(), [](auto v) { return v == 0; }));
    AveragingConfig ac;
    ac.max_iterations = cfg.inner_iterations;
    ac.tolerance = cfg.inner_tolerance;
    ac.reach = cfg.reach;
    ac.gamma = cfg.gamma;
    ac.init = ProvidedSeries{d[r.initial_indices[0]]};
    TimeSeries expected = arithmetic_mean(all);
    if (c == Coupling::dba) expected = dba(all, ac).average;
    if (c == Coupling::soft_dba) expected = soft_dba(all, ac).average;
    if (c == Coupling::shape_dba) expected = shape_dba(all, ac).average;
    ASSERT_EQ(r.iterations_run, 1u) << to_string(c);
    EXPECT_EQ(r.centroids[0], expected) << to_string(c);
    EXPECT_TRUE(r.converged);
  }
}

TEST(Kmeans, DeterministicAcrossRunsAndWorkers) {
  const LabeledDataset d = support::warped_sines(6, 40, 0.2, 5);
  for (Coupling c : kAllCouplings) {
    ClusteringConfig cfg;
    cfg.coupling = c;
    cfg.reach = 5;
    cfg.seed = 9;
    const auto a = kmeans(d, cfg);
    const auto b = kmeans(d, cfg);
    cfg.workers = 3;
    const auto w = kmeans(d, cfg);
    EXPECT_TRUE(same_result(a, b)) << to_string(c);
    EXPECT_TRUE(same_result(a, w)) << to_string(c);
    EXPECT_EQ(a.inertia_trace.size(), a.iterations_run + 1);
    EXPECT_EQ(a.inertia, a.inertia_trace.back());
    EXPECT_GE(a.runtime_seconds, a.assign_seconds + a.update_seconds - 1e-6);
  }
}

TEST(Kmeans, ConfigErrors) {
  const LabeledDataset d = support::warped_sines(3, 20, 0.1, 1);
  ClusteringConfig cfg;
  cfg.initial_centroid_indices = std::vector<std::size_t>{0, 0, 1};
  EXPECT_THROW(kmeans(d, cfg), InvalidArgument);
  cfg.initial_centroid_indices = std::vector<std::size_t>{0, 1};
  EXPECT_THROW(kmeans(d, cfg), InvalidArgument);
  cfg.initial_centroid_indices = std::vector<std::size_t>{0, 1, 99};
  EXPECT_THROW(kmeans(d, cfg), InvalidArgument);
  cfg.initial_centroid_indices.reset();
  cfg.k = 100;
  EXPECT_THROW(kmeans(d, cfg), InvalidArgument);

  const LabeledDataset ragged("r", {TimeSeries{1.0, 2.0}, TimeSeries{1.0, 2.0, 3.0}}, {0, 1});
  ClusteringConfig rc;
  rc.coupling = Coupling::med;
  EXPECT_THROW(kmeans(ragged, rc), InvalidArgument);
  rc.coupling = Coupling::kshape;
  EXPECT_THROW(kmeans(ragged, rc), InvalidArgument);
  rc.coupling = Coupling::dba;
  EXPECT_NO_THROW(kmeans(ragged, rc));
}

TEST(Coupling, NamesRoundTrip) {
  for (Coupling c : kAllCouplings) EXPECT_EQ(parse_coupling(to_string(c)), c);
  EXPECT_EQ(parse_coupling("shapedba"), Coupling::shape_dba);
  EXPECT_THROW(parse_coupling("kmedoids"), InvalidArgument);
}

TEST(KShape, PhaseShiftedClasses) {
  const LabeledDataset d = support::phase_shifted_classes(15, 100, 1);
  // same waveform in both classes: SBD sees them as near-identical, so this
  // checks shift invariance of the distance rather than separation
  const double within = sbd(d[0], d[2]).distance;
  const double across = sbd(d[0], d[1]).distance;
  EXPECT_LT(across, 0.05);
  EXPECT_LT(within, 0.05);
}

TEST(KShape, SeparatesDistinctShapes) {
  const LabeledDataset d = separated_bursts(15, 80, 7);
  // a burst and its negation: distinct shapes wherever they sit
  std::vector<TimeSeries> s;
  std::vector<int> l;
  for (std::size_t i = 0; i < d.size(); ++i) {
    std::vector<double> v = d[i].data();
    if (i % 2) {
      for (double& x : v) x = x * x * (x > 0 ? 1.0 : -1.0);
    }
    s.push_back(z_normalize(v));
    l.push_back(static_cast<int>(i % 2));
  }
  const LabeledDataset shapes("Shapes", s, l);
  ClusteringConfig cfg;
  cfg.k = 2;
  const auto r = kshape(shapes, cfg);
  EXPECT_DOUBLE_EQ(adjusted_rand_index(shapes.labels(), r.assignments), 1.0);
}

TEST(KShape, RankOneCentroid) {
  Engine e(3);
  const TimeSeries x = z_normalize(support::random_values(e, 32));
  const std::vector<TimeSeries> copies(6, x);
  for (const TimeSeries& prev : {TimeSeries(std::vector<double>(32, 0.0)), x}) {
    const TimeSeries c = shape_extraction(copies, prev);
    double dot = 0.0, nc = 0.0, nx = 0.0;
    for (std::size_t t = 0; t < 32; ++t) {
      dot += c[t] * x[t];
      nc += c[t] * c[t];
      nx += x[t] * x[t];
    }
    EXPECT_NEAR(std::abs(dot) / std::sqrt(nc * nx), 1.0, 1e-9);
  }
}

TEST(KShape, Deterministic) {
  const LabeledDataset d = support::warped_sines(5, 50, 0.1, 8);
  ClusteringConfig cfg;
  cfg.coupling = Coupling::kshape;
  cfg.seed = 2;
  EXPECT_TRUE(same_result(kmeans(d, cfg), kmeans(d, cfg)));
}
