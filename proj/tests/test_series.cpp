#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "shapedba/matrix.hpp"
#include "shapedba/parallel.hpp"
#include "shapedba/random.hpp"
#include "shapedba/series.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace shapedba;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "shapedba_series_tests";
  fs::create_directories(dir);
  return dir / name;
}

fs::path write_text(const std::string& name, const std::string& text) {
  const fs::path p = scratch(name);
  std::ofstream(p) << text;
  return p;
}

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(TimeSeries, RejectsEmptyAndNonFinite) {
  EXPECT_THROW(TimeSeries(std::vector<double>{}), DataError);
  EXPECT_THROW(TimeSeries({1.0, std::numeric_limits<double>::quiet_NaN()}), DataError);
  EXPECT_THROW(TimeSeries({std::numeric_limits<double>::infinity()}), DataError);
  const TimeSeries s{1.0, 2.0};
  EXPECT_EQ(s.size(), 2u);
  EXPECT_EQ(s[1], 2.0);
}

TEST(ZNormalize, KnownValues) {
  const TimeSeries z = z_normalize(std::vector<double>{1, 2, 3});
  EXPECT_NEAR(z[0], -1.224745, 1e-6);
  EXPECT_NEAR(z[1], 0.0, 1e-12);
  EXPECT_NEAR(z[2], 1.224745, 1e-6);
}

TEST(ZNormalize, ConstantSeriesMapsToZeros) {
  const TimeSeries z = z_normalize(std::vector<double>{5, 5, 5, 5});
  for (double v : z) EXPECT_EQ(v, 0.0);
}

TEST(ZNormalize, MeanZeroStdOneAndIdempotent) {
  Engine e(11);
  for (int rep = 0; rep < 100; ++rep) {
    const auto x = support::random_values(e, support::random_length(e, 2, 200), 3.0);
    const TimeSeries z = z_normalize(x);
    double mean = 0.0;
    for (double v : z) mean += v;
    mean /= static_cast<double>(z.size());
    double var = 0.0;
    for (double v : z) var += (v - mean) * (v - mean);
    var /= static_cast<double>(z.size());
    EXPECT_NEAR(mean, 0.0, 1e-9);
    EXPECT_NEAR(var, 1.0, 1e-9);
    const TimeSeries zz = z_normalize(z.values());
    for (std::size_t t = 0; t < z.size(); ++t) EXPECT_NEAR(zz[t], z[t], 1e-9);
  }
}

TEST(LoadUcr, ParsesLabelAndSamples) {
  const auto p = write_text("one.tsv", "1\t0.5\t0.3\n");
  const LabeledDataset d = load_ucr_tsv(p);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d.labels()[0], 1);
  EXPECT_EQ(d[0].data(), (std::vector<double>{0.5, 0.3}));
  EXPECT_EQ(d.name(), "one");
}

TEST(LoadUcr, EmptyFileHasNoRecords) {
  const auto p = write_text("empty.tsv", "");
  EXPECT_NE(error_of([&] { load_ucr_tsv(p); }).find("no records"), std::string::npos);
}

TEST(LoadUcr, UnequalLengths) {
  const auto p = write_text("ragged.tsv", "0\t1\t2\t3\t4\t5\n1\t1\t2\t3\t4\t5\t6\t7\n");
  const LabeledDataset d = load_ucr_tsv(p);
  EXPECT_FALSE(d.equal_length());
  EXPECT_EQ(d.max_length(), 7u);
}

TEST(LoadUcr, ReportsLineOfBadValue) {
  const auto p = write_text("bad.tsv", "0\t1\t2\n1\t1\tNaN\n");
  const std::string msg = error_of([&] { load_ucr_tsv(p); });
  EXPECT_NE(msg.find(":2:"), std::string::npos) << msg;
  const auto q = write_text("bad2.tsv", "0\t1\tabc\n");
  EXPECT_NE(error_of([&] { load_ucr_tsv(q); }).find(":1:"), std::string::npos);
  const auto r = write_text("bad3.tsv", "0.5\t1\t2\n");
  EXPECT_THROW(load_ucr_tsv(r), DataError);
  const auto s = write_text("bad4.tsv", "1\n");
  EXPECT_THROW(load_ucr_tsv(s), DataError);
}

TEST(LoadUcr, RoundTripsThroughWriter) {
  Engine e(3);
  std::vector<TimeSeries> series;
  std::vector<int> labels;
  for (int i = 0; i < 10; ++i) {
    series.push_back(support::random_series(e, 5 + static_cast<std::size_t>(i)));
    labels.push_back(i % 3 - 1);
  }
  const LabeledDataset d("rt", series, labels);
  const auto p = scratch("rt.tsv");
  write_ucr_tsv(p, d);
  const LabeledDataset back = load_ucr_tsv(p);
  ASSERT_EQ(back.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    EXPECT_EQ(back[i], d[i]);  // bit-exact
    EXPECT_EQ(back.labels()[i], d.labels()[i]);
  }
}

TEST(LoadUcr, BundledFixturesLoad) {
  const fs::path root = SHAPEDBA_TEST_DATA_DIR "/ucr";
  const LabeledDataset gp = load_ucr_tsv(root / "GunPoint" / "GunPoint_TRAIN.tsv");
  EXPECT_EQ(gp.size(), 50u);
  EXPECT_TRUE(gp.equal_length());
  EXPECT_EQ(gp.max_length(), 150u);
  EXPECT_EQ(gp.distinct_labels(), (std::vector<int>{1, 2}));
}

TEST(Merge, ConcatenatesTrainThenTest) {
  const LabeledDataset a("d", {TimeSeries{1.0}, TimeSeries{2.0}, TimeSeries{3.0}}, {0, 1, 0});
  const LabeledDataset b("d", {TimeSeries{4.0}, TimeSeries{5.0}}, {1, 0});
  std::ostringstream warn;
  const LabeledDataset m = merge_train_test(a, b, &warn);
  EXPECT_EQ(m.size(), 5u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(m[i], a[i]);
  for (std::size_t i = 0; i < 2; ++i) EXPECT_EQ(m[3 + i], b[i]);
  EXPECT_EQ(m.distinct_labels().size(), 2u);
  EXPECT_TRUE(warn.str().empty());
}

TEST(Merge, WarnsOnDifferentLabelSets) {
  const LabeledDataset a("d", {TimeSeries{1.0}}, {0});
  const LabeledDataset b("d", {TimeSeries{4.0}}, {1});
  std::ostringstream warn;
  merge_train_test(a, b, &warn);
  EXPECT_FALSE(warn.str().empty());
}

TEST(Dataset, RequiresRecords) {
  EXPECT_THROW(LabeledDataset("x", {}, {}), DataError);
  EXPECT_THROW(LabeledDataset("x", {TimeSeries{1.0}}, {0, 1}), DataError);
}

TEST(Random, DeterministicAndWithoutReplacement) {
  Engine a = make_engine("GunPoint", 4), b = make_engine("GunPoint", 4);
  EXPECT_EQ(sample_without_replacement(a, 50, 7), sample_without_replacement(b, 50, 7));
  Engine c(1);
  auto all = sample_without_replacement(c, 20, 20);
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < 20; ++i) EXPECT_EQ(all[i], i);
  EXPECT_THROW(sample_without_replacement(c, 3, 4), InvalidArgument);
}

TEST(Random, UniformIndexCoversRange) {
  Engine e(9);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 7000; ++i) ++hits[uniform_index(e, 7)];
  for (int h : hits) EXPECT_GT(h, 800);
}

TEST(Parallel, VisitsEveryIndexOnceAndRethrows) {
  std::vector<int> seen(1000, 0);
  parallel_for(1000, 4, [&](std::size_t i) { seen[i] += 1; });
  EXPECT_EQ(std::accumulate(seen.begin(), seen.end(), 0), 1000);
  EXPECT_THROW(parallel_for(10, 3,
                            [](std::size_t i) {
                              if (i == 5) throw std::runtime_error("boom");
                            }),
               std::runtime_error);
}

TEST(Matrix, RowMajorAccess) {
  Matrix m(2, 3, 0.0);
  m(1, 2) = 4.0;
  EXPECT_EQ(m.row(1)[2], 4.0);
  EXPECT_EQ(m.rows(), 2u);
  EXPECT_EQ(m.cols(), 3u);
}
