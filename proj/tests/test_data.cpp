#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include "bridgecast/data.hpp"
#include "bridgecast/errors.hpp"
#include "testutil.hpp"

using namespace bridgecast;

namespace {

std::string temp_file(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  f << text;
}

}  // namespace

TEST_CASE("load_csv parses a toy file with a date column") {
  const std::string path = temp_file("bc_toy.csv");
  write_file(path, "date,a,b\n2020-01-01,1.5,2\n2020-01-02,-3,4.25\n2020-01-03,0,1e-3\n");
  const Dataset ds = load_csv(path);
  CHECK(ds.n() == 3);
  CHECK(ds.channels() == 2);
  CHECK(ds.channel_names[0] == "a");
  CHECK(ds.values(0, 0) == 1.5);
  CHECK(ds.values(1, 1) == 4.25);
  CHECK(ds.values(2, 1) == 1e-3);
  CHECK(ds.timestamps.size() == 3);
  std::remove(path.c_str());
}

TEST_CASE("load_csv parses a headerless file without dates") {
  const std::string path = temp_file("bc_plain.csv");
  write_file(path, "1,2\n3,4\n");
  CsvSchema schema;
  schema.header = false;
  schema.date = CsvSchema::DateColumn::kNo;
  const Dataset ds = load_csv(path, schema);
  CHECK(ds.n() == 2);
  CHECK(ds.channels() == 2);
  CHECK(ds.channel_names[0] == "ch0");
  std::remove(path.c_str());
}

TEST_CASE("load_csv rejects NaN cells with a row index") {
  const std::string path = temp_file("bc_nan.csv");
  write_file(path, "date,a\n2020,1\n2021,NaN\n2022,3\n");
  try {
    load_csv(path);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("row 1") != std::string::npos);
  }
  std::remove(path.c_str());
}

TEST_CASE("load_csv error paths") {
  CHECK_THROWS_AS(load_csv("/nonexistent/bc.csv"), DataError);
  const std::string path = temp_file("bc_empty.csv");
  write_file(path, "");
  CHECK_THROWS_AS(load_csv(path), DataError);
  write_file(path, "date,a\n2020,xyz\n");
  CHECK_THROWS_AS(load_csv(path), DataError);
  write_file(path, "date,a\n2020\n");
  CHECK_THROWS_AS(load_csv(path), DataError);
  std::remove(path.c_str());
}

TEST_CASE("split follows the lookback-overlap rule") {
  Dataset ds;
  ds.values = Matrix(100, 1);
  for (int i = 0; i < 100; ++i) ds.values(i, 0) = i;
  ds.channel_names = {"a"};

  const SplitResult parts = split(ds, SplitRatios{0.7, 0.1, 0.2}, 10, 5);
  CHECK(parts.train.n() == 70);
  CHECK(parts.val.n() == 20);
  CHECK(parts.test.n() == 30);
  CHECK(parts.train.values(0, 0) == 0.0);
  CHECK(parts.val.values(0, 0) == 60.0);
  CHECK(parts.test.values(0, 0) == 70.0);
  CHECK(parts.test.values(29, 0) == 99.0);

  CHECK_THROWS_AS(split(ds, SplitRatios{0.7, 0.2, 0.2}, 10, 5), std::invalid_argument);
  CHECK_THROWS_AS(split(ds, SplitRatios{0.05, 0.05, 0.9}, 10, 5), std::invalid_argument);

  const SplitResult train_only = split(ds, SplitRatios{1.0, 0.0, 0.0}, 10, 5);
  CHECK(train_only.train.n() == 100);
  CHECK(train_only.val.n() == 0);
  CHECK(train_only.test.n() == 0);
}

TEST_CASE("normalization round-trips and centers the training split") {
  const Dataset ds = [] {
    Dataset d;
    d.values = testutil::synth_series(500, 3);
    d.channel_names = {"a", "b"};
    return d;
  }();
  const NormStats stats = NormStats::from(ds);
  const Dataset normed = normalize(ds, stats);

  for (int c = 0; c < 2; ++c) {
    double mean = 0.0;
    for (int r = 0; r < normed.n(); ++r) mean += normed.values(r, c);
    mean /= normed.n();
    CHECK(std::fabs(mean) < 1e-10);
  }

  const Matrix back = denormalize(normed.values, stats);
  CHECK(max_abs_diff(back, ds.values) < 1e-12);
}

TEST_CASE("constant channels normalize to zero with a flag") {
  Dataset ds;
  ds.values = Matrix(50, 2);
  for (int i = 0; i < 50; ++i) {
    ds.values(i, 0) = 7.25;
    ds.values(i, 1) = i;
  }
  ds.channel_names = {"const", "ramp"};
  const NormStats stats = NormStats::from(ds);
  CHECK(stats.constant[0] == 1);
  CHECK(stats.constant[1] == 0);
  CHECK(stats.stddev[0] == 1.0);
  CHECK(stats.any_constant());
  const Dataset normed = normalize(ds, stats);
  for (int i = 0; i < 50; ++i) CHECK(normed.values(i, 0) == 0.0);
}

TEST_CASE("training statistics differ from val/test statistics on a trending series") {
  Dataset ds;
  ds.values = Matrix(300, 1);
  for (int i = 0; i < 300; ++i) ds.values(i, 0) = 0.05 * i;
  ds.channel_names = {"trend"};
  const SplitResult parts = split(ds, SplitRatios{0.7, 0.1, 0.2}, 10, 5);
  const NormStats train_stats = NormStats::from(parts.train);
  const NormStats test_stats = NormStats::from(parts.test);
  CHECK(std::fabs(train_stats.mean[0] - test_stats.mean[0]) > 1.0);
}

TEST_CASE("window count formula and label extension") {
  Dataset ds;
  ds.values = Matrix(10, 1);
  for (int i = 0; i < 10; ++i) ds.values(i, 0) = i;
  ds.channel_names = {"a"};

  const WindowSet windows = make_windows(ds, 4, 2, 2, 1);
  CHECK(windows.count() == 5);  // N - H - L + 1

  const SeriesWindow w = windows.get(1);
  CHECK(w.x(0, 0) == 1.0);
  CHECK(w.y(0, 0) == 5.0);
  CHECK(w.y(1, 0) == 6.0);
  // First label_len rows of y_star equal the tail of x.
  CHECK(w.y_star(0, 0) == w.x(2, 0));
  CHECK(w.y_star(1, 0) == w.x(3, 0));
  CHECK(w.y_star(2, 0) == w.y(0, 0));
  CHECK(w.y_star(3, 0) == w.y(1, 0));

  const WindowSet no_label = make_windows(ds, 4, 2, 0, 1);
  const SeriesWindow w0 = no_label.get(0);
  CHECK(bitwise_equal(w0.y_star, w0.y));

  CHECK_THROWS_AS(make_windows(ds, 9, 2, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_windows(ds, 4, 2, 4, 1), std::invalid_argument);
}

TEST_CASE("window counts hold across strides and sizes") {
  Rng rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    const int H = 2 + static_cast<int>(rng.uniform_int(0, 6));
    const int L = 1 + static_cast<int>(rng.uniform_int(0, 4));
    const int stride = 1 + static_cast<int>(rng.uniform_int(0, 3));
    const int n = H + L + static_cast<int>(rng.uniform_int(0, 40));
    Dataset ds;
    ds.values = Matrix(n, 1, 1.0);
    ds.channel_names = {"a"};
    const WindowSet windows = make_windows(ds, H, L, 0, stride);
    const int expected = (n - H - L) / stride + 1;
    CHECK(windows.count() == expected);
    // Last window must stay in range.
    const SeriesWindow last = windows.get(windows.count() - 1);
    CHECK(last.y.rows() == L);
  }
}

TEST_CASE("ETTh1 dimensions when the file is available") {
  const char* env = std::getenv("BRIDGECAST_ETTH1");
  std::string path = env != nullptr ? env : "data/ETTh1.csv";
  if (!std::filesystem::exists(path)) {
    MESSAGE("ETTh1 CSV not present; skipping");
    return;
  }
  const Dataset ds = load_csv(path);
  CHECK(ds.n() == 17420);
  CHECK(ds.channels() == 7);
}
