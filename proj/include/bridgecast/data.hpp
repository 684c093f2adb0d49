#pragma once

#include <string>
#include <vector>

#include "bridgecast/matrix.hpp"

namespace bridgecast {

struct CsvSchema {
  enum class DateColumn { kAuto, kYes, kNo };
  bool header = true;
  DateColumn date = DateColumn::kAuto;
};

struct Dataset {
  std::vector<std::string> timestamps;  // empty when the file has no date column
  Matrix values;                        // N x d
  std::vector<std::string> channel_names;

  int n() const { return values.rows(); }
  int channels() const { return values.cols(); }
};

// Parses a plain (unquoted) CSV into an N x d matrix of doubles. Any
// non-finite cell is rejected with its row/column location.
Dataset load_csv(const std::string& path, const CsvSchema& schema = {});

struct SplitRatios {
  double train = 0.7;
  double val = 0.1;
  double test = 0.2;
};

struct SplitResult {
  Dataset train, val, test;
};

// Chronological slices. Val and test each start `lookback` rows early so
// every target index inside them has a full history; a zero ratio yields an
// empty dataset, any other split shorter than lookback+horizon is an error.
SplitResult split(const Dataset& ds, const SplitRatios& ratios, int lookback, int horizon);

// Per-channel z-score statistics from the training split only. Constant
// channels get stddev 1 and are flagged.
struct NormStats {
  std::vector<double> mean;
  std::vector<double> stddev;
  std::vector<uint8_t> constant;

  static NormStats from(const Dataset& train);
  bool any_constant() const;
};

Dataset normalize(const Dataset& ds, const NormStats& stats);
Matrix normalize_values(const Matrix& values, const NormStats& stats);
Matrix denormalize(const Matrix& forecast, const NormStats& stats);

// One training/evaluation instance. The first label_len rows of y_star are
// exactly the tail of x; the rest are y.
struct SeriesWindow {
  Matrix x;       // lookback x d
  Matrix y;       // horizon x d
  Matrix y_star;  // (label_len + horizon) x d
};

// Lazy view over all windows of a dataset at the given stride; windows are
// materialized on access.
class WindowSet {
 public:
  WindowSet(const Dataset& ds, int lookback, int horizon, int label_len, int stride);

  int count() const { return count_; }
  int lookback() const { return lookback_; }
  int horizon() const { return horizon_; }
  int label_len() const { return label_len_; }
  int channels() const { return ds_->channels(); }

  SeriesWindow get(int i) const;
  // Truth slice for window i without copying x: the horizon rows.
  Matrix horizon_truth(int i) const { return get(i).y; }

 private:
  const Dataset* ds_;
  int lookback_, horizon_, label_len_, stride_, count_;
};

WindowSet make_windows(const Dataset& ds, int lookback, int horizon, int label_len,
                       int stride = 1);

}  // namespace bridgecast
