#include "bridgecast/data.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "bridgecast/errors.hpp"

namespace bridgecast {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool parse_double(const std::string& s, double* out) {
  const char* begin = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin) return false;
  while (*end == ' ' || *end == '\t') ++end;
  if (*end != '\0') return false;
  *out = v;
  return true;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

Dataset load_csv(const std::string& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);

  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    strip_cr(line);
    if (!line.empty()) lines.push_back(line);
  }
  if (lines.empty()) throw DataError(path + " is empty");

  std::size_t first_data = schema.header ? 1 : 0;
  if (lines.size() <= first_data) throw DataError(path + " has no data rows");

  const std::vector<std::string> probe = split_line(lines[first_data]);
  if (probe.empty()) throw DataError(path + ": empty data row");
  if (schema.header) {
    const std::size_t head_width = split_line(lines[0]).size();
    if (probe.size() != head_width) {
      throw DataError(path + ": header has " + std::to_string(head_width) +
                      " columns but row 0 has " + std::to_string(probe.size()));
    }
  }

  bool has_date = false;
  switch (schema.date) {
    case CsvSchema::DateColumn::kYes:
      has_date = true;
      break;
    case CsvSchema::DateColumn::kNo:
      has_date = false;
      break;
    case CsvSchema::DateColumn::kAuto: {
      double tmp;
      has_date = !parse_double(probe[0], &tmp);
      break;
    }
  }
  if (has_date && probe.size() < 2) {
    throw DataError(path + ": a file with a date column needs at least 2 columns");
  }

  const int d = static_cast<int>(probe.size()) - (has_date ? 1 : 0);
  const int n = static_cast<int>(lines.size() - first_data);

  Dataset ds;
  ds.values = Matrix(n, d);
  if (schema.header) {
    std::vector<std::string> head = split_line(lines[0]);
    for (std::size_t j = has_date ? 1 : 0; j < head.size() && static_cast<int>(j) < d + (has_date ? 1 : 0); ++j) {
      ds.channel_names.push_back(head[j]);
    }
  }
  while (static_cast<int>(ds.channel_names.size()) < d) {
    ds.channel_names.push_back("ch" + std::to_string(ds.channel_names.size()));
  }

  for (int r = 0; r < n; ++r) {
    const std::vector<std::string> cells = split_line(lines[first_data + static_cast<std::size_t>(r)]);
    if (static_cast<int>(cells.size()) != d + (has_date ? 1 : 0)) {
      throw DataError(path + ": row " + std::to_string(r) + " has " +
                      std::to_string(cells.size()) + " cells, expected " +
                      std::to_string(d + (has_date ? 1 : 0)));
    }
    if (has_date) ds.timestamps.push_back(cells[0]);
    for (int c = 0; c < d; ++c) {
      double v;
      const std::string& cell = cells[static_cast<std::size_t>(c) + (has_date ? 1 : 0)];
      if (!parse_double(cell, &v)) {
        throw DataError(path + ": row " + std::to_string(r) + " col " + std::to_string(c) +
                        ": cannot parse '" + cell + "'");
      }
      if (!std::isfinite(v)) {
        throw DataError(path + ": row " + std::to_string(r) + " col " + std::to_string(c) +
                        ": non-finite value");
      }
      ds.values(r, c) = v;
    }
  }
  return ds;
}

namespace {

Dataset slice(const Dataset& ds, int begin, int end) {
  Dataset out;
  out.channel_names = ds.channel_names;
  const int d = ds.channels();
  out.values = Matrix(end - begin, d);
  for (int r = begin; r < end; ++r) {
    for (int c = 0; c < d; ++c) out.values(r - begin, c) = ds.values(r, c);
    if (!ds.timestamps.empty()) out.timestamps.push_back(ds.timestamps[static_cast<std::size_t>(r)]);
  }
  return out;
}

}  // namespace

SplitResult split(const Dataset& ds, const SplitRatios& ratios, int lookback, int horizon) {
  if (!(ratios.train > 0.0) || ratios.val < 0.0 || ratios.test < 0.0) {
    throw std::invalid_argument("split ratios must be positive (train) / non-negative (val, test)");
  }
  if (ratios.train + ratios.val + ratios.test > 1.0 + 1e-9) {
    throw std::invalid_argument("split ratios must sum to at most 1");
  }
  if (lookback < 1 || horizon < 1) throw std::invalid_argument("lookback and horizon must be >= 1");

  const int n = ds.n();
  const int n_train = static_cast<int>(n * ratios.train);
  const int n_val = static_cast<int>(n * ratios.val);
  const int n_test = static_cast<int>(n * ratios.test);

  SplitResult out;
  if (n_train < lookback + horizon) {
    throw std::invalid_argument("train split shorter than lookback+horizon");
  }
  out.train = slice(ds, 0, n_train);
  if (n_val > 0) {
    const int begin = n_train - lookback;
    const int end = n_train + n_val;
    if (end - begin < lookback + horizon) {
      throw std::invalid_argument("val split shorter than lookback+horizon");
    }
    out.val = slice(ds, begin, end);
  }
  if (n_test > 0) {
    const int begin = n_train + n_val - lookback;
    const int end = std::min(n, n_train + n_val + n_test);
    if (end - begin < lookback + horizon) {
      throw std::invalid_argument("test split shorter than lookback+horizon");
    }
    out.test = slice(ds, begin, end);
  }
  out.val.channel_names = ds.channel_names;
  out.test.channel_names = ds.channel_names;
  return out;
}

NormStats NormStats::from(const Dataset& train) {
  const int n = train.n();
  const int d = train.channels();
  if (n < 1) throw std::invalid_argument("cannot compute statistics of an empty split");
  NormStats st;
  st.mean.assign(static_cast<std::size_t>(d), 0.0);
  st.stddev.assign(static_cast<std::size_t>(d), 0.0);
  st.constant.assign(static_cast<std::size_t>(d), 0);
  for (int c = 0; c < d; ++c) {
    double s = 0.0;
    for (int r = 0; r < n; ++r) s += train.values(r, c);
    st.mean[static_cast<std::size_t>(c)] = s / n;
  }
  for (int c = 0; c < d; ++c) {
    double s = 0.0;
    for (int r = 0; r < n; ++r) {
      const double dlt = train.values(r, c) - st.mean[static_cast<std::size_t>(c)];
      s += dlt * dlt;
    }
    double sd = std::sqrt(s / n);
    if (sd == 0.0) {
      sd = 1.0;
      st.constant[static_cast<std::size_t>(c)] = 1;
    }
    st.stddev[static_cast<std::size_t>(c)] = sd;
  }
  return st;
}

bool NormStats::any_constant() const {
  for (uint8_t f : constant) {
    if (f) return true;
  }
  return false;
}

Matrix normalize_values(const Matrix& values, const NormStats& stats) {
  if (values.cols() != static_cast<int>(stats.mean.size())) {
    throw std::invalid_argument("channel count does not match normalization statistics");
  }
  Matrix out(values.rows(), values.cols());
  for (int r = 0; r < values.rows(); ++r) {
    for (int c = 0; c < values.cols(); ++c) {
      out(r, c) = (values(r, c) - stats.mean[static_cast<std::size_t>(c)]) /
                  stats.stddev[static_cast<std::size_t>(c)];
    }
  }
  return out;
}

Dataset normalize(const Dataset& ds, const NormStats& stats) {
  Dataset out;
  out.timestamps = ds.timestamps;
  out.channel_names = ds.channel_names;
  out.values = normalize_values(ds.values, stats);
  return out;
}

Matrix denormalize(const Matrix& forecast, const NormStats& stats) {
  if (forecast.cols() != static_cast<int>(stats.mean.size())) {
    throw std::invalid_argument("channel count does not match normalization statistics");
  }
  Matrix out(forecast.rows(), forecast.cols());
  for (int r = 0; r < forecast.rows(); ++r) {
    for (int c = 0; c < forecast.cols(); ++c) {
      out(r, c) = forecast(r, c) * stats.stddev[static_cast<std::size_t>(c)] +
                  stats.mean[static_cast<std::size_t>(c)];
    }
  }
  return out;
}

WindowSet::WindowSet(const Dataset& ds, int lookback, int horizon, int label_len, int stride)
    : ds_(&ds), lookback_(lookback), horizon_(horizon), label_len_(label_len), stride_(stride) {
  if (lookback < 1 || horizon < 1) throw std::invalid_argument("lookback and horizon must be >= 1");
  if (label_len < 0 || label_len >= lookback) {
    throw std::invalid_argument("label_len must lie in [0, lookback)");
  }
  if (stride < 1) throw std::invalid_argument("stride must be >= 1");
  const int usable = ds.n() - lookback - horizon + 1;
  if (usable <= 0) {
    throw std::invalid_argument("dataset has " + std::to_string(ds.n()) +
                                " rows, fewer than lookback+horizon");
  }
  count_ = (usable - 1) / stride + 1;
}

SeriesWindow WindowSet::get(int i) const {
  if (i < 0 || i >= count_) throw std::invalid_argument("window index out of range");
  const int start = i * stride_;
  const int d = ds_->channels();
  SeriesWindow w;
  w.x = Matrix(lookback_, d);
  w.y = Matrix(horizon_, d);
  w.y_star = Matrix(label_len_ + horizon_, d);
  for (int r = 0; r < lookback_; ++r) {
    for (int c = 0; c < d; ++c) w.x(r, c) = ds_->values(start + r, c);
  }
  for (int r = 0; r < horizon_; ++r) {
    for (int c = 0; c < d; ++c) w.y(r, c) = ds_->values(start + lookback_ + r, c);
  }
  for (int r = 0; r < label_len_ + horizon_; ++r) {
    const int src = start + lookback_ - label_len_ + r;
    for (int c = 0; c < d; ++c) w.y_star(r, c) = ds_->values(src, c);
  }
  return w;
}

WindowSet make_windows(const Dataset& ds, int lookback, int horizon, int label_len, int stride) {
  return WindowSet(ds, lookback, horizon, label_len, stride);
}

}  // namespace bridgecast
