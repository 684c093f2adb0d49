#pragma once

#include <optional>
#include <span>

#include "bridgecast/matrix.hpp"

namespace bridgecast {

struct ScoreReport {
  double mse = 0.0;
  double mae = 0.0;
  std::optional<double> crps;
  std::optional<double> crps_sum;
  long n_windows = 0;
  long n_samples = 0;
};

// Element means over matching shapes.
double mse(const Matrix& pred, const Matrix& truth);
double mae(const Matrix& pred, const Matrix& truth);

// Energy-form estimator for one scalar cell:
//   (1/n) sum_i |x_i - y| - (1/(2 n^2)) sum_ij |x_i - x_j|.
// Written as the literal double sum so tiny-n results match a brute-force
// loop bitwise.
double crps_empirical(std::span<const double> samples, double y);

// Quantile-grid approximation over 19 levels 0.05..0.95 via pinball losses;
// cross-check against CSDI-convention numbers.
double crps_quantile_grid(std::span<const double> samples, double y);

// Linear-interpolation empirical quantile of an unsorted sample set.
double sample_quantile(std::span<const double> samples, double level);

}  // namespace bridgecast
