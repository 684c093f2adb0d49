#include "bridgecast/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace bridgecast {

double mse(const Matrix& pred, const Matrix& truth) {
  if (!pred.same_shape(truth)) throw std::invalid_argument("mse: shape mismatch");
  double acc = 0.0;
  const double* pp = pred.data();
  const double* pt = truth.data();
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double r = pp[i] - pt[i];
    acc += r * r;
  }
  return acc / static_cast<double>(pred.size());
}

double mae(const Matrix& pred, const Matrix& truth) {
  if (!pred.same_shape(truth)) throw std::invalid_argument("mae: shape mismatch");
  double acc = 0.0;
  const double* pp = pred.data();
  const double* pt = truth.data();
  for (std::size_t i = 0; i < pred.size(); ++i) acc += std::fabs(pp[i] - pt[i]);
  return acc / static_cast<double>(pred.size());
}

double crps_empirical(std::span<const double> samples, double y) {
  const std::size_t n = samples.size();
  if (n == 0) throw std::invalid_argument("crps needs at least one sample");
  double term1 = 0.0;
  for (std::size_t i = 0; i < n; ++i) term1 += std::fabs(samples[i] - y);
  double term2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) term2 += std::fabs(samples[i] - samples[j]);
  }
  const double dn = static_cast<double>(n);
  return term1 / dn - term2 / (2.0 * dn * dn);
}

double sample_quantile(std::span<const double> samples, double level) {
  if (samples.empty()) throw std::invalid_argument("quantile of an empty sample set");
  if (level < 0.0 || level > 1.0) throw std::invalid_argument("quantile level outside [0, 1]");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double pos = level * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

double crps_quantile_grid(std::span<const double> samples, double y) {
  if (samples.empty()) throw std::invalid_argument("crps needs at least one sample");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  double acc = 0.0;
  constexpr int kLevels = 19;
  for (int k = 1; k <= kLevels; ++k) {
    const double tau = 0.05 * k;
    const double q = sample_quantile(sorted, tau);
    const double u = y - q;
    const double pinball = u * (tau - (u < 0.0 ? 1.0 : 0.0));
    acc += 2.0 * pinball;
  }
  return acc / kLevels;
}

}  // namespace bridgecast
