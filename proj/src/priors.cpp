#include "bridgecast/priors.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "bridgecast/errors.hpp"

namespace bridgecast {

Matrix LinearMap::apply(const Matrix& x) const {
  if (x.rows() != weight.cols()) {
    throw std::invalid_argument("linear map expects " + std::to_string(weight.cols()) +
                                " input rows, got " + std::to_string(x.rows()));
  }
  const int out_rows = weight.rows();
  const int d = x.cols();
  Matrix out(out_rows, d);
  for (int i = 0; i < out_rows; ++i) {
    const double* w = weight.row(i);
    double* o = out.row(i);
    for (int c = 0; c < d; ++c) o[c] = bias(i, 0);
    for (int k = 0; k < x.rows(); ++k) {
      const double wk = w[k];
      const double* xr = x.row(k);
      for (int c = 0; c < d; ++c) o[c] += wk * xr[c];
    }
  }
  return out;
}

namespace {

// In-place lower Cholesky of a dense symmetric positive-definite matrix.
void cholesky(std::vector<double>& a, int n) {
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double sum = a[static_cast<std::size_t>(i) * n + j];
      for (int k = 0; k < j; ++k) {
        sum -= a[static_cast<std::size_t>(i) * n + k] * a[static_cast<std::size_t>(j) * n + k];
      }
      if (i == j) {
        if (sum <= 0.0) throw NumericError("normal equations are not positive definite");
        a[static_cast<std::size_t>(i) * n + j] = std::sqrt(sum);
      } else {
        a[static_cast<std::size_t>(i) * n + j] = sum / a[static_cast<std::size_t>(j) * n + j];
      }
    }
  }
}

void cholesky_solve(const std::vector<double>& l, int n, std::vector<double>& rhs) {
  for (int i = 0; i < n; ++i) {
    double sum = rhs[static_cast<std::size_t>(i)];
    for (int k = 0; k < i; ++k) sum -= l[static_cast<std::size_t>(i) * n + k] * rhs[static_cast<std::size_t>(k)];
    rhs[static_cast<std::size_t>(i)] = sum / l[static_cast<std::size_t>(i) * n + i];
  }
  for (int i = n - 1; i >= 0; --i) {
    double sum = rhs[static_cast<std::size_t>(i)];
    for (int k = i + 1; k < n; ++k) sum -= l[static_cast<std::size_t>(k) * n + i] * rhs[static_cast<std::size_t>(k)];
    rhs[static_cast<std::size_t>(i)] = sum / l[static_cast<std::size_t>(i) * n + i];
  }
}

}  // namespace

LinearMap fit_prior(const WindowSet& windows, double ridge) {
  if (windows.count() < 1) throw std::invalid_argument("fitting requires at least one window");
  if (!(ridge > 0.0)) throw std::invalid_argument("ridge must be positive");

  const int in_rows = windows.lookback();
  const int out_rows = windows.label_len() + windows.horizon();
  const int n = in_rows + 1;  // augmented with the bias column

  // A = sum u_aug u_aug^T (+ ridge on the weight block), B = sum u_aug v^T.
  std::vector<double> a(static_cast<std::size_t>(n) * n, 0.0);
  std::vector<double> b(static_cast<std::size_t>(n) * out_rows, 0.0);
  std::vector<double> u(static_cast<std::size_t>(n), 0.0);
  u[static_cast<std::size_t>(in_rows)] = 1.0;

  for (int wi = 0; wi < windows.count(); ++wi) {
    const SeriesWindow w = windows.get(wi);
    if (!w.x.all_finite() || !w.y_star.all_finite()) {
      throw std::invalid_argument("non-finite values in training window " + std::to_string(wi));
    }
    for (int c = 0; c < w.x.cols(); ++c) {
      for (int k = 0; k < in_rows; ++k) u[static_cast<std::size_t>(k)] = w.x(k, c);
      for (int i = 0; i < n; ++i) {
        const double ui = u[static_cast<std::size_t>(i)];
        double* row = a.data() + static_cast<std::size_t>(i) * n;
        for (int j = 0; j <= i; ++j) row[j] += ui * u[static_cast<std::size_t>(j)];
      }
      for (int i = 0; i < n; ++i) {
        const double ui = u[static_cast<std::size_t>(i)];
        double* row = b.data() + static_cast<std::size_t>(i) * out_rows;
        for (int o = 0; o < out_rows; ++o) row[o] += ui * w.y_star(o, c);
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      a[static_cast<std::size_t>(i) * n + j] = a[static_cast<std::size_t>(j) * n + i];
    }
  }
  for (int i = 0; i < in_rows; ++i) a[static_cast<std::size_t>(i) * n + i] += ridge;

  cholesky(a, n);

  LinearMap map;
  map.weight = Matrix(out_rows, in_rows);
  map.bias = Matrix(out_rows, 1);
  std::vector<double> rhs(static_cast<std::size_t>(n));
  for (int o = 0; o < out_rows; ++o) {
    for (int i = 0; i < n; ++i) rhs[static_cast<std::size_t>(i)] = b[static_cast<std::size_t>(i) * out_rows + o];
    cholesky_solve(a, n, rhs);
    for (int k = 0; k < in_rows; ++k) map.weight(o, k) = rhs[static_cast<std::size_t>(k)];
    map.bias(o, 0) = rhs[static_cast<std::size_t>(in_rows)];
  }
  return map;
}

double ridge_objective(const LinearMap& map, const WindowSet& windows, double ridge) {
  double obj = 0.0;
  for (int wi = 0; wi < windows.count(); ++wi) {
    const SeriesWindow w = windows.get(wi);
    const Matrix pred = map.apply(w.x);
    for (int r = 0; r < pred.rows(); ++r) {
      for (int c = 0; c < pred.cols(); ++c) {
        const double e = pred(r, c) - w.y_star(r, c);
        obj += e * e;
      }
    }
  }
  for (int i = 0; i < map.weight.rows(); ++i) {
    for (int j = 0; j < map.weight.cols(); ++j) {
      obj += ridge * map.weight(i, j) * map.weight(i, j);
    }
  }
  return obj;
}

}  // namespace bridgecast
