#pragma once

#include "bridgecast/data.hpp"
#include "bridgecast/matrix.hpp"

namespace bridgecast {

// One-layer linear map over the time axis, shared across channels. Backs
// both the prior predictor (h = F(x), the bridge endpoint) and the
// conditioner (c = E(x), the guidance signal).
struct LinearMap {
  Matrix weight;  // out_rows x in_rows
  Matrix bias;    // out_rows x 1

  // x: in_rows x d -> out_rows x d, each channel column mapped by the same
  // weight and bias.
  Matrix apply(const Matrix& x) const;
};

// Ridge-regularized least squares over the time axis with channels pooled as
// samples: min |W X + b - Y|^2 + ridge |W|^2 (bias unpenalized), solved by
// Cholesky on the augmented normal equations.
LinearMap fit_prior(const WindowSet& windows, double ridge = 1e-3);

// Ridge objective of a candidate map on the given windows; used by the
// optimality checks.
double ridge_objective(const LinearMap& map, const WindowSet& windows, double ridge);

}  // namespace bridgecast
