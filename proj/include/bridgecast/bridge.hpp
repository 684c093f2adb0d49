#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "bridgecast/data.hpp"
#include "bridgecast/matrix.hpp"
#include "bridgecast/neural.hpp"
#include "bridgecast/priors.hpp"
#include "bridgecast/rng.hpp"
#include "bridgecast/schedule.hpp"

namespace bridgecast {

struct BridgeProcess {
  BridgeSchedule schedule;
  VariancePolicy policy;
  int label_len = 0;
};

struct ForecastResult {
  std::optional<Matrix> point;   // set when s = 0
  std::vector<Matrix> samples;   // set when s > 0
  int horizon_begin = 0;         // first horizon row inside the state matrices

  // Final horizon rows of a state matrix.
  Matrix horizon_slice(const Matrix& state) const;
};

// Mean alpha_t y0 + (1 - alpha_t) h and isotropic variance 2 alpha_t (1 - alpha_t).
std::pair<Matrix, double> forward_marginal(const Matrix& y0, const Matrix& h, int t,
                                           const BridgeProcess& proc);

// mean + sqrt(var) * eps with (mean, var) from forward_marginal. Exact at the
// endpoints: t = 0 returns y0, t = T returns h.
Matrix corrupt(const Matrix& y0, const Matrix& h, int t, const BridgeProcess& proc,
               const Matrix& eps);

// kappa y_t + lambda y_hat + zeta h + sqrt(sigma2) z; z may be null only when
// sigma2 = 0 and is then treated as zero.
Matrix reverse_step(const Matrix& y_t, const Matrix& y_hat, const Matrix& h,
                    const ReverseCoefficients& coeffs, const Matrix* z);

// Data-prediction callback: (y_t, h, c, t) -> y_hat of matching shape.
using DenoiserFn = std::function<Matrix(const Matrix&, const Matrix&, const Matrix&, int)>;

// Full reverse chain from y_T = h down to t = 0. Noise is drawn per step for
// t > 1 and forced to zero at t = 1. With s = 0 the single deterministic
// chain fills `point`; otherwise n_samples independent chains (stream i
// seeded from (seed, i)) fill `samples`. Chains may fan out over n_threads;
// results do not depend on the thread count.
ForecastResult sample_forecast(const DenoiserFn& denoiser, const Matrix& h, const Matrix& c,
                               const BridgeProcess& proc, int n_samples, uint64_t seed,
                               int n_threads = 1);

// One gradient accumulation pass over a batch: per window draw t and eps,
// corrupt y_star toward h = prior(x), run the denoiser conditioned on
// c = conditioner(x), and accumulate d(loss)/d(params) into the denoiser and
// conditioner gradient buffers (conditioner skipped when freeze_conditioner).
// h is a constant for gradient purposes. Returns the mean loss; throws
// NumericError on a non-finite loss with parameters untouched.
double training_step(const std::vector<const SeriesWindow*>& batch, Denoiser& denoiser,
                     const LinearMap& conditioner, Matrix& cond_grad_weight,
                     Matrix& cond_grad_bias, const LinearMap& prior, const BridgeProcess& proc,
                     LossKind loss_kind, Rng& rng, bool freeze_conditioner = false);

// Forward-only mean loss of the denoiser on the given windows; steps are
// cycled deterministically (t = 1 + i mod T) and eps comes from rng.
double denoising_loss(const std::vector<const SeriesWindow*>& windows, const Denoiser& denoiser,
                      const LinearMap& conditioner, const LinearMap& prior,
                      const BridgeProcess& proc, LossKind loss_kind, Rng& rng);

}  // namespace bridgecast
