#pragma once

#include <string>
#include <vector>

namespace bridgecast {

// Scale on the reverse transition variance. s = 0 removes all sampling noise
// (deterministic point forecasts); s = 2 matches the DDPM-style posterior
// variance and backs the probabilistic preset.
struct VariancePolicy {
  double s = 0.0;
};

// Affine weights of one reverse transition:
//   y_{t-1} = kappa * y_t + lambda * y_hat + zeta * h + sqrt(sigma2) * z
struct ReverseCoefficients {
  double kappa = 0.0;
  double lambda = 0.0;
  double zeta = 0.0;
  double sigma2 = 0.0;
};

// Brownian-bridge coefficient table between the data (t = 0, alpha_hat = 1)
// and the prior forecast h (t = T, alpha_hat = 0). alpha_hat is strictly
// decreasing; the marginal noise scale is beta_hat = sqrt(2 a (1-a)), zero at
// both endpoints. All values are precomputed; per-step queries are lookups.
class BridgeSchedule {
 public:
  // alpha_hat[t] = (T - t) / T.
  static BridgeSchedule linear(int steps);

  int steps() const { return static_cast<int>(alpha_.size()) - 1; }
  double alpha_hat(int t) const;
  double beta_hat(int t) const;
  double beta_hat_sq(int t) const;  // 2 a (1-a) without the sqrt round-trip

  // Reverse variance at step t in [1, T]:
  //   s * (1 - a_{t-1}) (a_{t-1} - a_t) / (1 - a_t),
  // which at t = T (a_T = 0) evaluates to s * a_{T-1} (1 - a_{T-1}) and is
  // clamped there to [0, beta_hat_sq(T-1)].
  double sigma2(int t, const VariancePolicy& policy) const;

  // Solves the coefficient-matching system for step t in [1, T].
  //   t in [1, T-1]: kappa = sqrt((bsq_{t-1} - sigma2_t) / bsq_t),
  //                  lambda = a_{t-1} - a_t kappa,
  //                  zeta   = 1 - a_{t-1} - kappa (1 - a_t).
  //   s == 2 admits the closed form kappa = (1-a_{t-1})/(1-a_t),
  //                  lambda = (a_{t-1}-a_t)/(1-a_t), zeta = 0 (exact).
  //   t == T: beta_hat_T = 0 and y_T = h with no variance, so the first
  //   reverse step targets the forward marginal at T-1 directly:
  //                  kappa = 0, lambda = a_{T-1}, zeta = 1 - a_{T-1}.
  // Throws NumericError when sigma2 exceeds bsq_{t-1} beyond tolerance.
  ReverseCoefficients reverse_coefficients(int t, const VariancePolicy& policy) const;

 private:
  explicit BridgeSchedule(std::vector<double> alpha);
  void check_step(int t, int lo) const;

  std::vector<double> alpha_;    // length T+1
  std::vector<double> beta_sq_;  // length T+1
};

// One row of the unified forward process
//   y_t = alpha_hat_t * y_0 + beta_hat_t * eps + gamma_hat_t * h,
// with the reverse variance sigma2[t] paired to step t (sigma2[0] unused).
struct GeneralizedSchedule {
  std::string name;
  std::vector<double> alpha_hat;
  std::vector<double> beta_hat;
  std::vector<double> gamma_hat;
  std::vector<double> sigma2;

  int steps() const { return static_cast<int>(alpha_hat.size()) - 1; }
};

enum class ModelFamily { kCsdi, kTmdm, kBridge };

// Fills the named coefficient row. kCsdi / kTmdm require a DDPM variance
// sequence beta_1..beta_T in (0, 1); kBridge needs none and carries the
// stochastic-preset reverse variance 2 (t-1) / (T t).
GeneralizedSchedule instantiate_family(ModelFamily family, int steps,
                                       const std::vector<double>* ddpm_betas = nullptr);

// Brownian-bridge row carrying sigma2 from the given policy.
GeneralizedSchedule generalized_from_bridge(const BridgeSchedule& sched,
                                            const VariancePolicy& policy);

// General solve: kappa = sqrt(bhat_{t-1}^2 - sigma2_t) / bhat_t,
// lambda = a_{t-1} - a_t kappa, zeta = g_{t-1} - g_t kappa.
// Throws DegenerateStepError when bhat_t = 0 and NumericError when the
// radicand is negative beyond tolerance.
ReverseCoefficients general_reverse_coefficients(const GeneralizedSchedule& gen, int t);

}  // namespace bridgecast
