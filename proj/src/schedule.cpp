#include "bridgecast/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bridgecast/errors.hpp"

namespace bridgecast {

namespace {

// Float cancellation near the endpoints can push radicands a hair negative.
constexpr double kRadicandTol = 1e-12;

void validate_generalized(const GeneralizedSchedule& gen) {
  const std::size_t n = gen.alpha_hat.size();
  if (n < 3 || gen.beta_hat.size() != n || gen.gamma_hat.size() != n || gen.sigma2.size() != n) {
    throw std::invalid_argument("generalized schedule: sequences must share length T+1, T >= 2");
  }
  for (std::size_t t = 1; t < n; ++t) {
    const double bsq_prev = gen.beta_hat[t - 1] * gen.beta_hat[t - 1];
    if (gen.sigma2[t] > bsq_prev + kRadicandTol) {
      throw std::invalid_argument("generalized schedule: sigma2 exceeds beta_hat^2 at step " +
                                  std::to_string(t));
    }
  }
}

}  // namespace

BridgeSchedule::BridgeSchedule(std::vector<double> alpha) : alpha_(std::move(alpha)) {
  beta_sq_.resize(alpha_.size());
  for (std::size_t t = 0; t < alpha_.size(); ++t) {
    beta_sq_[t] = 2.0 * alpha_[t] * (1.0 - alpha_[t]);
  }
}

BridgeSchedule BridgeSchedule::linear(int steps) {
  if (steps < 2) throw std::invalid_argument("bridge schedule requires at least 2 steps");
  std::vector<double> alpha(static_cast<std::size_t>(steps) + 1);
  for (int t = 0; t <= steps; ++t) {
    alpha[static_cast<std::size_t>(t)] = static_cast<double>(steps - t) / steps;
  }
  return BridgeSchedule(std::move(alpha));
}

void BridgeSchedule::check_step(int t, int lo) const {
  if (t < lo || t > steps()) {
    throw std::invalid_argument("step " + std::to_string(t) + " outside [" + std::to_string(lo) +
                                ", " + std::to_string(steps()) + "]");
  }
}

double BridgeSchedule::alpha_hat(int t) const {
  check_step(t, 0);
  return alpha_[static_cast<std::size_t>(t)];
}

double BridgeSchedule::beta_hat(int t) const {
  check_step(t, 0);
  return std::sqrt(beta_sq_[static_cast<std::size_t>(t)]);
}

double BridgeSchedule::beta_hat_sq(int t) const {
  check_step(t, 0);
  return beta_sq_[static_cast<std::size_t>(t)];
}

double BridgeSchedule::sigma2(int t, const VariancePolicy& policy) const {
  check_step(t, 1);
  if (policy.s < 0.0) throw std::invalid_argument("variance scale s must be non-negative");
  const int T = steps();
  const double a_prev = alpha_[static_cast<std::size_t>(t) - 1];
  if (t == T) {
    const double v = policy.s * a_prev * (1.0 - a_prev);
    return std::clamp(v, 0.0, beta_sq_[static_cast<std::size_t>(T) - 1]);
  }
  const double a_t = alpha_[static_cast<std::size_t>(t)];
  return policy.s * (1.0 - a_prev) * (a_prev - a_t) / (1.0 - a_t);
}

ReverseCoefficients BridgeSchedule::reverse_coefficients(int t, const VariancePolicy& policy) const {
  check_step(t, 1);
  const int T = steps();
  const double a_prev = alpha_[static_cast<std::size_t>(t) - 1];

  if (t == T) {
    return {0.0, a_prev, 1.0 - a_prev, sigma2(t, policy)};
  }

  const double a_t = alpha_[static_cast<std::size_t>(t)];
  const double s2 = sigma2(t, policy);

  if (policy.s == 2.0) {
    // Closed form of the DDPM-variance case; zeta vanishes identically, so
    // emit the exact zero instead of reconstructing it through the radicand.
    const double kappa = (1.0 - a_prev) / (1.0 - a_t);
    const double lambda = (a_prev - a_t) / (1.0 - a_t);
    return {kappa, lambda, 0.0, s2};
  }

  double radicand = beta_sq_[static_cast<std::size_t>(t) - 1] - s2;
  if (radicand < -kRadicandTol) {
    throw NumericError("reverse coefficients: sigma2 exceeds beta_hat^2 at step " +
                       std::to_string(t));
  }
  radicand = std::max(radicand, 0.0);
  const double kappa = std::sqrt(radicand / beta_sq_[static_cast<std::size_t>(t)]);
  const double lambda = a_prev - a_t * kappa;
  const double zeta = (1.0 - a_prev) - kappa * (1.0 - a_t);
  return {kappa, lambda, zeta, s2};
}

GeneralizedSchedule instantiate_family(ModelFamily family, int steps,
                                       const std::vector<double>* ddpm_betas) {
  if (steps < 2) throw std::invalid_argument("generalized schedule requires at least 2 steps");
  const auto n = static_cast<std::size_t>(steps) + 1;
  GeneralizedSchedule gen;
  gen.alpha_hat.resize(n);
  gen.beta_hat.resize(n);
  gen.gamma_hat.resize(n);
  gen.sigma2.assign(n, 0.0);

  if (family == ModelFamily::kBridge) {
    gen.name = "bridge";
    for (int t = 0; t <= steps; ++t) {
      const auto i = static_cast<std::size_t>(t);
      gen.alpha_hat[i] = static_cast<double>(steps - t) / steps;
      gen.beta_hat[i] = std::sqrt(2.0 * t * (steps - t)) / steps;
      gen.gamma_hat[i] = static_cast<double>(t) / steps;
      if (t >= 1) gen.sigma2[i] = 2.0 * (t - 1) / (static_cast<double>(steps) * t);
    }
    validate_generalized(gen);
    return gen;
  }

  if (ddpm_betas == nullptr) {
    throw std::invalid_argument("csdi/tmdm rows require a DDPM beta sequence");
  }
  if (static_cast<int>(ddpm_betas->size()) != steps) {
    throw std::invalid_argument("DDPM beta sequence must have exactly T entries");
  }
  for (double b : *ddpm_betas) {
    if (!(b > 0.0 && b < 1.0)) throw std::invalid_argument("DDPM betas must lie in (0, 1)");
  }

  gen.name = family == ModelFamily::kCsdi ? "csdi" : "tmdm";
  std::vector<double> abar(n);
  abar[0] = 1.0;
  for (int t = 1; t <= steps; ++t) {
    abar[static_cast<std::size_t>(t)] =
        abar[static_cast<std::size_t>(t) - 1] * (1.0 - (*ddpm_betas)[static_cast<std::size_t>(t) - 1]);
  }
  for (int t = 0; t <= steps; ++t) {
    const auto i = static_cast<std::size_t>(t);
    gen.alpha_hat[i] = std::sqrt(abar[i]);
    gen.beta_hat[i] = std::sqrt(1.0 - abar[i]);
    gen.gamma_hat[i] = family == ModelFamily::kTmdm ? 1.0 - std::sqrt(abar[i]) : 0.0;
    if (t >= 1) {
      gen.sigma2[i] = (1.0 - abar[i - 1]) / (1.0 - abar[i]) * (*ddpm_betas)[i - 1];
    }
  }
  validate_generalized(gen);
  return gen;
}

GeneralizedSchedule generalized_from_bridge(const BridgeSchedule& sched,
                                            const VariancePolicy& policy) {
  const int T = sched.steps();
  const auto n = static_cast<std::size_t>(T) + 1;
  GeneralizedSchedule gen;
  gen.name = "bridge(s=" + std::to_string(policy.s) + ")";
  gen.alpha_hat.resize(n);
  gen.beta_hat.resize(n);
  gen.gamma_hat.resize(n);
  gen.sigma2.assign(n, 0.0);
  for (int t = 0; t <= T; ++t) {
    const auto i = static_cast<std::size_t>(t);
    gen.alpha_hat[i] = sched.alpha_hat(t);
    gen.beta_hat[i] = sched.beta_hat(t);
    gen.gamma_hat[i] = 1.0 - sched.alpha_hat(t);
    if (t >= 1) gen.sigma2[i] = sched.sigma2(t, policy);
  }
  validate_generalized(gen);
  return gen;
}

ReverseCoefficients general_reverse_coefficients(const GeneralizedSchedule& gen, int t) {
  if (t < 1 || t > gen.steps()) {
    throw std::invalid_argument("step " + std::to_string(t) + " outside [1, " +
                                std::to_string(gen.steps()) + "]");
  }
  const auto i = static_cast<std::size_t>(t);
  const double b_t = gen.beta_hat[i];
  if (b_t == 0.0) {
    throw DegenerateStepError("beta_hat is zero at step " + std::to_string(t) +
                              "; the reverse solve is undefined there");
  }
  const double b_prev = gen.beta_hat[i - 1];
  double radicand = b_prev * b_prev - gen.sigma2[i];
  if (radicand < -kRadicandTol) {
    throw NumericError("general reverse coefficients: negative radicand at step " +
                       std::to_string(t));
  }
  radicand = std::max(radicand, 0.0);
  const double kappa = std::sqrt(radicand) / b_t;
  const double lambda = gen.alpha_hat[i - 1] - gen.alpha_hat[i] * kappa;
  const double zeta = gen.gamma_hat[i - 1] - gen.gamma_hat[i] * kappa;
  return {kappa, lambda, zeta, gen.sigma2[i]};
}

}  // namespace bridgecast
