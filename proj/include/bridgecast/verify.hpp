#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bridgecast/schedule.hpp"

namespace bridgecast {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct VerifyOptions {
  uint64_t seed = 1;
  long mc_draws = 100000;
  // Negative control: perturbs kappa before the identity checks so the suite
  // must report a failure.
  bool inject_kappa_fault = false;
};

// Coefficient identities, closed-form agreement, oracle chain recovery and
// Monte-Carlo marginal consistency. Every check prints as one line.
std::vector<CheckResult> run_verification(const VerifyOptions& opts);

bool all_passed(const std::vector<CheckResult>& results);

struct ScheduleInspection {
  std::string csv;                     // t, alpha_hat, beta_hat, gamma_hat, kappa, lambda, zeta, sigma2
  double max_identity_residual = 0.0;  // over 2 <= t <= T-1
};

ScheduleInspection inspect_schedule(int steps, const VariancePolicy& policy);

}  // namespace bridgecast
