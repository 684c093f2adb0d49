#include "bridgecast/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "bridgecast/bridge.hpp"
#include "bridgecast/format.hpp"
#include "bridgecast/rng.hpp"

namespace bridgecast {

namespace {

constexpr double kIdentityTol = 1e-12;
constexpr double kClosedFormTol = 1e-12;
constexpr double kChainTol = 1e-9;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

double identity_residual(const BridgeSchedule& sched, int t, const ReverseCoefficients& rc) {
  const double a_prev = sched.alpha_hat(t - 1);
  const double a_t = sched.alpha_hat(t);
  const double g_prev = 1.0 - a_prev;
  const double g_t = 1.0 - a_t;
  const double r1 = std::fabs(rc.kappa * a_t + rc.lambda - a_prev);
  const double r2 = std::fabs(rc.kappa * g_t + rc.zeta - g_prev);
  const double r3 =
      std::fabs(rc.kappa * rc.kappa * sched.beta_hat_sq(t) + rc.sigma2 - sched.beta_hat_sq(t - 1));
  return std::max({r1, r2, r3});
}

CheckResult check_identities(int T, bool inject_fault) {
  const BridgeSchedule sched = BridgeSchedule::linear(T);
  double worst = 0.0;
  int worst_t = -1;
  double worst_s = 0.0;
  for (double s : {0.0, 0.5, 1.0, 2.0}) {
    const VariancePolicy policy{s};
    for (int t = 2; t <= T - 1; ++t) {
      ReverseCoefficients rc = sched.reverse_coefficients(t, policy);
      if (inject_fault) rc.kappa *= 1.0 + 1e-6;
      const double r = identity_residual(sched, t, rc);
      if (r > worst) {
        worst = r;
        worst_t = t;
        worst_s = s;
      }
    }
  }
  CheckResult res;
  res.name = "coefficient-identities T=" + std::to_string(T);
  res.pass = worst < kIdentityTol;
  res.detail = "max residual " + fmt(worst) + " at (t=" + std::to_string(worst_t) +
               ", s=" + fmt(worst_s) + "), tol " + fmt(kIdentityTol);
  return res;
}

CheckResult check_deterministic_closed_form(int T) {
  const BridgeSchedule sched = BridgeSchedule::linear(T);
  const VariancePolicy policy{0.0};
  double worst = 0.0;
  for (int t = 1; t <= T - 1; ++t) {
    const ReverseCoefficients rc = sched.reverse_coefficients(t, policy);
    const double Td = T;
    const double kappa_ref =
        std::sqrt(static_cast<double>(T - t + 1) * (t - 1) / (static_cast<double>(T - t) * t));
    const double lambda_ref =
        (T - t + 1) / Td -
        std::sqrt(static_cast<double>(T - t) * (T - t + 1) * (t - 1) / (Td * Td * t));
    const double zeta_ref =
        (t - 1) / Td -
        std::sqrt(static_cast<double>(t) * (T - t + 1) * (t - 1) / (Td * Td * (T - t)));
    worst = std::max({worst, std::fabs(rc.kappa - kappa_ref), std::fabs(rc.lambda - lambda_ref),
                      std::fabs(rc.zeta - zeta_ref)});
  }
  CheckResult res;
  res.name = "deterministic-closed-form T=" + std::to_string(T);
  res.pass = worst < kClosedFormTol;
  res.detail = "max |coeff - closed form| " + fmt(worst) + ", tol " + fmt(kClosedFormTol);
  return res;
}

CheckResult check_ddpm_form(int T) {
  const BridgeSchedule sched = BridgeSchedule::linear(T);
  const VariancePolicy policy{2.0};
  double worst = 0.0;
  bool zeta_exact = true;
  for (int t = 1; t <= T - 1; ++t) {
    const ReverseCoefficients rc = sched.reverse_coefficients(t, policy);
    const double a_prev = sched.alpha_hat(t - 1);
    const double a_t = sched.alpha_hat(t);
    const double kappa_ref = (1.0 - a_prev) / (1.0 - a_t);
    const double sigma_ref = 2.0 * (t - 1) / (static_cast<double>(T) * t);
    worst = std::max({worst, std::fabs(rc.kappa - kappa_ref), std::fabs(rc.sigma2 - sigma_ref)});
    if (rc.zeta != 0.0) zeta_exact = false;
  }
  CheckResult res;
  res.name = "ddpm-variance-form T=" + std::to_string(T);
  res.pass = zeta_exact && worst < kClosedFormTol;
  res.detail = std::string("zeta ") + (zeta_exact ? "exactly 0" : "NOT exactly 0") +
               ", max |kappa/sigma2 - ref| " + fmt(worst);
  return res;
}

CheckResult check_oracle_recovery() {
  double worst = 0.0;
  for (int T : {2, 10, 50}) {
    BridgeProcess proc{BridgeSchedule::linear(T), VariancePolicy{0.0}, 0};
    Matrix y0(3, 2);
    Matrix h(3, 2);
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 2; ++c) {
        y0(r, c) = 0.37 * (r + 1) - 0.81 * (c + 1);
        h(r, c) = -1.1 * (r + 1) + 0.25 * (c + 1);
      }
    }
    const DenoiserFn oracle = [&y0](const Matrix&, const Matrix&, const Matrix&, int) {
      return y0;
    };
    const ForecastResult res = sample_forecast(oracle, h, y0, proc, 1, 7);
    worst = std::max(worst, max_abs_diff(*res.point, y0));
  }
  CheckResult res;
  res.name = "oracle-chain-recovery T={2,10,50}";
  res.pass = worst < kChainTol;
  res.detail = "max |state_0 - y0| " + fmt(worst) + ", tol " + fmt(kChainTol);
  return res;
}

CheckResult check_mc_marginal(uint64_t seed, long draws) {
  const int T = 50;
  const BridgeSchedule sched = BridgeSchedule::linear(T);
  const VariancePolicy policy{2.0};
  BridgeProcess proc{sched, policy, 0};

  const double y0v = 1.3;
  const double hv = -0.7;
  Matrix y0(1, 1, y0v);
  Matrix h(1, 1, hv);

  // Small-draw runs get a correspondingly loose variance band.
  const double var_tol = std::max(0.05, 4.0 * std::sqrt(2.0 / static_cast<double>(draws)));

  CheckResult res;
  res.name = "mc-marginal-consistency N=" + std::to_string(draws);
  res.pass = true;
  std::ostringstream detail;

  Rng rng(seed);
  for (int t : {2, 10, 25, 49}) {
    const ReverseCoefficients rc = sched.reverse_coefficients(t, policy);
    const double a_t = sched.alpha_hat(t);
    const double a_prev = sched.alpha_hat(t - 1);
    const double mean_t = a_t * y0v + (1.0 - a_t) * hv;
    const double sd_t = std::sqrt(sched.beta_hat_sq(t));
    const double mean_expect = a_prev * y0v + (1.0 - a_prev) * hv;
    const double var_expect = sched.beta_hat_sq(t - 1);
    const double sd_rev = std::sqrt(rc.sigma2);

    double acc = 0.0, acc2 = 0.0;
    for (long i = 0; i < draws; ++i) {
      const double yt = mean_t + sd_t * rng.normal();
      const double prev = rc.kappa * yt + rc.lambda * y0v + rc.zeta * hv + sd_rev * rng.normal();
      acc += prev;
      acc2 += prev * prev;
    }
    const double emp_mean = acc / static_cast<double>(draws);
    const double emp_var = acc2 / static_cast<double>(draws) - emp_mean * emp_mean;
    const double mean_err = std::fabs(emp_mean - mean_expect);
    const double mean_tol = 4.0 * std::sqrt(var_expect / static_cast<double>(draws));
    const double var_err = std::fabs(emp_var / var_expect - 1.0);
    if (mean_err > mean_tol || var_err > var_tol) {
      res.pass = false;
      detail << "t=" << t << " mean_err=" << fmt(mean_err) << " (tol " << fmt(mean_tol)
             << ") var_rel_err=" << fmt(var_err) << " (tol " << fmt(var_tol) << "); ";
    }
  }
  if (res.pass) {
    detail << "all t in {2,10,25,49} within 4 SE (mean) and " << fmt(var_tol) << " (variance)";
  }
  if (draws < 10000) detail << " [warning: few draws, wide-tolerance mode]";
  res.detail = detail.str();
  return res;
}

CheckResult check_general_vs_bridge(int T) {
  const BridgeSchedule sched = BridgeSchedule::linear(T);
  double worst = 0.0;
  for (double s : {0.0, 0.5, 1.0, 2.0}) {
    const VariancePolicy policy{s};
    const GeneralizedSchedule gen = generalized_from_bridge(sched, policy);
    for (int t = 1; t <= T - 1; ++t) {
      const ReverseCoefficients a = sched.reverse_coefficients(t, policy);
      const ReverseCoefficients b = general_reverse_coefficients(gen, t);
      worst = std::max({worst, std::fabs(a.kappa - b.kappa), std::fabs(a.lambda - b.lambda),
                        std::fabs(a.zeta - b.zeta), std::fabs(a.sigma2 - b.sigma2)});
    }
  }
  CheckResult res;
  res.name = "general-solver-agreement T=" + std::to_string(T);
  res.pass = worst < kClosedFormTol;
  res.detail = "max solver difference " + fmt(worst) + ", tol " + fmt(kClosedFormTol);
  return res;
}

}  // namespace

std::vector<CheckResult> run_verification(const VerifyOptions& opts) {
  std::vector<CheckResult> results;
  results.push_back(check_identities(50, opts.inject_kappa_fault));
  results.push_back(check_deterministic_closed_form(50));
  results.push_back(check_ddpm_form(50));
  results.push_back(check_general_vs_bridge(50));
  results.push_back(check_oracle_recovery());
  results.push_back(check_mc_marginal(opts.seed, opts.mc_draws));
  return results;
}

bool all_passed(const std::vector<CheckResult>& results) {
  for (const CheckResult& r : results) {
    if (!r.pass) return false;
  }
  return true;
}

ScheduleInspection inspect_schedule(int steps, const VariancePolicy& policy) {
  const BridgeSchedule sched = BridgeSchedule::linear(steps);
  ScheduleInspection insp;
  insp.csv = "t,alpha_hat,beta_hat,gamma_hat,kappa,lambda,zeta,sigma2\n";
  for (int t = 0; t <= steps; ++t) {
    insp.csv += std::to_string(t);
    insp.csv.push_back(',');
    append_double(insp.csv, sched.alpha_hat(t));
    insp.csv.push_back(',');
    append_double(insp.csv, sched.beta_hat(t));
    insp.csv.push_back(',');
    append_double(insp.csv, 1.0 - sched.alpha_hat(t));
    if (t == 0) {
      insp.csv += ",,,,";  // reverse coefficients start at t = 1
    } else {
      const ReverseCoefficients rc = sched.reverse_coefficients(t, policy);
      insp.csv.push_back(',');
      append_double(insp.csv, rc.kappa);
      insp.csv.push_back(',');
      append_double(insp.csv, rc.lambda);
      insp.csv.push_back(',');
      append_double(insp.csv, rc.zeta);
      insp.csv.push_back(',');
      append_double(insp.csv, rc.sigma2);
      if (t >= 2 && t <= steps - 1) {
        insp.max_identity_residual =
            std::max(insp.max_identity_residual, identity_residual(sched, t, rc));
      }
    }
    insp.csv.push_back('\n');
  }
  return insp;
}

}  // namespace bridgecast
