#include "bridgecast.h"

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <new>
#include <stdexcept>
#include <string>

#include "bridgecast/config.hpp"
#include "bridgecast/engine.hpp"
#include "bridgecast/errors.hpp"
#include "bridgecast/schedule.hpp"
#include "bridgecast/verify.hpp"

namespace {

thread_local std::string g_last_error;

template <typename Fn>
bc_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const std::invalid_argument& e) {
    g_last_error = e.what();
    return BC_INVALID_ARGUMENT;
  } catch (const bridgecast::DataError& e) {
    g_last_error = e.what();
    return BC_DATA_ERROR;
  } catch (const bridgecast::VerificationError& e) {
    g_last_error = e.what();
    return BC_VERIFY_FAILED;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return BC_NUMERIC_ERROR;
  } catch (const std::exception& e) {
    // NumericError, DegenerateStepError and anything unexpected.
    g_last_error = e.what();
    return BC_NUMERIC_ERROR;
  }
}

bridgecast::RunConfig to_run_config(const bc_run_config& c) {
  bridgecast::RunConfig cfg;
  cfg.data_path = c.data_path != nullptr ? c.data_path : "";
  cfg.out_dir = c.out_dir != nullptr ? c.out_dir : "out";
  cfg.lookback = static_cast<int>(c.lookback);
  cfg.horizon = static_cast<int>(c.horizon);
  cfg.label_len = static_cast<int>(c.label_len);
  cfg.steps = static_cast<int>(c.steps);
  switch (c.preset) {
    case 0: cfg.preset = bridgecast::Preset::kPoint; break;
    case 1: cfg.preset = bridgecast::Preset::kProb; break;
    default: cfg.preset = bridgecast::Preset::kCustom; break;
  }
  cfg.s = c.s;
  cfg.n_samples = static_cast<int>(c.n_samples);
  cfg.width = static_cast<int>(c.width);
  cfg.epochs = static_cast<int>(c.epochs);
  cfg.batch = static_cast<int>(c.batch);
  cfg.seed = c.seed;
  cfg.loss = c.loss == 1 ? bridgecast::LossKind::kMse : bridgecast::LossKind::kMae;
  cfg.splits.train = c.split_train;
  cfg.splits.val = c.split_val;
  cfg.splits.test = c.split_test;
  cfg.raw_scale = c.raw_scale != 0;
  cfg.freeze_conditioner = c.freeze_conditioner != 0;
  cfg.plot_windows = static_cast<int>(c.plot_windows);
  return cfg;
}

}  // namespace

extern "C" {

struct bc_schedule {
  bridgecast::BridgeSchedule impl;
};

const char* bc_version(void) { return "0.1.0"; }

const char* bc_status_name(bc_status status) {
  switch (status) {
    case BC_OK: return "ok";
    case BC_INVALID_ARGUMENT: return "invalid argument";
    case BC_DATA_ERROR: return "data error";
    case BC_NUMERIC_ERROR: return "numeric error";
    case BC_VERIFY_FAILED: return "verification failed";
  }
  return "unknown";
}

const char* bc_last_error(void) { return g_last_error.c_str(); }

bc_status bc_schedule_create(int64_t steps, bc_schedule** out) {
  return guarded([&]() {
    if (out == nullptr) throw std::invalid_argument("out handle is null");
    *out = new bc_schedule{bridgecast::BridgeSchedule::linear(static_cast<int>(steps))};
    return BC_OK;
  });
}

void bc_schedule_free(bc_schedule* sched) { delete sched; }

int64_t bc_schedule_steps(const bc_schedule* sched) {
  return sched != nullptr ? sched->impl.steps() : 0;
}

bc_status bc_schedule_alpha(const bc_schedule* sched, int64_t t, double* out) {
  return guarded([&]() {
    if (sched == nullptr || out == nullptr) throw std::invalid_argument("null argument");
    *out = sched->impl.alpha_hat(static_cast<int>(t));
    return BC_OK;
  });
}

bc_status bc_schedule_beta(const bc_schedule* sched, int64_t t, double* out) {
  return guarded([&]() {
    if (sched == nullptr || out == nullptr) throw std::invalid_argument("null argument");
    *out = sched->impl.beta_hat(static_cast<int>(t));
    return BC_OK;
  });
}

bc_status bc_schedule_sigma2(const bc_schedule* sched, int64_t t, double s, double* out) {
  return guarded([&]() {
    if (sched == nullptr || out == nullptr) throw std::invalid_argument("null argument");
    *out = sched->impl.sigma2(static_cast<int>(t), bridgecast::VariancePolicy{s});
    return BC_OK;
  });
}

bc_status bc_schedule_reverse_coeffs(const bc_schedule* sched, int64_t t, double s,
                                     bc_reverse_coeffs* out) {
  return guarded([&]() {
    if (sched == nullptr || out == nullptr) throw std::invalid_argument("null argument");
    const bridgecast::ReverseCoefficients rc =
        sched->impl.reverse_coefficients(static_cast<int>(t), bridgecast::VariancePolicy{s});
    out->kappa = rc.kappa;
    out->lambda = rc.lambda;
    out->zeta = rc.zeta;
    out->sigma2 = rc.sigma2;
    return BC_OK;
  });
}

void bc_run_config_init(bc_run_config* cfg) {
  if (cfg == nullptr) return;
  cfg->data_path = nullptr;
  cfg->out_dir = "out";
  cfg->lookback = 336;
  cfg->horizon = 0;
  cfg->label_len = 48;
  cfg->steps = 50;
  cfg->preset = 0;
  cfg->s = 0.0;
  cfg->n_samples = 1;
  cfg->width = 64;
  cfg->epochs = 20;
  cfg->batch = 64;
  cfg->seed = 42;
  cfg->loss = 0;
  cfg->split_train = 0.7;
  cfg->split_val = 0.1;
  cfg->split_test = 0.2;
  cfg->raw_scale = 0;
  cfg->freeze_conditioner = 0;
  cfg->plot_windows = 0;
}

bc_status bc_inspect_schedule(int64_t steps, double s, const char* out_csv_path) {
  return guarded([&]() {
    const bridgecast::ScheduleInspection insp =
        bridgecast::inspect_schedule(static_cast<int>(steps), bridgecast::VariancePolicy{s});
    if (out_csv_path == nullptr) {
      std::fputs(insp.csv.c_str(), stdout);
    } else {
      std::ofstream f(out_csv_path, std::ios::binary);
      if (!f) throw bridgecast::DataError(std::string("cannot write ") + out_csv_path);
      f << insp.csv;
    }
    if (insp.max_identity_residual > 1e-10) {
      throw bridgecast::VerificationError("consistency identity residual " +
                                          std::to_string(insp.max_identity_residual) +
                                          " exceeds 1e-10");
    }
    return BC_OK;
  });
}

bc_status bc_verify(uint64_t seed, int64_t mc_draws, int inject_fault) {
  return guarded([&]() {
    bridgecast::VerifyOptions opts;
    opts.seed = seed;
    opts.mc_draws = mc_draws;
    opts.inject_kappa_fault = inject_fault != 0;
    const auto results = bridgecast::run_verification(opts);
    for (const auto& r : results) {
      std::printf("[%s] %s: %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
    }
    std::fflush(stdout);
    if (!bridgecast::all_passed(results)) {
      for (const auto& r : results) {
        if (!r.pass) {
          throw bridgecast::VerificationError(r.name + ": " + r.detail);
        }
      }
    }
    return BC_OK;
  });
}

bc_status bc_train(const bc_run_config* cfg) {
  return guarded([&]() {
    if (cfg == nullptr) throw std::invalid_argument("config is null");
    const auto out = bridgecast::run_train(to_run_config(*cfg));
    std::printf("checkpoint: %s\ncurve: %s\nconfig: %s\n", out.checkpoint_path.c_str(),
                out.curve_path.c_str(), out.config_path.c_str());
    std::fflush(stdout);
    return BC_OK;
  });
}

bc_status bc_forecast(const bc_run_config* cfg, const char* checkpoint_path) {
  return guarded([&]() {
    if (cfg == nullptr) throw std::invalid_argument("config is null");
    if (checkpoint_path == nullptr) throw std::invalid_argument("checkpoint path is null");
    const auto out = bridgecast::run_forecast(to_run_config(*cfg), checkpoint_path);
    std::printf("forecasts: %s (%d windows)\n", out.forecast_csv.c_str(), out.n_windows);
    std::fflush(stdout);
    return BC_OK;
  });
}

bc_status bc_evaluate(const char* forecast_csv, const char* report_json_path,
                      const char* per_window_csv_path, int estimator) {
  return guarded([&]() {
    if (forecast_csv == nullptr) throw std::invalid_argument("forecast path is null");
    const auto est = estimator == 1 ? bridgecast::CrpsEstimator::kQuantile
                                    : bridgecast::CrpsEstimator::kEnergy;
    const bridgecast::ScoreReport report = bridgecast::run_evaluate(
        forecast_csv, report_json_path != nullptr ? report_json_path : "",
        per_window_csv_path != nullptr ? per_window_csv_path : "", est);
    std::printf("mse=%.6f mae=%.6f", report.mse, report.mae);
    if (report.crps) std::printf(" crps=%.6f crps_sum=%.6f", *report.crps, *report.crps_sum);
    std::printf(" (windows=%ld, samples=%ld)\n", report.n_windows, report.n_samples);
    std::fflush(stdout);
    return BC_OK;
  });
}

}  // extern "C"
