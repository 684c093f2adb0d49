/* C API for the bridgecast forecasting engine.
 *
 * All functions return bc_status; on failure bc_last_error() holds a
 * thread-local message describing the most recent error in the calling
 * thread. Handles are opaque and freed with their matching *_free call.
 */
#ifndef BRIDGECAST_H
#define BRIDGECAST_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bc_status {
  BC_OK = 0,
  BC_INVALID_ARGUMENT = 1,
  BC_DATA_ERROR = 2,
  BC_NUMERIC_ERROR = 3,
  BC_VERIFY_FAILED = 4
} bc_status;

const char* bc_version(void);
const char* bc_status_name(bc_status status);
const char* bc_last_error(void);

/* ------------------------------------------------------------------ */
/* Diffusion schedule                                                  */

typedef struct bc_schedule bc_schedule;

/* Linear Brownian-bridge schedule with alpha_hat[t] = (T - t) / T. */
bc_status bc_schedule_create(int64_t steps, bc_schedule** out);
void bc_schedule_free(bc_schedule* sched);
int64_t bc_schedule_steps(const bc_schedule* sched);
bc_status bc_schedule_alpha(const bc_schedule* sched, int64_t t, double* out);
bc_status bc_schedule_beta(const bc_schedule* sched, int64_t t, double* out);
bc_status bc_schedule_sigma2(const bc_schedule* sched, int64_t t, double s, double* out);

typedef struct bc_reverse_coeffs {
  double kappa;
  double lambda;
  double zeta;
  double sigma2;
} bc_reverse_coeffs;

bc_status bc_schedule_reverse_coeffs(const bc_schedule* sched, int64_t t, double s,
                                     bc_reverse_coeffs* out);

/* ------------------------------------------------------------------ */
/* Run configuration                                                   */

typedef struct bc_run_config {
  const char* data_path;      /* input CSV */
  const char* out_dir;        /* artifact directory */
  int64_t lookback;           /* H, default 336 */
  int64_t horizon;            /* L, required */
  int64_t label_len;          /* default 48 */
  int64_t steps;              /* diffusion steps T, default 50 */
  int preset;                 /* 0 point, 1 prob, 2 custom */
  double s;                   /* reverse-variance scale */
  int64_t n_samples;          /* ensemble size, 1 when s = 0 */
  int64_t width;              /* denoiser hidden width */
  int64_t epochs;
  int64_t batch;
  uint64_t seed;
  int loss;                   /* 0 mae, 1 mse */
  double split_train, split_val, split_test;
  int raw_scale;              /* emit raw-scale forecasts */
  int freeze_conditioner;
  int64_t plot_windows;       /* SVG plots for the first N windows */
} bc_run_config;

void bc_run_config_init(bc_run_config* cfg);

/* ------------------------------------------------------------------ */
/* Commands (the CLI maps onto these one-to-one)                       */

/* Coefficient table CSV for (steps, s); out_csv_path NULL writes stdout.
 * Fails with BC_VERIFY_FAILED when any consistency identity residual
 * exceeds 1e-10. */
bc_status bc_inspect_schedule(int64_t steps, double s, const char* out_csv_path);

/* Verification suites; one pass/fail line per check on stdout.
 * inject_fault != 0 perturbs kappa so the identity check must fail. */
bc_status bc_verify(uint64_t seed, int64_t mc_draws, int inject_fault);

bc_status bc_train(const bc_run_config* cfg);
bc_status bc_forecast(const bc_run_config* cfg, const char* checkpoint_path);

/* Scores a forecast CSV. estimator: 0 energy form, 1 quantile grid.
 * Output paths may be NULL to skip the corresponding file. */
bc_status bc_evaluate(const char* forecast_csv, const char* report_json_path,
                      const char* per_window_csv_path, int estimator);

#ifdef __cplusplus
}
#endif

#endif /* BRIDGECAST_H */
