#pragma once

#include <string>

#include "bridgecast/config.hpp"
#include "bridgecast/metrics.hpp"

namespace bridgecast {

// Worker cap: BRIDGECAST_THREADS when set, otherwise min(hardware, 8).
// Outputs never depend on the value.
int effective_threads();

struct TrainOutputs {
  std::string checkpoint_path;
  std::string curve_path;
  std::string config_path;
  double final_train_loss = 0.0;
  long steps_run = 0;
};

// Fits the prior, trains the conditioner and denoiser, writes
// out/config.json, out/training_curve.csv and out/checkpoint.bin.
TrainOutputs run_train(const RunConfig& cfg);

struct ForecastOutputs {
  std::string forecast_csv;
  int n_windows = 0;
};

// Runs the reverse chain over every test window and writes out/forecasts.csv
// (plus SVG plots when requested). The checkpoint header must match the
// config shape.
ForecastOutputs run_forecast(const RunConfig& cfg, const std::string& checkpoint_path);

enum class CrpsEstimator { kEnergy, kQuantile };

// Scores a forecast file: MSE/MAE on the point column, CRPS and CRPS_sum when
// sample columns are present. Writes a flat JSON report and a per-window CSV;
// empty output paths skip the corresponding file.
ScoreReport run_evaluate(const std::string& forecast_csv, const std::string& report_json,
                         const std::string& per_window_csv,
                         CrpsEstimator estimator = CrpsEstimator::kEnergy);

}  // namespace bridgecast
