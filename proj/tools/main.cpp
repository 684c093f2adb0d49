// bridgecast command-line front end. Links the C API only.
#include <cstdint>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "bridgecast.h"

namespace {

int exit_code_for(bc_status status) { return static_cast<int>(status); }

int fail(bc_status status) {
  std::fprintf(stderr, "error (%s): %s\n", bc_status_name(status), bc_last_error());
  return exit_code_for(status);
}

struct CommonFlags {
  std::string data;
  std::string out = "out";
  int64_t lookback = 336;
  int64_t horizon = 0;
  int64_t label_len = 48;
  int64_t steps = 50;
  std::string preset = "point";
  double s = -1.0;  // negative: derive from preset
  int64_t samples = -1;
  int64_t width = 64;
  int64_t epochs = 20;
  int64_t batch = 64;
  uint64_t seed = 42;
  std::string loss = "mae";
  std::vector<double> split{0.7, 0.1, 0.2};
  std::string scale = "norm";
  bool freeze_conditioner = false;
  int64_t plot = 0;
};

void add_common_flags(CLI::App* cmd, CommonFlags* f, bool needs_training_flags) {
  cmd->add_option("--data", f->data, "input CSV (header row, optional leading date column)")
      ->required();
  cmd->add_option("--out", f->out, "output directory");
  cmd->add_option("--lookback", f->lookback, "history length H");
  cmd->add_option("--horizon", f->horizon, "forecast length L")->required();
  cmd->add_option("--label-len", f->label_len, "label rows prepended to the target");
  cmd->add_option("--steps", f->steps, "diffusion steps T");
  cmd->add_option("--preset", f->preset, "point | prob")
      ->check(CLI::IsMember({"point", "prob"}));
  cmd->add_option("--s", f->s, "custom reverse-variance scale (overrides the preset)");
  cmd->add_option("--samples", f->samples, "ensemble size for stochastic sampling");
  cmd->add_option("--width", f->width, "denoiser hidden width");
  if (needs_training_flags) {
    cmd->add_option("--epochs", f->epochs, "training epochs");
    cmd->add_option("--batch", f->batch, "batch size");
    cmd->add_option("--loss", f->loss, "training loss")->check(CLI::IsMember({"mae", "mse"}));
    cmd->add_flag("--freeze-conditioner", f->freeze_conditioner,
                  "keep the conditioner fixed at the fitted prior");
  }
  cmd->add_option("--seed", f->seed, "RNG seed");
  cmd->add_option("--split-ratios", f->split, "train,val,test ratios")->expected(3);
  cmd->add_option("--scale", f->scale, "forecast value scale")
      ->check(CLI::IsMember({"norm", "raw"}));
  cmd->add_option("--plot", f->plot, "emit SVG plots for the first N windows");
}

bool resolve_config(const CommonFlags& f, bc_run_config* cfg) {
  bc_run_config_init(cfg);
  cfg->data_path = f.data.c_str();
  cfg->out_dir = f.out.c_str();
  cfg->lookback = f.lookback;
  cfg->horizon = f.horizon;
  cfg->label_len = f.label_len;
  cfg->steps = f.steps;
  if (f.s >= 0.0) {
    cfg->preset = 2;  // custom
    cfg->s = f.s;
    cfg->n_samples = f.samples >= 0 ? f.samples : (f.s > 0.0 ? 100 : 1);
  } else if (f.preset == "prob") {
    cfg->preset = 1;
    cfg->s = 2.0;
    cfg->n_samples = f.samples >= 0 ? f.samples : 100;
  } else {
    cfg->preset = 0;
    cfg->s = 0.0;
    cfg->n_samples = f.samples >= 0 ? f.samples : 1;
  }
  cfg->width = f.width;
  cfg->epochs = f.epochs;
  cfg->batch = f.batch;
  cfg->seed = f.seed;
  cfg->loss = f.loss == "mse" ? 1 : 0;
  cfg->split_train = f.split[0];
  cfg->split_val = f.split[1];
  cfg->split_test = f.split[2];
  cfg->raw_scale = f.scale == "raw" ? 1 : 0;
  cfg->freeze_conditioner = f.freeze_conditioner ? 1 : 0;
  cfg->plot_windows = f.plot;
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bridgecast: diffusion-bridge time series forecasting"};
  app.require_subcommand(1);

  // inspect-schedule
  auto* inspect = app.add_subcommand("inspect-schedule", "emit the per-step coefficient table");
  int64_t ins_steps = 50;
  double ins_s = 0.0;
  std::string ins_preset;
  std::string ins_out;
  inspect->add_option("--steps", ins_steps, "diffusion steps T");
  inspect->add_option("--s", ins_s, "reverse-variance scale");
  inspect->add_option("--preset", ins_preset, "point | prob")
      ->check(CLI::IsMember({"point", "prob"}));
  inspect->add_option("--out", ins_out, "CSV path (stdout when omitted)");

  // verify
  auto* verify = app.add_subcommand("verify", "run the schedule and sampler verification suites");
  uint64_t ver_seed = 1;
  int64_t ver_draws = 100000;
  bool ver_fault = false;
  verify->add_option("--seed", ver_seed, "RNG seed");
  verify->add_option("--draws", ver_draws, "Monte-Carlo transition count");
  verify->add_flag("--inject-fault", ver_fault, "negative control: perturb kappa");

  // train / forecast / evaluate
  auto* train = app.add_subcommand("train", "fit the prior and train the denoiser");
  CommonFlags train_flags;
  add_common_flags(train, &train_flags, true);

  auto* forecast = app.add_subcommand("forecast", "run the reverse chain over the test split");
  CommonFlags fc_flags;
  add_common_flags(forecast, &fc_flags, false);
  std::string fc_checkpoint;
  forecast->add_option("--checkpoint", fc_checkpoint, "checkpoint file from train")->required();

  auto* evaluate = app.add_subcommand("evaluate", "score a forecast file");
  std::string ev_forecasts;
  std::string ev_out = "out";
  std::string ev_estimator = "energy";
  evaluate->add_option("--forecasts", ev_forecasts, "forecasts.csv from forecast")->required();
  evaluate->add_option("--out", ev_out, "output directory for report files");
  evaluate->add_option("--crps-estimator", ev_estimator, "energy | quantile")
      ->check(CLI::IsMember({"energy", "quantile"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 1;
  }

  if (inspect->parsed()) {
    if (!ins_preset.empty()) ins_s = ins_preset == "prob" ? 2.0 : 0.0;
    const bc_status st =
        bc_inspect_schedule(ins_steps, ins_s, ins_out.empty() ? nullptr : ins_out.c_str());
    return st == BC_OK ? 0 : fail(st);
  }
  if (verify->parsed()) {
    const bc_status st = bc_verify(ver_seed, ver_draws, ver_fault ? 1 : 0);
    return st == BC_OK ? 0 : fail(st);
  }
  if (train->parsed()) {
    bc_run_config cfg;
    resolve_config(train_flags, &cfg);
    const bc_status st = bc_train(&cfg);
    return st == BC_OK ? 0 : fail(st);
  }
  if (forecast->parsed()) {
    bc_run_config cfg;
    resolve_config(fc_flags, &cfg);
    const bc_status st = bc_forecast(&cfg, fc_checkpoint.c_str());
    return st == BC_OK ? 0 : fail(st);
  }
  if (evaluate->parsed()) {
    const std::string report = ev_out + "/report.json";
    const std::string per_window = ev_out + "/per_window_scores.csv";
    const bc_status st = bc_evaluate(ev_forecasts.c_str(), report.c_str(), per_window.c_str(),
                                     ev_estimator == "quantile" ? 1 : 0);
    return st == BC_OK ? 0 : fail(st);
  }
  return 1;
}
