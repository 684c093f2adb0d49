#pragma once

#include <cstdint>
#include <string>

#include "bridgecast/data.hpp"
#include "bridgecast/neural.hpp"

namespace bridgecast {

enum class Preset { kPoint, kProb, kCustom };

// Resolved run configuration shared by train / forecast / evaluate. The JSON
// form round-trips byte-identically.
struct RunConfig {
  std::string data_path;
  std::string out_dir = "out";
  int lookback = 336;
  int horizon = 0;  // must be set explicitly
  int label_len = 48;
  int steps = 50;
  Preset preset = Preset::kPoint;
  double s = 0.0;
  int n_samples = 1;
  int width = 64;
  int epochs = 20;
  int batch = 64;
  uint64_t seed = 42;
  LossKind loss = LossKind::kMae;
  SplitRatios splits;
  bool raw_scale = false;
  bool freeze_conditioner = false;
  int plot_windows = 0;
};

// Throws std::invalid_argument on out-of-range fields or inconsistent
// combinations (s = 0 with more than one sample, preset/s mismatch, ...).
void validate(const RunConfig& cfg);

std::string config_to_json(const RunConfig& cfg);
RunConfig config_from_json(const std::string& text);
void save_config(const std::string& path, const RunConfig& cfg);
RunConfig load_config(const std::string& path);

const char* preset_name(Preset p);
Preset preset_from_name(const std::string& name);
const char* loss_name(LossKind k);
LossKind loss_from_name(const std::string& name);

}  // namespace bridgecast
