#include "bridgecast/config.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "bridgecast/errors.hpp"

namespace bridgecast {

const char* preset_name(Preset p) {
  switch (p) {
    case Preset::kPoint: return "point";
    case Preset::kProb: return "prob";
    case Preset::kCustom: return "custom";
  }
  return "custom";
}

Preset preset_from_name(const std::string& name) {
  if (name == "point") return Preset::kPoint;
  if (name == "prob") return Preset::kProb;
  if (name == "custom") return Preset::kCustom;
  throw std::invalid_argument("unknown preset '" + name + "' (point|prob|custom)");
}

const char* loss_name(LossKind k) { return k == LossKind::kMae ? "mae" : "mse"; }

LossKind loss_from_name(const std::string& name) {
  if (name == "mae") return LossKind::kMae;
  if (name == "mse") return LossKind::kMse;
  throw std::invalid_argument("unknown loss '" + name + "' (mae|mse)");
}

void validate(const RunConfig& cfg) {
  if (cfg.lookback < 1) throw std::invalid_argument("lookback must be >= 1");
  if (cfg.horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (cfg.label_len < 0 || cfg.label_len >= cfg.lookback) {
    throw std::invalid_argument("label_len must lie in [0, lookback)");
  }
  if (cfg.steps < 2) throw std::invalid_argument("steps must be >= 2");
  if (cfg.s < 0.0) throw std::invalid_argument("s must be non-negative");
  if (cfg.n_samples < 1) throw std::invalid_argument("samples must be >= 1");
  if (cfg.s == 0.0 && cfg.n_samples > 1) {
    throw std::invalid_argument("s = 0 is deterministic; more than one sample is invalid");
  }
  if (cfg.preset == Preset::kPoint && cfg.s != 0.0) {
    throw std::invalid_argument("point preset requires s = 0");
  }
  if (cfg.preset == Preset::kProb && !(cfg.s > 0.0)) {
    throw std::invalid_argument("prob preset requires s > 0");
  }
  if (cfg.width < 1) throw std::invalid_argument("width must be >= 1");
  if (cfg.epochs < 0) throw std::invalid_argument("epochs must be >= 0");
  if (cfg.batch < 1) throw std::invalid_argument("batch must be >= 1");
  if (!(cfg.splits.train > 0.0) || cfg.splits.val < 0.0 || cfg.splits.test < 0.0) {
    throw std::invalid_argument("split ratios must be positive (train) / non-negative (val, test)");
  }
  if (cfg.splits.train + cfg.splits.val + cfg.splits.test > 1.0 + 1e-9) {
    throw std::invalid_argument("split ratios must sum to at most 1");
  }
  if (cfg.plot_windows < 0) throw std::invalid_argument("plot count must be >= 0");
}

std::string config_to_json(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["data"] = cfg.data_path;
  j["out"] = cfg.out_dir;
  j["lookback"] = cfg.lookback;
  j["horizon"] = cfg.horizon;
  j["label_len"] = cfg.label_len;
  j["steps"] = cfg.steps;
  j["preset"] = preset_name(cfg.preset);
  j["s"] = cfg.s;
  j["samples"] = cfg.n_samples;
  j["width"] = cfg.width;
  j["epochs"] = cfg.epochs;
  j["batch"] = cfg.batch;
  j["seed"] = cfg.seed;
  j["loss"] = loss_name(cfg.loss);
  j["split"] = {cfg.splits.train, cfg.splits.val, cfg.splits.test};
  j["scale"] = cfg.raw_scale ? "raw" : "norm";
  j["freeze_conditioner"] = cfg.freeze_conditioner;
  j["plot"] = cfg.plot_windows;
  return j.dump(2) + "\n";
}

RunConfig config_from_json(const std::string& text) {
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("config parse error: ") + e.what());
  }
  RunConfig cfg;
  try {
    cfg.data_path = j.at("data").get<std::string>();
    cfg.out_dir = j.at("out").get<std::string>();
    cfg.lookback = j.at("lookback").get<int>();
    cfg.horizon = j.at("horizon").get<int>();
    cfg.label_len = j.at("label_len").get<int>();
    cfg.steps = j.at("steps").get<int>();
    cfg.preset = preset_from_name(j.at("preset").get<std::string>());
    cfg.s = j.at("s").get<double>();
    cfg.n_samples = j.at("samples").get<int>();
    cfg.width = j.at("width").get<int>();
    cfg.epochs = j.at("epochs").get<int>();
    cfg.batch = j.at("batch").get<int>();
    cfg.seed = j.at("seed").get<uint64_t>();
    cfg.loss = loss_from_name(j.at("loss").get<std::string>());
    const auto split = j.at("split");
    cfg.splits.train = split.at(0).get<double>();
    cfg.splits.val = split.at(1).get<double>();
    cfg.splits.test = split.at(2).get<double>();
    const std::string scale = j.at("scale").get<std::string>();
    if (scale != "norm" && scale != "raw") throw DataError("config scale must be norm|raw");
    cfg.raw_scale = scale == "raw";
    cfg.freeze_conditioner = j.at("freeze_conditioner").get<bool>();
    cfg.plot_windows = j.at("plot").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("config field error: ") + e.what());
  }
  return cfg;
}

void save_config(const std::string& path, const RunConfig& cfg) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write config to " + path);
  out << config_to_json(cfg);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open config " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return config_from_json(text);
}

}  // namespace bridgecast
