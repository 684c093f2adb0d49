#include "bridgecast/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>
#include <vector>

#include <json.hpp>

#include "bridgecast/bridge.hpp"
#include "bridgecast/checkpoint.hpp"
#include "bridgecast/errors.hpp"
#include "bridgecast/format.hpp"
#include "bridgecast/plot.hpp"

namespace fs = std::filesystem;

namespace bridgecast {

namespace {

constexpr int kEmbedDim = 8;
constexpr double kPriorRidge = 1e-3;
constexpr int kMetaFields = 8;  // version, d, H, L, label_len, T, width, embed

int parse_env_threads() {
  const char* env = std::getenv("BRIDGECAST_THREADS");
  if (env != nullptr) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1 && v <= 256) return static_cast<int>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::min(hw == 0 ? 1u : hw, 8u));
}

void parallel_for(int count, int n_threads, const std::function<void(int)>& body) {
  const int workers = std::max(1, std::min(n_threads, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      try {
        for (int i = w; i < count; i += workers) body(i);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

Matrix make_meta(int channels, const RunConfig& cfg) {
  Matrix meta(1, kMetaFields);
  meta(0, 0) = 1.0;  // header version
  meta(0, 1) = channels;
  meta(0, 2) = cfg.lookback;
  meta(0, 3) = cfg.horizon;
  meta(0, 4) = cfg.label_len;
  meta(0, 5) = cfg.steps;
  meta(0, 6) = cfg.width;
  meta(0, 7) = kEmbedDim;
  return meta;
}

Matrix vector_tensor(const std::vector<double>& v) {
  Matrix m(1, static_cast<int>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) m(0, static_cast<int>(i)) = v[i];
  return m;
}

NormStats stats_from_tensors(const std::vector<NamedTensor>& tensors) {
  const Matrix& mean = find_tensor(tensors, "norm.mean");
  const Matrix& sd = find_tensor(tensors, "norm.std");
  const Matrix& cst = find_tensor(tensors, "norm.const");
  NormStats st;
  for (int c = 0; c < mean.cols(); ++c) {
    st.mean.push_back(mean(0, c));
    st.stddev.push_back(sd(0, c));
    st.constant.push_back(cst(0, c) != 0.0 ? 1 : 0);
  }
  return st;
}

void load_linear_map(const std::vector<NamedTensor>& tensors, const std::string& prefix,
                     LinearMap* map) {
  map->weight = find_tensor(tensors, prefix + ".weight");
  map->bias = find_tensor(tensors, prefix + ".bias");
}

void load_denoiser(const std::vector<NamedTensor>& tensors, const std::string& prefix,
                   Denoiser* den) {
  for (ParamRef& ref : den->param_refs()) {
    const Matrix& src = find_tensor(tensors, prefix + ref.name);
    if (!src.same_shape(*ref.value)) {
      throw DataError("checkpoint tensor " + prefix + ref.name + " has shape " +
                      std::to_string(src.rows()) + "x" + std::to_string(src.cols()) +
                      ", expected " + std::to_string(ref.value->rows()) + "x" +
                      std::to_string(ref.value->cols()));
    }
    *ref.value = src;
  }
}

struct LoadedModel {
  int channels = 0;
  RunConfig shape;  // lookback/horizon/label_len/steps/width from the header
  NormStats stats;
  LinearMap prior;
  LinearMap conditioner;  // EMA shadow
  Denoiser denoiser;      // EMA shadow

  explicit LoadedModel(int d, int width) : denoiser(d, width, kEmbedDim) {}
};

LoadedModel load_model(const std::string& path, const RunConfig& cfg) {
  const std::vector<NamedTensor> tensors = load_checkpoint(path);
  const Matrix& meta = find_tensor(tensors, "meta");
  if (meta.cols() != kMetaFields || meta(0, 0) != 1.0) {
    throw DataError("unsupported checkpoint header in " + path);
  }
  const int d = static_cast<int>(meta(0, 1));
  const int width = static_cast<int>(meta(0, 6));
  auto check = [&](const char* name, double have, long want) {
    if (static_cast<long>(have) != want) {
      throw DataError(std::string("checkpoint/config shape drift: ") + name + " is " +
                      std::to_string(static_cast<long>(have)) + " in the checkpoint but " +
                      std::to_string(want) + " in the config");
    }
  };
  check("lookback", meta(0, 2), cfg.lookback);
  check("horizon", meta(0, 3), cfg.horizon);
  check("label_len", meta(0, 4), cfg.label_len);
  check("steps", meta(0, 5), cfg.steps);
  check("width", meta(0, 6), cfg.width);

  LoadedModel model(d, width);
  model.channels = d;
  model.shape = cfg;
  model.stats = stats_from_tensors(tensors);
  load_linear_map(tensors, "prior_F", &model.prior);
  load_linear_map(tensors, "ema.cond_E", &model.conditioner);
  load_denoiser(tensors, "ema.", &model.denoiser);
  return model;
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

}  // namespace

int effective_threads() {
  static const int v = parse_env_threads();
  return v;
}

TrainOutputs run_train(const RunConfig& cfg) {
  validate(cfg);
  if (cfg.data_path.empty()) throw std::invalid_argument("train requires a dataset path");

  const Dataset raw = load_csv(cfg.data_path);
  const SplitResult parts = split(raw, cfg.splits, cfg.lookback, cfg.horizon);
  const NormStats stats = NormStats::from(parts.train);
  if (stats.any_constant()) {
    std::cerr << "warning: constant channel(s) in the training split; stddev forced to 1\n";
  }
  const Dataset train = normalize(parts.train, stats);
  const WindowSet train_windows =
      make_windows(train, cfg.lookback, cfg.horizon, cfg.label_len, 1);

  const LinearMap prior = fit_prior(train_windows, kPriorRidge);
  LinearMap cond = prior;
  Matrix cond_gw(cond.weight.rows(), cond.weight.cols());
  Matrix cond_gb(cond.bias.rows(), 1);

  Denoiser denoiser(train.channels(), cfg.width, kEmbedDim);
  Rng init_rng(mix_seed(cfg.seed, 101));
  denoiser.init_params(init_rng);

  std::vector<ParamRef> refs = denoiser.param_refs();
  if (!cfg.freeze_conditioner) {
    refs.push_back({"cond_E.weight", &cond.weight, &cond_gw});
    refs.push_back({"cond_E.bias", &cond.bias, &cond_gb});
  }
  AdamState adam = AdamState::for_params(refs);
  EmaState ema = EmaState::from_params(refs);

  const BridgeProcess proc{BridgeSchedule::linear(cfg.steps), VariancePolicy{cfg.s},
                           cfg.label_len};
  const int nw = train_windows.count();
  const long steps_per_epoch = (nw + cfg.batch - 1) / cfg.batch;
  const long total_steps = steps_per_epoch * cfg.epochs;

  // Validation loss on at most 512 windows, strided evenly.
  std::optional<Dataset> val;
  std::optional<WindowSet> val_windows;
  if (parts.val.n() > 0) {
    val = normalize(parts.val, stats);
    const int nv_all = val->n() - cfg.lookback - cfg.horizon + 1;
    const int stride = std::max(1, nv_all / 512);
    val_windows.emplace(make_windows(*val, cfg.lookback, cfg.horizon, cfg.label_len, stride));
  }

  fs::create_directories(cfg.out_dir);
  std::string curve = "epoch,lr,train_loss,val_loss\n";

  std::vector<int> order(static_cast<std::size_t>(nw));
  for (int i = 0; i < nw; ++i) order[static_cast<std::size_t>(i)] = i;
  Rng train_rng(mix_seed(cfg.seed, 202));

  long step = 0;
  double last_epoch_loss = 0.0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    shuffle_in_place(order, train_rng);
    double epoch_loss = 0.0;
    long epoch_batches = 0;
    double lr = adam.lr_max;
    for (int begin = 0; begin < nw; begin += cfg.batch) {
      const int end = std::min(nw, begin + cfg.batch);
      std::vector<SeriesWindow> storage;
      storage.reserve(static_cast<std::size_t>(end - begin));
      std::vector<const SeriesWindow*> batch;
      for (int i = begin; i < end; ++i) {
        storage.push_back(train_windows.get(order[static_cast<std::size_t>(i)]));
      }
      for (const SeriesWindow& w : storage) batch.push_back(&w);

      denoiser.zero_grads();
      cond_gw.fill(0.0);
      cond_gb.fill(0.0);
      const double loss = training_step(batch, denoiser, cond, cond_gw, cond_gb, prior, proc,
                                        cfg.loss, train_rng, cfg.freeze_conditioner);
      lr = adam.lr_at(step, total_steps);
      adam_step(refs, adam, lr);
      ++step;
      ema_update(ema, refs, step);
      epoch_loss += loss;
      ++epoch_batches;
    }
    epoch_loss /= static_cast<double>(std::max(1L, epoch_batches));
    last_epoch_loss = epoch_loss;

    std::string val_cell;
    if (val_windows) {
      std::vector<SeriesWindow> vstore;
      std::vector<const SeriesWindow*> vbatch;
      vstore.reserve(static_cast<std::size_t>(val_windows->count()));
      for (int i = 0; i < val_windows->count(); ++i) vstore.push_back(val_windows->get(i));
      for (const SeriesWindow& w : vstore) vbatch.push_back(&w);
      Rng val_rng(mix_seed(cfg.seed, 303 + static_cast<uint64_t>(epoch)));
      const double vloss =
          denoising_loss(vbatch, denoiser, cond, prior, proc, cfg.loss, val_rng);
      val_cell = format_double(vloss);
    }
    curve += std::to_string(epoch) + "," + format_double(lr) + "," + format_double(epoch_loss) +
             "," + val_cell + "\n";
    std::cout << "epoch " << epoch << " loss " << epoch_loss
              << (val_cell.empty() ? "" : " val " + val_cell) << " lr " << lr << "\n";
  }

  TrainOutputs out;
  out.config_path = join_path(cfg.out_dir, "config.json");
  out.curve_path = join_path(cfg.out_dir, "training_curve.csv");
  out.checkpoint_path = join_path(cfg.out_dir, "checkpoint.bin");
  out.final_train_loss = last_epoch_loss;
  out.steps_run = step;

  save_config(out.config_path, cfg);
  {
    std::ofstream f(out.curve_path, std::ios::binary);
    if (!f) throw DataError("cannot write " + out.curve_path);
    f << curve;
  }

  std::vector<NamedTensor> tensors;
  tensors.push_back({"meta", make_meta(train.channels(), cfg)});
  tensors.push_back({"norm.mean", vector_tensor(stats.mean)});
  tensors.push_back({"norm.std", vector_tensor(stats.stddev)});
  {
    std::vector<double> cst(stats.constant.begin(), stats.constant.end());
    tensors.push_back({"norm.const", vector_tensor(cst)});
  }
  tensors.push_back({"prior_F.weight", prior.weight});
  tensors.push_back({"prior_F.bias", prior.bias});
  tensors.push_back({"cond_E.weight", cond.weight});
  tensors.push_back({"cond_E.bias", cond.bias});
  for (const ParamRef& ref : denoiser.param_refs()) tensors.push_back({ref.name, *ref.value});
  for (std::size_t k = 0; k < refs.size(); ++k) {
    tensors.push_back({"ema." + refs[k].name, ema.shadow[k]});
  }
  if (cfg.freeze_conditioner) {
    tensors.push_back({"ema.cond_E.weight", cond.weight});
    tensors.push_back({"ema.cond_E.bias", cond.bias});
  }
  save_checkpoint(out.checkpoint_path, tensors);
  return out;
}

namespace {

struct WindowForecast {
  Matrix truth;               // horizon x d
  Matrix point;               // horizon x d (median when sampling)
  std::vector<Matrix> samples;
  Matrix q05, q50, q95;       // only when sampling
  std::vector<double> context;  // channel 0 tail of x, for plots
};

std::string sample_col_name(int i, int width) {
  std::string num = std::to_string(i);
  while (static_cast<int>(num.size()) < width) num.insert(num.begin(), '0');
  return "s" + num;
}

}  // namespace

ForecastOutputs run_forecast(const RunConfig& cfg, const std::string& checkpoint_path) {
  validate(cfg);
  if (cfg.data_path.empty()) throw std::invalid_argument("forecast requires a dataset path");
  LoadedModel model = load_model(checkpoint_path, cfg);

  const Dataset raw = load_csv(cfg.data_path);
  if (raw.channels() != model.channels) {
    throw DataError("dataset has " + std::to_string(raw.channels()) +
                    " channels but the checkpoint was trained on " +
                    std::to_string(model.channels));
  }
  const SplitResult parts = split(raw, cfg.splits, cfg.lookback, cfg.horizon);
  if (parts.test.n() == 0) {
    throw DataError("test split is empty; forecasting refuses to run (adjust split ratios)");
  }
  const Dataset test = normalize(parts.test, model.stats);
  const WindowSet windows = make_windows(test, cfg.lookback, cfg.horizon, cfg.label_len, 1);

  const BridgeProcess proc{BridgeSchedule::linear(cfg.steps), VariancePolicy{cfg.s},
                           cfg.label_len};
  const Denoiser& den = model.denoiser;
  const DenoiserFn den_fn = [&den](const Matrix& y_t, const Matrix& h, const Matrix& c, int t) {
    return den.forward(y_t, h, c, t);
  };

  const int n = windows.count();
  const int d = windows.channels();
  const int L = cfg.horizon;
  std::vector<WindowForecast> results(static_cast<std::size_t>(n));
  const int context_len = std::min(cfg.lookback, std::max(2 * L, 16));

  parallel_for(n, effective_threads(), [&](int w) {
    const SeriesWindow win = windows.get(w);
    const Matrix h = model.prior.apply(win.x);
    const Matrix c = model.conditioner.apply(win.x);
    const ForecastResult res = sample_forecast(den_fn, h, c, proc, cfg.n_samples,
                                               mix_seed(cfg.seed, 5000 + static_cast<uint64_t>(w)));
    WindowForecast& out = results[static_cast<std::size_t>(w)];
    out.truth = cfg.raw_scale ? denormalize(win.y, model.stats) : win.y;
    if (res.point) {
      Matrix p = res.horizon_slice(*res.point);
      out.point = cfg.raw_scale ? denormalize(p, model.stats) : std::move(p);
    } else {
      out.samples.reserve(res.samples.size());
      for (const Matrix& s : res.samples) {
        Matrix p = res.horizon_slice(s);
        out.samples.push_back(cfg.raw_scale ? denormalize(p, model.stats) : std::move(p));
      }
      out.q05 = Matrix(L, d);
      out.q50 = Matrix(L, d);
      out.q95 = Matrix(L, d);
      std::vector<double> cell(static_cast<std::size_t>(cfg.n_samples));
      for (int r = 0; r < L; ++r) {
        for (int ch = 0; ch < d; ++ch) {
          for (int i = 0; i < cfg.n_samples; ++i) {
            cell[static_cast<std::size_t>(i)] = out.samples[static_cast<std::size_t>(i)](r, ch);
          }
          out.q05(r, ch) = sample_quantile(cell, 0.05);
          out.q50(r, ch) = sample_quantile(cell, 0.50);
          out.q95(r, ch) = sample_quantile(cell, 0.95);
        }
      }
      out.point = out.q50;
    }
    if (w < cfg.plot_windows) {
      out.context.resize(static_cast<std::size_t>(context_len));
      for (int i = 0; i < context_len; ++i) {
        const double v = win.x(cfg.lookback - context_len + i, 0);
        out.context[static_cast<std::size_t>(i)] =
            cfg.raw_scale ? v * model.stats.stddev[0] + model.stats.mean[0] : v;
      }
    }
  });

  fs::create_directories(cfg.out_dir);
  ForecastOutputs out;
  out.forecast_csv = join_path(cfg.out_dir, "forecasts.csv");
  out.n_windows = n;

  const bool prob = cfg.s > 0.0;
  const int pad = std::max(3, static_cast<int>(std::to_string(cfg.n_samples - 1).size()));
  std::string csv = "window_id,channel,horizon_step,y_true,y_point";
  if (prob) {
    csv += ",q05,q50,q95";
    for (int i = 0; i < cfg.n_samples; ++i) csv += "," + sample_col_name(i, pad);
  }
  csv += "\n";
  for (int w = 0; w < n; ++w) {
    const WindowForecast& r = results[static_cast<std::size_t>(w)];
    for (int ch = 0; ch < d; ++ch) {
      for (int step = 0; step < L; ++step) {
        csv += std::to_string(w);
        csv.push_back(',');
        csv += test.channel_names[static_cast<std::size_t>(ch)];
        csv.push_back(',');
        csv += std::to_string(step);
        csv.push_back(',');
        append_double(csv, r.truth(step, ch));
        csv.push_back(',');
        append_double(csv, r.point(step, ch));
        if (prob) {
          csv.push_back(',');
          append_double(csv, r.q05(step, ch));
          csv.push_back(',');
          append_double(csv, r.q50(step, ch));
          csv.push_back(',');
          append_double(csv, r.q95(step, ch));
          for (int i = 0; i < cfg.n_samples; ++i) {
            csv.push_back(',');
            append_double(csv, r.samples[static_cast<std::size_t>(i)](step, ch));
          }
        }
        csv.push_back('\n');
      }
    }
  }
  {
    std::ofstream f(out.forecast_csv, std::ios::binary);
    if (!f) throw DataError("cannot write " + out.forecast_csv);
    f << csv;
  }

  if (cfg.plot_windows > 0) {
    const std::string plot_dir = join_path(cfg.out_dir, "plots");
    fs::create_directories(plot_dir);
    for (int w = 0; w < std::min(cfg.plot_windows, n); ++w) {
      const WindowForecast& r = results[static_cast<std::size_t>(w)];
      PlotSeries series;
      series.context_truth = r.context;
      for (int step = 0; step < L; ++step) {
        series.horizon_truth.push_back(r.truth(step, 0));
        series.forecast.push_back(r.point(step, 0));
        if (prob) {
          series.band_low.push_back(r.q05(step, 0));
          series.band_high.push_back(r.q95(step, 0));
        }
      }
      series.title = "window " + std::to_string(w) + ", channel " + test.channel_names[0];
      std::string name = "window_" + std::to_string(w) + ".svg";
      write_forecast_svg(join_path(plot_dir, name), series);
    }
  }
  return out;
}

namespace {

struct ForecastRow {
  int window = 0;
  std::string channel;
  int step = 0;
  double y_true = 0.0;
  double y_point = 0.0;
  std::vector<double> samples;
};

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_cell(const std::string& s, const char* what) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str()) throw DataError(std::string("forecast file: cannot parse ") + what);
  return v;
}

}  // namespace

ScoreReport run_evaluate(const std::string& forecast_csv, const std::string& report_json,
                         const std::string& per_window_csv, CrpsEstimator estimator) {
  std::ifstream in(forecast_csv);
  if (!in) throw DataError("cannot open forecast file " + forecast_csv);
  std::string line;
  if (!std::getline(in, line)) throw DataError(forecast_csv + " is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  const std::vector<std::string> header = split_csv_line(line);
  auto col_of = [&](const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return static_cast<int>(i);
    }
    return -1;
  };
  const int c_window = col_of("window_id");
  const int c_channel = col_of("channel");
  const int c_step = col_of("horizon_step");
  const int c_true = col_of("y_true");
  const int c_point = col_of("y_point");
  if (c_window < 0 || c_channel < 0 || c_step < 0 || c_true < 0 || c_point < 0) {
    throw DataError(forecast_csv + " lacks the required forecast columns");
  }
  std::vector<int> sample_cols;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string& h = header[i];
    if (h.size() >= 2 && h[0] == 's' &&
        h.find_first_not_of("0123456789", 1) == std::string::npos) {
      sample_cols.push_back(static_cast<int>(i));
    }
  }
  const int n_samples = static_cast<int>(sample_cols.size());

  std::vector<ForecastRow> rows;
  int max_window = -1, max_step = -1;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw DataError(forecast_csv + ": row with " + std::to_string(cells.size()) +
                      " cells, header has " + std::to_string(header.size()));
    }
    ForecastRow r;
    r.window = static_cast<int>(parse_cell(cells[static_cast<std::size_t>(c_window)], "window_id"));
    r.channel = cells[static_cast<std::size_t>(c_channel)];
    r.step = static_cast<int>(parse_cell(cells[static_cast<std::size_t>(c_step)], "horizon_step"));
    r.y_true = parse_cell(cells[static_cast<std::size_t>(c_true)], "y_true");
    r.y_point = parse_cell(cells[static_cast<std::size_t>(c_point)], "y_point");
    r.samples.reserve(static_cast<std::size_t>(n_samples));
    for (int sc : sample_cols) {
      r.samples.push_back(parse_cell(cells[static_cast<std::size_t>(sc)], "sample"));
    }
    max_window = std::max(max_window, r.window);
    max_step = std::max(max_step, r.step);
    rows.push_back(std::move(r));
  }
  if (rows.empty()) throw DataError(forecast_csv + " has no forecast rows");

  std::vector<std::string> channels;
  std::map<std::string, int> channel_index;
  for (const ForecastRow& r : rows) {
    if (channel_index.find(r.channel) == channel_index.end()) {
      channel_index[r.channel] = static_cast<int>(channels.size());
      channels.push_back(r.channel);
    }
  }
  const int n_windows = max_window + 1;
  const int n_channels = static_cast<int>(channels.size());
  const int horizon = max_step + 1;

  // cell index: ((w * C) + ch) * L + step
  const std::size_t n_cells =
      static_cast<std::size_t>(n_windows) * n_channels * static_cast<std::size_t>(horizon);
  std::vector<double> truth(n_cells), point(n_cells);
  std::vector<uint8_t> seen(n_cells, 0);
  std::vector<double> samples(n_samples > 0 ? n_cells * static_cast<std::size_t>(n_samples) : 0);
  for (const ForecastRow& r : rows) {
    if (r.window < 0 || r.step < 0) throw DataError("negative window or step id");
    const std::size_t cell =
        (static_cast<std::size_t>(r.window) * n_channels +
         static_cast<std::size_t>(channel_index[r.channel])) *
            horizon +
        static_cast<std::size_t>(r.step);
    truth[cell] = r.y_true;
    point[cell] = r.y_point;
    seen[cell] = 1;
    for (int i = 0; i < n_samples; ++i) {
      samples[cell * static_cast<std::size_t>(n_samples) + static_cast<std::size_t>(i)] =
          r.samples[static_cast<std::size_t>(i)];
    }
  }
  for (std::size_t i = 0; i < n_cells; ++i) {
    if (!seen[i]) throw DataError("forecast file is missing cells; the grid is incomplete");
  }

  const auto crps_fn = estimator == CrpsEstimator::kEnergy ? crps_empirical : crps_quantile_grid;

  ScoreReport report;
  report.n_windows = n_windows;
  report.n_samples = n_samples;
  std::string pw_csv = "window_id,mse,mae,crps,crps_sum\n";
  double acc_mse = 0.0, acc_mae = 0.0, acc_crps = 0.0, acc_crps_sum = 0.0;
  std::vector<double> summed(static_cast<std::size_t>(std::max(1, n_samples)));
  for (int w = 0; w < n_windows; ++w) {
    double w_mse = 0.0, w_mae = 0.0, w_crps = 0.0, w_crps_sum = 0.0;
    for (int ch = 0; ch < n_channels; ++ch) {
      for (int st = 0; st < horizon; ++st) {
        const std::size_t cell =
            (static_cast<std::size_t>(w) * n_channels + static_cast<std::size_t>(ch)) * horizon +
            static_cast<std::size_t>(st);
        const double e = point[cell] - truth[cell];
        w_mse += e * e;
        w_mae += std::fabs(e);
        if (n_samples > 0) {
          const std::span<const double> cell_samples(
              samples.data() + cell * static_cast<std::size_t>(n_samples),
              static_cast<std::size_t>(n_samples));
          w_crps += crps_fn(cell_samples, truth[cell]);
        }
      }
    }
    const double cells = static_cast<double>(n_channels) * horizon;
    w_mse /= cells;
    w_mae /= cells;
    if (n_samples > 0) {
      w_crps /= cells;
      for (int st = 0; st < horizon; ++st) {
        double true_sum = 0.0;
        std::fill(summed.begin(), summed.end(), 0.0);
        for (int ch = 0; ch < n_channels; ++ch) {
          const std::size_t cell =
              (static_cast<std::size_t>(w) * n_channels + static_cast<std::size_t>(ch)) * horizon +
              static_cast<std::size_t>(st);
          true_sum += truth[cell];
          for (int i = 0; i < n_samples; ++i) {
            summed[static_cast<std::size_t>(i)] +=
                samples[cell * static_cast<std::size_t>(n_samples) + static_cast<std::size_t>(i)];
          }
        }
        w_crps_sum += crps_fn({summed.data(), static_cast<std::size_t>(n_samples)}, true_sum);
      }
      w_crps_sum /= static_cast<double>(horizon);
    }
    acc_mse += w_mse;
    acc_mae += w_mae;
    acc_crps += w_crps;
    acc_crps_sum += w_crps_sum;
    pw_csv += std::to_string(w) + "," + format_double(w_mse) + "," + format_double(w_mae);
    pw_csv.push_back(',');
    if (n_samples > 0) pw_csv += format_double(w_crps);
    pw_csv.push_back(',');
    if (n_samples > 0) pw_csv += format_double(w_crps_sum);
    pw_csv.push_back('\n');
  }
  report.mse = acc_mse / n_windows;
  report.mae = acc_mae / n_windows;
  if (n_samples > 0) {
    report.crps = acc_crps / n_windows;
    report.crps_sum = acc_crps_sum / n_windows;
  }

  if (!report_json.empty()) {
    if (fs::path(report_json).has_parent_path()) {
      fs::create_directories(fs::path(report_json).parent_path());
    }
    nlohmann::ordered_json j;
    j["n_windows"] = report.n_windows;
    j["n_samples"] = report.n_samples;
    j["horizon"] = horizon;
    j["channels"] = n_channels;
    j["estimator"] = estimator == CrpsEstimator::kEnergy ? "energy" : "quantile";
    j["mse"] = report.mse;
    j["mae"] = report.mae;
    if (report.crps) {
      j["crps"] = *report.crps;
      j["crps_sum"] = *report.crps_sum;
    } else {
      j["crps"] = nullptr;
      j["crps_sum"] = nullptr;
    }
    std::ofstream f(report_json, std::ios::binary);
    if (!f) throw DataError("cannot write " + report_json);
    f << j.dump(2) << "\n";
  }
  if (!per_window_csv.empty()) {
    if (fs::path(per_window_csv).has_parent_path()) {
      fs::create_directories(fs::path(per_window_csv).parent_path());
    }
    std::ofstream f(per_window_csv, std::ios::binary);
    if (!f) throw DataError("cannot write " + per_window_csv);
    f << pw_csv;
  }
  return report;
}

}  // namespace bridgecast
