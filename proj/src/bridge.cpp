#include "bridgecast/bridge.hpp"

#include <cmath>
#include <exception>
#include <stdexcept>
#include <thread>

#include "bridgecast/errors.hpp"

namespace bridgecast {

Matrix ForecastResult::horizon_slice(const Matrix& state) const {
  const int rows = state.rows() - horizon_begin;
  Matrix out(rows, state.cols());
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < state.cols(); ++c) out(r, c) = state(horizon_begin + r, c);
  }
  return out;
}

std::pair<Matrix, double> forward_marginal(const Matrix& y0, const Matrix& h, int t,
                                           const BridgeProcess& proc) {
  if (!y0.same_shape(h)) throw std::invalid_argument("y0 and h must share shape");
  const double a = proc.schedule.alpha_hat(t);
  Matrix mean(y0.rows(), y0.cols());
  const double* py = y0.data();
  const double* ph = h.data();
  double* pm = mean.data();
  for (std::size_t i = 0; i < mean.size(); ++i) pm[i] = a * py[i] + (1.0 - a) * ph[i];
  return {std::move(mean), proc.schedule.beta_hat_sq(t)};
}

Matrix corrupt(const Matrix& y0, const Matrix& h, int t, const BridgeProcess& proc,
               const Matrix& eps) {
  if (!eps.same_shape(y0)) throw std::invalid_argument("eps must share shape with y0");
  auto [mean, var] = forward_marginal(y0, h, t, proc);
  const double sd = std::sqrt(var);
  double* pm = mean.data();
  const double* pe = eps.data();
  for (std::size_t i = 0; i < mean.size(); ++i) pm[i] += sd * pe[i];
  return mean;
}

Matrix reverse_step(const Matrix& y_t, const Matrix& y_hat, const Matrix& h,
                    const ReverseCoefficients& coeffs, const Matrix* z) {
  if (!y_t.same_shape(y_hat) || !y_t.same_shape(h)) {
    throw std::invalid_argument("reverse step inputs must share shape");
  }
  if (coeffs.sigma2 > 0.0 && z == nullptr) {
    throw std::invalid_argument("noise matrix required when sigma2 > 0");
  }
  if (z != nullptr && !z->same_shape(y_t)) {
    throw std::invalid_argument("noise matrix must share shape with the state");
  }
  Matrix out(y_t.rows(), y_t.cols());
  const double sd = std::sqrt(coeffs.sigma2);
  const double* pt = y_t.data();
  const double* pp = y_hat.data();
  const double* ph = h.data();
  const double* pz = z != nullptr ? z->data() : nullptr;
  double* po = out.data();
  for (std::size_t i = 0; i < out.size(); ++i) {
    double v = coeffs.kappa * pt[i] + coeffs.lambda * pp[i] + coeffs.zeta * ph[i];
    if (pz != nullptr) v += sd * pz[i];
    po[i] = v;
  }
  return out;
}

namespace {

Matrix run_chain(const DenoiserFn& denoiser, const Matrix& h, const Matrix& c,
                 const std::vector<ReverseCoefficients>& coeffs, int steps, uint64_t chain_seed) {
  Rng rng(chain_seed);
  Matrix state = h;
  Matrix noise(h.rows(), h.cols());
  for (int t = steps; t >= 1; --t) {
    const Matrix y_hat = denoiser(state, h, c, t);
    if (!y_hat.same_shape(state)) {
      throw std::invalid_argument("denoiser returned a mismatched shape at step " +
                                  std::to_string(t));
    }
    if (!y_hat.all_finite()) {
      throw NumericError("non-finite denoiser output at step " + std::to_string(t));
    }
    const ReverseCoefficients& rc = coeffs[static_cast<std::size_t>(t)];
    const Matrix* z = nullptr;
    if (t > 1 && rc.sigma2 > 0.0) {
      double* pn = noise.data();
      for (std::size_t i = 0; i < noise.size(); ++i) pn[i] = rng.normal();
      z = &noise;
    }
    state = reverse_step(state, y_hat, h, rc, z);
  }
  return state;
}

}  // namespace

ForecastResult sample_forecast(const DenoiserFn& denoiser, const Matrix& h, const Matrix& c,
                               const BridgeProcess& proc, int n_samples, uint64_t seed,
                               int n_threads) {
  if (!h.same_shape(c)) throw std::invalid_argument("h and c must share shape");
  if (n_samples < 1) throw std::invalid_argument("n_samples must be positive");
  const bool deterministic = proc.policy.s == 0.0;
  if (deterministic && n_samples != 1) {
    throw std::invalid_argument("a deterministic sampler (s = 0) admits exactly one sample");
  }

  const int T = proc.schedule.steps();
  std::vector<ReverseCoefficients> coeffs(static_cast<std::size_t>(T) + 1);
  for (int t = 1; t <= T; ++t) {
    coeffs[static_cast<std::size_t>(t)] = proc.schedule.reverse_coefficients(t, proc.policy);
  }

  ForecastResult res;
  res.horizon_begin = proc.label_len;

  if (deterministic) {
    res.point = run_chain(denoiser, h, c, coeffs, T, mix_seed(seed, 0));
    return res;
  }

  res.samples.assign(static_cast<std::size_t>(n_samples), Matrix());
  const int workers = std::max(1, std::min(n_threads, n_samples));
  if (workers == 1) {
    for (int i = 0; i < n_samples; ++i) {
      res.samples[static_cast<std::size_t>(i)] =
          run_chain(denoiser, h, c, coeffs, T, mix_seed(seed, static_cast<uint64_t>(i)));
    }
    return res;
  }

  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      try {
        for (int i = w; i < n_samples; i += workers) {
          res.samples[static_cast<std::size_t>(i)] =
              run_chain(denoiser, h, c, coeffs, T, mix_seed(seed, static_cast<uint64_t>(i)));
        }
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return res;
}

namespace {

double window_loss_and_grad(const Matrix& out, const Matrix& target, LossKind kind, double scale,
                            Matrix* dout) {
  double loss = 0.0;
  const double* po = out.data();
  const double* pt = target.data();
  double* pg = dout != nullptr ? dout->data() : nullptr;
  const auto n = out.size();
  const double inv = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = po[i] - pt[i];
    if (kind == LossKind::kMse) {
      loss += r * r * inv;
      if (pg != nullptr) pg[i] = 2.0 * r * inv * scale;
    } else {
      loss += std::fabs(r) * inv;
      if (pg != nullptr) pg[i] = (r > 0.0 ? 1.0 : (r < 0.0 ? -1.0 : 0.0)) * inv * scale;
    }
  }
  return loss;
}

}  // namespace

double training_step(const std::vector<const SeriesWindow*>& batch, Denoiser& denoiser,
                     const LinearMap& conditioner, Matrix& cond_grad_weight,
                     Matrix& cond_grad_bias, const LinearMap& prior, const BridgeProcess& proc,
                     LossKind loss_kind, Rng& rng, bool freeze_conditioner) {
  if (batch.empty()) throw std::invalid_argument("training batch must be non-empty");
  const int T = proc.schedule.steps();
  const double batch_scale = 1.0 / static_cast<double>(batch.size());

  double loss = 0.0;
  for (const SeriesWindow* w : batch) {
    const int t = static_cast<int>(rng.uniform_int(1, T));
    Matrix eps(w->y_star.rows(), w->y_star.cols());
    double* pe = eps.data();
    for (std::size_t i = 0; i < eps.size(); ++i) pe[i] = rng.normal();

    const Matrix h = prior.apply(w->x);
    const Matrix c = conditioner.apply(w->x);
    const Matrix y_t = corrupt(w->y_star, h, t, proc, eps);

    Denoiser::Cache cache;
    const Matrix out = denoiser.forward(y_t, h, c, t, &cache);

    Matrix dout(out.rows(), out.cols());
    loss += batch_scale * window_loss_and_grad(out, w->y_star, loss_kind, batch_scale, &dout);

    const Denoiser::InputGrads in = denoiser.backward(cache, dout);
    if (!freeze_conditioner) {
      // c = W x + b per channel column: dW += dc x^T, db += row-sums of dc.
      for (int i = 0; i < in.c.rows(); ++i) {
        const double* dc = in.c.row(i);
        double* gw = cond_grad_weight.row(i);
        double acc_b = 0.0;
        for (int ch = 0; ch < in.c.cols(); ++ch) acc_b += dc[ch];
        cond_grad_bias(i, 0) += acc_b;
        for (int k = 0; k < w->x.rows(); ++k) {
          const double* xr = w->x.row(k);
          double acc = 0.0;
          for (int ch = 0; ch < in.c.cols(); ++ch) acc += dc[ch] * xr[ch];
          gw[k] += acc;
        }
      }
    }
  }
  if (!std::isfinite(loss)) {
    throw NumericError("non-finite training loss; batch rejected");
  }
  return loss;
}

double denoising_loss(const std::vector<const SeriesWindow*>& windows, const Denoiser& denoiser,
                      const LinearMap& conditioner, const LinearMap& prior,
                      const BridgeProcess& proc, LossKind loss_kind, Rng& rng) {
  if (windows.empty()) throw std::invalid_argument("loss evaluation needs at least one window");
  const int T = proc.schedule.steps();
  double loss = 0.0;
  int i = 0;
  for (const SeriesWindow* w : windows) {
    const int t = 1 + (i++ % T);
    Matrix eps(w->y_star.rows(), w->y_star.cols());
    double* pe = eps.data();
    for (std::size_t k = 0; k < eps.size(); ++k) pe[k] = rng.normal();
    const Matrix h = prior.apply(w->x);
    const Matrix c = conditioner.apply(w->x);
    const Matrix y_t = corrupt(w->y_star, h, t, proc, eps);
    const Matrix out = denoiser.forward(y_t, h, c, t);
    loss += window_loss_and_grad(out, w->y_star, loss_kind, 1.0, nullptr);
  }
  return loss / static_cast<double>(windows.size());
}

}  // namespace bridgecast
