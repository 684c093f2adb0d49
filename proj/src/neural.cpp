#include "bridgecast/neural.hpp"

#include <cmath>
#include <stdexcept>

#include "bridgecast/errors.hpp"

namespace bridgecast {

std::vector<double> sinusoidal_embedding(int t, int dim) {
  if (dim <= 0 || dim % 2 != 0) {
    throw std::invalid_argument("embedding dimension must be even and positive");
  }
  std::vector<double> emb(static_cast<std::size_t>(dim));
  for (int k = 0; 2 * k < dim; ++k) {
    const double freq = std::pow(10000.0, -2.0 * k / dim);
    emb[static_cast<std::size_t>(2 * k)] = std::sin(t * freq);
    emb[static_cast<std::size_t>(2 * k) + 1] = std::cos(t * freq);
  }
  return emb;
}

Denoiser::Denoiser(int channels, int width, int embed_dim, Activation act)
    : d_(channels), w_(width), e_(embed_dim), act_(act) {
  if (channels < 1 || width < 1) throw std::invalid_argument("denoiser dims must be positive");
  if (embed_dim <= 0 || embed_dim % 2 != 0) {
    throw std::invalid_argument("embedding dimension must be even and positive");
  }
  const int fin = 3 * d_ + e_;
  w_in_ = Matrix(w_, fin);
  b_in_ = Matrix(w_, 1);
  w_h1_ = Matrix(w_, w_);
  b_h1_ = Matrix(w_, 1);
  w_h2_ = Matrix(w_, w_);
  b_h2_ = Matrix(w_, 1);
  w_out_ = Matrix(d_, w_);
  b_out_ = Matrix(d_, 1);
  g_w_in_ = Matrix(w_, fin);
  g_b_in_ = Matrix(w_, 1);
  g_w_h1_ = Matrix(w_, w_);
  g_b_h1_ = Matrix(w_, 1);
  g_w_h2_ = Matrix(w_, w_);
  g_b_h2_ = Matrix(w_, 1);
  g_w_out_ = Matrix(d_, w_);
  g_b_out_ = Matrix(d_, 1);
}

namespace {

void glorot_fill(Matrix& m, int fan_in, int fan_out, Rng& rng) {
  const double bound = std::sqrt(6.0 / (fan_in + fan_out));
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      m(r, c) = bound * (2.0 * rng.uniform01() - 1.0);
    }
  }
}

}  // namespace

void Denoiser::init_params(Rng& rng) {
  const int fin = 3 * d_ + e_;
  glorot_fill(w_in_, fin, w_, rng);
  glorot_fill(w_h1_, w_, w_, rng);
  glorot_fill(w_h2_, w_, w_, rng);
  w_out_.fill(0.0);
  b_in_.fill(0.0);
  b_h1_.fill(0.0);
  b_h2_.fill(0.0);
  b_out_.fill(0.0);
}

double Denoiser::activate(double x) const {
  return act_ == Activation::kTanh ? std::tanh(x) : x;
}

// Derivative expressed through the post-activation value.
double Denoiser::activate_grad(double post) const {
  return act_ == Activation::kTanh ? 1.0 - post * post : 1.0;
}

Matrix Denoiser::forward(const Matrix& y_t, const Matrix& h, const Matrix& c, int t,
                         Cache* cache) const {
  if (!y_t.same_shape(h) || !y_t.same_shape(c) || y_t.cols() != d_) {
    throw std::invalid_argument("denoiser inputs must share shape rows x channels");
  }
  const int rows = y_t.rows();
  const int fin = 3 * d_ + e_;
  const std::vector<double> emb = sinusoidal_embedding(t, e_);

  Matrix features(rows, fin);
  Matrix a0(rows, w_), a1(rows, w_), a2(rows, w_);
  Matrix out(rows, d_);

  for (int r = 0; r < rows; ++r) {
    double* f = features.row(r);
    const double* py = y_t.row(r);
    const double* ph = h.row(r);
    const double* pc = c.row(r);
    for (int j = 0; j < d_; ++j) {
      f[j] = py[j];
      f[d_ + j] = ph[j];
      f[2 * d_ + j] = pc[j];
    }
    for (int j = 0; j < e_; ++j) f[3 * d_ + j] = emb[static_cast<std::size_t>(j)];

    double* p0 = a0.row(r);
    for (int i = 0; i < w_; ++i) {
      const double* wr = w_in_.row(i);
      double acc = b_in_(i, 0);
      for (int j = 0; j < fin; ++j) acc += wr[j] * f[j];
      p0[i] = activate(acc);
    }
    double* p1 = a1.row(r);
    for (int i = 0; i < w_; ++i) {
      const double* wr = w_h1_.row(i);
      double acc = b_h1_(i, 0);
      for (int j = 0; j < w_; ++j) acc += wr[j] * p0[j];
      p1[i] = activate(acc);
    }
    double* p2 = a2.row(r);
    for (int i = 0; i < w_; ++i) {
      const double* wr = w_h2_.row(i);
      double acc = b_h2_(i, 0);
      for (int j = 0; j < w_; ++j) acc += wr[j] * p1[j];
      p2[i] = activate(acc);
    }
    double* po = out.row(r);
    for (int i = 0; i < d_; ++i) {
      const double* wr = w_out_.row(i);
      double acc = b_out_(i, 0);
      for (int j = 0; j < w_; ++j) acc += wr[j] * p2[j];
      po[i] = acc + ph[i];  // residual from the prior forecast
    }
  }

  if (cache != nullptr) {
    cache->features = std::move(features);
    cache->a0 = std::move(a0);
    cache->a1 = std::move(a1);
    cache->a2 = std::move(a2);
    cache->valid = true;
  }
  return out;
}

Denoiser::InputGrads Denoiser::backward(const Cache& cache, const Matrix& dout) {
  if (!cache.valid) throw std::logic_error("denoiser backward requires a cached forward pass");
  const int rows = dout.rows();
  const int fin = 3 * d_ + e_;
  if (dout.cols() != d_ || cache.a2.rows() != rows) {
    throw std::invalid_argument("output gradient shape does not match the cached pass");
  }

  InputGrads in{Matrix(rows, d_), Matrix(rows, d_), Matrix(rows, d_)};
  std::vector<double> dz2(static_cast<std::size_t>(w_));
  std::vector<double> dz1(static_cast<std::size_t>(w_));
  std::vector<double> dz0(static_cast<std::size_t>(w_));

  for (int r = 0; r < rows; ++r) {
    const double* g = dout.row(r);
    const double* p0 = cache.a0.row(r);
    const double* p1 = cache.a1.row(r);
    const double* p2 = cache.a2.row(r);
    const double* f = cache.features.row(r);

    // output projection
    for (int i = 0; i < d_; ++i) {
      double* gw = g_w_out_.row(i);
      for (int j = 0; j < w_; ++j) gw[j] += g[i] * p2[j];
      g_b_out_(i, 0) += g[i];
    }
    for (int j = 0; j < w_; ++j) {
      double acc = 0.0;
      for (int i = 0; i < d_; ++i) acc += w_out_(i, j) * g[i];
      dz2[static_cast<std::size_t>(j)] = acc * activate_grad(p2[j]);
    }
    // second hidden layer
    for (int i = 0; i < w_; ++i) {
      double* gw = g_w_h2_.row(i);
      const double gi = dz2[static_cast<std::size_t>(i)];
      for (int j = 0; j < w_; ++j) gw[j] += gi * p1[j];
      g_b_h2_(i, 0) += gi;
    }
    for (int j = 0; j < w_; ++j) {
      double acc = 0.0;
      for (int i = 0; i < w_; ++i) acc += w_h2_(i, j) * dz2[static_cast<std::size_t>(i)];
      dz1[static_cast<std::size_t>(j)] = acc * activate_grad(p1[j]);
    }
    // first hidden layer
    for (int i = 0; i < w_; ++i) {
      double* gw = g_w_h1_.row(i);
      const double gi = dz1[static_cast<std::size_t>(i)];
      for (int j = 0; j < w_; ++j) gw[j] += gi * p0[j];
      g_b_h1_(i, 0) += gi;
    }
    for (int j = 0; j < w_; ++j) {
      double acc = 0.0;
      for (int i = 0; i < w_; ++i) acc += w_h1_(i, j) * dz1[static_cast<std::size_t>(i)];
      dz0[static_cast<std::size_t>(j)] = acc * activate_grad(p0[j]);
    }
    // input projection
    for (int i = 0; i < w_; ++i) {
      double* gw = g_w_in_.row(i);
      const double gi = dz0[static_cast<std::size_t>(i)];
      for (int j = 0; j < fin; ++j) gw[j] += gi * f[j];
      g_b_in_(i, 0) += gi;
    }
    double* gy = in.y_t.row(r);
    double* gh = in.h.row(r);
    double* gc = in.c.row(r);
    for (int j = 0; j < d_; ++j) {
      double ay = 0.0, ah = 0.0, ac = 0.0;
      for (int i = 0; i < w_; ++i) {
        const double gi = dz0[static_cast<std::size_t>(i)];
        ay += w_in_(i, j) * gi;
        ah += w_in_(i, d_ + j) * gi;
        ac += w_in_(i, 2 * d_ + j) * gi;
      }
      gy[j] = ay;
      gh[j] = ah + g[j];  // residual path
      gc[j] = ac;
    }
  }
  return in;
}

void Denoiser::zero_grads() {
  g_w_in_.fill(0.0);
  g_b_in_.fill(0.0);
  g_w_h1_.fill(0.0);
  g_b_h1_.fill(0.0);
  g_w_h2_.fill(0.0);
  g_b_h2_.fill(0.0);
  g_w_out_.fill(0.0);
  g_b_out_.fill(0.0);
}

std::vector<ParamRef> Denoiser::param_refs() {
  return {
      {"denoiser.w_in", &w_in_, &g_w_in_},   {"denoiser.b_in", &b_in_, &g_b_in_},
      {"denoiser.w_h1", &w_h1_, &g_w_h1_},   {"denoiser.b_h1", &b_h1_, &g_b_h1_},
      {"denoiser.w_h2", &w_h2_, &g_w_h2_},   {"denoiser.b_h2", &b_h2_, &g_b_h2_},
      {"denoiser.w_out", &w_out_, &g_w_out_}, {"denoiser.b_out", &b_out_, &g_b_out_},
  };
}

AdamState AdamState::for_params(const std::vector<ParamRef>& params) {
  AdamState st;
  st.m.reserve(params.size());
  st.v.reserve(params.size());
  for (const ParamRef& p : params) {
    st.m.emplace_back(p.value->rows(), p.value->cols());
    st.v.emplace_back(p.value->rows(), p.value->cols());
  }
  return st;
}

double AdamState::lr_at(long step_index, long total_steps) const {
  if (total_steps <= 1) return lr_max;
  const double frac = static_cast<double>(step_index) / static_cast<double>(total_steps - 1);
  return lr_max + (lr_min - lr_max) * std::min(1.0, std::max(0.0, frac));
}

void adam_step(const std::vector<ParamRef>& params, AdamState& state, double lr) {
  if (params.size() != state.m.size()) {
    throw std::invalid_argument("adam state does not match the parameter list");
  }
  if (!(lr > 0.0)) throw std::invalid_argument("learning rate must be positive");
  for (std::size_t k = 0; k < params.size(); ++k) {
    if (!params[k].value->same_shape(state.m[k])) {
      throw std::invalid_argument("adam moment shape drift for " + params[k].name);
    }
    if (!params[k].grad->all_finite()) {
      throw NumericError("non-finite gradient for " + params[k].name + "; update rejected");
    }
  }
  state.step += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (std::size_t k = 0; k < params.size(); ++k) {
    double* val = params[k].value->data();
    const double* grd = params[k].grad->data();
    double* m = state.m[k].data();
    double* v = state.v[k].data();
    const std::size_t n = params[k].value->size();
    for (std::size_t i = 0; i < n; ++i) {
      m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * grd[i];
      v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * grd[i] * grd[i];
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      val[i] -= lr * mhat / (std::sqrt(vhat) + state.epsilon);
    }
  }
}

EmaState EmaState::from_params(const std::vector<ParamRef>& params) {
  EmaState st;
  st.shadow.reserve(params.size());
  for (const ParamRef& p : params) st.shadow.push_back(*p.value);
  return st;
}

void ema_update(EmaState& state, const std::vector<ParamRef>& params, long step_index) {
  if (step_index < 1) throw std::invalid_argument("ema step index starts at 1");
  if (params.size() != state.shadow.size()) {
    throw std::invalid_argument("ema state does not match the parameter list");
  }
  for (std::size_t k = 0; k < params.size(); ++k) {
    if (!params[k].value->same_shape(state.shadow[k])) {
      throw std::invalid_argument("ema shadow shape drift for " + params[k].name);
    }
  }
  if (step_index % state.interval != 0) return;
  for (std::size_t k = 0; k < params.size(); ++k) {
    double* sh = state.shadow[k].data();
    const double* val = params[k].value->data();
    const std::size_t n = state.shadow[k].size();
    for (std::size_t i = 0; i < n; ++i) {
      sh[i] = state.decay * sh[i] + (1.0 - state.decay) * val[i];
    }
  }
}

}  // namespace bridgecast
