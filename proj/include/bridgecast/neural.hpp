#pragma once

#include <string>
#include <vector>

#include "bridgecast/matrix.hpp"
#include "bridgecast/rng.hpp"

namespace bridgecast {

enum class LossKind { kMae, kMse };

// Diffusion-step embedding: entry 2k = sin(t / 10000^(2k/dim)),
// entry 2k+1 = cos of the same argument. dim must be even.
std::vector<double> sinusoidal_embedding(int t, int dim);

// A learnable tensor paired with its gradient buffer.
struct ParamRef {
  std::string name;
  Matrix* value = nullptr;
  Matrix* grad = nullptr;
};

enum class Activation { kTanh, kIdentity };

// Data-prediction network y_theta. Each time row of the state is mapped
// independently: features [y_t row | h row | c row | step embedding] pass an
// input projection, two hidden layers, and an output projection; the result
// is added to the corresponding row of h, so the zero-initialized network is
// the identity on the prior forecast.
class Denoiser {
 public:
  Denoiser(int channels, int width, int embed_dim = 8, Activation act = Activation::kTanh);

  // Glorot-uniform weights; the output projection and all biases start at
  // zero so training begins from the prior's forecast.
  void init_params(Rng& rng);

  struct Cache {
    Matrix features;  // rows x (3d + e)
    Matrix a0, a1, a2;  // rows x width, post-activation
    bool valid = false;
  };

  // y_t, h, c all (rows x channels); returns the same shape.
  Matrix forward(const Matrix& y_t, const Matrix& h, const Matrix& c, int t,
                 Cache* cache = nullptr) const;

  struct InputGrads {
    Matrix y_t, h, c;
  };

  // Accumulates parameter gradients for the cached forward pass and returns
  // gradients with respect to the inputs. Throws when no cache is present.
  InputGrads backward(const Cache& cache, const Matrix& dout);

  void zero_grads();
  std::vector<ParamRef> param_refs();

  int channels() const { return d_; }
  int width() const { return w_; }
  int embed_dim() const { return e_; }

 private:
  int d_, w_, e_;
  Activation act_;
  Matrix w_in_, b_in_, w_h1_, b_h1_, w_h2_, b_h2_, w_out_, b_out_;
  Matrix g_w_in_, g_b_in_, g_w_h1_, g_b_h1_, g_w_h2_, g_b_h2_, g_w_out_, g_b_out_;

  double activate(double x) const;
  double activate_grad(double post) const;
};

// Bias-corrected Adam with the linear max-to-min learning-rate decay.
struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double lr_max = 1e-4;
  double lr_min = 5e-7;
  long step = 0;
  std::vector<Matrix> m, v;

  static AdamState for_params(const std::vector<ParamRef>& params);
  double lr_at(long step_index, long total_steps) const;
};

// One update over all params. Throws NumericError on non-finite gradients
// without touching parameters or moments.
void adam_step(const std::vector<ParamRef>& params, AdamState& state, double lr);

// Shadow parameters updated every `interval` steps; sampling and evaluation
// read the shadow.
struct EmaState {
  double decay = 0.995;
  int interval = 8;
  std::vector<Matrix> shadow;

  static EmaState from_params(const std::vector<ParamRef>& params);
};

void ema_update(EmaState& state, const std::vector<ParamRef>& params, long step_index);

}  // namespace bridgecast
