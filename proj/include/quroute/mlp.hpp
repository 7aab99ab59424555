#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "quroute/rng.hpp"

namespace quroute {

// One-hidden-layer ReLU network with manually derived backpropagation.
// Parameters live in a single flat vector (W1, b1, W2, b2) so soft target
// updates are plain elementwise blends.
struct MlpNet {
  int in = 0, hidden = 0, out = 0;
  std::vector<double> params;

  MlpNet() = default;
  MlpNet(int in_dim, int hidden_dim, int out_dim, Rng& rng)
      : in(in_dim), hidden(hidden_dim), out(out_dim) {
    params.assign(num_params(), 0.0);
    const double s1 = std::sqrt(2.0 / in);
    const double s2 = std::sqrt(2.0 / hidden);
    for (int i = 0; i < hidden * in; ++i) params[i] = rng.normal() * s1;
    for (int i = 0; i < out * hidden; ++i) params[w2_off() + i] = rng.normal() * s2;
  }

  std::size_t num_params() const {
    return static_cast<std::size_t>(hidden) * in + hidden +
           static_cast<std::size_t>(out) * hidden + out;
  }
  std::size_t b1_off() const { return static_cast<std::size_t>(hidden) * in; }
  std::size_t w2_off() const { return b1_off() + hidden; }
  std::size_t b2_off() const { return w2_off() + static_cast<std::size_t>(out) * hidden; }

  struct Scratch {
    std::vector<double> pre;   // hidden pre-activation
    std::vector<double> post;  // hidden post-ReLU
  };

  std::vector<double> forward(std::span<const double> x, Scratch& s) const {
    s.pre.assign(hidden, 0.0);
    s.post.assign(hidden, 0.0);
    for (int h = 0; h < hidden; ++h) {
      double acc = params[b1_off() + h];
      const std::size_t row = static_cast<std::size_t>(h) * in;
      for (int i = 0; i < in; ++i) acc += params[row + i] * x[i];
      s.pre[h] = acc;
      s.post[h] = acc > 0.0 ? acc : 0.0;
    }
    std::vector<double> y(out, 0.0);
    for (int o = 0; o < out; ++o) {
      double acc = params[b2_off() + o];
      const std::size_t row = w2_off() + static_cast<std::size_t>(o) * hidden;
      for (int h = 0; h < hidden; ++h) acc += params[row + h] * s.post[h];
      y[o] = acc;
    }
    return y;
  }

  std::vector<double> forward(std::span<const double> x) const {
    Scratch s;
    return forward(x, s);
  }

  // Accumulates d(sum_o dout[o] * y_o)/d params into grad; scratch must hold
  // the forward pass of the same x.
  void backward(std::span<const double> x, std::span<const double> dout, const Scratch& s,
                std::vector<double>& grad) const {
    std::vector<double> dhidden(hidden, 0.0);
    for (int o = 0; o < out; ++o) {
      const double g = dout[o];
      if (g == 0.0) continue;
      grad[b2_off() + o] += g;
      const std::size_t row = w2_off() + static_cast<std::size_t>(o) * hidden;
      for (int h = 0; h < hidden; ++h) {
        grad[row + h] += g * s.post[h];
        dhidden[h] += g * params[row + h];
      }
    }
    for (int h = 0; h < hidden; ++h) {
      if (s.pre[h] <= 0.0 || dhidden[h] == 0.0) continue;
      const double g = dhidden[h];
      grad[b1_off() + h] += g;
      const std::size_t row = static_cast<std::size_t>(h) * in;
      for (int i = 0; i < in; ++i) grad[row + i] += g * x[i];
    }
  }
};

}  // namespace quroute
