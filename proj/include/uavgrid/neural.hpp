// Copyright 2026 The uavgrid Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Small dense network in double precision: affine layers with LeakyReLU
// between them and an identity output, masked mean-squared-error
// backpropagation, and Adam.

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <random>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace uavgrid {

class ShapeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline double leaky_relu(double x, double slope) { return x >= 0.0 ? x : slope * x; }
inline double leaky_relu_grad(double x, double slope) { return x >= 0.0 ? 1.0 : slope; }

inline std::vector<double> leaky_relu(std::span<const double> xs, double slope) {
  std::vector<double> out(xs.begin(), xs.end());
  for (double& x : out) x = leaky_relu(x, slope);
  return out;
}

class Mlp {
 public:
  Mlp() = default;

  // `sizes` lists unit counts from input to output; one affine map joins
  // each consecutive pair. Parameters start at zero.
  Mlp(std::vector<int> sizes, double slope) : sizes_(std::move(sizes)), slope_(slope) {
    if (sizes_.size() < 2) throw ShapeError("network needs at least an input and an output layer");
    std::size_t total = 0;
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
      if (sizes_[l] < 1 || sizes_[l + 1] < 1) throw ShapeError("layer sizes must be positive");
      weight_offset_.push_back(total);
      total += static_cast<std::size_t>(sizes_[l]) * sizes_[l + 1];
      bias_offset_.push_back(total);
      total += static_cast<std::size_t>(sizes_[l + 1]);
    }
    params_.assign(total, 0.0);
  }

  // Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)] for weights and biases.
  template <class Urbg>
  void init_uniform(Urbg& rng) {
    for (std::size_t l = 0; l < num_layers(); ++l) {
      const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in(l)));
      std::uniform_real_distribution<double> dist(-bound, bound);
      for (double& w : weights(l)) w = dist(rng);
      for (double& b : biases(l)) b = dist(rng);
    }
  }

  std::size_t num_layers() const { return weight_offset_.size(); }
  int fan_in(std::size_t l) const { return sizes_[l]; }
  int fan_out(std::size_t l) const { return sizes_[l + 1]; }
  int input_size() const { return sizes_.front(); }
  int output_size() const { return sizes_.back(); }
  const std::vector<int>& sizes() const { return sizes_; }
  double slope() const { return slope_; }

  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }
  std::size_t num_params() const { return params_.size(); }

  // Row-major fan_out x fan_in.
  std::span<double> weights(std::size_t l) {
    return {params_.data() + weight_offset_[l], static_cast<std::size_t>(fan_in(l)) * fan_out(l)};
  }
  std::span<const double> weights(std::size_t l) const {
    return {params_.data() + weight_offset_[l], static_cast<std::size_t>(fan_in(l)) * fan_out(l)};
  }
  std::span<double> biases(std::size_t l) {
    return {params_.data() + bias_offset_[l], static_cast<std::size_t>(fan_out(l))};
  }
  std::span<const double> biases(std::size_t l) const {
    return {params_.data() + bias_offset_[l], static_cast<std::size_t>(fan_out(l))};
  }
  std::size_t weight_offset(std::size_t l) const { return weight_offset_[l]; }
  std::size_t bias_offset(std::size_t l) const { return bias_offset_[l]; }

  bool all_finite() const {
    for (double p : params_) {
      if (!std::isfinite(p)) return false;
    }
    return true;
  }

  friend bool operator==(const Mlp&, const Mlp&) = default;

 private:
  std::vector<int> sizes_;
  double slope_ = 0.3;
  std::vector<std::size_t> weight_offset_;
  std::vector<std::size_t> bias_offset_;
  std::vector<double> params_;
};

// Pre-activations of every layer for one input; activations are recomputed
// from them on the backward pass.
struct ForwardTrace {
  std::vector<std::vector<double>> inputs;  // input to each affine layer
  std::vector<std::vector<double>> pre;     // affine output of each layer
  std::vector<double> output;
};

inline ForwardTrace forward_trace(const Mlp& net, std::span<const double> input) {
  if (static_cast<int>(input.size()) != net.input_size()) {
    throw ShapeError("input has " + std::to_string(input.size()) + " values, network expects " +
                     std::to_string(net.input_size()));
  }
  ForwardTrace tr;
  std::vector<double> a(input.begin(), input.end());
  const std::size_t last = net.num_layers() - 1;
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    const int nin = net.fan_in(l);
    const int nout = net.fan_out(l);
    const auto w = net.weights(l);
    const auto b = net.biases(l);
    std::vector<double> z(b.begin(), b.end());
    for (int j = 0; j < nout; ++j) {
      const double* row = w.data() + static_cast<std::size_t>(j) * nin;
      double acc = 0.0;
      for (int i = 0; i < nin; ++i) acc += row[i] * a[i];
      z[j] += acc;
    }
    tr.inputs.push_back(std::move(a));
    a = l == last ? z : leaky_relu(z, net.slope());
    tr.pre.push_back(std::move(z));
  }
  tr.output = std::move(a);
  return tr;
}

inline std::vector<double> forward(const Mlp& net, std::span<const double> input) {
  return forward_trace(net, input).output;
}

struct Gradients {
  double loss = 0.0;
  std::vector<double> grad;  // same layout as Mlp::params()
};

// Loss = mean over the masked outputs of (q - target)^2. Gradients are
// accumulated into `g` scaled by `weight` so batches can average samples.
inline double backprop_into(const Mlp& net, std::span<const double> input, std::span<const double> target,
                            std::span<const std::uint8_t> mask, double weight, std::vector<double>& g) {
  const auto nout = static_cast<std::size_t>(net.output_size());
  if (target.size() != nout || mask.size() != nout) throw ShapeError("target/mask size must match the output layer");
  if (g.size() != net.num_params()) throw ShapeError("gradient buffer has the wrong size");
  const ForwardTrace tr = forward_trace(net, input);
  std::size_t active = 0;
  for (auto m : mask) active += m != 0;
  if (active == 0) return 0.0;

  double loss = 0.0;
  std::vector<double> delta(nout, 0.0);
  for (std::size_t k = 0; k < nout; ++k) {
    if (!mask[k]) continue;
    const double diff = tr.output[k] - target[k];
    loss += diff * diff;
    delta[k] = 2.0 * diff / static_cast<double>(active);
  }
  loss /= static_cast<double>(active);

  for (std::size_t l = net.num_layers(); l-- > 0;) {
    const int nin = net.fan_in(l);
    const int n_out = net.fan_out(l);
    const auto& a_in = tr.inputs[l];
    const auto w = net.weights(l);
    double* gw = g.data() + net.weight_offset(l);
    double* gb = g.data() + net.bias_offset(l);
    for (int j = 0; j < n_out; ++j) {
      const double d = delta[j] * weight;
      if (d == 0.0) continue;
      gb[j] += d;
      double* grow = gw + static_cast<std::size_t>(j) * nin;
      for (int i = 0; i < nin; ++i) grow[i] += d * a_in[i];
    }
    if (l == 0) break;
    std::vector<double> prev(static_cast<std::size_t>(nin), 0.0);
    for (int j = 0; j < n_out; ++j) {
      if (delta[j] == 0.0) continue;
      const double* row = w.data() + static_cast<std::size_t>(j) * nin;
      for (int i = 0; i < nin; ++i) prev[i] += delta[j] * row[i];
    }
    const auto& z_prev = tr.pre[l - 1];
    for (int i = 0; i < nin; ++i) prev[i] *= leaky_relu_grad(z_prev[i], net.slope());
    delta = std::move(prev);
  }
  return loss;
}

inline Gradients backprop(const Mlp& net, std::span<const double> input, std::span<const double> target,
                          std::span<const std::uint8_t> mask) {
  Gradients out;
  out.grad.assign(net.num_params(), 0.0);
  out.loss = backprop_into(net, input, target, mask, 1.0, out.grad);
  return out;
}

inline double masked_loss(const Mlp& net, std::span<const double> input, std::span<const double> target,
                          std::span<const std::uint8_t> mask) {
  const auto out = forward(net, input);
  double loss = 0.0;
  std::size_t active = 0;
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (!mask[k]) continue;
    loss += (out[k] - target[k]) * (out[k] - target[k]);
    ++active;
  }
  return active ? loss / static_cast<double>(active) : 0.0;
}

struct Batch {
  std::vector<std::vector<double>> inputs;
  std::vector<std::vector<double>> targets;
  std::vector<std::vector<std::uint8_t>> masks;  // 1 = output contributes to the loss
  std::size_t size() const { return inputs.size(); }
};

// Mean of the per-sample masked losses and their gradients.
inline Gradients backprop_batch(const Mlp& net, const Batch& batch) {
  Gradients out;
  out.grad.assign(net.num_params(), 0.0);
  if (batch.size() == 0) return out;
  const double w = 1.0 / static_cast<double>(batch.size());
  for (std::size_t b = 0; b < batch.size(); ++b) {
    out.loss += w * backprop_into(net, batch.inputs[b], batch.targets[b], batch.masks[b], w, out.grad);
  }
  return out;
}

inline double batch_loss(const Mlp& net, const Batch& batch) {
  double loss = 0.0;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    loss += masked_loss(net, batch.inputs[b], batch.targets[b], batch.masks[b]);
  }
  return batch.size() ? loss / static_cast<double>(batch.size()) : 0.0;
}

struct AdamState {
  double lr = 0.001;
  double b1 = 0.9;
  double b2 = 0.999;
  double eps = 1e-8;
  long step = 0;
  std::vector<double> m;
  std::vector<double> v;

  AdamState() = default;
  explicit AdamState(const Mlp& net, double learning_rate = 0.001)
      : lr(learning_rate), m(net.num_params(), 0.0), v(net.num_params(), 0.0) {}

  friend bool operator==(const AdamState&, const AdamState&) = default;
};

inline void adam_step(Mlp& net, std::span<const double> grad, AdamState& st) {
  if (grad.size() != net.num_params() || st.m.size() != grad.size() || st.v.size() != grad.size()) {
    throw ShapeError("adam_step: gradient, moment and parameter sizes differ");
  }
  st.step += 1;
  const double c1 = 1.0 - std::pow(st.b1, static_cast<double>(st.step));
  const double c2 = 1.0 - std::pow(st.b2, static_cast<double>(st.step));
  auto p = net.params();
  for (std::size_t i = 0; i < grad.size(); ++i) {
    st.m[i] = st.b1 * st.m[i] + (1.0 - st.b1) * grad[i];
    st.v[i] = st.b2 * st.v[i] + (1.0 - st.b2) * grad[i] * grad[i];
    const double m_hat = st.m[i] / c1;
    const double v_hat = st.v[i] / c2;
    p[i] -= st.lr * m_hat / (std::sqrt(v_hat) + st.eps);
  }
}

// Text checkpoint: header line with layer sizes and slope, then one
// parameter per line.
inline void save_mlp(std::ostream& os, const Mlp& net) {
  os << "mlp";
  for (int s : net.sizes()) os << ' ' << s;
  std::ostringstream sl;
  sl.precision(17);
  sl << net.slope();
  os << " slope " << sl.str() << '\n';
  std::ostringstream line;
  line.precision(17);
  for (double p : net.params()) {
    line.str("");
    line << p;
    os << line.str() << '\n';
  }
}

inline Mlp load_mlp(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw ShapeError("empty network checkpoint");
  std::istringstream hs(header);
  std::string tag;
  hs >> tag;
  if (tag != "mlp") throw ShapeError("not a network checkpoint");
  std::vector<int> sizes;
  std::string tok;
  double slope = 0.0;
  while (hs >> tok) {
    if (tok == "slope") {
      hs >> slope;
      break;
    }
    sizes.push_back(std::stoi(tok));
  }
  Mlp net(sizes, slope);
  for (double& p : net.params()) {
    if (!(is >> p)) throw ShapeError("network checkpoint is truncated");
  }
  return net;
}

}  // namespace uavgrid
