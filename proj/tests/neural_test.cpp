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

#include <gtest/gtest.h>

#include <sstream>

#include "uavgrid/neural.hpp"
#include "uavgrid/oracles.hpp"

namespace uavgrid {
namespace {

TEST(LeakyRelu, Branches) {
  EXPECT_EQ(leaky_relu(3.0, 0.3), 3.0);
  EXPECT_DOUBLE_EQ(leaky_relu(-2.0, 0.3), -0.6);
  EXPECT_EQ(leaky_relu(0.0, 0.3), 0.0);
}

TEST(Forward, ZeroNetworkGivesZeros) {
  const Mlp net({25, 25, 25, 4}, 0.3);
  const std::vector<double> x(25, 1.0);
  EXPECT_EQ(forward(net, x), std::vector<double>(4, 0.0));
}

// 2 -> 2 -> 1 with hand-set weights:
// h = leaky([x0 + 2 x1 + 0.5, -x0 - 1]), y = 3 h0 - h1 + 0.25.
TEST(Forward, HandComputed) {
  Mlp net({2, 2, 1}, 0.1);
  auto w0 = net.weights(0);
  w0[0] = 1.0, w0[1] = 2.0, w0[2] = -1.0, w0[3] = 0.0;
  net.biases(0)[0] = 0.5;
  net.biases(0)[1] = -1.0;
  net.weights(1)[0] = 3.0;
  net.weights(1)[1] = -1.0;
  net.biases(1)[0] = 0.25;
  const std::vector<double> x{1.0, -2.0};
  // h0 = 1 - 4 + 0.5 = -2.5 -> -0.25; h1 = -2 -> -0.2; y = -0.75 + 0.2 + 0.25.
  EXPECT_NEAR(forward(net, x)[0], -0.3, 1e-15);
}

TEST(Forward, ShapeMismatchThrows) {
  const Mlp net({3, 4, 2}, 0.3);
  const std::vector<double> x(2, 0.0);
  EXPECT_THROW(forward(net, x), ShapeError);
  const std::vector<double> ok(3, 0.0);
  const std::vector<double> target(3, 0.0);
  const std::vector<std::uint8_t> mask(3, 1);
  EXPECT_THROW(backprop(net, ok, target, mask), ShapeError);
}

TEST(Backprop, ZeroLossZeroGradient) {
  Rng rng(4);
  Mlp net({4, 5, 3}, 0.3);
  net.init_uniform(rng);
  const std::vector<double> x{0.1, -0.4, 2.0, 0.0};
  const auto y = forward(net, x);
  const std::vector<std::uint8_t> mask(3, 1);
  const Gradients g = backprop(net, x, y, mask);
  EXPECT_EQ(g.loss, 0.0);
  for (double v : g.grad) EXPECT_EQ(v, 0.0);
}

TEST(Backprop, MaskedOutputsDoNotContribute) {
  Rng rng(5);
  Mlp net({3, 4, 4}, 0.3);
  net.init_uniform(rng);
  const std::vector<double> x{1.0, 2.0, 3.0};
  std::vector<double> t1{0, 0, 0, 0};
  std::vector<double> t2{99, 0, -99, 7};  // differs only in masked-out outputs
  t2[1] = t1[1];
  const std::vector<std::uint8_t> mask{0, 1, 0, 0};
  EXPECT_EQ(backprop(net, x, t1, mask).grad, backprop(net, x, t2, mask).grad);
}

// Finite-difference oracle: 20 random networks, every parameter.
TEST(GradientOracle, TwentyRandomNetworks) {
  Rng rng(2024);
  for (int c = 0; c < 20; ++c) {
    const auto gc = oracle::random_gradient_case(rng);
    const auto r = oracle::check_gradient(gc.net, gc.input, gc.target, gc.mask, 1e-5);
    EXPECT_LE(r.max_rel_error, 1e-4) << "case " << c << " param " << r.worst_param << " analytic " << r.analytic
                                     << " numeric " << r.numeric;
  }
}

TEST(GradientOracle, BatchIsMeanOfSamples) {
  Rng rng(9);
  Batch b;
  Mlp net({3, 5, 4}, 0.3);
  net.init_uniform(rng);
  std::normal_distribution<double> v;
  for (int i = 0; i < 6; ++i) {
    b.inputs.push_back({v(rng), v(rng), v(rng)});
    b.targets.push_back({v(rng), v(rng), v(rng), v(rng)});
    b.masks.push_back({0, 0, 0, 0});
    b.masks.back()[i % 4] = 1;
  }
  const Gradients g = backprop_batch(net, b);
  EXPECT_NEAR(g.loss, batch_loss(net, b), 1e-12);
  const double h = 1e-5;
  Mlp probe = net;
  for (std::size_t i = 0; i < net.num_params(); ++i) {
    const double w = probe.params()[i];
    probe.params()[i] = w + h;
    const double up = batch_loss(probe, b);
    probe.params()[i] = w - h;
    const double down = batch_loss(probe, b);
    probe.params()[i] = w;
    EXPECT_LE(oracle::relative_error(g.grad[i], (up - down) / (2 * h)), 1e-4) << i;
  }
}

TEST(Purity, ForwardAndBackpropLeaveNetUntouched) {
  Rng rng(12);
  Mlp net({4, 6, 4}, 0.3);
  net.init_uniform(rng);
  const Mlp copy = net;
  const std::vector<double> x{1, 2, 3, 4};
  const std::vector<double> t{0, 0, 0, 0};
  const std::vector<std::uint8_t> mask{1, 1, 1, 1};
  const auto y1 = forward(net, x);
  const Gradients g1 = backprop(net, x, t, mask);
  const auto y2 = forward(net, x);
  const Gradients g2 = backprop(net, x, t, mask);
  EXPECT_EQ(net, copy);
  EXPECT_EQ(y1, y2);
  EXPECT_EQ(g1.grad, g2.grad);
}

TEST(Adam, FirstStepIsLrTimesSign) {
  Mlp net({1, 1}, 0.3);  // weight and bias
  net.params()[0] = 0.5;
  net.params()[1] = -0.5;
  AdamState st(net, 0.001);
  const std::vector<double> g{1.0, -3.0};
  adam_step(net, g, st);
  EXPECT_NEAR(net.params()[0], 0.5 - 0.001, 1e-10);
  EXPECT_NEAR(net.params()[1], -0.5 + 0.001, 1e-10);
  EXPECT_EQ(st.step, 1);
}

TEST(Adam, ZeroGradientDecaysMoments) {
  Mlp net({1, 1}, 0.3);
  AdamState st(net, 0.001);
  adam_step(net, std::vector<double>{1.0, 1.0}, st);
  const Mlp before = net;
  const std::vector<double> m = st.m;
  const std::vector<double> v = st.v;
  // Reset to a fresh parameter vector so only the moment update is seen.
  Mlp probe = before;
  AdamState zero(net, 0.001);
  adam_step(probe, std::vector<double>{0.0, 0.0}, zero);
  EXPECT_EQ(probe, before);
  adam_step(net, std::vector<double>{0.0, 0.0}, st);
  for (std::size_t i = 0; i < m.size(); ++i) {
    EXPECT_DOUBLE_EQ(st.m[i], 0.9 * m[i]);
    EXPECT_DOUBLE_EQ(st.v[i], 0.999 * v[i]);
  }
}

TEST(Adam, Deterministic) {
  Rng rng(1);
  Mlp a({3, 4, 2}, 0.3);
  a.init_uniform(rng);
  Mlp b = a;
  AdamState sa(a), sb(b);
  std::vector<double> g(a.num_params());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = std::sin(static_cast<double>(i));
  for (int k = 0; k < 5; ++k) {
    adam_step(a, g, sa);
    adam_step(b, g, sb);
  }
  EXPECT_EQ(a, b);
  EXPECT_EQ(sa, sb);
}

// One small step downhill does not increase the loss.
TEST(Adam, SmallStepDoesNotIncreaseLoss) {
  Rng rng(31);
  for (int c = 0; c < 10; ++c) {
    auto gc = oracle::random_gradient_case(rng);
    Batch b{{gc.input}, {gc.target}, {gc.mask}};
    const double before = batch_loss(gc.net, b);
    AdamState st(gc.net, 1e-4);
    adam_step(gc.net, backprop_batch(gc.net, b).grad, st);
    EXPECT_LE(batch_loss(gc.net, b), before + 1e-15) << "case " << c;
  }
}

TEST(Checkpoint, RoundTrip) {
  Rng rng(3);
  Mlp net({25, 25, 25, 4}, 0.3);
  net.init_uniform(rng);
  std::stringstream ss;
  save_mlp(ss, net);
  EXPECT_EQ(load_mlp(ss), net);
  std::stringstream truncated("mlp 2 2 slope 0.3\n0.1\n");
  EXPECT_THROW(load_mlp(truncated), ShapeError);
  std::stringstream junk("hello");
  EXPECT_THROW(load_mlp(junk), ShapeError);
}

TEST(Init, UniformBound) {
  Rng rng(8);
  Mlp net({16, 9, 4}, 0.3);
  net.init_uniform(rng);
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(net.fan_in(l)));
    for (double w : net.weights(l)) EXPECT_LE(std::abs(w), bound);
    for (double w : net.biases(l)) EXPECT_LE(std::abs(w), bound);
  }
  EXPECT_TRUE(net.all_finite());
}

}  // namespace
}  // namespace uavgrid
