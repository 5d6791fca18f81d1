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

// Deep Q-learning with experience replay. The network is trained once per
// agent move on a random sample of recent experience; there is no target
// network and no separate evaluation phase.

#pragma once

#include <algorithm>
#include <chrono>
#include <deque>
#include <iterator>
#include <vector>

#include "uavgrid/grid_env.hpp"
#include "uavgrid/neural.hpp"
#include "uavgrid/rng.hpp"

namespace uavgrid {

struct Experience {
  std::vector<double> env_state;
  Action action = Action::Up;
  double reward = 0.0;
  std::vector<double> next_env_state;
  bool game_over = false;
};

// Bounded FIFO of experiences; the oldest record is dropped on overflow.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity = 500) : capacity_(capacity) {
    if (capacity_ == 0) throw ConfigError("replay buffer capacity must be positive");
  }

  void push(Experience e) {
    if (items_.size() == capacity_) items_.pop_front();
    items_.push_back(std::move(e));
  }

  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return items_.empty(); }
  const Experience& operator[](std::size_t i) const { return items_[i]; }
  const std::deque<Experience>& items() const { return items_; }

  // Uniform sample of min(n, size) distinct records, in buffer order.
  template <class Urbg>
  std::vector<const Experience*> sample(std::size_t n, Urbg& rng) const {
    std::vector<const Experience*> all;
    all.reserve(items_.size());
    for (const auto& e : items_) all.push_back(&e);
    std::vector<const Experience*> out;
    out.reserve(std::min(n, all.size()));
    std::sample(all.begin(), all.end(), std::back_inserter(out), n, rng);
    return out;
  }

 private:
  std::size_t capacity_;
  std::deque<Experience> items_;
};

struct DqnParams {
  int epochs = 1000;
  std::size_t max_memory = 500;
  std::size_t data_size = 100;
  double exploration = 0.2;
  double discount = 0.97;
  double learning_rate = 0.001;
  double leaky_slope = 0.3;
  // An episode is abandoned as lost once the step penalties paid so far
  // drop below -give_up_fraction * cells. 0 disables the cutoff.
  double give_up_fraction = 0.5;
  // Passes over the sampled batch per move, in minibatches of `minibatch`
  // records (0 = the whole sample in one step).
  int fit_passes = 8;
  std::size_t minibatch = 16;

  double give_up_score(const GameConfig& cfg) const { return -give_up_fraction * cfg.num_cells(); }

  void validate() const {
    if (epochs < 1) throw ConfigError("epochs must be >= 1");
    if (max_memory < 1) throw ConfigError("max_memory must be >= 1");
    if (data_size < 1 || data_size > max_memory) throw ConfigError("data_size must lie in [1, max_memory]");
    if (!(exploration >= 0.0 && exploration <= 1.0)) throw ConfigError("exploration must lie in [0, 1]");
    if (!(discount >= 0.0 && discount < 1.0)) throw ConfigError("discount must lie in [0, 1)");
    if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
    if (!(give_up_fraction >= 0.0)) throw ConfigError("give_up_fraction must be non-negative");
    if (fit_passes < 1) throw ConfigError("fit_passes must be >= 1");
  }
};

// Width x height inputs, two hidden layers as wide as the input, four
// action outputs.
inline Mlp make_q_network(int num_cells, double slope) {
  return Mlp({num_cells, num_cells, num_cells, kNumActions}, slope);
}

// Regression targets for a batch: the taken action's output is pulled
// toward r (terminal) or r + discount * max_a' Q(s', a'); the other three
// outputs are masked out.
inline Batch build_targets(const Mlp& net, const std::vector<const Experience*>& batch, double discount) {
  Batch out;
  out.inputs.reserve(batch.size());
  out.targets.reserve(batch.size());
  out.masks.reserve(batch.size());
  for (const Experience* e : batch) {
    std::vector<double> target = forward(net, e->env_state);
    double value = e->reward;
    if (!e->game_over) {
      const auto next_q = forward(net, e->next_env_state);
      value += discount * *std::max_element(next_q.begin(), next_q.end());
    }
    const auto a = static_cast<std::size_t>(e->action);
    target[a] = value;
    std::vector<std::uint8_t> mask(target.size(), 0);
    mask[a] = 1;
    out.inputs.push_back(e->env_state);
    out.targets.push_back(std::move(target));
    out.masks.push_back(std::move(mask));
  }
  return out;
}

struct DqnAgent {
  DqnParams params;
  Mlp net;
  AdamState adam;
  ReplayBuffer memory;
  double last_loss = 0.0;

  DqnAgent(const GameConfig& cfg, const DqnParams& p, Rng& init_rng)
      : params(p), net(make_q_network(cfg.num_cells(), p.leaky_slope)), memory(p.max_memory) {
    params.validate();
    net.init_uniform(init_rng);
    adam = AdamState(net, p.learning_rate);
  }
};

// Stores the experience, then trains on a random sample of the memory.
// Targets are fixed once per call, then the sample is fitted for
// `fit_passes` passes.
inline double record_and_train(DqnAgent& agent, Experience e, Rng& rng) {
  agent.memory.push(std::move(e));
  const auto sample = agent.memory.sample(agent.params.data_size, rng);
  const Batch data = build_targets(agent.net, sample, agent.params.discount);
  const std::size_t mb = agent.params.minibatch == 0 ? data.size() : agent.params.minibatch;
  double loss = 0.0;
  for (int pass = 0; pass < agent.params.fit_passes; ++pass) {
    for (std::size_t lo = 0; lo < data.size(); lo += mb) {
      const std::size_t hi = std::min(data.size(), lo + mb);
      Batch part;
      part.inputs.assign(data.inputs.begin() + lo, data.inputs.begin() + hi);
      part.targets.assign(data.targets.begin() + lo, data.targets.begin() + hi);
      part.masks.assign(data.masks.begin() + lo, data.masks.begin() + hi);
      const Gradients g = backprop_batch(agent.net, part);
      adam_step(agent.net, g.grad, agent.adam);
      loss = g.loss;
    }
  }
  agent.last_loss = loss;
  return loss;
}

inline Action greedy_action(const Mlp& net, const std::vector<double>& obs) {
  const auto q = forward(net, obs);
  return static_cast<Action>(std::max_element(q.begin(), q.end()) - q.begin());
}

struct EpisodeResult {
  Status status = Status::Running;
  int score = 0;
  int steps = 0;
  std::vector<Action> actions;
};

// One game; `train` false plays without touching the network.
inline EpisodeResult dqn_episode(DqnAgent& agent, const GameConfig& cfg, RngStreams& rng, bool train = true) {
  GameState s = new_game(cfg);
  EpisodeResult out;
  int penalties = 0;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, kNumActions - 1);
  while (!s.terminal()) {
    std::vector<double> obs = encode_observation(cfg, s);
    Action a;
    if (u(rng.agent) < agent.params.exploration) {
      a = static_cast<Action>(pick(rng.agent));
    } else {
      a = greedy_action(agent.net, obs);
    }
    StepOutcome step = play_turn(cfg, s, a, rng.adversary);
    if (step.immediate_reward == cfg.step_penalty) penalties += cfg.step_penalty;
    if (!step.terminal && agent.params.give_up_fraction > 0.0 && penalties < agent.params.give_up_score(cfg)) {
      step.next_state.status = Status::EpochLimit;
      step.terminal = true;
    }
    out.actions.push_back(a);
    s = step.next_state;
    if (train) {
      // A give-up or step-limit cutoff truncates the episode; only a win or
      // a capture ends the bootstrap.
      const bool game_over = s.status == Status::Won || s.status == Status::Captured;
      record_and_train(agent,
                       {std::move(obs), a, static_cast<double>(step.immediate_reward),
                        encode_observation(cfg, s), game_over},
                       rng.agent);
    }
  }
  out.status = s.status;
  out.score = s.score;
  out.steps = s.step_count;
  return out;
}

struct ReplicationResult {
  bool success = false;
  int score = 0;  // winning score when successful
  int regret = 0;
  int epochs_used = 0;
  int total_steps = 0;
  Status last_status = Status::Running;
  double wall_time_s = 0.0;
};

// Fresh network; play until the first win or until the epoch budget runs out.
inline ReplicationResult run_dqn_replication(const GameConfig& cfg, const DqnParams& params, std::uint64_t seed,
                                             Mlp* final_net = nullptr) {
  const auto t0 = std::chrono::steady_clock::now();
  RngStreams rng = RngStreams::from_seed(seed);
  DqnAgent agent(cfg, params, rng.agent);
  const int best = optimal_score(cfg);
  ReplicationResult r;
  for (int epoch = 1; epoch <= params.epochs; ++epoch) {
    const EpisodeResult ep = dqn_episode(agent, cfg, rng);
    r.epochs_used = epoch;
    r.total_steps += ep.steps;
    r.last_status = ep.status;
    if (ep.status == Status::Won) {
      r.success = true;
      r.score = ep.score;
      r.regret = best - ep.score;
      break;
    }
  }
  if (final_net) *final_net = agent.net;
  r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace uavgrid
