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

// Epsilon-greedy tabular Q-learning. The tabular state is (agent cell,
// collected-reward mask); adversary positions are not part of it.

#pragma once

#include <array>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <vector>

#include "uavgrid/grid_env.hpp"
#include "uavgrid/rng.hpp"

namespace uavgrid {

struct StateKey {
  Cell cell;
  std::uint32_t collected = 0;
  friend bool operator==(const StateKey&, const StateKey&) = default;
};

inline StateKey state_key(const GameState& s) { return {s.agent, s.collected}; }

using QRow = std::array<double, kNumActions>;

class QTable {
 public:
  QTable() = default;
  QTable(int width, int height, int num_rewards)
      : width_(width), height_(height), masks_(1 << num_rewards),
        rows_(static_cast<std::size_t>(width) * height * masks_, QRow{}) {}
  explicit QTable(const GameConfig& cfg)
      : QTable(cfg.width, cfg.height, static_cast<int>(cfg.rewards.size())) {}

  int width() const { return width_; }
  int height() const { return height_; }
  int masks() const { return masks_; }
  std::size_t num_states() const { return rows_.size(); }
  std::size_t num_values() const { return rows_.size() * kNumActions; }

  std::size_t index(StateKey k) const {
    return (static_cast<std::size_t>(k.cell.row) * width_ + k.cell.col) * masks_ + k.collected;
  }
  StateKey key(std::size_t idx) const {
    const auto cell = static_cast<int>(idx / masks_);
    return {{cell / width_, cell % width_}, static_cast<std::uint32_t>(idx % masks_)};
  }

  QRow& row(StateKey k) { return rows_.at(index(k)); }
  const QRow& row(StateKey k) const { return rows_.at(index(k)); }
  double& at(StateKey k, Action a) { return row(k)[static_cast<int>(a)]; }
  double at(StateKey k, Action a) const { return row(k)[static_cast<int>(a)]; }

  std::vector<QRow>& rows() { return rows_; }
  const std::vector<QRow>& rows() const { return rows_; }

  friend bool operator==(const QTable&, const QTable&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int masks_ = 1;
  std::vector<QRow> rows_;
};

// First maximal entry; ties resolve Up < Down < Left < Right.
inline Action argmax_action(const QRow& row) {
  int best = 0;
  for (int a = 1; a < kNumActions; ++a) {
    if (row[a] > row[best]) best = a;
  }
  return static_cast<Action>(best);
}

struct TabularParams {
  double alpha = 0.1;
  double gamma = 0.97;
  double epsilon0 = 1.0;
  double beta = 2500.0;
  int epochs = 1000;
  int eval_episodes = 20;  // greedy evaluation episodes for stochastic adversaries

  void validate() const {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in (0, 1]");
    if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("gamma must lie in (0, 1)");
    if (!(epsilon0 > 0.0 && epsilon0 <= 1.0)) throw ConfigError("epsilon0 must lie in (0, 1]");
    if (!(beta > 0.0)) throw ConfigError("beta must be positive");
    if (epochs < 1) throw ConfigError("epochs must be >= 1");
    if (eval_episodes < 1) throw ConfigError("eval_episodes must be >= 1");
  }
};

// Q(s,a) += alpha * (r + gamma * max_a' Q(s',a') - Q(s,a)); a terminal
// successor contributes no bootstrap term.
inline void q_update(QTable& table, StateKey s, Action a, double reward, StateKey next,
                     bool next_terminal, double alpha, double gamma) {
  const QRow& nrow = table.row(next);
  const double bootstrap = next_terminal ? 0.0 : *std::max_element(nrow.begin(), nrow.end());
  double& q = table.at(s, a);
  q += alpha * (reward + gamma * bootstrap - q);
}

inline void q_update(QTable& table, StateKey s, Action a, double reward, StateKey next,
                     bool next_terminal, const TabularParams& p) {
  q_update(table, s, a, reward, next, next_terminal, p.alpha, p.gamma);
}

// Harmonic decay, n is the 1-based epoch number.
inline double epsilon_decay(double eps_prev, int n, double beta) {
  const double nn = static_cast<double>(n);
  return eps_prev / (1.0 + nn * nn / (beta + nn));
}

template <class Urbg>
Action select_action(const QTable& table, StateKey s, double eps, Urbg& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  if (u(rng) < eps) {
    std::uniform_int_distribution<int> pick(0, kNumActions - 1);
    return static_cast<Action>(pick(rng));
  }
  return argmax_action(table.row(s));
}

struct EpochRecord {
  Status status = Status::Running;
  int steps = 0;
  int score = 0;
  double epsilon = 0.0;
};

struct TrainStats {
  std::vector<EpochRecord> epochs;
  int wins = 0;
  int optimal_wins = 0;  // wins in the minimum possible number of steps
  double wall_time_s = 0.0;
};

struct TrainResult {
  QTable table;
  TrainStats stats;
};

inline TrainResult train_tabular(const GameConfig& cfg, const TabularParams& params, RngStreams& rng) {
  params.validate();
  const GameState initial = new_game(cfg);
  const int best_steps = optimal_steps(cfg);
  const auto t0 = std::chrono::steady_clock::now();

  TrainResult out{QTable(cfg), {}};
  out.stats.epochs.reserve(static_cast<std::size_t>(params.epochs));
  double eps = params.epsilon0;
  for (int n = 1; n <= params.epochs; ++n) {
    GameState s = initial;
    while (!s.terminal()) {
      const StateKey key = state_key(s);
      const Action a = select_action(out.table, key, eps, rng.agent);
      const StepOutcome step = play_turn(cfg, s, a, rng.adversary);
      q_update(out.table, key, a, step.immediate_reward, state_key(step.next_state), step.terminal, params);
      s = step.next_state;
    }
    out.stats.epochs.push_back({s.status, s.step_count, s.score, eps});
    if (s.status == Status::Won) {
      ++out.stats.wins;
      if (s.step_count == best_steps) ++out.stats.optimal_wins;
    }
    eps = epsilon_decay(eps, n, params.beta);
  }
  out.stats.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

class Policy {
 public:
  Policy() = default;
  explicit Policy(const QTable& table) : table_shape_(table) {
    actions_.reserve(table.num_states());
    for (const QRow& row : table.rows()) actions_.push_back(argmax_action(row));
  }
  Action operator()(StateKey k) const { return actions_.at(table_shape_.index(k)); }
  const std::vector<Action>& actions() const { return actions_; }

 private:
  QTable table_shape_;
  std::vector<Action> actions_;
};

inline Policy extract_policy(const QTable& table) { return Policy(table); }

struct EvalResult {
  int trials = 0;
  int wins = 0;
  std::vector<int> scores;
  std::vector<int> steps;
  std::vector<Status> statuses;
  double win_rate() const { return trials > 0 ? static_cast<double>(wins) / trials : 0.0; }
  bool all_won() const { return trials > 0 && wins == trials; }
};

// Plays greedy-only episodes; the rng drives only the adversaries.
template <class Urbg>
EvalResult evaluate_policy(const Policy& policy, const GameConfig& cfg, Urbg& adversary_rng, int trials) {
  EvalResult r;
  r.trials = trials;
  const GameState initial = new_game(cfg);
  for (int i = 0; i < trials; ++i) {
    GameState s = initial;
    while (!s.terminal()) s = play_turn(cfg, s, policy(state_key(s)), adversary_rng).next_state;
    r.wins += s.status == Status::Won;
    r.scores.push_back(s.score);
    r.steps.push_back(s.step_count);
    r.statuses.push_back(s.status);
  }
  return r;
}

// Fewest greedy actions that would have to change for the policy to follow
// some adversary-free shortest collect-then-exit path. 0 means the greedy
// policy already traces a shortest path.
inline int off_optimal_count(const QTable& table, const GameConfig& cfg) {
  validate(cfg);
  const std::uint32_t full = cfg.all_collected();
  const std::size_t n = table.num_states();
  auto collect = [&](Cell c, std::uint32_t m) {
    for (std::size_t k = 0; k < cfg.rewards.size(); ++k) {
      if (cfg.rewards[k] == c) m |= 1u << k;
    }
    return m;
  };
  // Backward distance to a win, computed by value iteration over the
  // unit-cost graph (tiny state space).
  constexpr int kInf = std::numeric_limits<int>::max() / 4;
  std::vector<int> to_go(n, kInf);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      const StateKey k = table.key(i);
      if (k.cell == cfg.exit && k.collected == full) continue;
      int best = to_go[i];
      for (Action a : kAllActions) {
        const Cell nc = moved(k.cell, a);
        if (!cfg.contains(nc)) continue;
        const std::uint32_t nm = collect(nc, k.collected);
        const int d = (nc == cfg.exit && nm == full) ? 1 : to_go[table.index({nc, nm})] + 1;
        best = std::min(best, d);
      }
      if (best < to_go[i]) {
        to_go[i] = best;
        changed = true;
      }
    }
  }
  // Forward DP over the shortest-path DAG minimising disagreements.
  std::vector<int> cost(n, -1);
  auto solve = [&](auto&& self, StateKey k) -> int {
    const std::size_t i = table.index(k);
    if (cost[i] >= 0) return cost[i];
    const Action greedy = argmax_action(table.row(k));
    int best = kInf;
    for (Action a : kAllActions) {
      const Cell nc = moved(k.cell, a);
      if (!cfg.contains(nc)) continue;
      const std::uint32_t nm = collect(nc, k.collected);
      const bool win = nc == cfg.exit && nm == full;
      const int d = win ? 1 : to_go[table.index({nc, nm})] + 1;
      if (d != to_go[i]) continue;
      const int rest = win ? 0 : self(self, StateKey{nc, nm});
      best = std::min(best, rest + (a == greedy ? 0 : 1));
    }
    cost[i] = best;
    return best;
  };
  return solve(solve, StateKey{cfg.start, collect(cfg.start, 0)});
}

// Outcome of one training trial as reported in the tabular table.
struct TabularTrial {
  bool success = false;          // greedy policy wins every evaluation episode
  bool optimal = false;          // ... and in the minimum number of steps
  double greedy_win_rate = 0.0;
  int greedy_score = 0;          // score of the first evaluation episode
  int wins = 0;                  // wins during training
  int optimal_wins = 0;
  int off_optimal = 0;
  double wall_time_s = 0.0;
};

inline TabularTrial run_tabular_trial(const GameConfig& cfg, const TabularParams& params,
                                      std::uint64_t seed, QTable* table_out = nullptr) {
  RngStreams rng = RngStreams::from_seed(seed);
  const TrainResult trained = train_tabular(cfg, params, rng);
  const Policy policy = extract_policy(trained.table);
  const bool stochastic = std::any_of(cfg.adversaries.begin(), cfg.adversaries.end(),
                                      [](const AdversarySpec& a) { return a.movement == Movement::Random; });
  const EvalResult eval = evaluate_policy(policy, cfg, rng.adversary, stochastic ? params.eval_episodes : 1);
  TabularTrial t;
  t.success = eval.all_won();
  t.greedy_win_rate = eval.win_rate();
  t.greedy_score = eval.scores.front();
  const int best = optimal_steps(cfg);
  t.optimal = t.success && std::all_of(eval.steps.begin(), eval.steps.end(), [&](int s) { return s == best; });
  t.wins = trained.stats.wins;
  t.optimal_wins = trained.stats.optimal_wins;
  t.off_optimal = off_optimal_count(trained.table, cfg);
  t.wall_time_s = trained.stats.wall_time_s;
  if (table_out) *table_out = trained.table;
  return t;
}

// Text dump: one row per state key, `row,col,mask,up,down,left,right`.
inline void write_qtable_csv(std::ostream& os, const QTable& table) {
  os << "# qtable " << table.width() << ' ' << table.height() << ' ' << table.masks() << '\n';
  os << "row,col,mask,up,down,left,right\n";
  std::ostringstream line;
  line << std::setprecision(17);
  for (std::size_t i = 0; i < table.num_states(); ++i) {
    const StateKey k = table.key(i);
    line.str("");
    line << k.cell.row << ',' << k.cell.col << ',' << k.collected;
    for (double v : table.rows()[i]) line << ',' << v;
    os << line.str() << '\n';
  }
}

inline QTable read_qtable_csv(std::istream& is) {
  std::string tag;
  int width = 0, height = 0, masks = 0;
  char hash = 0;
  if (!(is >> hash >> tag >> width >> height >> masks) || hash != '#' || tag != "qtable") {
    throw ConfigError("not a qtable dump");
  }
  int rewards = 0;
  while ((1 << rewards) < masks) ++rewards;
  QTable table(width, height, rewards);
  std::string line;
  std::getline(is, line);
  std::getline(is, line);  // header
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    char comma = 0;
    StateKey k;
    QRow row{};
    ls >> k.cell.row >> comma >> k.cell.col >> comma >> k.collected;
    for (double& v : row) ls >> comma >> v;
    if (!ls) throw ConfigError("malformed qtable row: " + line);
    table.row(k) = row;
  }
  return table;
}

}  // namespace uavgrid
