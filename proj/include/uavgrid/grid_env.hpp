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

#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace uavgrid {

// Grid coordinate. Row 0 is the top row, column 0 the left column.
struct Cell {
  int row = 0;
  int col = 0;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

inline int manhattan(Cell a, Cell b) {
  return std::abs(a.row - b.row) + std::abs(a.col - b.col);
}

enum class Action : int { Up = 0, Down = 1, Left = 2, Right = 3 };
inline constexpr int kNumActions = 4;
inline constexpr std::array<Action, kNumActions> kAllActions = {
    Action::Up, Action::Down, Action::Left, Action::Right};

inline constexpr Cell offset(Action a) {
  switch (a) {
    case Action::Up: return {-1, 0};
    case Action::Down: return {1, 0};
    case Action::Left: return {0, -1};
    case Action::Right: return {0, 1};
  }
  return {0, 0};
}

inline Cell moved(Cell c, Action a) {
  const Cell d = offset(a);
  return {c.row + d.row, c.col + d.col};
}

inline const char* to_string(Action a) {
  switch (a) {
    case Action::Up: return "up";
    case Action::Down: return "down";
    case Action::Left: return "left";
    case Action::Right: return "right";
  }
  return "?";
}

enum class Movement { Clockwise, Counterclockwise, Random };

inline const char* to_string(Movement m) {
  switch (m) {
    case Movement::Clockwise: return "clockwise";
    case Movement::Counterclockwise: return "counterclockwise";
    case Movement::Random: return "random";
  }
  return "?";
}

inline std::optional<Movement> parse_movement(const std::string& s) {
  if (s == "clockwise" || s == "cw") return Movement::Clockwise;
  if (s == "counterclockwise" || s == "ccw") return Movement::Counterclockwise;
  if (s == "random") return Movement::Random;
  return std::nullopt;
}

enum class Status { Running, Won, Captured, EpochLimit };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::Running: return "running";
    case Status::Won: return "won";
    case Status::Captured: return "captured";
    case Status::EpochLimit: return "epoch_limit";
  }
  return "?";
}

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidAction : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Unreachable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An adversary patrols the closed ring of the 8 cells around one reward.
// The ring is ordered clockwise in screen coordinates starting at the
// north-west neighbour: NW, N, NE, E, SE, S, SW, W.
struct AdversarySpec {
  Movement movement = Movement::Clockwise;
  int reward_index = 0;
  int start_index = 0;  // 0 = north-west of the reward
};

inline constexpr int kRingSize = 8;

inline std::vector<Cell> patrol_ring(Cell reward) {
  const int r = reward.row;
  const int c = reward.col;
  return {{r - 1, c - 1}, {r - 1, c},     {r - 1, c + 1}, {r, c + 1},
          {r + 1, c + 1}, {r + 1, c},     {r + 1, c - 1}, {r, c - 1}};
}

struct GameConfig {
  int width = 5;
  int height = 5;
  Cell start{0, 0};
  Cell exit{4, 4};
  std::vector<Cell> rewards;
  std::vector<AdversarySpec> adversaries;
  int step_penalty = -1;
  int reward_value = 200;
  int capture_penalty = -1000;
  int exit_bonus = 100;
  int max_steps = 1000;
  std::uint64_t rng_seed = 0;

  int num_cells() const { return width * height; }
  bool contains(Cell c) const {
    return c.row >= 0 && c.row < height && c.col >= 0 && c.col < width;
  }
  int index(Cell c) const { return c.row * width + c.col; }
  Cell cell(int idx) const { return {idx / width, idx % width}; }
  std::uint32_t all_collected() const {
    return rewards.empty() ? 0u : static_cast<std::uint32_t>((1ull << rewards.size()) - 1);
  }
  std::vector<Cell> ring_of(const AdversarySpec& a) const {
    return patrol_ring(rewards.at(a.reward_index));
  }
};

struct GameState {
  Cell agent;
  std::vector<int> adversary_index;  // position along each adversary's ring
  std::vector<Cell> adversary_pos;
  std::uint32_t collected = 0;
  int score = 0;
  int step_count = 0;
  Status status = Status::Running;

  bool terminal() const { return status != Status::Running; }
  friend bool operator==(const GameState&, const GameState&) = default;
};

struct StepOutcome {
  GameState next_state;
  int immediate_reward = 0;
  bool terminal = false;
};

namespace detail {

inline bool in_ring(const std::vector<Cell>& ring, Cell c) {
  return std::find(ring.begin(), ring.end(), c) != ring.end();
}

}  // namespace detail

// Throws ConfigError naming the first violated rule.
inline void validate(const GameConfig& cfg) {
  auto fail = [](const std::string& rule) { throw ConfigError("invalid game config: " + rule); };
  if (cfg.width < 1 || cfg.height < 1) fail("grid dimensions must be positive");
  if (cfg.num_cells() < 2) fail("grid must have at least two cells");
  if (cfg.rewards.size() > 16) fail("at most 16 rewards are supported");
  if (cfg.max_steps < 1) fail("max_steps must be >= 1");
  if (!cfg.contains(cfg.start)) fail("start lies outside the grid");
  if (!cfg.contains(cfg.exit)) fail("exit lies outside the grid");
  if (cfg.start == cfg.exit) fail("start and exit must be distinct");
  for (std::size_t k = 0; k < cfg.rewards.size(); ++k) {
    const Cell r = cfg.rewards[k];
    if (!cfg.contains(r)) fail("reward " + std::to_string(k) + " lies outside the grid");
    if (r == cfg.start) fail("reward " + std::to_string(k) + " coincides with start");
    if (r == cfg.exit) fail("reward " + std::to_string(k) + " coincides with exit");
    for (std::size_t j = 0; j < k; ++j) {
      if (cfg.rewards[j] == r) fail("rewards " + std::to_string(j) + " and " + std::to_string(k) + " coincide");
    }
  }
  for (std::size_t i = 0; i < cfg.adversaries.size(); ++i) {
    const auto& a = cfg.adversaries[i];
    const std::string tag = "adversary " + std::to_string(i);
    if (a.reward_index < 0 || a.reward_index >= static_cast<int>(cfg.rewards.size())) {
      fail(tag + " refers to a missing reward");
    }
    if (a.start_index < 0 || a.start_index >= kRingSize) fail(tag + " start_index out of range");
    const auto ring = cfg.ring_of(a);
    for (Cell c : ring) {
      if (!cfg.contains(c)) fail(tag + " patrol ring leaves the grid (reward must be interior)");
    }
    if (detail::in_ring(ring, cfg.exit)) fail(tag + " patrol ring covers the exit");
    for (std::size_t k = 0; k < cfg.rewards.size(); ++k) {
      if (static_cast<int>(k) != a.reward_index && detail::in_ring(ring, cfg.rewards[k])) {
        fail("reward " + std::to_string(k) + " lies inside the patrol region of reward " +
             std::to_string(a.reward_index));
      }
    }
  }
}

inline GameState new_game(const GameConfig& cfg) {
  validate(cfg);
  GameState s;
  s.agent = cfg.start;
  for (const auto& a : cfg.adversaries) {
    s.adversary_index.push_back(a.start_index);
    s.adversary_pos.push_back(cfg.ring_of(a)[a.start_index]);
  }
  return s;
}

inline bool is_legal(const GameConfig& cfg, Cell from, Action a) {
  return cfg.contains(moved(from, a));
}

inline std::array<bool, kNumActions> legal_actions(const GameConfig& cfg, const GameState& s) {
  std::array<bool, kNumActions> mask{};
  for (Action a : kAllActions) mask[static_cast<int>(a)] = is_legal(cfg, s.agent, a);
  return mask;
}

namespace detail {

// Moves the agent to `to` (which may equal the current cell for a blocked
// move) and applies rewards. No capture check.
inline StepOutcome apply_agent_move(const GameConfig& cfg, const GameState& s, Cell to) {
  StepOutcome out{s, 0, false};
  GameState& n = out.next_state;
  n.agent = to;
  n.step_count += 1;
  bool special = false;
  for (std::size_t k = 0; k < cfg.rewards.size(); ++k) {
    const std::uint32_t bit = 1u << k;
    if (cfg.rewards[k] == to && !(n.collected & bit)) {
      n.collected |= bit;
      out.immediate_reward += cfg.reward_value;
      special = true;
    }
  }
  if (to == cfg.exit && n.collected == cfg.all_collected()) {
    out.immediate_reward += cfg.exit_bonus;
    n.status = Status::Won;
    special = true;
  }
  if (!special) out.immediate_reward += cfg.step_penalty;
  n.score += out.immediate_reward;
  out.terminal = n.terminal();
  return out;
}

}  // namespace detail

// Agent half of a time step. Capture is never flagged here.
inline StepOutcome agent_step(const GameConfig& cfg, const GameState& s, Action a) {
  if (s.terminal()) throw InvalidAction("agent_step on a finished game");
  if (!is_legal(cfg, s.agent, a)) {
    throw InvalidAction(std::string("action ") + to_string(a) + " leaves the grid");
  }
  return detail::apply_agent_move(cfg, s, moved(s.agent, a));
}

// Learner variant: an off-grid action leaves the agent in place and costs
// the step penalty, so the action space stays fixed at four.
inline StepOutcome agent_step_or_stay(const GameConfig& cfg, const GameState& s, Action a) {
  if (s.terminal()) throw InvalidAction("agent_step on a finished game");
  const Cell to = is_legal(cfg, s.agent, a) ? moved(s.agent, a) : s.agent;
  if (to == s.agent) {
    StepOutcome out{s, cfg.step_penalty, false};
    out.next_state.step_count += 1;
    out.next_state.score += cfg.step_penalty;
    return out;
  }
  return detail::apply_agent_move(cfg, s, to);
}

inline int next_ring_index(Movement m, int idx, bool forward_coin) {
  switch (m) {
    case Movement::Clockwise: return (idx + 1) % kRingSize;
    case Movement::Counterclockwise: return (idx + kRingSize - 1) % kRingSize;
    case Movement::Random:
      return forward_coin ? (idx + 1) % kRingSize : (idx + kRingSize - 1) % kRingSize;
  }
  return idx;
}

// Moves every adversary one ring cell, advancing the shared rng only for
// random adversaries.
template <class Rng>
void move_adversaries(const GameConfig& cfg, GameState& s, Rng& rng) {
  std::bernoulli_distribution coin(0.5);
  for (std::size_t i = 0; i < cfg.adversaries.size(); ++i) {
    const auto& spec = cfg.adversaries[i];
    const bool fwd = spec.movement == Movement::Random ? coin(rng) : true;
    s.adversary_index[i] = next_ring_index(spec.movement, s.adversary_index[i], fwd);
    s.adversary_pos[i] = cfg.ring_of(spec)[s.adversary_index[i]];
  }
}

// Adversary half of a time step: move, then check co-location.
template <class Rng>
StepOutcome adversary_step(const GameConfig& cfg, const GameState& s, Rng& rng) {
  StepOutcome out{s, 0, s.terminal()};
  if (s.terminal()) return out;
  GameState& n = out.next_state;
  move_adversaries(cfg, n, rng);
  if (std::find(n.adversary_pos.begin(), n.adversary_pos.end(), n.agent) != n.adversary_pos.end()) {
    n.status = Status::Captured;
    out.immediate_reward = cfg.capture_penalty;
    n.score += cfg.capture_penalty;
  } else if (n.step_count >= cfg.max_steps) {
    n.status = Status::EpochLimit;
  }
  out.terminal = n.terminal();
  return out;
}

// One full time step for a learner: agent (blocked moves stay), then the
// adversaries unless the agent already finished. Reward is the sum.
template <class Rng>
StepOutcome play_turn(const GameConfig& cfg, const GameState& s, Action a, Rng& rng) {
  StepOutcome first = agent_step_or_stay(cfg, s, a);
  if (first.terminal) return first;
  StepOutcome second = adversary_step(cfg, first.next_state, rng);
  second.immediate_reward += first.immediate_reward;
  return second;
}

// Breadth-first search over (cell, collected mask) ignoring adversaries.
// Returns the minimum number of agent steps to collect every reward and
// reach the exit.
inline int optimal_steps(const GameConfig& cfg) {
  validate(cfg);
  const int n = cfg.num_cells();
  const std::uint32_t full = cfg.all_collected();
  const std::size_t masks = std::size_t{1} << cfg.rewards.size();
  std::vector<int> dist(static_cast<std::size_t>(n) * masks, -1);
  auto key = [&](Cell c, std::uint32_t m) { return static_cast<std::size_t>(cfg.index(c)) * masks + m; };
  auto collect = [&](Cell c, std::uint32_t m) {
    for (std::size_t k = 0; k < cfg.rewards.size(); ++k) {
      if (cfg.rewards[k] == c) m |= 1u << k;
    }
    return m;
  };
  std::deque<std::pair<Cell, std::uint32_t>> queue;
  dist[key(cfg.start, 0)] = 0;
  queue.emplace_back(cfg.start, 0);
  while (!queue.empty()) {
    auto [c, m] = queue.front();
    queue.pop_front();
    const int d = dist[key(c, m)];
    for (Action a : kAllActions) {
      const Cell nc = moved(c, a);
      if (!cfg.contains(nc)) continue;
      const std::uint32_t nm = collect(nc, m);
      if (nc == cfg.exit && nm == full) return d + 1;
      if (dist[key(nc, nm)] >= 0) continue;
      dist[key(nc, nm)] = d + 1;
      queue.emplace_back(nc, nm);
    }
  }
  throw Unreachable("no path collects every reward and reaches the exit");
}

// Best achievable score when no adversary interferes: every step pays the
// step penalty except the ones that collect a reward or win.
inline int optimal_score(const GameConfig& cfg) {
  const int steps = optimal_steps(cfg);
  const int k = static_cast<int>(cfg.rewards.size());
  return k * cfg.reward_value + cfg.exit_bonus + (steps - k - 1) * cfg.step_penalty;
}

// Observation sentinels. Adversary i contributes -2^i so that several
// adversaries stay distinguishable; the agent marker wins over everything.
inline constexpr double kEmptyMarker = 0.0;
inline constexpr double kAgentMarker = 1.0;
inline constexpr double kRewardMarker = 0.5;
inline double adversary_marker(std::size_t i) { return -static_cast<double>(1u << i); }

inline std::vector<double> encode_observation(const GameConfig& cfg, const GameState& s) {
  std::vector<double> obs(static_cast<std::size_t>(cfg.num_cells()), kEmptyMarker);
  for (std::size_t k = 0; k < cfg.rewards.size(); ++k) {
    if (!(s.collected & (1u << k))) obs[cfg.index(cfg.rewards[k])] = kRewardMarker;
  }
  std::vector<bool> has_adv(obs.size(), false);
  for (std::size_t i = 0; i < s.adversary_pos.size(); ++i) {
    const auto idx = static_cast<std::size_t>(cfg.index(s.adversary_pos[i]));
    if (!has_adv[idx]) obs[idx] = 0.0;
    has_adv[idx] = true;
    obs[idx] += adversary_marker(i);
  }
  obs[cfg.index(s.agent)] = kAgentMarker;
  return obs;
}

inline std::optional<Cell> decode_agent(const std::vector<double>& obs, int width) {
  for (std::size_t i = 0; i < obs.size(); ++i) {
    if (obs[i] == kAgentMarker) {
      return Cell{static_cast<int>(i) / width, static_cast<int>(i) % width};
    }
  }
  return std::nullopt;
}

// Single reward in the centre of a 5x5 grid, one adversary starting
// north-west of it.
inline GameConfig paper_5x5(Movement m) {
  GameConfig cfg;
  cfg.width = 5;
  cfg.height = 5;
  cfg.start = {0, 0};
  cfg.exit = {4, 4};
  cfg.rewards = {{2, 2}};
  cfg.adversaries = {{m, 0, 0}};
  return cfg;
}

// 9x9 grid, rewards top-right and bottom-left, each guarded by an adversary
// starting north-west of it.
inline GameConfig paper_9x9(Movement m) {
  GameConfig cfg;
  cfg.width = 9;
  cfg.height = 9;
  cfg.start = {0, 0};
  cfg.exit = {8, 8};
  cfg.rewards = {{1, 7}, {7, 1}};
  cfg.adversaries = {{m, 0, 0}, {m, 1, 0}};
  return cfg;
}

// Adversary-free w x h grid from the top-left to the bottom-right corner.
inline GameConfig open_grid(int width, int height) {
  GameConfig cfg;
  cfg.width = width;
  cfg.height = height;
  cfg.start = {0, 0};
  cfg.exit = {height - 1, width - 1};
  return cfg;
}

}  // namespace uavgrid
