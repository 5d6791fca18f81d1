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

// Online re-planning against patrolling adversaries.
//
// The agent first watches the adversaries to estimate a Markov transition
// matrix over each patrol ring. At every time step t0 it propagates the
// adversaries' current positions through those matrices into a risk map
// p(i, t), then solves exactly
//
//   min  sum_{(i,t) on route, t > t0} (t - r_i + phi * p(i, t))
//
// over routes in the time-expanded grid that start at the agent's cell at
// t0, move to a 4-neighbour every step, never visit a non-exit cell twice,
// collect every outstanding reward, and end on the exit by the horizon.
// Only the first move of the plan is executed before re-solving.

#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <chrono>
#include <cmath>
#include <deque>
#include <limits>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "uavgrid/grid_env.hpp"
#include "uavgrid/rng.hpp"

namespace uavgrid {

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Infeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Empirical transition matrix over one patrol ring. Rows without any
// observation fall back to a uniform prior over the two ring neighbours.
class TransitionModel {
 public:
  TransitionModel() = default;
  explicit TransitionModel(std::vector<Cell> ring)
      : ring_(std::move(ring)),
        counts_(ring_.size() * ring_.size(), 0),
        matrix_(ring_.size() * ring_.size(), 0.0) {
    if (ring_.size() < 3) throw ModelError("patrol ring needs at least three cells");
    for (std::size_t i = 0; i < ring_.size(); ++i) refresh_row(i);
  }

  std::size_t size() const { return ring_.size(); }
  const std::vector<Cell>& cells() const { return ring_; }
  Cell cell(std::size_t i) const { return ring_[i]; }

  int index_of(Cell c) const {
    const auto it = std::find(ring_.begin(), ring_.end(), c);
    return it == ring_.end() ? -1 : static_cast<int>(it - ring_.begin());
  }

  bool ring_adjacent(std::size_t i, std::size_t j) const {
    const std::size_t n = ring_.size();
    return j == (i + 1) % n || i == (j + 1) % n;
  }

  int count(std::size_t from, std::size_t to) const { return counts_[from * size() + to]; }
  int row_total(std::size_t from) const {
    int s = 0;
    for (std::size_t j = 0; j < size(); ++j) s += count(from, j);
    return s;
  }
  int total() const {
    int s = 0;
    for (int c : counts_) s += c;
    return s;
  }
  double prob(std::size_t from, std::size_t to) const { return matrix_[from * size() + to]; }

  void update(std::size_t from, std::size_t to) {
    if (from >= size() || to >= size() || !ring_adjacent(from, to)) {
      throw ModelError("observed transition " + std::to_string(from) + " -> " + std::to_string(to) +
                       " is not between ring-adjacent cells");
    }
    counts_[from * size() + to] += 1;
    refresh_row(from);
  }

  void update(Cell from, Cell to) {
    const int i = index_of(from);
    const int j = index_of(to);
    if (i < 0 || j < 0) throw ModelError("observed transition leaves the patrol ring");
    update(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  }

 private:
  void refresh_row(std::size_t i) {
    const std::size_t n = size();
    const int tot = row_total(i);
    for (std::size_t j = 0; j < n; ++j) {
      if (tot > 0) {
        matrix_[i * n + j] = static_cast<double>(count(i, j)) / tot;
      } else {
        matrix_[i * n + j] = ring_adjacent(i, j) ? 0.5 : 0.0;
      }
    }
  }

  std::vector<Cell> ring_;
  std::vector<int> counts_;
  std::vector<double> matrix_;
};

inline TransitionModel update_model(TransitionModel model, Cell from, Cell to) {
  model.update(from, to);
  return model;
}

struct Observation {
  std::vector<TransitionModel> models;  // one per adversary
  std::vector<int> final_index;         // ring positions after watching
};

// Watches every adversary for `n_obs` moves from its configured start,
// before the agent enters the grid.
template <class Urbg>
Observation observe_adversaries(const GameConfig& cfg, int n_obs, Urbg& rng) {
  if (n_obs < 0) throw ModelError("number of observations must be non-negative");
  Observation obs;
  GameState s = new_game(cfg);
  for (const auto& a : cfg.adversaries) obs.models.emplace_back(cfg.ring_of(a));
  for (int k = 0; k < n_obs; ++k) {
    const std::vector<int> before = s.adversary_index;
    move_adversaries(cfg, s, rng);
    for (std::size_t i = 0; i < obs.models.size(); ++i) {
      obs.models[i].update(static_cast<std::size_t>(before[i]), static_cast<std::size_t>(s.adversary_index[i]));
    }
  }
  obs.final_index = s.adversary_index;
  return obs;
}

// p(i, t) for t0 <= t <= horizon. Per-adversary distributions are kept for
// inspection; `p` is their per-cell sum capped at 1.
class RiskMap {
 public:
  RiskMap() = default;
  RiskMap(int num_cells, int t0, int horizon, std::size_t adversaries)
      : cells_(num_cells), t0_(t0), horizon_(horizon),
        p_(static_cast<std::size_t>(horizon - t0 + 1) * num_cells, 0.0),
        per_adversary_(adversaries, std::vector<double>(p_.size(), 0.0)) {}

  int t0() const { return t0_; }
  int horizon() const { return horizon_; }
  int num_cells() const { return cells_; }

  double p(int cell, int t) const {
    if (t < t0_ || t > horizon_) return 0.0;
    return p_[offset(cell, t)];
  }
  double& p_ref(int cell, int t) { return p_[offset(cell, t)]; }
  double adversary_p(std::size_t a, int cell, int t) const { return per_adversary_[a][offset(cell, t)]; }
  double& adversary_p_ref(std::size_t a, int cell, int t) { return per_adversary_[a][offset(cell, t)]; }
  std::size_t num_adversaries() const { return per_adversary_.size(); }

 private:
  std::size_t offset(int cell, int t) const {
    return static_cast<std::size_t>(t - t0_) * cells_ + cell;
  }
  int cells_ = 0;
  int t0_ = 0;
  int horizon_ = 0;
  std::vector<double> p_;
  std::vector<std::vector<double>> per_adversary_;
};

// Point mass at each adversary's current ring position at t0, pushed
// forward one transition per time step.
inline RiskMap propagate_risk(const GameConfig& cfg, const std::vector<TransitionModel>& models,
                              const std::vector<int>& current_index, int t0, int horizon) {
  if (horizon < t0) throw ModelError("risk horizon precedes the current time");
  if (current_index.size() != models.size()) throw ModelError("one position per adversary model is required");
  RiskMap risk(cfg.num_cells(), t0, horizon, models.size());
  for (std::size_t a = 0; a < models.size(); ++a) {
    const TransitionModel& m = models[a];
    const std::size_t n = m.size();
    std::vector<double> dist(n, 0.0);
    dist.at(static_cast<std::size_t>(current_index[a])) = 1.0;
    for (int t = t0; t <= horizon; ++t) {
      for (std::size_t i = 0; i < n; ++i) {
        risk.adversary_p_ref(a, cfg.index(m.cell(i)), t) = dist[i];
      }
      std::vector<double> next(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        if (dist[i] == 0.0) continue;
        for (std::size_t j = 0; j < n; ++j) next[j] += dist[i] * m.prob(i, j);
      }
      dist = std::move(next);
    }
  }
  for (int t = t0; t <= horizon; ++t) {
    for (int c = 0; c < cfg.num_cells(); ++c) {
      double sum = 0.0;
      for (std::size_t a = 0; a < models.size(); ++a) sum += risk.adversary_p(a, c, t);
      risk.p_ref(c, t) = std::min(1.0, sum);
    }
  }
  return risk;
}

struct RouteStep {
  Cell cell;
  int t = 0;
  friend bool operator==(const RouteStep&, const RouteStep&) = default;
};

struct SolverStats {
  long nodes = 0;            // search nodes expanded
  double root_bound = 0.0;   // relaxation value at the root
  double solve_time_s = 0.0;
};

struct Plan {
  std::vector<RouteStep> route;  // starts with the agent's cell at t0, ends on the exit
  double objective = 0.0;
  SolverStats stats;

  Action first_action() const {
    const Cell a = route.at(0).cell;
    const Cell b = route.at(1).cell;
    for (Action act : kAllActions) {
      if (moved(a, act) == b) return act;
    }
    throw ModelError("plan does not start with a grid move");
  }
};

// Objective term for arriving at `cell` at time t.
inline double plan_term(int t, double reward, double phi, double p) {
  return static_cast<double>(t) - reward + phi * p;
}

inline void write_plan(std::ostream& os, const Plan& plan) {
  os << "# objective " << plan.objective << " nodes " << plan.stats.nodes << '\n';
  for (const auto& s : plan.route) os << s.t << ' ' << s.cell.row << ' ' << s.cell.col << '\n';
}

// Default horizon: t0 + 4 * (width + height).
inline int default_horizon(const GameConfig& cfg, int t0) { return t0 + 4 * (cfg.width + cfg.height); }

namespace detail {

class PlanSolver {
 public:
  PlanSolver(const GameConfig& cfg, const GameState& s, const RiskMap& risk, double phi, int horizon,
             std::span<const Cell> hint = {})
      : cfg_(cfg), risk_(risk), phi_(phi), t0_(s.step_count), horizon_(horizon), start_(s.agent),
        hint_(hint.begin(), hint.end()) {
    if (horizon_ < t0_) throw Infeasible("horizon precedes the current time");
    if (risk_.t0() > t0_ || risk_.horizon() < horizon_) {
      throw ModelError("risk map does not cover the planning window");
    }
    cells_ = cfg.num_cells();
    // Outstanding rewards, renumbered densely.
    reward_slot_.assign(static_cast<std::size_t>(cells_), -1);
    for (std::size_t k = 0; k < cfg.rewards.size(); ++k) {
      if (!(s.collected & (1u << k))) {
        reward_slot_[cfg.index(cfg.rewards[k])] = static_cast<int>(num_outstanding_++);
      }
    }
    masks_ = std::size_t{1} << num_outstanding_;
    full_ = static_cast<std::uint32_t>(masks_ - 1);
    exit_ = cfg.index(cfg.exit);
    for (int c = 0; c < cells_; ++c) {
      std::array<int, kNumActions> nb{};
      const Cell cell = cfg.cell(c);
      for (Action a : kAllActions) {
        const Cell m = moved(cell, a);
        nb[static_cast<int>(a)] = cfg.contains(m) ? cfg.index(m) : -1;
      }
      neighbours_.push_back(nb);
    }
    base_cost_.resize(static_cast<std::size_t>(horizon_ - t0_ + 1) * cells_);
    for (int t = t0_; t <= horizon_; ++t) {
      for (int c = 0; c < cells_; ++c) {
        base_cost_[static_cast<std::size_t>(t - t0_) * cells_ + c] = plan_term(t, 0.0, phi_, risk_.p(c, t));
      }
    }
  }

  Plan solve() {
    const auto t_begin = std::chrono::steady_clock::now();
    start_index_ = cfg_.index(start_);
    mask0_ = collect(0, start_index_);
    last_arrival_ = horizon_;
    entered_.assign(static_cast<std::size_t>(cells_), 0);
    entered_[start_index_] = 1;
    path_.assign(1, start_index_);
    rewarded_.assign(1, false);
    tables_.emplace_back();
    built_len_.push_back(1);
    build_bound(tables_[0], t0_);
    int arg = 0;
    Plan plan;
    plan.stats.root_bound = relaxed_step(tables_[0], t0_, start_index_, kNumActions, mask0_, &arg);
    if (!std::isfinite(plan.stats.root_bound)) {
      throw Infeasible("no route collects every reward and reaches the exit by t=" + std::to_string(horizon_));
    }
    seed_incumbent();
    search(start_index_, t0_, kNumActions, mask0_, 0.0, 0);
    if (best_path_.empty()) throw Infeasible("branch and bound found no feasible route");

    double objective = 0.0;
    for (std::size_t k = 0; k < best_path_.size(); ++k) {
      const int t = t0_ + static_cast<int>(k);
      plan.route.push_back({cfg_.cell(best_path_[k]), t});
      if (k > 0) objective += step_cost(best_path_[k], t, best_rewarded_[k]);
    }
    plan.objective = objective;
    plan.stats.nodes = nodes_;
    plan.stats.solve_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();
    return plan;
  }

 private:
  static constexpr double kInf = std::numeric_limits<double>::infinity();

  std::uint32_t collect(std::uint32_t mask, int cell) const {
    const int slot = reward_slot_[cell];
    return slot >= 0 ? mask | (1u << slot) : mask;
  }

  double step_cost(int cell, int t, bool rewarded) const {
    if (rewarded) return plan_term(t, cfg_.reward_value, phi_, risk_.p(cell, t));
    return base_cost_[static_cast<std::size_t>(t - t0_) * cells_ + cell];
  }

  // `from` is the action that led into the cell, kNumActions at the root.
  std::size_t key(int t, int cell, int from, std::uint32_t mask) const {
    return ((static_cast<std::size_t>(t - t0_) * cells_ + cell) * (kNumActions + 1) + from) * masks_ + mask;
  }
  using Table = std::vector<double>;

  // Up/Down and Left/Right are adjacent in the enum.
  static bool reverses(int from, int a) { return from < kNumActions && (from ^ 1) == a; }

  // Best relaxed move out of a state; sets `*arg` to the action or -1.
  double relaxed_step(const Table& table, int t, int c, int from, std::uint32_t m, int* arg) const {
    double best = kInf;
    *arg = -1;
    for (int a = 0; a < kNumActions; ++a) {
      const int n = neighbours_[c][a];
      if (n < 0 || reverses(from, a) || (entered_[n] && n != exit_)) continue;
      const std::uint32_t nm = collect(m, n);
      double v = step_cost(n, t + 1, nm != m);
      if (n == exit_) {
        if (nm != full_) continue;
      } else {
        v += table[key(t + 1, n, a, nm)];
      }
      if (v < best) best = v, *arg = a;
    }
    return best;
  }

  // Cheapest completion from time `from_t` on by a walk that avoids the
  // cells the partial route has used and never steps straight back, but
  // may revisit its own cells: a lower bound on every simple completion.
  // Without the no-reversal rule, collecting a reward inside an adversary
  // ring looks as cheap as ducking in and out through one cell. Entries for
  // used cells and earlier times are left stale; nothing reads them.
  void build_bound(Table& table, int from_t) {
    table.resize(static_cast<std::size_t>(horizon_ - t0_ + 1) * cells_ * (kNumActions + 1) * masks_, kInf);
    for (int t = last_arrival_ - 1; t >= from_t; --t) {
      for (int c = 0; c < cells_; ++c) {
        if (entered_[c] || (c == exit_ && t > t0_)) continue;  // arriving on the exit ends the route
        for (std::uint32_t m = 0; m < masks_; ++m) {
          std::array<double, kNumActions> v;
          for (int a = 0; a < kNumActions; ++a) {
            const int n = neighbours_[c][a];
            v[a] = kInf;
            if (n < 0 || (entered_[n] && n != exit_)) continue;
            const std::uint32_t nm = collect(m, n);
            if (n == exit_) {
              if (nm == full_) v[a] = step_cost(n, t + 1, nm != m);
            } else if (t + 1 < last_arrival_) {
              v[a] = step_cost(n, t + 1, nm != m) + table[key(t + 1, n, a, nm)];
            }
          }
          for (int from = 0; from <= kNumActions; ++from) {
            double best = kInf;
            for (int a = 0; a < kNumActions; ++a) {
              if (!reverses(from, a)) best = std::min(best, v[a]);
            }
            table[key(t, c, from, m)] = best;
          }
        }
      }
    }
  }

  // Whether the walk behind `table`'s bound at this state steps on a cell
  // the route has entered since the table was built. Only then can a
  // rebuild raise the bound here.
  bool walk_is_stale(std::size_t level, int c, int t, int from, std::uint32_t m) const {
    const Table& table = tables_[level];
    const int built_len = built_len_[level];
    while (c != exit_) {
      double best = kInf;
      int best_a = -1;
      for (int a = 0; a < kNumActions; ++a) {
        const int n = neighbours_[c][a];
        if (n < 0 || reverses(from, a) || (n != exit_ && entered_[n] && entered_[n] <= built_len)) continue;
        const std::uint32_t nm = collect(m, n);
        double v = step_cost(n, t + 1, nm != m);
        if (n == exit_) {
          if (nm != full_) continue;
        } else {
          if (t + 1 >= last_arrival_) continue;
          v += table[key(t + 1, n, a, nm)];
        }
        if (v < best) best = v, best_a = a;
      }
      if (best_a < 0) return false;
      from = best_a;
      c = neighbours_[c][best_a];
      if (c != exit_ && entered_[c]) return true;
      m = collect(m, c);
      ++t;
    }
    return false;
  }

  // `level` indexes the bound table in force. A node with a choice to make
  // gets a table that avoids the whole route so far when the old one is
  // stale.
  void search(int cell, int t, int from, std::uint32_t mask, double acc, std::size_t level) {
    ++nodes_;
    struct Child {
      int cell;
      int action;
      std::uint32_t mask;
      double cost;
      double lb;
    };
    std::array<Child, kNumActions> children{};
    int count = 0;
    auto expand = [&](const Table& table) {
      count = 0;
      for (int a = 0; a < kNumActions; ++a) {
        const int n = neighbours_[cell][a];
        if (n < 0 || t + 1 > last_arrival_ || reverses(from, a)) continue;
        const bool at_exit = n == exit_;
        if (!at_exit && entered_[n]) continue;
        const std::uint32_t nm = collect(mask, n);
        if (at_exit && nm != full_) continue;
        const double c = acc + step_cost(n, t + 1, nm != mask);
        const double lb = at_exit ? c : c + table[key(t + 1, n, a, nm)];
        if (!std::isfinite(lb) || prunable(lb)) continue;
        children[count++] = {n, a, nm, c, lb};
      }
    };
    expand(tables_[level]);
    if (count > 1 && t + 1 < last_arrival_ && walk_is_stale(level, cell, t, from, mask)) {
      if (++level == tables_.size()) tables_.emplace_back(), built_len_.emplace_back();
      build_bound(tables_[level], t + 1);
      built_len_[level] = static_cast<int>(path_.size());
      expand(tables_[level]);
    }
    std::sort(children.begin(), children.begin() + count,
              [](const Child& a, const Child& b) { return a.lb < b.lb; });
    for (int k = 0; k < count; ++k) {
      const Child& ch = children[k];
      if (prunable(ch.lb)) continue;  // best_ may have improved
      path_.push_back(ch.cell);
      rewarded_.push_back(ch.mask != mask);
      if (ch.cell == exit_) {
        if (ch.cost < best_) {
          best_ = ch.cost;
          best_path_ = path_;
          best_rewarded_ = rewarded_;
          tighten_last_arrival();
        }
      } else {
        entered_[ch.cell] = static_cast<int>(path_.size());
        search(ch.cell, t + 1, ch.action, ch.mask, ch.cost, level);
        entered_[ch.cell] = 0;
      }
      path_.pop_back();
      rewarded_.pop_back();
    }
  }

  // Without an incumbent nothing is pruned but dead ends, and the first
  // dive can wander for a very long time; start from the caller's hint and
  // from shortest-path routes through the outstanding rewards in every
  // order (only the first 5040 orders are tried).
  void seed_incumbent() {
    std::vector<int> route;
    for (const Cell& c : hint_) {
      if (!cfg_.contains(c)) return;
      route.push_back(cfg_.index(c));
    }
    offer(route);
    std::vector<int> order;
    for (int c = 0; c < cells_; ++c) {
      if (reward_slot_[c] >= 0 && c != start_index_) order.push_back(c);
    }
    int tries = 0;
    do {
      if (greedy_route(order, route)) offer(route);
    } while (++tries < 5040 && std::next_permutation(order.begin(), order.end()));
  }

  // Visits `order` along shortest paths through unused cells, then the exit.
  bool greedy_route(const std::vector<int>& order, std::vector<int>& route) const {
    std::vector<char> used(static_cast<std::size_t>(cells_), 0);
    route.assign(1, start_index_);
    used[start_index_] = 1;
    std::vector<int> prev(static_cast<std::size_t>(cells_));
    std::deque<int> queue;
    auto leg = [&](int target) {
      if (used[target]) return true;  // crossed on an earlier leg
      std::fill(prev.begin(), prev.end(), -2);
      prev[route.back()] = -1;
      queue.assign(1, route.back());
      while (!queue.empty() && prev[target] == -2) {
        const int c = queue.front();
        queue.pop_front();
        for (int n : neighbours_[c]) {
          if (n < 0 || prev[n] != -2 || used[n] || (n == exit_ && target != exit_)) continue;
          prev[n] = c;
          queue.push_back(n);
        }
      }
      if (prev[target] == -2) return false;
      const std::size_t from = route.size();
      for (int c = target; c != route[from - 1]; c = prev[c]) route.push_back(c);
      std::reverse(route.begin() + static_cast<std::ptrdiff_t>(from), route.end());
      for (std::size_t k = from; k < route.size(); ++k) used[route[k]] = 1;
      return true;
    };
    for (int r : order) {
      if (!leg(r)) return false;
    }
    return leg(exit_);
  }

  // Takes `route` (cell indices from the agent) as the incumbent if it is
  // feasible and better.
  void offer(const std::vector<int>& route) {
    if (route.size() < 2 || route.front() != start_index_ || route.back() != exit_) return;
    if (t0_ + static_cast<int>(route.size()) - 1 > horizon_) return;
    std::vector<char> seen(static_cast<std::size_t>(cells_), 0);
    std::vector<bool> rewarded{false};
    std::uint32_t mask = mask0_;
    double cost = 0.0;
    seen[start_index_] = 1;
    for (std::size_t k = 1; k < route.size(); ++k) {
      const int c = route[k];
      const auto& nb = neighbours_[route[k - 1]];
      if (std::find(nb.begin(), nb.end(), c) == nb.end()) return;
      if (seen[c] || (c == exit_ && k + 1 != route.size())) return;
      seen[c] = 1;
      const std::uint32_t m = collect(mask, c);
      rewarded.push_back(m != mask);
      cost += step_cost(c, t0_ + static_cast<int>(k), m != mask);
      mask = m;
    }
    if (mask != full_ || !(cost < best_)) return;
    best_ = cost;
    best_path_ = route;
    best_rewarded_ = std::move(rewarded);
    tighten_last_arrival();
  }

  // Every step costs at least its time and the rewards are fixed, so a
  // route still under way at the first time whose step costs alone reach
  // the incumbent cannot win. Entries for later times go stale.
  void tighten_last_arrival() {
    double floor = -cfg_.reward_value * static_cast<double>(std::popcount(full_ & ~mask0_));
    for (int t = t0_ + 1; t < last_arrival_; ++t) {
      floor += t;
      if (prunable(floor)) {
        last_arrival_ = t;
        return;
      }
    }
  }

  // A branch whose bound cannot beat the incumbent by more than rounding
  // noise is cut.
  bool prunable(double lb) const {
    if (!std::isfinite(best_)) return false;
    return lb >= best_ - 1e-9 * std::max(1.0, std::abs(best_));
  }

  const GameConfig& cfg_;
  const RiskMap& risk_;
  double phi_;
  int t0_;
  int horizon_;
  Cell start_;
  std::vector<Cell> hint_;
  int start_index_ = 0;
  std::uint32_t mask0_ = 0;
  int cells_ = 0;
  int exit_ = 0;
  std::vector<int> reward_slot_;
  std::size_t num_outstanding_ = 0;
  std::size_t masks_ = 1;
  std::uint32_t full_ = 0;
  std::vector<std::array<int, kNumActions>> neighbours_;
  std::vector<double> base_cost_;  // plan_term without reward, by (t, cell)
  std::vector<Table> tables_;
  std::vector<int> built_len_;  // route length when each table was built  // one per rebuild along the current branch
  std::vector<int> entered_;  // 1-based position on the current route, 0 if not on it
  std::vector<int> path_;
  std::vector<bool> rewarded_;
  double best_ = kInf;
  std::vector<int> best_path_;
  std::vector<bool> best_rewarded_;
  long nodes_ = 0;
  int last_arrival_ = 0;  // no improving route reaches the exit later
};

}  // namespace detail

// Exact minimiser of the route objective; throws Infeasible when no route
// meets the constraints by `horizon`.
// `hint` is an optional candidate route from the agent's cell (typically
// the rest of the previous plan); it only speeds up the search.
inline Plan solve_plan(const GameConfig& cfg, const GameState& state, const RiskMap& risk, double phi,
                       int horizon, std::span<const Cell> hint = {}) {
  return detail::PlanSolver(cfg, state, risk, phi, horizon, hint).solve();
}

// Route checks that must hold for every plan.
inline std::string check_plan(const GameConfig& cfg, const GameState& state, const Plan& plan, int horizon) {
  if (plan.route.size() < 2) return "route must contain at least one move";
  if (plan.route.front().cell != state.agent || plan.route.front().t != state.step_count) {
    return "route must start at the agent's cell at the current time";
  }
  std::vector<int> seen(static_cast<std::size_t>(cfg.num_cells()), 0);
  std::uint32_t mask = state.collected;
  for (std::size_t k = 0; k < plan.route.size(); ++k) {
    const auto& s = plan.route[k];
    if (!cfg.contains(s.cell)) return "route leaves the grid";
    if (s.t > horizon) return "route exceeds the horizon";
    if (k > 0) {
      if (s.t != plan.route[k - 1].t + 1) return "one cell per time step";
      if (manhattan(s.cell, plan.route[k - 1].cell) != 1) return "consecutive cells must be grid-adjacent";
    }
    const bool is_exit = s.cell == cfg.exit;
    if (!is_exit && ++seen[cfg.index(s.cell)] > 1) return "a non-exit cell is visited twice";
    if (is_exit && k > 0 && k + 1 != plan.route.size()) return "route continues after reaching the exit";
    for (std::size_t r = 0; r < cfg.rewards.size(); ++r) {
      if (cfg.rewards[r] == s.cell) mask |= 1u << r;
    }
  }
  if (plan.route.back().cell != cfg.exit) return "route must end on the exit";
  if (mask != cfg.all_collected()) return "route must collect every outstanding reward";
  return {};
}

struct OnlineParams {
  int n_obs = 8;
  double phi = 1000.0;
  int horizon_steps = 0;  // planning window length; 0 = 4 * (width + height)
};

struct OnlineResult {
  Status status = Status::Running;
  bool infeasible = false;
  int score = 0;
  int steps = 0;
  long nodes = 0;
  double observe_time_s = 0.0;
  double solve_time_s = 0.0;
  std::vector<Cell> trajectory;
};

// Observe, then solve / move / watch / update until the game ends.
inline OnlineResult online_loop(const GameConfig& cfg, const OnlineParams& params, RngStreams& rng) {
  OnlineResult out;
  const auto t_obs = std::chrono::steady_clock::now();
  Observation obs = observe_adversaries(cfg, params.n_obs, rng.adversary);
  out.observe_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_obs).count();

  GameState s = new_game(cfg);
  out.trajectory.push_back(s.agent);
  std::vector<Cell> hint;  // the previous plan after its first move
  while (!s.terminal()) {
    const int t0 = s.step_count;
    const int horizon = params.horizon_steps > 0 ? t0 + params.horizon_steps : default_horizon(cfg, t0);
    Plan plan;
    try {
      const RiskMap risk = propagate_risk(cfg, obs.models, s.adversary_index, t0, horizon);
      plan = solve_plan(cfg, s, risk, params.phi, horizon, hint);
    } catch (const Infeasible&) {
      out.infeasible = true;
      s.status = Status::EpochLimit;
      break;
    }
    out.nodes += plan.stats.nodes;
    out.solve_time_s += plan.stats.solve_time_s;
    hint.clear();
    for (std::size_t k = 1; k < plan.route.size(); ++k) hint.push_back(plan.route[k].cell);
    const StepOutcome moved_agent = agent_step(cfg, s, plan.first_action());
    out.trajectory.push_back(moved_agent.next_state.agent);
    if (moved_agent.terminal) {
      s = moved_agent.next_state;
      break;
    }
    const std::vector<Cell> before = moved_agent.next_state.adversary_pos;
    s = adversary_step(cfg, moved_agent.next_state, rng.adversary).next_state;
    for (std::size_t i = 0; i < obs.models.size(); ++i) obs.models[i].update(before[i], s.adversary_pos[i]);
  }
  out.status = s.status;
  out.score = s.score;
  out.steps = s.step_count;
  return out;
}

}  // namespace uavgrid
