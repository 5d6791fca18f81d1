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

// Reference implementations the fast code is checked against: central
// finite differences for backprop, and exhaustive route enumeration for
// the branch-and-bound planner. Both are slow and only meant for small
// instances.

#pragma once

#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "uavgrid/neural.hpp"
#include "uavgrid/online_opt.hpp"

namespace uavgrid::oracle {

// ---- gradients ----------------------------------------------------------------

struct GradientCheck {
  double max_rel_error = 0.0;
  std::size_t worst_param = 0;
  double analytic = 0.0;
  double numeric = 0.0;
};

inline double relative_error(double a, double b) {
  const double denom = std::max(std::abs(a) + std::abs(b), 1e-12);
  return std::abs(a - b) / denom;
}

// Compares backprop with (L(w + h) - L(w - h)) / 2h for every parameter.
inline GradientCheck check_gradient(const Mlp& net, std::span<const double> input, std::span<const double> target,
                                    std::span<const std::uint8_t> mask, double h = 1e-5) {
  const Gradients g = backprop(net, input, target, mask);
  Mlp probe = net;
  GradientCheck out;
  for (std::size_t i = 0; i < probe.num_params(); ++i) {
    const double w = probe.params()[i];
    probe.params()[i] = w + h;
    const double up = masked_loss(probe, input, target, mask);
    probe.params()[i] = w - h;
    const double down = masked_loss(probe, input, target, mask);
    probe.params()[i] = w;
    const double numeric = (up - down) / (2.0 * h);
    const double err = relative_error(g.grad[i], numeric);
    if (err > out.max_rel_error) out = {err, i, g.grad[i], numeric};
  }
  return out;
}

struct GradientCase {
  Mlp net;
  std::vector<double> input;
  std::vector<double> target;
  std::vector<std::uint8_t> mask;
};

// Small random network: 1-3 affine layers of width 1-8, random slope,
// random input/target, at least one output selected by the mask.
template <class Urbg>
GradientCase random_gradient_case(Urbg& rng) {
  std::uniform_int_distribution<int> layers(1, 3);
  std::uniform_int_distribution<int> width(1, 8);
  std::uniform_real_distribution<double> slope(0.05, 0.9);
  std::uniform_real_distribution<double> value(-2.0, 2.0);
  std::bernoulli_distribution coin(0.6);
  std::vector<int> sizes{width(rng)};
  const int n = layers(rng);
  for (int l = 0; l < n; ++l) sizes.push_back(width(rng));
  GradientCase c{Mlp(sizes, slope(rng)), {}, {}, {}};
  c.net.init_uniform(rng);
  for (int i = 0; i < sizes.front(); ++i) c.input.push_back(value(rng));
  for (int i = 0; i < sizes.back(); ++i) {
    c.target.push_back(value(rng));
    c.mask.push_back(coin(rng) ? 1 : 0);
  }
  std::uniform_int_distribution<int> any(0, sizes.back() - 1);
  c.mask[any(rng)] = 1;
  return c;
}

// ---- planner ------------------------------------------------------------------

struct EnumerationResult {
  double objective = 0.0;
  std::vector<Cell> route;
  long routes = 0;  // complete feasible routes seen
};

// Every simple route from the agent to the exit that collects all
// outstanding rewards by `horizon`; returns the cheapest, or nullopt when
// there is none. Costs are accumulated in route order, as the solver
// reports them.
inline std::optional<EnumerationResult> enumerate_best_plan(const GameConfig& cfg, const GameState& state,
                                                            const RiskMap& risk, double phi, int horizon) {
  std::optional<EnumerationResult> best;
  long routes = 0;
  std::vector<char> visited(static_cast<std::size_t>(cfg.num_cells()), 0);
  std::vector<Cell> path{state.agent};
  visited[cfg.index(state.agent)] = 1;
  const std::uint32_t full = cfg.all_collected();
  auto collect = [&](std::uint32_t m, Cell c) {
    for (std::size_t k = 0; k < cfg.rewards.size(); ++k) {
      if (cfg.rewards[k] == c) m |= 1u << k;
    }
    return m;
  };
  auto dfs = [&](auto&& self, Cell at, int t, std::uint32_t mask, double acc) -> void {
    if (t >= horizon) return;
    for (Action a : kAllActions) {
      const Cell n = moved(at, a);
      if (!cfg.contains(n)) continue;
      const bool at_exit = n == cfg.exit;
      if (!at_exit && visited[cfg.index(n)]) continue;
      const std::uint32_t nm = collect(mask, n);
      if (at_exit && nm != full) continue;
      const double cost = acc + plan_term(t + 1, nm != mask ? cfg.reward_value : 0.0, phi, risk.p(cfg.index(n), t + 1));
      path.push_back(n);
      if (at_exit) {
        ++routes;
        if (!best || cost < best->objective) best = EnumerationResult{cost, path, 0};
      } else {
        visited[cfg.index(n)] = 1;
        self(self, n, t + 1, nm, cost);
        visited[cfg.index(n)] = 0;
      }
      path.pop_back();
    }
  };
  dfs(dfs, state.agent, state.step_count, collect(state.collected, state.agent), 0.0);
  if (best) best->routes = routes;
  return best;
}

struct PlanCase {
  GameConfig cfg;
  GameState state;
  RiskMap risk;
  double phi = 0.0;
  int horizon = 0;
};

// Random 3x3 or 4x4 instance with at most one reward, a horizon of at most
// 10 and an arbitrary risk map. Risks are multiples of 1/256 and phi is an
// integer, so every route objective is exact in double arithmetic and
// optima can be compared with ==.
template <class Urbg>
PlanCase random_plan_case(Urbg& rng) {
  std::uniform_int_distribution<int> side(3, 4);
  PlanCase pc;
  const int n = side(rng);
  pc.cfg = open_grid(n, n);
  std::uniform_int_distribution<int> coord(0, n - 1);
  auto any_cell = [&] { return Cell{coord(rng), coord(rng)}; };
  pc.cfg.start = any_cell();
  do pc.cfg.exit = any_cell(); while (pc.cfg.exit == pc.cfg.start);
  pc.cfg.rewards.clear();
  pc.cfg.adversaries.clear();
  if (std::bernoulli_distribution(0.7)(rng)) {
    Cell r;
    do r = any_cell(); while (r == pc.cfg.start || r == pc.cfg.exit);
    pc.cfg.rewards.push_back(r);
  }
  validate(pc.cfg);
  pc.state = new_game(pc.cfg);
  pc.state.step_count = std::uniform_int_distribution<int>(0, 3)(rng);
  pc.horizon = pc.state.step_count + std::uniform_int_distribution<int>(1, 10)(rng);
  pc.phi = std::uniform_int_distribution<int>(0, 2000)(rng);
  pc.risk = RiskMap(pc.cfg.num_cells(), pc.state.step_count, pc.horizon, 0);
  std::uniform_int_distribution<int> level(0, 256);
  std::bernoulli_distribution risky(0.4);
  for (int t = pc.state.step_count; t <= pc.horizon; ++t) {
    for (int c = 0; c < pc.cfg.num_cells(); ++c) {
      pc.risk.p_ref(c, t) = risky(rng) ? level(rng) / 256.0 : 0.0;
    }
  }
  return pc;
}

struct PlanCheck {
  bool agree = false;
  bool feasible = false;
  double solver = 0.0;
  double enumeration = 0.0;
  std::string route_error;  // from check_plan
};

inline PlanCheck compare_with_enumeration(const PlanCase& pc) {
  PlanCheck out;
  const auto ref = enumerate_best_plan(pc.cfg, pc.state, pc.risk, pc.phi, pc.horizon);
  try {
    const Plan plan = solve_plan(pc.cfg, pc.state, pc.risk, pc.phi, pc.horizon);
    out.feasible = true;
    out.solver = plan.objective;
    out.route_error = check_plan(pc.cfg, pc.state, plan, pc.horizon);
    if (ref) {
      out.enumeration = ref->objective;
      out.agree = plan.objective == ref->objective && out.route_error.empty();
    }
  } catch (const Infeasible&) {
    out.agree = !ref;
  }
  return out;
}

}  // namespace uavgrid::oracle
