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

#include <cmath>
#include <numeric>
#include <sstream>

#include "uavgrid/online_opt.hpp"
#include "uavgrid/oracles.hpp"

namespace uavgrid {
namespace {

TransitionModel ring_model() { return TransitionModel(patrol_ring({2, 2})); }

void expect_row_stochastic(const TransitionModel& m) {
  for (std::size_t i = 0; i < m.size(); ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < m.size(); ++j) {
      ASSERT_GE(m.prob(i, j), 0.0);
      if (!m.ring_adjacent(i, j)) {
        ASSERT_EQ(m.prob(i, j), 0.0);
      }
      sum += m.prob(i, j);
    }
    ASSERT_NEAR(sum, 1.0, 1e-12) << "row " << i;
  }
}

// ---- transition model -------------------------------------------------------

TEST(TransitionModel, PriorIsUniformOverNeighbours) {
  const TransitionModel m = ring_model();
  expect_row_stochastic(m);
  EXPECT_EQ(m.prob(0, 1), 0.5);
  EXPECT_EQ(m.prob(0, 7), 0.5);
  EXPECT_EQ(m.total(), 0);
}

TEST(TransitionModel, OneUpdateMakesAPointMass) {
  const TransitionModel m = update_model(ring_model(), {1, 1}, {1, 2});
  EXPECT_EQ(m.prob(0, 1), 1.0);
  EXPECT_EQ(m.prob(0, 7), 0.0);
  EXPECT_EQ(m.count(0, 1), 1);
  EXPECT_EQ(m.prob(3, 2), 0.5);  // untouched rows keep the prior
}

TEST(TransitionModel, RejectsNonAdjacent) {
  TransitionModel m = ring_model();
  EXPECT_THROW(m.update(0, 2), ModelError);
  EXPECT_THROW(m.update(0, 0), ModelError);
  EXPECT_THROW(m.update(Cell{0, 0}, Cell{1, 1}), ModelError);
  EXPECT_THROW(update_model(m, {1, 1}, {3, 3}), ModelError);
}

TEST(TransitionModel, RowStochasticUnderRandomUpdates) {
  Rng rng(3);
  TransitionModel m = ring_model();
  std::uniform_int_distribution<int> from(0, 7);
  std::bernoulli_distribution fwd(0.3);
  for (int k = 0; k < 500; ++k) {
    const int i = from(rng);
    m.update(static_cast<std::size_t>(i), static_cast<std::size_t>(fwd(rng) ? (i + 1) % 8 : (i + 7) % 8));
    if (k % 50 == 0) expect_row_stochastic(m);
  }
  expect_row_stochastic(m);
  EXPECT_EQ(m.total(), 500);
}

TEST(Observe, ClockwiseEightStepsIsExact) {
  const GameConfig cfg = paper_5x5(Movement::Clockwise);
  Rng rng(1);
  const Observation obs = observe_adversaries(cfg, 8, rng);
  const TransitionModel& m = obs.models[0];
  for (std::size_t i = 0; i < 8; ++i) {
    EXPECT_EQ(m.row_total(i), 1);
    EXPECT_EQ(m.prob(i, (i + 1) % 8), 1.0);
  }
  EXPECT_EQ(obs.final_index[0], 0);
}

TEST(Observe, SingleObservation) {
  const GameConfig cfg = paper_5x5(Movement::Counterclockwise);
  Rng rng(1);
  const TransitionModel m = observe_adversaries(cfg, 1, rng).models[0];
  EXPECT_EQ(m.total(), 1);
  EXPECT_EQ(m.prob(0, 7), 1.0);
  for (std::size_t i = 1; i < 8; ++i) {
    EXPECT_EQ(m.row_total(i), 0);
    EXPECT_EQ(m.prob(i, (i + 1) % 8), 0.5);
  }
}

TEST(Observe, RandomAdversaryLargeSample) {
  const GameConfig cfg = paper_5x5(Movement::Random);
  Rng rng(17);
  // 10000 moves per ring cell: 0.02 is then four standard deviations.
  const TransitionModel m = observe_adversaries(cfg, 80000, rng).models[0];
  expect_row_stochastic(m);
  for (std::size_t i = 0; i < 8; ++i) {
    EXPECT_NEAR(m.prob(i, (i + 1) % 8), 0.5, 0.02) << i;
    EXPECT_NEAR(m.prob(i, (i + 7) % 8), 0.5, 0.02) << i;
  }
}

TEST(Observe, TwoAdversariesGetTheirOwnModels) {
  const GameConfig cfg = paper_9x9(Movement::Clockwise);
  Rng rng(1);
  const Observation obs = observe_adversaries(cfg, 3, rng);
  ASSERT_EQ(obs.models.size(), 2u);
  EXPECT_EQ(obs.models[1].cell(0), (Cell{6, 0}));
  EXPECT_EQ(obs.models[1].total(), 3);
  EXPECT_THROW(observe_adversaries(cfg, -1, rng), ModelError);
}

// ---- risk propagation -------------------------------------------------------

TEST(Risk, DeterministicModelIsAMovingPointMass) {
  const GameConfig cfg = paper_5x5(Movement::Clockwise);
  Rng rng(1);
  const Observation obs = observe_adversaries(cfg, 8, rng);
  const auto ring = cfg.ring_of(cfg.adversaries[0]);
  const int t0 = 3;
  const RiskMap risk = propagate_risk(cfg, obs.models, {5}, t0, t0 + 20);
  for (int k = 0; k <= 20; ++k) {
    for (int c = 0; c < cfg.num_cells(); ++c) {
      const double expect = cfg.cell(c) == ring[(5 + k) % 8] ? 1.0 : 0.0;
      ASSERT_EQ(risk.p(c, t0 + k), expect);
    }
  }
  EXPECT_EQ(risk.p(0, t0 - 1), 0.0);
  EXPECT_EQ(risk.p(0, t0 + 21), 0.0);
}

TEST(Risk, UniformModelOneStep) {
  const GameConfig cfg = paper_5x5(Movement::Random);
  const RiskMap risk = propagate_risk(cfg, {TransitionModel(cfg.ring_of(cfg.adversaries[0]))}, {0}, 0, 1);
  EXPECT_EQ(risk.p(cfg.index({1, 2}), 1), 0.5);
  EXPECT_EQ(risk.p(cfg.index({2, 1}), 1), 0.5);
  EXPECT_EQ(risk.p(cfg.index({1, 1}), 1), 0.0);
}

// Per-adversary mass stays a distribution; the combined risk is the capped
// sum. Checked against an independent matrix-power computation.
TEST(Risk, NormalisedAndMatchesMatrixPower) {
  const GameConfig cfg = paper_9x9(Movement::Random);
  Rng rng(5);
  const Observation obs = observe_adversaries(cfg, 40, rng);
  const int t0 = 2;
  const int h = 30;
  const RiskMap risk = propagate_risk(cfg, obs.models, {3, 6}, t0, t0 + h);
  for (std::size_t a = 0; a < 2; ++a) {
    const TransitionModel& m = obs.models[a];
    std::vector<double> v(8, 0.0);
    v[a == 0 ? 3 : 6] = 1.0;
    for (int k = 0; k <= h; ++k) {
      double total = 0.0;
      for (int c = 0; c < cfg.num_cells(); ++c) total += risk.adversary_p(a, c, t0 + k);
      ASSERT_NEAR(total, 1.0, 1e-12);
      for (std::size_t i = 0; i < 8; ++i) {
        ASSERT_NEAR(risk.adversary_p(a, cfg.index(m.cell(i)), t0 + k), v[i], 1e-12);
      }
      std::vector<double> next(8, 0.0);
      for (std::size_t i = 0; i < 8; ++i) {
        for (std::size_t j = 0; j < 8; ++j) next[j] += v[i] * m.prob(i, j);
      }
      v = next;
    }
  }
  for (int t = t0; t <= t0 + h; ++t) {
    for (int c = 0; c < cfg.num_cells(); ++c) {
      const double sum = risk.adversary_p(0, c, t) + risk.adversary_p(1, c, t);
      ASSERT_EQ(risk.p(c, t), std::min(1.0, sum));
      ASSERT_GE(risk.p(c, t), 0.0);
      ASSERT_LE(risk.p(c, t), 1.0);
    }
  }
}

TEST(Risk, Errors) {
  const GameConfig cfg = paper_5x5(Movement::Random);
  const std::vector<TransitionModel> models{TransitionModel(cfg.ring_of(cfg.adversaries[0]))};
  EXPECT_THROW(propagate_risk(cfg, models, {0}, 5, 4), ModelError);
  EXPECT_THROW(propagate_risk(cfg, models, {0, 1}, 0, 4), ModelError);
}

// ---- solver ------------------------------------------------------------------

TEST(Solver, ExactAgainstEnumeration) {
  Rng rng(99);
  for (int i = 0; i < 300; ++i) {
    const auto pc = oracle::random_plan_case(rng);
    const auto r = oracle::compare_with_enumeration(pc);
    ASSERT_TRUE(r.agree) << "instance " << i << " solver " << r.solver << " enumeration " << r.enumeration << " "
                         << r.route_error;
  }
}

// Continuous risks: optima agree to rounding (summation order may differ
// between equal-cost routes).
TEST(Solver, ExactAgainstEnumerationContinuousRisk) {
  Rng rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    auto pc = oracle::random_plan_case(rng);
    pc.phi = 1000.0 * u(rng);
    for (int t = pc.risk.t0(); t <= pc.risk.horizon(); ++t) {
      for (int c = 0; c < pc.cfg.num_cells(); ++c) pc.risk.p_ref(c, t) = u(rng) < 0.4 ? u(rng) : 0.0;
    }
    const auto ref = oracle::enumerate_best_plan(pc.cfg, pc.state, pc.risk, pc.phi, pc.horizon);
    if (!ref) {
      EXPECT_THROW(solve_plan(pc.cfg, pc.state, pc.risk, pc.phi, pc.horizon), Infeasible);
      continue;
    }
    const Plan plan = solve_plan(pc.cfg, pc.state, pc.risk, pc.phi, pc.horizon);
    EXPECT_NEAR(plan.objective, ref->objective, 1e-9 * std::max(1.0, std::abs(ref->objective)));
  }
}

TEST(Solver, PlansSatisfyRouteInvariants) {
  // Paper games at several times and positions with propagated risk.
  for (const GameConfig& base : {paper_5x5(Movement::Random), paper_9x9(Movement::Random)}) {
    Rng rng(11);
    const Observation obs = observe_adversaries(base, 30, rng);
    for (int c = 0; c < base.num_cells(); c += 3) {
      GameState s = new_game(base);
      s.agent = base.cell(c);
      if (s.agent == base.exit) continue;
      s.step_count = c % 7;
      for (std::size_t k = 0; k < base.rewards.size(); ++k) {
        if (base.rewards[k] == s.agent) s.collected |= 1u << k;
      }
      const int h = default_horizon(base, s.step_count);
      const RiskMap risk = propagate_risk(base, obs.models, s.adversary_index, s.step_count, h);
      const Plan plan = solve_plan(base, s, risk, 1000.0, h);
      EXPECT_EQ(check_plan(base, s, plan, h), "") << "cell " << c;
      EXPECT_LE(plan.stats.root_bound, plan.objective + 1e-9 * std::abs(plan.objective));
      EXPECT_GT(plan.stats.nodes, 0);
    }
  }
}

TEST(Solver, CheckPlanCatchesViolations) {
  const GameConfig cfg = paper_5x5(Movement::Clockwise);
  const GameState s = new_game(cfg);
  Plan bad;
  bad.route = {{{0, 0}, 0}, {{0, 1}, 1}, {{0, 0}, 2}};
  EXPECT_NE(check_plan(cfg, s, bad, 20), "");  // revisit and not at exit
  bad.route = {{{0, 0}, 0}, {{1, 1}, 1}};
  EXPECT_NE(check_plan(cfg, s, bad, 20), "");  // diagonal
  Plan skip;  // straight to the exit without the reward
  skip.route.push_back({{0, 0}, 0});
  for (int k = 1; k <= 4; ++k) skip.route.push_back({{0, k}, k});
  for (int k = 1; k <= 4; ++k) skip.route.push_back({{k, 4}, 4 + k});
  EXPECT_NE(check_plan(cfg, s, skip, 20), "");
}

TEST(Solver, ZeroPhiIgnoresRisk) {
  const GameConfig cfg = paper_5x5(Movement::Random);
  const GameState s = new_game(cfg);
  Rng rng(2);
  const Observation obs = observe_adversaries(cfg, 20, rng);
  const int h = default_horizon(cfg, 0);
  const RiskMap risk = propagate_risk(cfg, obs.models, s.adversary_index, 0, h);
  const RiskMap empty(cfg.num_cells(), 0, h, 0);
  const Plan a = solve_plan(cfg, s, risk, 0.0, h);
  const Plan b = solve_plan(cfg, s, empty, 1e5, h);
  EXPECT_EQ(a.objective, b.objective);
  EXPECT_EQ(a.route.size(), 9u);  // 8 moves
}

TEST(Solver, InfeasibleHorizon) {
  const GameConfig cfg = paper_5x5(Movement::Clockwise);
  const GameState s = new_game(cfg);
  const RiskMap empty(cfg.num_cells(), 0, 7, 0);
  EXPECT_THROW(solve_plan(cfg, s, empty, 1.0, 7), Infeasible);
  const RiskMap ok(cfg.num_cells(), 0, 8, 0);
  EXPECT_NO_THROW(solve_plan(cfg, s, ok, 1.0, 8));
  EXPECT_THROW(solve_plan(cfg, s, empty, 1.0, 9), ModelError);  // risk map too short
}

// A hint only seeds the incumbent: good, bad or malformed, the optimum is
// the same.
TEST(Solver, HintDoesNotChangeObjective) {
  Rng rng(404);
  for (int k = 0; k < 60; ++k) {
    const oracle::PlanCase pc = oracle::random_plan_case(rng);
    const auto ref = oracle::enumerate_best_plan(pc.cfg, pc.state, pc.risk, pc.phi, pc.horizon);
    if (!ref) continue;
    const std::vector<Cell> good(ref->route.begin() + 1, ref->route.end());
    const std::vector<Cell> junk{pc.cfg.exit, pc.cfg.start, {9, 9}};
    for (const auto& hint : {good, junk, std::vector<Cell>{}}) {
      const Plan plan = solve_plan(pc.cfg, pc.state, pc.risk, pc.phi, pc.horizon, hint);
      EXPECT_EQ(plan.objective, ref->objective) << "case " << k;
      EXPECT_EQ(check_plan(pc.cfg, pc.state, plan, pc.horizon), "");
    }
  }
}

double route_risk(const Plan& plan, const RiskMap& risk, const GameConfig& cfg) {
  double sum = 0.0;
  for (std::size_t k = 1; k < plan.route.size(); ++k) sum += risk.p(cfg.index(plan.route[k].cell), plan.route[k].t);
  return sum;
}

// Larger phi never picks a route with more accumulated risk.
TEST(Solver, RiskNonIncreasingInPhi) {
  Rng rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    auto pc = oracle::random_plan_case(rng);
    for (int t = pc.risk.t0(); t <= pc.risk.horizon(); ++t) {
      for (int c = 0; c < pc.cfg.num_cells(); ++c) pc.risk.p_ref(c, t) = u(rng) < 0.5 ? u(rng) : 0.0;
    }
    double prev = std::numeric_limits<double>::infinity();
    try {
      for (double phi : {0.0, 0.5, 2.0, 10.0, 50.0, 300.0, 1e4, 1e6}) {
        const double r = route_risk(solve_plan(pc.cfg, pc.state, pc.risk, phi, pc.horizon), pc.risk, pc.cfg);
        ASSERT_LE(r, prev + 1e-9) << "instance " << i << " phi " << phi;
        prev = r;
      }
    } catch (const Infeasible&) {
    }
  }
}

TEST(Solver, PlanDump) {
  const GameConfig cfg = paper_5x5(Movement::Clockwise);
  const RiskMap empty(cfg.num_cells(), 0, 20, 0);
  const Plan plan = solve_plan(cfg, new_game(cfg), empty, 1.0, 20);
  std::ostringstream os;
  write_plan(os, plan);
  std::istringstream is(os.str());
  std::string header;
  std::getline(is, header);
  EXPECT_EQ(header.rfind("# objective", 0), 0u);
  int t, r, c, lines = 0;
  while (is >> t >> r >> c) EXPECT_EQ(t, lines++);
  EXPECT_EQ(lines, 9);
  EXPECT_EQ(plan.first_action() == Action::Right || plan.first_action() == Action::Down, true);
}

// ---- online loop -------------------------------------------------------------

TEST(OnlineLoop, DeterministicAdversariesScoreOptimal) {
  for (Movement m : {Movement::Clockwise, Movement::Counterclockwise}) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      RngStreams rng = RngStreams::from_seed(seed);
      const OnlineResult r = online_loop(paper_5x5(m), OnlineParams{}, rng);
      EXPECT_EQ(r.status, Status::Won);
      EXPECT_EQ(r.score, 294);
      EXPECT_EQ(r.steps, 8);
      EXPECT_EQ(r.trajectory.size(), 9u);
    }
  }
}

TEST(OnlineLoop, DeterministicNineByNine) {
  for (Movement m : {Movement::Clockwise, Movement::Counterclockwise}) {
    RngStreams rng = RngStreams::from_seed(1);
    const OnlineResult r = online_loop(paper_9x9(m), OnlineParams{}, rng);
    EXPECT_EQ(r.status, Status::Won);
    EXPECT_EQ(r.score, 475);
  }
}

TEST(OnlineLoop, Deterministic) {
  RngStreams a = RngStreams::from_seed(5);
  RngStreams b = RngStreams::from_seed(5);
  OnlineParams p;
  p.n_obs = 25;
  const OnlineResult ra = online_loop(paper_5x5(Movement::Random), p, a);
  const OnlineResult rb = online_loop(paper_5x5(Movement::Random), p, b);
  EXPECT_EQ(ra.trajectory, rb.trajectory);
  EXPECT_EQ(ra.score, rb.score);
  EXPECT_EQ(ra.nodes, rb.nodes);
}

// Statistical: more observation buys more safety.
TEST(OnlineLoop, SuccessRateRisesWithObservations) {
  auto wins = [](int n_obs) {
    int w = 0;
    OnlineParams p;
    p.n_obs = n_obs;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
      RngStreams rng = RngStreams::from_seed(seed);
      w += online_loop(paper_5x5(Movement::Random), p, rng).status == Status::Won;
    }
    return w;
  };
  EXPECT_GT(wins(75), wins(10));
}

}  // namespace
}  // namespace uavgrid
