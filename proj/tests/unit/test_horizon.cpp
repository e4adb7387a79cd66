#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "surecost/bound.hpp"
#include "surecost/driver.hpp"
#include "surecost/generators.hpp"
#include "surecost/horizon.hpp"

namespace surecost {
namespace {

// Toy: playing safe k times costs sum_{i<k} 2^-i = 2(1 - 2^-k) and misses
// the target with probability 2^-k.
TEST(ExactHorizon, ToyClosedForm) {
  const Pomdp p = prepare(gen_toy());
  const WinningTable w = analyze_winning(p);
  ExactHorizonSolver solver(p, w);
  for (std::size_t k = 1; k <= 12; ++k) {
    const HorizonResult r = solver.solve(k);
    EXPECT_NEAR(r.t_k, 2.0 * (1.0 - std::ldexp(1.0, -static_cast<int>(k))), 1e-12);
    EXPECT_NEAR(r.alpha_k, std::ldexp(1.0, -static_cast<int>(k)), 1e-12);
    EXPECT_TRUE(r.exact);
    ASSERT_TRUE(r.policy);
    EXPECT_EQ(r.policy->horizon, k);
    EXPECT_EQ(*r.policy->nodes[0].action, *p.find_action("safe"));
  }
}

TEST(ExactHorizon, IncrementalMatchesFresh) {
  const Pomdp p = prepare(gen_robot(RobotVariant::kRandom, CostVariant::kWeighted));
  const WinningTable w = analyze_winning(p);
  ExactHorizonSolver solver(p, w);
  for (std::size_t k : {1, 3, 6, 9}) {
    const HorizonResult a = solver.solve(k);
    const HorizonResult b = exact_vi(p, w, k);
    EXPECT_DOUBLE_EQ(a.t_k, b.t_k);
    EXPECT_DOUBLE_EQ(a.alpha_k, b.alpha_k);
  }
}

// T_k never exceeds the optimum, and T_k + alpha_k U bounds it from above.
TEST(ExactHorizon, BracketsOracleValue) {
  int checked = 0;
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const Pomdp p = prepare(testing::random_fully_observable(seed, 15));
    const WinningTable w = analyze_winning(p);
    if (!w.initial_wins()) continue;
    const double v = testing::initial_value(p, testing::solve_mdp(p));
    const double u = hitting_bound(build_chain(p, w)).u_allow;
    ExactHorizonSolver solver(p, w);
    double prev = 0.0;
    for (std::size_t k = 1; k <= 25; ++k) {
      const HorizonResult r = solver.solve(k);
      EXPECT_LE(r.t_k, v + 1e-9) << "seed " << seed << " k " << k;
      EXPECT_GE(r.t_k + r.alpha_k * u, v - 1e-9) << "seed " << seed << " k " << k;
      EXPECT_GE(r.t_k, prev - 1e-12);
      EXPECT_LE(static_cast<double>(k) * r.alpha_k, r.t_k + 1e-9);
      prev = r.t_k;
    }
    ++checked;
  }
  EXPECT_GT(checked, 5);
}

TEST(ExactHorizon, BeliefBudget) {
  const Pomdp p = prepare(gen_grid());
  const WinningTable w = analyze_winning(p);
  HorizonOptions o;
  o.max_beliefs = 50;
  ExactHorizonSolver solver(p, w, o);
  EXPECT_THROW(solver.solve(8), ResourceError);
}

TEST(ExactHorizon, ZeroHorizonRejected) {
  const Pomdp p = prepare(gen_toy());
  const WinningTable w = analyze_winning(p);
  EXPECT_THROW(exact_vi(p, w, 0), Error);
}

TEST(Discretize, CountsSumToResolution) {
  const auto b = BeliefPoint::from_sorted({{0, 1.0 / 3}, {2, 1.0 / 3}, {5, 1.0 / 3}});
  for (std::uint32_t d : {1u, 3u, 10u, 100u}) {
    std::int64_t total = 0;
    for (const auto& [s, c] : discretize(b, d).entries) {
      EXPECT_GE(c, 0);
      total += c;
    }
    EXPECT_EQ(total, d);
  }
}

// The toy is fully observable, so each row matches the exact closed form.
TEST(MdpBound, ToyClosedForm) {
  const Pomdp p = prepare(gen_toy());
  std::vector<std::vector<double>> rows;
  extend_mdp_bound(p, rows, 6);
  ASSERT_EQ(rows.size(), 7u);
  for (std::size_t k = 0; k <= 6; ++k) {
    EXPECT_NEAR(rows[k][0], 2.0 * (1.0 - std::ldexp(1.0, -static_cast<int>(k))), 1e-12);
  }
}

TEST(MdpBound, MonotoneAndBelowExactValue) {
  for (const Pomdp& m : {gen_robot(RobotVariant::kRandom, CostVariant::kWeighted),
                         gen_cheese(CheeseSize::kLarge), gen_grid(CostVariant::kUnit)}) {
    const Pomdp p = prepare(m);
    const WinningTable w = analyze_winning(p);
    std::vector<std::vector<double>> rows;
    extend_mdp_bound(p, rows, 8);
    for (std::size_t r = 1; r < rows.size(); ++r) {
      for (StateId s = 0; s < p.num_states(); ++s) EXPECT_GE(rows[r][s], rows[r - 1][s]);
    }
    ExactHorizonSolver solver(p, w);
    for (std::size_t k = 1; k <= 8; ++k) {
      const auto& row = rows[std::min(k, rows.size() - 1)];
      double v = 0.0;
      for (const auto& [s, q] : p.initial().entries()) v += q * row[s];
      EXPECT_LE(v, solver.solve(k).t_k + 1e-9) << p.name() << " k " << k;
    }
  }
}

TEST(MdpBound, StopsOnceSettled) {
  const Pomdp p = prepare(gen_rocksample(3, 2));
  std::vector<std::vector<double>> rows;
  extend_mdp_bound(p, rows, 10'000);
  // Three moves of cost 50 reach the exit from anywhere on a 3x3 map.
  EXPECT_LT(rows.size(), 160u);
  EXPECT_EQ(rows[rows.size() - 1], rows[rows.size() - 2]);
  EXPECT_DOUBLE_EQ(*std::max_element(rows.back().begin(), rows.back().end()), 150.0);
}

TEST(Binomial, ClopperPearsonZeroFailures) {
  // P(0 failures | q) = (1 - q)^n = 0.01.
  for (std::size_t n : {1u, 10u, 1000u}) {
    EXPECT_NEAR(binomial_upper_bound(0, n), 1.0 - std::pow(0.01, 1.0 / n), 1e-9);
  }
  EXPECT_DOUBLE_EQ(binomial_upper_bound(5, 5), 1.0);
  EXPECT_GT(binomial_upper_bound(10, 100), 0.1);
  EXPECT_LT(binomial_upper_bound(10, 100), 0.2);
}

TEST(Rtdp, ToyEstimateNearClosedForm) {
  const Pomdp p = prepare(gen_toy());
  const WinningTable w = analyze_winning(p);
  RtdpOptions o;
  o.trials = 2000;
  o.seed = 5;
  RtdpSolver solver(p, w, o);
  const HorizonResult r = solver.solve(5);
  EXPECT_FALSE(r.exact);
  EXPECT_NEAR(r.t_k, 1.9375, 3 * r.t_k_half_width + 1e-9);
  EXPECT_GE(r.alpha_k, 0.03125 - 0.02);
  ASSERT_TRUE(r.policy && r.policy->table);
  double value = 0.0;
  const auto a = greedy_action(p, *r.policy->table, BeliefPoint(p.initial()), 5,
                               w.allow(w.mdp().initial()), &value);
  ASSERT_TRUE(a);
  EXPECT_EQ(*a, *p.find_action("safe"));
}

TEST(Rtdp, Reproducible) {
  const Pomdp p = prepare(gen_cheese());
  const WinningTable w = analyze_winning(p);
  RtdpOptions o;
  o.trials = 300;
  o.seed = 17;
  const HorizonResult a = rtdp_backend(p, w, 6, o);
  const HorizonResult b = rtdp_backend(p, w, 6, o);
  EXPECT_EQ(a.t_k, b.t_k);
  EXPECT_EQ(a.alpha_k, b.alpha_k);
  EXPECT_EQ(a.policy->table->values.size(), b.policy->table->values.size());
}

TEST(Rtdp, RejectsZeroDiscretization) {
  const Pomdp p = prepare(gen_toy());
  const WinningTable w = analyze_winning(p);
  RtdpOptions o;
  o.discretization = 0;
  EXPECT_THROW(RtdpSolver(p, w, o), Error);
}

}  // namespace
}  // namespace surecost
