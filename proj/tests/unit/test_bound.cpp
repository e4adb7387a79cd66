#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "surecost/bound.hpp"
#include "surecost/driver.hpp"
#include "surecost/generators.hpp"

namespace surecost {
namespace {

TEST(Bound, ToyAllowValueIsTwo) {
  const Pomdp p = prepare(gen_toy());
  const WinningTable w = analyze_winning(p);
  const ProductChain ch = build_chain(p, w);
  const BoundReport r = hitting_bound(ch);
  EXPECT_NEAR(r.u_allow, 2.0, 1e-12);
  EXPECT_NEAR(initial_hitting_cost(p, w, ch, r), 2.0, 1e-12);
  EXPECT_TRUE(r.dense);
}

TEST(Bound, ChainPairsLieInTheirSupport) {
  const Pomdp p = prepare(gen_robot(RobotVariant::kRandom));
  const WinningTable w = analyze_winning(p);
  const ProductChain ch = build_chain(p, w);
  for (std::size_t i = 0; i < ch.size(); ++i) {
    const auto& pr = ch.pairs[i];
    EXPECT_TRUE(w.wins(pr.support));
    EXPECT_TRUE(w.mdp().support(pr.support).contains(pr.state));
    EXPECT_EQ(ch.find(pr.state, pr.support), i);
    EXPECT_EQ(ch.absorbing[i], p.is_target(pr.state));
    if (ch.absorbing[i]) continue;
    double mass = 0.0;
    for (const auto& [j, q] : ch.kernel[i]) mass += q;
    EXPECT_NEAR(mass, 1.0, 1e-12);
  }
}

// Singleton supports of a fully observable model: hitting costs equal the
// oracle's evaluation of the uniform allowed strategy.
TEST(Bound, MatchesUniformPolicyEvaluation) {
  int checked = 0;
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const Pomdp p = prepare(testing::random_fully_observable(seed, 25));
    const WinningTable w = analyze_winning(p);
    if (!w.initial_wins()) continue;
    const auto oracle = testing::solve_mdp(p);
    const auto expected = testing::uniform_allowed_cost(p, oracle);
    const ProductChain ch = build_chain(p, w);
    const BoundReport r = hitting_bound(ch);
    double worst = 0.0;
    for (std::size_t i = 0; i < ch.size(); ++i) {
      const StateId s = ch.pairs[i].state;
      EXPECT_NEAR(r.hitting[i], expected[s], 1e-7 * std::max(1.0, expected[s]))
          << "seed " << seed;
      worst = std::max(worst, expected[s]);
    }
    EXPECT_NEAR(r.u_allow, worst, 1e-7 * std::max(1.0, worst));
    ++checked;
  }
  EXPECT_GT(checked, 10);
}

TEST(Bound, SparseAndDenseAgree) {
  for (const Pomdp& raw : {gen_cheese(CheeseSize::kLarge), gen_grid(), gen_lower_bound(2)}) {
    const Pomdp p = prepare(raw);
    const WinningTable w = analyze_winning(p);
    const ProductChain ch = build_chain(p, w);
    const BoundReport dense = hitting_bound(ch);
    BoundOptions o;
    o.dense_limit = 0;
    const BoundReport sparse = hitting_bound(ch, o);
    EXPECT_TRUE(dense.dense);
    EXPECT_FALSE(sparse.dense);
    EXPECT_NEAR(dense.u_allow, sparse.u_allow, 1e-9 * dense.u_allow) << p.name();
    for (std::size_t i = 0; i < ch.size(); ++i) {
      EXPECT_NEAR(dense.hitting[i], sparse.hitting[i], 1e-9 * std::max(1.0, dense.u_allow));
    }
  }
}

// F(2) under the uniform allowed strategy: U grows with the loop lengths.
TEST(Bound, LowerBoundFamilyGrows) {
  double prev = 0.0;
  for (std::size_t n = 1; n <= 3; ++n) {
    const Pomdp p = prepare(gen_lower_bound(n));
    const WinningTable w = analyze_winning(p);
    const BoundReport r = hitting_bound(build_chain(p, w));
    EXPECT_GT(r.u_allow, prev);
    prev = r.u_allow;
  }
  EXPECT_GT(prev, std::pow(2.0, 30));
}

TEST(Bound, RejectsChainThatNeverAbsorbs) {
  ProductChain ch;
  ch.pairs = {{0, 0}, {1, 0}};
  ch.kernel = {{{1, 1.0}}, {{0, 1.0}}};
  ch.cost = {1.0, 1.0};
  ch.absorbing = {false, false};
  EXPECT_THROW(hitting_bound(ch), Error);
}

TEST(Bound, TwoStateChainByHand) {
  // h0 = 1 + h1 / 2, h1 = 2 + h0 / 4 -> h0 = 16/7, h1 = 18/7.
  ProductChain ch;
  ch.pairs = {{0, 0}, {1, 0}, {2, 0}};
  ch.kernel = {{{1, 0.5}, {2, 0.5}}, {{0, 0.25}, {2, 0.75}}, {{2, 1.0}}};
  ch.cost = {1.0, 2.0, 0.0};
  ch.absorbing = {false, false, true};
  const BoundReport r = hitting_bound(ch);
  EXPECT_NEAR(r.hitting[0], 16.0 / 7.0, 1e-14);
  EXPECT_NEAR(r.hitting[1], 18.0 / 7.0, 1e-14);
  EXPECT_EQ(r.hitting[2], 0.0);
  EXPECT_NEAR(r.u_allow, 18.0 / 7.0, 1e-14);
}

}  // namespace
}  // namespace surecost
