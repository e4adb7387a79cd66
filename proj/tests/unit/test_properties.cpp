#include <gtest/gtest.h>

#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "surecost/driver.hpp"
#include "surecost/generators.hpp"
#include "surecost/ingest.hpp"
#include "surecost/montecarlo.hpp"

namespace surecost {
namespace {

std::vector<Pomdp> corpus() {
  std::vector<Pomdp> out = {gen_toy(), gen_toy_risky(), gen_lower_bound(1), gen_lower_bound(2),
                            gen_rocksample(3, 2)};
  for (auto c : {CostVariant::kUnit, CostVariant::kWeighted}) {
    out.push_back(gen_grid(c));
    out.push_back(gen_cheese(CheeseSize::kSmall, c));
    out.push_back(gen_cheese(CheeseSize::kLarge, c));
    out.push_back(gen_robot(RobotVariant::kDeterministic, c));
    out.push_back(gen_robot(RobotVariant::kRandom, c));
  }
  for (std::uint64_t seed = 0; seed < 200; ++seed) out.push_back(testing::random_pomdp(seed));
  return out;
}

const std::vector<Pomdp>& prepared_corpus() {
  static const std::vector<Pomdp> models = [] {
    std::vector<Pomdp> out;
    for (const auto& p : corpus()) out.push_back(prepare(p));
    return out;
  }();
  return models;
}

void check_winning_invariants(const Pomdp& p, const std::string& label) {
  const WinningTable w = analyze_winning(p);
  const SupportMdp& m = w.mdp();
  for (NodeId n = 0; n < m.num_nodes(); ++n) {
    if (!w.wins(n)) {
      EXPECT_TRUE(w.allow(n).empty()) << label;
      continue;
    }
    bool all_target = true;
    for (StateId s : m.support(n).states()) all_target = all_target && p.is_target(s);
    if (all_target) continue;
    EXPECT_FALSE(w.allow(n).empty()) << label;
    for (ActionId a : w.allow(n)) {
      for (const auto& e : m.edges(n, a)) EXPECT_TRUE(w.wins(e.node)) << label;
    }
  }
}

TEST(Invariants, AllowNonEmptyAndClosed) {
  for (const auto& p : prepared_corpus()) check_winning_invariants(p, p.name());
}

TEST(Invariants, HallwayFixtureWinning) {
  CassandraOptions o;
  o.targets = {"goal"};
  const Pomdp p = prepare(load_model(std::string(SURECOST_FIXTURE_DIR) + "/hallway.pomdp", o));
  check_winning_invariants(p, "hallway");
  EXPECT_TRUE(analyze_winning(p).initial_wins());
}

TEST(Invariants, SupportTracksPointAlongPlays) {
  std::mt19937_64 g(2024);
  for (const auto& p : prepared_corpus()) {
    for (int play = 0; play < 3; ++play) {
      BeliefPoint b(p.initial());
      for (int step = 0; step < 10; ++step) {
        const auto a = static_cast<ActionId>(g() % p.num_actions());
        const auto points = branch(p, b, a);
        const auto supports = support_branches(p, b.support(), a);
        ASSERT_EQ(points.size(), supports.size()) << p.name();
        for (std::size_t i = 0; i < points.size(); ++i) {
          EXPECT_EQ(points[i].belief.support(), supports[i].support) << p.name();
        }
        b = points[g() % points.size()].belief;
      }
    }
  }
}

TEST(Invariants, HorizonValuesAndSimulation) {
  std::size_t feasible = 0;
  for (const auto& p : prepared_corpus()) {
    const WinningTable w = analyze_winning(p);
    if (!w.initial_wins()) continue;
    ++feasible;
    const double u = hitting_bound(build_chain(p, w)).u_allow;
    ExactHorizonSolver solver(p, w);
    double prev = 0.0;
    const std::size_t kmax = p.num_states() > 20 ? 4 : 8;
    for (std::size_t k = 1; k <= kmax; ++k) {
      const HorizonResult r = solver.solve(k);
      EXPECT_GE(r.t_k, prev - 1e-12) << p.name() << " k " << k;
      EXPECT_LE(static_cast<double>(k) * r.alpha_k, r.t_k + 1e-9) << p.name() << " k " << k;
      prev = r.t_k;
      if (k != kmax) continue;

      const CompositePolicy cp(r.policy, fallback_table(w));
      const SimStats st = simulate(p, cp, 300, 5, default_step_cap(u));
      EXPECT_DOUBLE_EQ(st.reach_fraction, 1.0) << p.name();
      EXPECT_LE(st.mean, r.t_k + r.alpha_k * u + 3 * st.half_width + 1e-9) << p.name();
      const SimStats again = simulate(p, cp, 300, 5, default_step_cap(u));
      EXPECT_EQ(st.mean, again.mean) << p.name();
      EXPECT_EQ(st.stddev, again.stddev) << p.name();
    }
  }
  EXPECT_GT(feasible, 50u);
}

TEST(Invariants, SolverIsDeterministic) {
  for (const Pomdp& p : {gen_cheese(CheeseSize::kLarge), gen_robot(RobotVariant::kRandom)}) {
    const SolveResult a = approximate(p);
    const SolveResult b = approximate(p);
    ASSERT_EQ(a.report.iterations.size(), b.report.iterations.size());
    for (std::size_t i = 0; i < a.report.iterations.size(); ++i) {
      EXPECT_EQ(a.report.iterations[i].t_k, b.report.iterations[i].t_k);
      EXPECT_EQ(a.report.iterations[i].alpha_k, b.report.iterations[i].alpha_k);
    }
    EXPECT_EQ(export_policy(*a.policy, *a.model), export_policy(*b.policy, *b.model));
  }
}

}  // namespace
}  // namespace surecost
