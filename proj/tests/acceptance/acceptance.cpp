// Acceptance runner: `surecost_acceptance [id...]` prints one PASS/FAIL line
// per criterion and exits non-zero if any selected criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "surecost/driver.hpp"
#include "surecost/generators.hpp"
#include "surecost/ingest.hpp"
#include "surecost/montecarlo.hpp"

namespace surecost {
namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  bool pass = true;
  std::vector<std::string> notes;

  void check(bool ok, const std::string& what) {
    if (!ok) pass = false;
    notes.push_back((ok ? "ok: " : "FAILED: ") + what);
  }
};

std::string num(double v, int precision = 6) {
  std::ostringstream os;
  os.precision(precision);
  os << v;
  return os.str();
}

SolveOptions options(double eps, StopMode mode) {
  SolveOptions o;
  o.epsilon = eps;
  o.mode = mode;
  return o;
}

Verdict toy_model() {
  Verdict v;
  const auto t0 = Clock::now();
  const SolveResult add = approximate(gen_toy(), options(0.1, StopMode::kAdditive));
  const SolveResult mult = approximate(gen_toy(), options(0.1, StopMode::kMultiplicative));
  const double secs = since(t0);
  const auto& r = add.report;
  v.check(r.status == SolveStatus::kConverged && r.final_k == 5,
          "additive final k = " + std::to_string(r.final_k) + " (want 5)");
  v.check(std::fabs(r.lower - 1.9375) <= 1e-9, "T_5 = " + num(r.lower, 12) + " (want 1.9375)");
  v.check(std::fabs(r.u_allow - 2.0) <= 1e-9, "U_allow = " + num(r.u_allow, 12) + " (want 2)");
  v.check(std::fabs(r.upper - 2.0) <= 1e-9, "bound = " + num(r.upper, 12) + " (want 2)");
  v.check(mult.report.final_k == 4,
          "multiplicative final k = " + std::to_string(mult.report.final_k) + " (want 4)");
  v.check(secs < 1.0, "runtime " + num(secs, 3) + " s (< 1 s)");
  return v;
}

Verdict fully_observable_oracle() {
  Verdict v;
  const auto t0 = Clock::now();
  const double eps = 0.1;
  std::size_t feasible = 0;
  std::size_t infeasible_agree = 0;
  std::size_t contained = 0;
  std::size_t narrow = 0;
  std::uint64_t seed = 1000;
  while (feasible < 25) {
    const Pomdp raw = testing::random_fully_observable(seed++, 30);
    const Pomdp p = prepare(raw);
    const double value = testing::initial_value(p, testing::solve_mdp(p));
    const SolveResult r = approximate(raw, options(eps, StopMode::kAdditive));
    if (r.report.status == SolveStatus::kInfeasible) {
      infeasible_agree += std::isinf(value) ? 1 : 0;
      if (!std::isinf(value)) v.check(false, "seed " + std::to_string(seed - 1) + " oracle feasible");
      continue;
    }
    ++feasible;
    const double tol = 1e-9 * std::max(1.0, value);
    const bool in = r.report.lower <= value + tol && value <= r.report.upper + tol;
    contained += in;
    if (!in) {
      v.check(false, "seed " + std::to_string(seed - 1) + ": value " + num(value) +
                         " outside [" + num(r.report.lower) + ", " + num(r.report.upper) + "]");
    }
    const bool w = r.report.upper - r.report.lower <= eps + 1e-12;
    narrow += w;
    if (!w) v.check(false, "seed " + std::to_string(seed - 1) + " interval wider than epsilon");
  }
  const double secs = since(t0);
  v.check(contained == feasible, std::to_string(contained) + "/" + std::to_string(feasible) +
                                     " intervals contain the oracle value");
  v.check(narrow == feasible, std::to_string(narrow) + "/" + std::to_string(feasible) +
                                  " intervals within epsilon");
  v.notes.push_back("infeasible models agreeing with the oracle: " + std::to_string(infeasible_agree));
  v.check(secs < 30.0, "runtime " + num(secs, 3) + " s (< 30 s)");
  return v;
}

Verdict benchmark_table() {
  struct Row {
    std::string name;
    Pomdp model;
    double expected;
    std::size_t iterations;
  };
  const auto unit = CostVariant::kUnit;
  const auto weighted = CostVariant::kWeighted;
  const std::vector<Row> rows = {
      {"cheese small {1}", gen_cheese(CheeseSize::kSmall, unit), 4.6, 7},
      {"cheese small {1,2}", gen_cheese(CheeseSize::kSmall, weighted), 7.2, 8},
      {"cheese large {1}", gen_cheese(CheeseSize::kLarge, unit), 6.4, 9},
      {"cheese large {1,2}", gen_cheese(CheeseSize::kLarge, weighted), 10.8, 12},
      {"grid {1}", gen_grid(unit), 3.18, 6},
      {"grid {1,2}", gen_grid(weighted), 5.37, 10},
      {"robot det {1}", gen_robot(RobotVariant::kDeterministic, unit), 7.0, 9},
      {"robot det {1,2}", gen_robot(RobotVariant::kDeterministic, weighted), 10.0, 8},
      {"robot ran {1}", gen_robot(RobotVariant::kRandom, unit), 7.25, 10},
      {"robot ran {1,2}", gen_robot(RobotVariant::kRandom, weighted), 10.35, 10},
  };
  Verdict v;
  for (const auto& row : rows) {
    SolveOptions o = options(0.1, StopMode::kMultiplicative);
    o.time_limit_seconds = 120.0;
    const auto t0 = Clock::now();
    SolveResult r;
    try {
      r = approximate(row.model, o);
    } catch (const std::exception& e) {
      v.check(false, row.name + ": " + e.what());
      continue;
    }
    const double secs = since(t0);
    const auto& rep = r.report;
    const double t_k = rep.lower;
    const bool converged = rep.status == SolveStatus::kConverged;
    const bool value_ok = std::fabs(t_k - row.expected) <= 0.15;
    const bool iter_ok = converged && rep.final_k <= 2 * row.iterations &&
                         2 * rep.final_k >= row.iterations;
    v.check(converged, row.name + ": status " + to_string(rep.status) + " (" + rep.stop_reason + ")");
    v.check(value_ok, row.name + ": T_k " + num(t_k, 5) + " vs " + num(row.expected, 4) + " +-0.15");
    v.check(iter_ok, row.name + ": k " + std::to_string(rep.final_k) + " vs " +
                         std::to_string(row.iterations) + " within 2x");
    v.check(secs < 120.0, row.name + ": " + num(secs, 3) + " s (< 120 s)");
  }
  return v;
}

Pfa half_pfa() {
  Pfa pfa;
  pfa.states = {"q0", "yes", "no"};
  pfa.alphabet = {"a"};
  pfa.delta.assign(3, std::vector<Distribution>(1));
  pfa.delta[0][0] = Distribution::from_entries({{1, 0.5}, {2, 0.5}});
  pfa.delta[1][0] = Distribution::point(1);
  pfa.delta[2][0] = Distribution::point(2);
  pfa.final = {false, true, false};
  return pfa;
}

Verdict reduction_words() {
  Verdict v;
  const std::vector<std::string> word = {"a"};
  const Pomdp one = gen_reduction(example_pfa());
  const Pomdp half = gen_reduction(half_pfa());
  double worst_one = 0.0;
  double worst_half = 0.0;
  for (std::size_t k = 0; k <= 10; ++k) {
    const auto w = reduction_strategy_word(word, k);
    worst_one = std::max(worst_one, std::fabs(eval_word(one, w) - (1.0 - static_cast<double>(k))));
    worst_half = std::max(worst_half, std::fabs(eval_word(half, w) - 1.0));
  }
  v.check(one.num_states() == 10, "gadget for the example automaton has " +
                                      std::to_string(one.num_states()) + " states");
  v.check(worst_one <= 1e-9, "nu = 1: max |eval - (1 - k)| = " + num(worst_one));
  v.check(worst_half <= 1e-9, "nu = 1/2: max |eval - 1| = " + num(worst_half));
  return v;
}

Verdict lower_bound_family() {
  Verdict v;
  const auto t0 = Clock::now();
  const SolveResult r = approximate(gen_lower_bound(2));
  const double solved = 0.5 * (r.report.lower + r.report.upper);
  v.check(r.report.status == SolveStatus::kConverged,
          "F(2) exact: " + to_string(r.report.status) + ", k = " + std::to_string(r.report.final_k) +
              ", interval [" + num(r.report.lower) + ", " + num(r.report.upper) + "] in " +
              num(since(t0), 3) + " s");
  const testing::MeanEstimate oracle = testing::restart_chain_f2(1'000'000, 42);
  v.check(std::fabs(solved - oracle.mean) <= 3.0 * oracle.standard_error,
          "restart-chain oracle " + num(oracle.mean) + " (SE " + num(oracle.standard_error) +
              ") within 3 SE of solver " + num(solved));
  v.check(solved > 256.0, "F(2) value " + num(solved) + " exceeds 256");

  const Pomdp f3 = prepare(gen_lower_bound(3));
  const WinningTable w = analyze_winning(f3);
  v.check(w.initial_wins(), std::string("F(3) check: ") + (w.initial_wins() ? "feasible" : "infeasible"));
  if (w.initial_wins()) {
    const double u = hitting_bound(build_chain(f3, w)).u_allow;
    v.check(u > std::ldexp(1.0, 30), "F(3) U_allow = " + num(u, 12) + " > 2^30");
  }
  return v;
}

void winning_invariants(const Pomdp& p, const std::string& name, Verdict& v, std::size_t& bad) {
  const WinningTable w = analyze_winning(p);
  const SupportMdp& m = w.mdp();
  for (NodeId n = 0; n < m.num_nodes(); ++n) {
    if (!w.wins(n) || m.is_target(n)) continue;
    if (w.allow(n).empty()) {
      ++bad;
      v.check(false, name + ": empty Allow on a winning support");
    }
    for (ActionId a : w.allow(n)) {
      for (const auto& e : m.edges(n, a)) {
        if (!w.wins(e.node)) {
          ++bad;
          v.check(false, name + ": allowed action leaves the winning set");
        }
      }
    }
  }
}

Verdict invariants() {
  Verdict v;
  std::vector<std::pair<std::string, Pomdp>> models = {
      {"toy", gen_toy()}, {"toy-risky", gen_toy_risky()}, {"F(1)", gen_lower_bound(1)},
      {"F(2)", gen_lower_bound(2)}, {"rocksample(3,2)", gen_rocksample(3, 2)}};
  for (auto c : {CostVariant::kUnit, CostVariant::kWeighted}) {
    const std::string tag = c == CostVariant::kUnit ? " unit" : " weighted";
    models.emplace_back("grid" + tag, gen_grid(c));
    models.emplace_back("cheese small" + tag, gen_cheese(CheeseSize::kSmall, c));
    models.emplace_back("cheese large" + tag, gen_cheese(CheeseSize::kLarge, c));
    models.emplace_back("robot det" + tag, gen_robot(RobotVariant::kDeterministic, c));
    models.emplace_back("robot ran" + tag, gen_robot(RobotVariant::kRandom, c));
  }
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    models.emplace_back("random " + std::to_string(seed), testing::random_pomdp(seed));
  }

  std::size_t closure_bad = 0;
  std::size_t coherence_bad = 0;
  std::size_t monotone_bad = 0;
  std::size_t alpha_bad = 0;
  std::size_t sim_bad = 0;
  std::size_t reach_bad = 0;
  std::size_t repro_bad = 0;
  std::size_t feasible = 0;
  std::mt19937_64 g(7);

  CassandraOptions co;
  co.targets = {"goal"};
  const Pomdp hallway =
      prepare(load_model(std::string(SURECOST_FIXTURE_DIR) + "/hallway.pomdp", co));
  winning_invariants(hallway, "hallway", v, closure_bad);

  for (const auto& [name, raw] : models) {
    const Pomdp p = prepare(raw);
    winning_invariants(p, name, v, closure_bad);

    for (int play = 0; play < 3; ++play) {
      BeliefPoint b(p.initial());
      for (int step = 0; step < 10; ++step) {
        const auto a = static_cast<ActionId>(g() % p.num_actions());
        const auto points = branch(p, b, a);
        const auto supports = support_branches(p, b.support(), a);
        bool same = points.size() == supports.size();
        for (std::size_t i = 0; same && i < points.size(); ++i) {
          same = points[i].belief.support() == supports[i].support &&
                 points[i].observation == supports[i].observation;
        }
        if (!same) {
          ++coherence_bad;
          v.check(false, name + ": support update disagrees with the Bayes update");
          break;
        }
        b = points[g() % points.size()].belief;
      }
    }

    const WinningTable w = analyze_winning(p);
    if (!w.initial_wins()) continue;
    ++feasible;
    const double u = hitting_bound(build_chain(p, w)).u_allow;
    ExactHorizonSolver solver(p, w);
    const std::size_t kmax = p.num_states() > 20 ? 4 : 8;
    double prev = 0.0;
    for (std::size_t k = 1; k <= kmax; ++k) {
      const HorizonResult r = solver.solve(k);
      if (r.t_k < prev - 1e-12) {
        ++monotone_bad;
        v.check(false, name + ": T_k decreased at k = " + std::to_string(k));
      }
      if (static_cast<double>(k) * r.alpha_k > r.t_k + 1e-9) {
        ++alpha_bad;
        v.check(false, name + ": alpha_k > T_k / k at k = " + std::to_string(k));
      }
      prev = r.t_k;
      if (k != kmax) continue;
      const CompositePolicy cp(r.policy, fallback_table(w));
      const SimStats st = simulate(p, cp, 300, 11, default_step_cap(u));
      const SimStats again = simulate(p, cp, 300, 11, default_step_cap(u));
      if (st.mean > r.t_k + r.alpha_k * u + 3.0 * st.half_width + 1e-9) {
        ++sim_bad;
        v.check(false, name + ": simulated mean " + num(st.mean) + " above bound_k + 3 CI");
      }
      if (st.reach_fraction != 1.0) {
        ++reach_bad;
        v.check(false, name + ": reach fraction " + num(st.reach_fraction));
      }
      if (st.mean != again.mean || st.stddev != again.stddev) {
        ++repro_bad;
        v.check(false, name + ": simulation not reproducible");
      }
    }
  }
  v.check(closure_bad == 0, "Allow non-empty and closed on " + std::to_string(models.size() + 1) + " models");
  v.check(coherence_bad == 0, "support/point coherence along random plays");
  v.check(monotone_bad == 0, "T_k monotone on " + std::to_string(feasible) + " feasible models");
  v.check(alpha_bad == 0, "alpha_k <= T_k / k");
  v.check(sim_bad == 0, "simulated mean <= bound_k + 3 CI");
  v.check(reach_bad == 0, "reach fraction 1.0");
  v.check(repro_bad == 0, "bit-reproducible simulation");

  const SolveResult a = approximate(gen_cheese(CheeseSize::kLarge));
  const SolveResult b = approximate(gen_cheese(CheeseSize::kLarge));
  v.check(export_policy(*a.policy, *a.model) == export_policy(*b.policy, *b.model) &&
              a.report.lower == b.report.lower,
          "solver output reproducible");
  return v;
}

struct SmokeCase {
  std::string name;
  Pomdp model;
  double reference;
  double tolerance;
  std::size_t horizon;
};

// Optimal cost with full observation, a lower bound for the POMDP.
double mdp_value(const Pomdp& p) {
  std::vector<std::vector<double>> rows;
  extend_mdp_bound(p, rows, 100'000);
  double v = 0.0;
  for (const auto& [s, w] : p.initial().entries()) v += w * rows.back()[s];
  return v;
}

void smoke(const SmokeCase& c, Verdict& v) {
  const auto t0 = Clock::now();
  const Pomdp p = prepare(c.model);
  const WinningTable w = analyze_winning(p);
  if (!w.initial_wins()) {
    v.check(false, c.name + ": infeasible");
    return;
  }
  const double u = hitting_bound(build_chain(p, w)).u_allow;
  RtdpOptions o;
  o.trials = 20'000;
  o.rollouts = 2'000;
  o.seed = 1;
  const HorizonResult r = rtdp_backend(p, w, c.horizon, o);
  const CompositePolicy cp(r.policy, fallback_table(w));
  const SimStats st = simulate(p, cp, 5'000, 99, default_step_cap(u));
  const double lower = mdp_value(p);
  const double rel = std::fabs(st.mean - c.reference) / c.reference;
  v.check(rel <= c.tolerance, c.name + ": simulated mean " + num(st.mean) + " +- " +
                                  num(st.half_width, 3) + " vs " + num(c.reference) + " (+-" +
                                  num(100 * c.tolerance, 3) + "%), full-observation optimum " +
                                  num(lower) + ", T_k " + num(r.t_k) +
                                  ", alpha_k " + num(r.alpha_k, 3) + ", " + num(since(t0), 3) + " s");
}

Verdict large_benchmark_smoke() {
  Verdict v;
  CassandraOptions co;
  co.targets = {"goal"};
  smoke({"RockSample[4,4]", gen_rocksample(4, 4), 542.49, 0.15, 300}, v);
  smoke({"Hallway", load_model(std::string(SURECOST_FIXTURE_DIR) + "/hallway.pomdp", co), 6.09,
         0.20, 40},
        v);
  v.notes.push_back("soft criterion: stochastic, discretized backend, no soundness claim");
  return v;
}

struct Criterion {
  int id;
  const char* label;
  std::function<Verdict()> run;
};

}  // namespace
}  // namespace surecost

int main(int argc, char** argv) {
  using namespace surecost;
  const std::vector<Criterion> all = {
      {1, "toy model", toy_model},
      {2, "fully observable oracle suite", fully_observable_oracle},
      {3, "benchmark table", benchmark_table},
      {4, "reduction words", reduction_words},
      {5, "lower-bound family", lower_bound_family},
      {6, "invariant suite", invariants},
      {7, "large-benchmark smoke", large_benchmark_smoke},
  };
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
  if (ids.empty()) {
    for (const auto& c : all) ids.push_back(c.id);
  }

  bool all_pass = true;
  for (int id : ids) {
    if (id < 1 || id > static_cast<int>(all.size())) {
      std::fprintf(stderr, "unknown criterion %d\n", id);
      return 2;
    }
    const Criterion& c = all[static_cast<std::size_t>(id - 1)];
    Verdict v;
    const auto t0 = Clock::now();
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v.check(false, std::string("exception: ") + e.what());
    }
    for (const auto& n : v.notes) std::printf("  [%d] %s\n", id, n.c_str());
    std::printf("criterion %d (%s): %s [%.2f s]\n", id, c.label, v.pass ? "PASS" : "FAIL",
                since(t0));
    std::fflush(stdout);
    all_pass = all_pass && v.pass;
  }
  return all_pass ? 0 : 1;
}
