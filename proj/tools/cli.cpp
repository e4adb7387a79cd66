#include "cli.hpp"

#if __has_include(<CLI11.hpp>)
#include <CLI11.hpp>
#else
#include <CLI/CLI.hpp>
#endif

#include <cmath>
#include <cstdio>
#include <iostream>
#include <memory>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "surecost/bound.hpp"
#include "surecost/driver.hpp"
#include "surecost/generators.hpp"
#include "surecost/ingest.hpp"
#include "surecost/montecarlo.hpp"
#include "surecost/winning.hpp"

namespace surecost::cli {
namespace {

using json = nlohmann::json;

struct ModelArgs {
  std::string path;
  std::vector<std::string> targets;
};

struct SolveArgs {
  ModelArgs model;
  double epsilon = 0.1;
  std::string mode = "add";
  std::string backend = "exact";
  std::optional<std::size_t> max_horizon;
  bool geometric = false;
  std::optional<double> time_limit;
  std::string policy_out;
  std::string report_out;
  std::uint32_t discretization = 100;
  std::size_t trials = 10000;
  std::size_t rollouts = 0;
  std::uint64_t seed = 1;
  std::size_t max_beliefs = 2'000'000;
  std::size_t max_edges = 5'000'000;
};

struct CheckArgs {
  ModelArgs model;
  bool bound = false;
};

struct SimulateArgs {
  ModelArgs model;
  std::string policy;
  std::size_t trials = 10000;
  std::uint64_t seed = 1;
  std::optional<std::size_t> cap;
  std::string out;
};

struct GenerateArgs {
  std::string family;
  std::size_t n = 2;
  std::size_t k = 4;
  std::string size = "small";
  std::string variant = "det";
  bool weighted = false;
  std::string pfa;
  std::uint64_t seed = 7;
  double d0 = 20.0;
  std::string out;
};

struct InspectArgs {
  ModelArgs model;
  bool winning = false;
  bool bound = false;
};

struct EvalArgs {
  ModelArgs model;
  std::string word;
};

void add_model_flags(CLI::App* sub, ModelArgs& m) {
  sub->add_option("--model", m.path, "Model file (.pomdp or native JSON)")->required();
  sub->add_option("--targets", m.targets, "Target state names")->delimiter(',');
}

Pomdp load(const ModelArgs& m, std::ostream& err) {
  CassandraOptions opts;
  opts.targets = m.targets;
  std::vector<std::string> warnings;
  Pomdp p = load_model(m.path, opts, &warnings);
  for (const auto& w : warnings) err << "warning: " << w << "\n";
  return p;
}

json tool_json() { return {{"name", "surecost"}, {"version", version()}}; }

std::string fmt(double x, int digits = 6) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os.precision(digits);
  os << x;
  return os.str();
}

int exit_for(SolveStatus s) {
  switch (s) {
    case SolveStatus::kConverged:
      return kOk;
    case SolveStatus::kInfeasible:
      return kInfeasible;
    case SolveStatus::kUnconverged:
      return kUnconverged;
  }
  return kError;
}

int do_solve(const SolveArgs& a, std::ostream& out, std::ostream& err) {
  SolveOptions o;
  o.epsilon = a.epsilon;
  o.mode = stop_mode_from_string(a.mode);
  o.backend = backend_from_string(a.backend);
  o.geometric = a.geometric;
  o.max_horizon = a.max_horizon;
  o.time_limit_seconds = a.time_limit;
  o.support.max_edges = a.max_edges;
  o.horizon.max_beliefs = a.max_beliefs;
  o.rtdp.discretization = a.discretization;
  o.rtdp.trials = a.trials;
  o.rtdp.rollouts = a.rollouts;
  o.rtdp.seed = a.seed;

  const Pomdp p = load(a.model, err);
  SolveResult res = approximate(p, o);
  const SolveReport& r = res.report;

  json report = report_to_json(r);
  report["tool"] = tool_json();
  report["config"] = {{"model_path", a.model.path},
                      {"targets", a.model.targets},
                      {"epsilon", a.epsilon},
                      {"mode", to_string(o.mode)},
                      {"backend", to_string(o.backend)},
                      {"geometric", a.geometric},
                      {"max_horizon", a.max_horizon ? json(*a.max_horizon) : json(nullptr)},
                      {"time_limit", a.time_limit ? json(*a.time_limit) : json(nullptr)},
                      {"max_beliefs", a.max_beliefs},
                      {"max_edges", a.max_edges},
                      {"rtdp",
                       {{"discretization", a.discretization},
                        {"trials", a.trials},
                        {"rollouts", a.rollouts},
                        {"seed", a.seed}}}};
  if (!a.report_out.empty()) write_file(a.report_out, report.dump(2) + "\n");
  if (!a.policy_out.empty()) {
    if (!res.policy) {
      err << "no policy to write: " << to_string(r.status) << "\n";
    } else {
      write_file(a.policy_out, export_policy(*res.policy, *res.model).dump(2) + "\n");
    }
  }

  out << "model        " << r.model << "\n";
  out << "status       " << to_string(r.status) << " (" << r.stop_reason << ")\n";
  if (r.status != SolveStatus::kInfeasible) {
    out << "U_allow      " << fmt(r.u_allow, 10) << "\n";
    out << "final k      " << r.final_k << "\n";
    if (!r.iterations.empty()) {
      const auto& last = r.iterations.back();
      out << "T_k          " << fmt(last.t_k, 10) << "\n";
      out << "alpha_k      " << fmt(last.alpha_k, 10) << "\n";
    }
    out << (r.exact() ? "interval     [" : "estimate     [") << fmt(r.lower, 10) << ", "
        << fmt(r.upper, 10) << "]\n";
  }
  out << "seconds      " << fmt(r.seconds, 4) << "\n";
  return exit_for(r.status);
}

int do_check(const CheckArgs& a, std::ostream& out, std::ostream& err) {
  const Pomdp p = prepare(load(a.model, err));
  const WinningTable w = analyze_winning(p);
  const bool ok = w.initial_wins();
  out << (ok ? "feasible" : "infeasible") << "\n";
  out << "supports     " << w.mdp().num_nodes() << "\n";
  out << "winning      " << w.num_winning() << "\n";
  if (ok && a.bound) {
    const ProductChain ch = build_chain(p, w);
    const BoundReport b = hitting_bound(ch);
    out << "U_allow      " << fmt(b.u_allow, 12) << "\n";
    out << "allow_value  " << fmt(initial_hitting_cost(p, w, ch, b), 12) << "\n";
  }
  return ok ? kOk : kInfeasible;
}

int do_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
  const Pomdp p = prepare(load(a.model, err));
  const WinningTable w = analyze_winning(p);
  std::optional<CompositePolicy> policy;
  if (a.policy.empty()) {
    policy = CompositePolicy::fallback_only(w);
  } else {
    policy = import_policy(json::parse(read_file(a.policy)), p);
  }
  std::size_t cap = 0;
  if (a.cap) {
    cap = *a.cap;
  } else {
    if (!w.initial_wins()) throw Error("model is infeasible; pass --cap explicitly");
    cap = default_step_cap(hitting_bound(build_chain(p, w)).u_allow);
  }
  const SimStats s = simulate(p, *policy, a.trials, a.seed, cap);

  char line[128];
  out << "trials      mean          stddev        half_width    reach     truncated\n";
  std::snprintf(line, sizeof line, "%-11zu %-13.6f %-13.6f %-13.6f %-9.6f %-9.6f\n", s.trials,
                s.mean, s.stddev, s.half_width, s.reach_fraction, s.truncated_fraction);
  out << line;
  if (!a.out.empty()) {
    json j = stats_to_json(s);
    j["tool"] = tool_json();
    j["config"] = {{"model_path", a.model.path},
                   {"policy", a.policy.empty() ? json(nullptr) : json(a.policy)},
                   {"trials", a.trials},
                   {"seed", a.seed},
                   {"cap", cap}};
    write_file(a.out, j.dump(2) + "\n");
  }
  return kOk;
}

CostVariant cost_variant(bool weighted) {
  return weighted ? CostVariant::kWeighted : CostVariant::kUnit;
}

int do_generate(const GenerateArgs& a, std::ostream& out) {
  const std::string& f = a.family;
  auto write_text = [&](const std::string& text) {
    if (a.out.empty() || a.out == "-") {
      out << text;
    } else {
      write_file(a.out, text);
    }
  };
  if (f == "pfa-example") {
    write_text(write_pfa(example_pfa()));
    return kOk;
  }
  Pomdp p = [&]() -> Pomdp {
    if (f == "toy") return gen_toy();
    if (f == "toy-risky") return gen_toy_risky();
    if (f == "lower-bound") return gen_lower_bound(a.n);
    if (f == "reduction") {
      return gen_reduction(a.pfa.empty() ? example_pfa() : parse_pfa(read_file(a.pfa)));
    }
    if (f == "grid") return gen_grid(cost_variant(a.weighted));
    if (f == "cheese") {
      CheeseSize size;
      if (a.size == "small") {
        size = CheeseSize::kSmall;
      } else if (a.size == "large") {
        size = CheeseSize::kLarge;
      } else {
        throw Error("unknown cheese size '" + a.size + "' (small, large)");
      }
      return gen_cheese(size, cost_variant(a.weighted));
    }
    if (f == "robot") {
      RobotVariant v;
      if (a.variant == "det") {
        v = RobotVariant::kDeterministic;
      } else if (a.variant == "ran") {
        v = RobotVariant::kRandom;
      } else {
        throw Error("unknown robot variant '" + a.variant + "' (det, ran)");
      }
      return gen_robot(v, cost_variant(a.weighted));
    }
    if (f == "rocksample") {
      RockSampleOptions ro;
      ro.seed = a.seed;
      ro.d0 = a.d0;
      return gen_rocksample(a.n, a.k, ro);
    }
    throw Error("unknown family '" + f + "'");
  }();
  write_text(write_native(p));
  return kOk;
}

int do_inspect(const InspectArgs& a, std::ostream& out, std::ostream& err) {
  const Pomdp p = prepare(load(a.model, err));
  const WinningTable w = analyze_winning(p);
  const SupportMdp& m = w.mdp();
  json doc = {{"tool", tool_json()},
              {"model", p.name()},
              {"states", p.num_states()},
              {"actions", p.num_actions()},
              {"observations", p.num_observations()},
              {"supports", m.num_nodes()},
              {"support_edges", m.num_edges()},
              {"winning_supports", w.num_winning()},
              {"feasible", w.initial_wins()}};
  if (a.winning) {
    json nodes = json::array();
    for (NodeId n = 0; n < m.num_nodes(); ++n) {
      json allowed = json::array();
      for (ActionId act : w.allow(n)) allowed.push_back(p.action_names()[act]);
      json edges = json::object();
      for (ActionId act = 0; act < p.num_actions(); ++act) {
        json succ = json::array();
        for (const auto& e : m.edges(n, act)) {
          succ.push_back(json::array({p.observation_names()[e.observation], e.node}));
        }
        edges[p.action_names()[act]] = std::move(succ);
      }
      nodes.push_back({{"id", n},
                       {"support", describe(p, m.support(n))},
                       {"target", m.is_target(n)},
                       {"winning", w.wins(n)},
                       {"allow", allowed},
                       {"edges", edges}});
    }
    doc["nodes"] = std::move(nodes);
  }
  if (a.bound) {
    if (!w.initial_wins()) {
      doc["bound"] = nullptr;
    } else {
      const ProductChain ch = build_chain(p, w);
      const BoundReport b = hitting_bound(ch);
      doc["bound"] = {{"U_allow", b.u_allow},
                      {"allow_value", initial_hitting_cost(p, w, ch, b)},
                      {"chain_states", ch.size()},
                      {"residual", b.residual},
                      {"solver", b.dense ? "dense" : "sparse"}};
    }
  }
  out << doc.dump(2) << "\n";
  return w.initial_wins() ? kOk : kInfeasible;
}

int do_eval_word(const EvalArgs& a, std::ostream& out, std::ostream& err) {
  const Pomdp p = load(a.model, err);
  std::vector<std::string> word;
  std::istringstream is(a.word);
  for (std::string tok; is >> tok;) word.push_back(tok);
  out.precision(12);
  out << eval_word(p, word) << "\n";
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Expected total cost under almost-sure reachability for POMDPs", "surecost"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1);

  SolveArgs sa;
  auto* solve = app.add_subcommand("solve", "Approximate the optimal cost");
  add_model_flags(solve, sa.model);
  solve->add_option("--epsilon", sa.epsilon, "Stopping tolerance")
      ->check(CLI::PositiveNumber);
  solve->add_option("--mode", sa.mode, "Stopping rule")
      ->check(CLI::IsMember({"add", "additive", "mult", "multiplicative"}));
  solve->add_option("--backend", sa.backend, "Finite-horizon backend")
      ->check(CLI::IsMember({"exact", "rtdp", "discretized"}));
  solve->add_option("--max-horizon", sa.max_horizon, "Largest horizon to try");
  solve->add_flag("--geometric", sa.geometric, "Double the horizon between attempts");
  solve->add_option("--time-limit", sa.time_limit, "Wall-clock budget in seconds")
      ->check(CLI::PositiveNumber);
  solve->add_option("--policy-out", sa.policy_out, "Write the policy here");
  solve->add_option("--report-out", sa.report_out, "Write the JSON report here");
  solve->add_option("--discretization", sa.discretization, "RTDP belief grid resolution")
      ->check(CLI::PositiveNumber);
  solve->add_option("--rtdp-trials", sa.trials, "RTDP trials per horizon");
  solve->add_option("--rollouts", sa.rollouts, "Rollouts estimating alpha_k (rtdp)");
  solve->add_option("--seed", sa.seed, "RTDP seed");
  solve->add_option("--max-beliefs", sa.max_beliefs, "Belief budget (exact)");
  solve->add_option("--max-edges", sa.max_edges, "Support MDP edge budget");

  CheckArgs ca;
  auto* check = app.add_subcommand("check", "Decide almost-sure reachability");
  add_model_flags(check, ca.model);
  check->add_flag("--bound", ca.bound, "Also print U_allow");

  SimulateArgs ma;
  auto* sim = app.add_subcommand("simulate", "Monte Carlo evaluation of a policy");
  add_model_flags(sim, ma.model);
  sim->add_option("--policy", ma.policy, "Policy file; uniform allowed strategy if absent");
  sim->add_option("--trials", ma.trials, "Number of plays")->check(CLI::PositiveNumber);
  sim->add_option("--seed", ma.seed, "Seed of the first play");
  sim->add_option("--cap", ma.cap, "Step cap per play (default 100 U_allow)")
      ->check(CLI::PositiveNumber);
  sim->add_option("--out", ma.out, "Write the statistics as JSON here");

  GenerateArgs ga;
  auto* gen = app.add_subcommand("generate", "Write a built-in model family");
  gen->add_option("family", ga.family, "Model family")
      ->required()
      ->check(CLI::IsMember({"toy", "toy-risky", "lower-bound", "reduction", "pfa-example",
                             "grid", "cheese", "robot", "rocksample"}));
  gen->add_option("--n", ga.n, "lower-bound: loops; rocksample: map size")
      ->check(CLI::PositiveNumber);
  gen->add_option("--k", ga.k, "rocksample: rocks");
  gen->add_option("--size", ga.size, "cheese: small or large");
  gen->add_option("--variant", ga.variant, "robot: det or ran");
  gen->add_flag("--weighted", ga.weighted, "Use the {1,2} cost variant");
  gen->add_option("--pfa", ga.pfa, "reduction: PFA file (default the two-state example)");
  gen->add_option("--seed", ga.seed, "rocksample: rock placement seed");
  gen->add_option("--d0", ga.d0, "rocksample: sensor half-efficiency distance")
      ->check(CLI::PositiveNumber);
  gen->add_option("--out", ga.out, "Output file (stdout if absent)");

  InspectArgs ia;
  auto* inspect = app.add_subcommand("inspect", "Dump the support MDP analysis");
  add_model_flags(inspect, ia.model);
  inspect->add_flag("--winning", ia.winning, "Include every support with its allowed actions");
  inspect->add_flag("--bound", ia.bound, "Include the allowed-strategy cost bound");

  EvalArgs ea;
  auto* eval = app.add_subcommand("eval-word", "Expected cost of an open-loop action word");
  add_model_flags(eval, ea.model);
  eval->add_option("--word", ea.word, "Space-separated action names")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << version() << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kError;
  }

  try {
    if (*solve) return do_solve(sa, out, err);
    if (*check) return do_check(ca, out, err);
    if (*sim) return do_simulate(ma, out, err);
    if (*gen) return do_generate(ga, out);
    if (*inspect) return do_inspect(ia, out, err);
    if (*eval) return do_eval_word(ea, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kError;
  }
  return kError;
}

}  // namespace surecost::cli
