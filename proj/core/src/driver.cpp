#include "surecost/driver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace surecost {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json support_names(const Pomdp& p, const BeliefSupport& u) {
  json out = json::array();
  for (StateId s : u.states()) out.push_back(p.state_names()[s]);
  return out;
}

json key_json(const Pomdp& p, const BeliefKey& k) {
  json out = json::array();
  for (const auto& [s, q] : k.entries) out.push_back(json::array({p.state_names()[s], q}));
  return out;
}

BeliefSupport key_support(const BeliefKey& k) {
  std::vector<StateId> states;
  for (const auto& e : k.entries) states.push_back(e.first);
  return BeliefSupport(std::move(states));
}

StateId state_of(const Pomdp& p, const json& name) {
  auto s = p.find_state(name.get<std::string>());
  if (!s) throw Error("policy document: unknown state " + name.dump());
  return *s;
}

ActionId action_of(const Pomdp& p, const json& name) {
  auto a = p.find_action(name.get<std::string>());
  if (!a) throw Error("policy document: unknown action " + name.dump());
  return *a;
}

ObsId observation_of(const Pomdp& p, const json& name) {
  auto z = p.find_observation(name.get<std::string>());
  if (!z) throw Error("policy document: unknown observation " + name.dump());
  return *z;
}

BeliefKey key_from_json(const Pomdp& p, const json& j) {
  BeliefKey k;
  for (const auto& e : j) k.entries.emplace_back(state_of(p, e.at(0)), e.at(1).get<std::int64_t>());
  std::sort(k.entries.begin(), k.entries.end());
  return k;
}

}  // namespace

std::string version() { return SURECOST_VERSION; }

FallbackTable fallback_table(const WinningTable& w) {
  FallbackTable t;
  const SupportMdp& m = w.mdp();
  for (NodeId n = 0; n < m.num_nodes(); ++n) {
    if (!w.wins(n)) continue;
    auto allow = w.allow(n);
    t.emplace(m.support(n), std::vector<ActionId>(allow.begin(), allow.end()));
  }
  return t;
}

CompositePolicy::CompositePolicy(std::shared_ptr<const FiniteHorizonPolicy> finite,
                                 FallbackTable fallback)
    : finite_(std::move(finite)), fallback_(std::move(fallback)) {}

CompositePolicy CompositePolicy::fallback_only(const WinningTable& w) {
  return CompositePolicy(nullptr, fallback_table(w));
}

PolicyRun::PolicyRun(const CompositePolicy& policy, const Pomdp& p)
    : policy_(policy), p_(p), belief_(p.initial()), support_(belief_.support()) {
  const auto* f = policy_.finite();
  node_ = (f && f->exact() && !f->nodes.empty()) ? 0 : -1;
}

bool PolicyRun::in_finite_part() const {
  const auto* f = policy_.finite();
  if (!f) return false;
  if (f->exact()) return node_ >= 0 && f->nodes[static_cast<std::size_t>(node_)].action.has_value();
  return steps_ < f->horizon;
}

ActionId PolicyRun::act(Rng& rng) {
  const auto* f = policy_.finite();
  if (f && f->exact() && node_ >= 0) {
    const auto& node = f->nodes[static_cast<std::size_t>(node_)];
    if (node.action) return *node.action;
  }
  auto it = policy_.fallback().find(support_);
  if (it == policy_.fallback().end() || it->second.empty()) {
    throw ContractError("policy undefined at support " + describe(p_, support_));
  }
  if (f && !f->exact() && steps_ < f->horizon) {
    auto a = greedy_action(p_, *f->table, belief_,
                           static_cast<std::uint32_t>(f->horizon - steps_), it->second);
    return *a;
  }
  return it->second[rng.pick(it->second.size())];
}

void PolicyRun::observe(ActionId a, ObsId z) {
  const auto* f = policy_.finite();
  if (f && f->exact() && node_ >= 0) {
    const auto& node = f->nodes[static_cast<std::size_t>(node_)];
    std::int64_t next = -1;
    if (node.action && *node.action == a) {
      for (const auto& [obs, child] : node.children) {
        if (obs == z) next = child;
      }
    }
    node_ = next;
  }
  if (f && !f->exact() && steps_ + 1 < f->horizon) belief_ = update_point(p_, belief_, a, z);
  auto next = update_support(p_, support_, a, z);
  if (!next) {
    throw ContractError("observation " + p_.observation_names()[z] +
                        " is impossible at support " + describe(p_, support_));
  }
  support_ = std::move(*next);
  ++steps_;
}

Pomdp prepare(const Pomdp& p) {
  require_valid(p);
  Pomdp q = p.has_observation_kernel() ? determinize_observations(p) : p;
  q = observe_targets(q);
  require_valid(q);
  return q;
}

std::string to_string(StopMode m) {
  return m == StopMode::kAdditive ? "additive" : "multiplicative";
}

std::string to_string(Backend b) { return b == Backend::kExact ? "exact" : "discretized"; }

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kConverged:
      return "converged";
    case SolveStatus::kInfeasible:
      return "infeasible";
    case SolveStatus::kUnconverged:
      return "unconverged";
  }
  return "unknown";
}

StopMode stop_mode_from_string(const std::string& s) {
  if (s == "add" || s == "additive") return StopMode::kAdditive;
  if (s == "mult" || s == "multiplicative") return StopMode::kMultiplicative;
  throw Error("unknown stopping mode '" + s + "'");
}

Backend backend_from_string(const std::string& s) {
  if (s == "exact") return Backend::kExact;
  if (s == "rtdp" || s == "discretized") return Backend::kDiscretized;
  throw Error("unknown backend '" + s + "'");
}

SolveResult approximate(const Pomdp& p, const SolveOptions& options) {
  const auto start = Clock::now();
  if (p.cost_mode() == CostMode::kGeneralInteger) {
    throw ModelError(
        "approximating the optimal cost is undecidable for general integer costs; "
        "only positive-cost models are accepted");
  }
  if (!(options.epsilon > 0.0)) throw Error("epsilon must be positive");

  SolveResult result;
  SolveReport& r = result.report;
  r.model = p.name();
  r.mode = options.mode;
  r.epsilon = options.epsilon;
  r.backend = options.backend;

  result.model = std::make_shared<const Pomdp>(prepare(p));
  const Pomdp& model = *result.model;
  auto mdp = std::make_shared<const SupportMdp>(build_support_mdp(model, options.support));
  WinningTable w = almost_sure_winning(model, mdp);
  r.supports = mdp->num_nodes();
  r.winning_supports = w.num_winning();

  if (!w.initial_wins()) {
    r.status = SolveStatus::kInfeasible;
    r.stop_reason = "initial support is not almost-sure winning";
    r.lower = r.upper = std::numeric_limits<double>::infinity();
    r.seconds = seconds_since(start);
    return result;
  }

  ProductChain chain = build_chain(model, w);
  BoundReport bound = hitting_bound(chain, options.bound);
  r.chain_states = chain.size();
  r.residual = bound.residual;
  r.u_allow = bound.u_allow;
  r.allow_value = initial_hitting_cost(model, w, chain, bound);

  const double cap_real = std::ceil(r.u_allow * r.u_allow / options.epsilon);
  r.horizon_cap = cap_real >= 1e15 ? static_cast<std::size_t>(1e15)
                                   : std::max<std::size_t>(1, static_cast<std::size_t>(cap_real));

  std::unique_ptr<ExactHorizonSolver> exact;
  std::unique_ptr<RtdpSolver> rtdp;
  if (options.backend == Backend::kExact) {
    exact = std::make_unique<ExactHorizonSolver>(model, w, options.horizon);
  } else {
    rtdp = std::make_unique<RtdpSolver>(model, w, options.rtdp);
  }

  HorizonResult last;
  std::size_t k = 1;
  while (true) {
    const auto t0 = Clock::now();
    try {
      last = exact ? exact->solve(k) : rtdp->solve(k);
    } catch (const ResourceError& e) {
      if (r.iterations.empty()) throw;
      r.status = SolveStatus::kUnconverged;
      r.stop_reason = std::string("resource limit: ") + e.what();
      break;
    }
    IterationRecord rec;
    rec.k = k;
    rec.t_k = last.t_k;
    rec.alpha_k = last.alpha_k;
    rec.bound_k = last.t_k + last.alpha_k * r.u_allow;
    rec.seconds = seconds_since(t0);
    r.iterations.push_back(rec);

    const double gap = last.alpha_k * r.u_allow;
    const bool stop = options.mode == StopMode::kAdditive ? gap <= options.epsilon
                                                          : gap <= options.epsilon * last.t_k;
    if (stop) {
      r.status = SolveStatus::kConverged;
      r.stop_reason = "criterion";
      break;
    }
    if (k >= r.horizon_cap) {
      r.status = exact ? SolveStatus::kConverged : SolveStatus::kUnconverged;
      r.stop_reason = "horizon cap";
      break;
    }
    if (options.max_horizon && k >= *options.max_horizon) {
      r.status = SolveStatus::kUnconverged;
      r.stop_reason = "horizon limit";
      break;
    }
    if (options.time_limit_seconds && seconds_since(start) > *options.time_limit_seconds) {
      r.status = SolveStatus::kUnconverged;
      r.stop_reason = "time limit";
      break;
    }
    std::size_t next = options.geometric ? 2 * k : k + 1;
    next = std::min(next, r.horizon_cap);
    if (options.max_horizon) next = std::min(next, *options.max_horizon);
    k = next;
  }

  r.final_k = last.k;
  r.lower = last.t_k;
  r.upper = last.t_k + last.alpha_k * r.u_allow;
  result.policy.emplace(last.policy, fallback_table(w));
  r.seconds = seconds_since(start);
  return result;
}

json report_to_json(const SolveReport& r) {
  json iters = json::array();
  for (const auto& it : r.iterations) {
    iters.push_back({{"k", it.k},
                     {"T_k", it.t_k},
                     {"alpha_k", it.alpha_k},
                     {"bound_k", it.bound_k},
                     {"seconds", it.seconds}});
  }
  json j = {{"model", r.model},
            {"status", to_string(r.status)},
            {"stop_reason", r.stop_reason},
            {"mode", to_string(r.mode)},
            {"epsilon", r.epsilon},
            {"backend", to_string(r.backend)},
            {"U_allow", r.u_allow},
            {"allow_value", r.allow_value},
            {"supports", r.supports},
            {"winning_supports", r.winning_supports},
            {"chain_states", r.chain_states},
            {"residual", r.residual},
            {"horizon_cap", r.horizon_cap},
            {"iterations", iters},
            {"final_k", r.final_k},
            {"seconds", r.seconds}};
  json interval = {{"lower", number_or_null(r.lower)}, {"upper", number_or_null(r.upper)}};
  if (r.exact()) {
    j["certified_interval"] = interval;
  } else {
    j["estimate"] = interval;
  }
  return j;
}

json export_policy(const CompositePolicy& cp, const Pomdp& p) {
  json doc = {{"format", "surecost-policy/1"}, {"horizon", cp.horizon()}};
  const auto* f = cp.finite();
  if (!f) {
    doc["backend"] = "none";
  } else if (f->exact()) {
    doc["backend"] = "exact";
    json nodes = json::array();
    for (std::size_t i = 0; i < f->nodes.size(); ++i) {
      const auto& n = f->nodes[i];
      json node = {{"id", i}, {"remaining", n.remaining}, {"belief", key_json(p, n.key)}};
      if (n.action) {
        node["action"] = p.action_names()[*n.action];
        json children = json::array();
        for (const auto& [z, c] : n.children) {
          children.push_back(json::array({p.observation_names()[z], c}));
        }
        node["children"] = children;
      } else if (!cp.fallback().contains(key_support(n.key))) {
        throw ContractError("fallback undefined at support " + describe(p, key_support(n.key)));
      }
      nodes.push_back(std::move(node));
    }
    doc["decisions"] = std::move(nodes);
  } else {
    doc["backend"] = "discretized";
    const ValueTable& t = *f->table;
    std::vector<std::pair<const TableKey*, double>> rows;
    for (const auto& [key, v] : t.values) rows.emplace_back(&key, v);
    std::sort(rows.begin(), rows.end(), [](const auto& x, const auto& y) {
      if (x.first->remaining != y.first->remaining) return x.first->remaining < y.first->remaining;
      return x.first->belief.entries < y.first->belief.entries;
    });
    json entries = json::array();
    for (const auto& [key, v] : rows) {
      entries.push_back({{"remaining", key->remaining}, {"belief", key_json(p, key->belief)}, {"value", v}});
    }
    doc["table"] = {{"discretization", t.discretization},
                    {"entries", std::move(entries)}};
  }
  json fallback = json::array();
  for (const auto& [u, actions] : cp.fallback()) {
    json names = json::array();
    for (ActionId a : actions) names.push_back(p.action_names()[a]);
    fallback.push_back({{"support", support_names(p, u)}, {"actions", names}});
  }
  doc["fallback"] = std::move(fallback);
  return doc;
}

CompositePolicy import_policy(const json& doc, const Pomdp& p) {
  try {
    if (doc.at("format") != "surecost-policy/1") {
      throw Error("policy document: unsupported format " + doc.at("format").dump());
    }
    FallbackTable fallback;
    for (const auto& e : doc.at("fallback")) {
      std::vector<StateId> states;
      for (const auto& s : e.at("support")) states.push_back(state_of(p, s));
      std::vector<ActionId> actions;
      for (const auto& a : e.at("actions")) actions.push_back(action_of(p, a));
      fallback.emplace(BeliefSupport(std::move(states)), std::move(actions));
    }
    const std::string backend = doc.at("backend").get<std::string>();
    if (backend == "none") return CompositePolicy(nullptr, std::move(fallback));

    auto f = std::make_shared<FiniteHorizonPolicy>();
    f->horizon = doc.at("horizon").get<std::size_t>();
    if (backend == "exact") {
      const auto& nodes = doc.at("decisions");
      f->nodes.resize(nodes.size());
      for (const auto& n : nodes) {
        auto id = n.at("id").get<std::size_t>();
        if (id >= f->nodes.size()) throw Error("policy document: decision id out of range");
        DecisionNode& d = f->nodes[id];
        d.remaining = n.at("remaining").get<std::uint32_t>();
        d.key = key_from_json(p, n.at("belief"));
        if (n.contains("action")) {
          d.action = action_of(p, n.at("action"));
          for (const auto& c : n.at("children")) {
            auto child = c.at(1).get<std::uint32_t>();
            if (child >= f->nodes.size()) throw Error("policy document: child id out of range");
            d.children.emplace_back(observation_of(p, c.at(0)), child);
          }
        }
      }
    } else if (backend == "discretized") {
      const auto& t = doc.at("table");
      ValueTable table;
      table.discretization = t.at("discretization").get<std::uint32_t>();
      for (const auto& e : t.at("entries")) {
        table.values.emplace(
            TableKey{e.at("remaining").get<std::uint32_t>(), key_from_json(p, e.at("belief"))},
            e.at("value").get<double>());
      }
      extend_mdp_bound(p, table.bound, f->horizon);
      f->table = std::move(table);
    } else {
      throw Error("policy document: unknown backend '" + backend + "'");
    }
    return CompositePolicy(std::move(f), std::move(fallback));
  } catch (const json::exception& e) {
    throw Error(std::string("policy document: ") + e.what());
  }
}

}  // namespace surecost
