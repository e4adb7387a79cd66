#include "surecost/horizon.hpp"

#include <algorithm>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <deque>
#include <limits>
#include <string>

#include "surecost/random.hpp"

namespace surecost {

namespace {

constexpr double kTieTolerance = 1e-12;

bool improves(double q, double best) {
  return q < best - kTieTolerance * std::max(1.0, std::fabs(best));
}

bool is_target_belief(const Pomdp& p, const BeliefPoint& b) {
  for (const auto& [s, w] : b.entries()) {
    if (!p.is_target(s)) return false;
  }
  return !b.entries().empty();
}

constexpr double kZ99 = 2.5758293035489004;

}  // namespace

std::size_t TableKeyHash::operator()(const TableKey& k) const noexcept {
  std::size_t h = BeliefKeyHash{}(k.belief);
  return h ^ (static_cast<std::size_t>(k.remaining) * 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

BeliefKey discretize(const BeliefPoint& b, std::uint32_t d) {
  // Largest-remainder rounding keeps the counts summing to d.
  struct Part {
    StateId state;
    std::int64_t count;
    double rest;
  };
  std::vector<Part> parts;
  std::int64_t left = d;
  for (const auto& [s, w] : b.entries()) {
    const double scaled = w * static_cast<double>(d);
    const auto c = static_cast<std::int64_t>(std::floor(scaled));
    parts.push_back({s, c, scaled - static_cast<double>(c)});
    left -= c;
  }
  if (left > 0 && !parts.empty()) {
    std::vector<std::size_t> order(parts.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    const auto top = std::min(order.size(), static_cast<std::size_t>(left));
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(top), order.end(),
                      [&](std::size_t x, std::size_t y) {
                        return parts[x].rest != parts[y].rest ? parts[x].rest > parts[y].rest : x < y;
                      });
    for (std::size_t i = 0; left > 0; ++i, --left) ++parts[order[i % top]].count;
  }
  BeliefKey key;
  for (const auto& part : parts) {
    if (part.count > 0) key.entries.emplace_back(part.state, part.count);
  }
  return key;
}

namespace {

constexpr std::size_t kMaxBoundEntries = std::size_t{1} << 22;

double table_value(const Pomdp& p, const ValueTable& t, const BeliefPoint& b,
                   std::uint32_t remaining) {
  if (remaining == 0 || is_target_belief(p, b)) return 0.0;
  auto it = t.values.find(TableKey{remaining, discretize(b, t.discretization)});
  if (it != t.values.end()) return it->second;
  if (t.bound.empty()) return 0.0;
  const auto& row = t.bound[std::min<std::size_t>(remaining, t.bound.size() - 1)];
  double v = 0.0;
  for (const auto& [s, w] : b.entries()) v += w * row[s];
  return v;
}

}  // namespace

void extend_mdp_bound(const Pomdp& p, std::vector<std::vector<double>>& rows, std::size_t k) {
  const std::size_t n = p.num_states();
  if (rows.empty()) rows.emplace_back(n, 0.0);
  // Costs are non-negative, so rows only grow with r and any prefix stays a lower bound.
  while (rows.size() <= k && (rows.size() + 1) * n <= kMaxBoundEntries) {
    if (rows.size() >= 2 && rows[rows.size() - 1] == rows[rows.size() - 2]) break;
    const auto& prev = rows.back();
    std::vector<double> next(n, 0.0);
    for (StateId s = 0; s < n; ++s) {
      if (p.is_target(s)) continue;
      double best = std::numeric_limits<double>::infinity();
      for (ActionId a = 0; a < p.num_actions(); ++a) {
        double q = static_cast<double>(p.cost(s, a));
        for (const auto& [t, pr] : p.transition(s, a).entries()) q += pr * prev[t];
        best = std::min(best, q);
      }
      next[s] = best;
    }
    rows.push_back(std::move(next));
  }
}

std::optional<ActionId> greedy_action(const Pomdp& p, const ValueTable& t,
                                      const BeliefPoint& b, std::uint32_t remaining,
                                      std::span<const ActionId> allow, double* value) {
  std::optional<ActionId> best;
  double best_q = std::numeric_limits<double>::infinity();
  for (ActionId a : allow) {
    double q = expected_cost(p, b, a);
    for (const auto& br : branch(p, b, a)) {
      q += br.likelihood * table_value(p, t, br.belief, remaining - 1);
    }
    if (!best || improves(q, best_q)) {
      best = a;
      best_q = q;
    }
  }
  if (value) *value = best ? best_q : 0.0;
  return best;
}

ExactHorizonSolver::ExactHorizonSolver(const Pomdp& p, const WinningTable& w,
                                       HorizonOptions options)
    : p_(p), w_(w), options_(options) {
  layers_.emplace_back();
  intern(layers_[0], BeliefPoint(p.initial()));
}

std::uint32_t ExactHorizonSolver::intern(Layer& layer, BeliefPoint b) {
  auto key = b.key();
  auto it = layer.index.find(key);
  if (it != layer.index.end()) return it->second;
  if (++total_ > options_.max_beliefs) {
    throw ResourceError("belief DAG exceeds " + std::to_string(options_.max_beliefs) +
                        " nodes; use the discretized backend");
  }
  auto support = w_.find(b.support());
  if (!support || !w_.wins(*support)) {
    throw Error("belief " + describe(p_, b.support()) + " left the winning region");
  }
  Node node;
  node.target = is_target_belief(p_, b);
  node.support = *support;
  node.belief = std::move(b);
  auto id = static_cast<std::uint32_t>(layer.nodes.size());
  layer.nodes.push_back(std::move(node));
  layer.index.emplace(std::move(key), id);
  return id;
}

void ExactHorizonSolver::expand(std::size_t depth) {
  if (layers_.size() == depth + 1) layers_.emplace_back();
  Layer& next = layers_[depth + 1];
  for (auto& node : layers_[depth].nodes) {
    if (node.expanded || node.target) continue;
    node.expanded = true;
    for (ActionId a : w_.allow(node.support)) {
      node.actions.push_back(a);
      node.costs.push_back(expected_cost(p_, node.belief, a));
      node.begin.push_back(static_cast<std::uint32_t>(node.branches.size()));
      for (auto& br : branch(p_, node.belief, a)) {
        auto child = intern(next, std::move(br.belief));
        node.branches.push_back({br.observation, br.likelihood, child});
      }
    }
    node.begin.push_back(static_cast<std::uint32_t>(node.branches.size()));
  }
}

HorizonResult ExactHorizonSolver::solve(std::size_t k) {
  if (k == 0) throw Error("horizon must be at least 1");
  while (layers_.size() <= k) expand(layers_.size() - 1);

  // Backward induction; choice[d][i] is the position of the greedy action.
  std::vector<std::vector<int>> choice(k);
  std::vector<double> next(layers_[k].nodes.size(), 0.0);
  for (std::size_t d = k; d-- > 0;) {
    const auto& nodes = layers_[d].nodes;
    std::vector<double> cur(nodes.size(), 0.0);
    choice[d].assign(nodes.size(), -1);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const Node& node = nodes[i];
      if (node.target) continue;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < node.actions.size(); ++j) {
        double q = node.costs[j];
        for (auto t = node.begin[j]; t < node.begin[j + 1]; ++t) {
          q += node.branches[t].likelihood * next[node.branches[t].child];
        }
        if (choice[d][i] < 0 || improves(q, best)) {
          best = q;
          choice[d][i] = static_cast<int>(j);
        }
      }
      cur[i] = best;
    }
    next = std::move(cur);
  }

  HorizonResult result;
  result.k = k;
  result.t_k = next[0];
  result.exact = true;
  result.beliefs = total_;

  // Forward pass along greedy edges: reach mass and the decision graph.
  auto policy = std::make_shared<FiniteHorizonPolicy>();
  policy->horizon = k;
  std::vector<double> mass{1.0};
  std::vector<std::int64_t> ids{0};
  policy->nodes.push_back({static_cast<std::uint32_t>(k), layers_[0].nodes[0].belief.key(), {}, {}});
  for (std::size_t d = 0; d < k; ++d) {
    const auto& nodes = layers_[d].nodes;
    std::vector<double> nmass(layers_[d + 1].nodes.size(), 0.0);
    std::vector<std::int64_t> nids(layers_[d + 1].nodes.size(), -1);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (ids[i] < 0 || nodes[i].target) continue;
      const Node& node = nodes[i];
      int j = choice[d][i];
      auto& decision = policy->nodes[static_cast<std::size_t>(ids[i])];
      decision.action = node.actions[static_cast<std::size_t>(j)];
      std::vector<std::pair<ObsId, std::uint32_t>> children;
      for (auto t = node.begin[j]; t < node.begin[j + 1]; ++t) {
        const Branch& br = node.branches[t];
        nmass[br.child] += mass[i] * br.likelihood;
        if (nids[br.child] < 0) {
          nids[br.child] = static_cast<std::int64_t>(policy->nodes.size());
          policy->nodes.push_back({static_cast<std::uint32_t>(k - d - 1),
                                   layers_[d + 1].nodes[br.child].belief.key(), {}, {}});
        }
        children.emplace_back(br.observation, static_cast<std::uint32_t>(nids[br.child]));
      }
      policy->nodes[static_cast<std::size_t>(ids[i])].children = std::move(children);
    }
    mass = std::move(nmass);
    ids = std::move(nids);
  }
  double alpha = 0.0;
  for (std::size_t i = 0; i < mass.size(); ++i) {
    if (!layers_[k].nodes[i].target) alpha += mass[i];
  }
  result.alpha_k = std::clamp(alpha, 0.0, 1.0);
  result.policy = std::move(policy);
  return result;
}

HorizonResult exact_vi(const Pomdp& p, const WinningTable& w, std::size_t k,
                       HorizonOptions options) {
  ExactHorizonSolver solver(p, w, options);
  return solver.solve(k);
}

RtdpSolver::RtdpSolver(const Pomdp& p, const WinningTable& w, RtdpOptions options)
    : p_(p), w_(w), options_(options) {
  if (options_.discretization == 0) throw Error("discretization must be positive");
  table_.discretization = options_.discretization;
}

std::span<const ActionId> RtdpSolver::allow_of(const BeliefPoint& b) const {
  return w_.allow(b.support());
}

double RtdpSolver::backup(const BeliefPoint& b, std::uint32_t remaining, ActionId* chosen) {
  double value = 0.0;
  auto a = greedy_action(p_, table_, b, remaining, allow_of(b), &value);
  if (!a) throw Error("belief " + describe(p_, b.support()) + " has no allowed action");
  *chosen = *a;
  auto [it, inserted] =
      table_.values.insert_or_assign(TableKey{remaining, discretize(b, table_.discretization)}, value);
  if (inserted && table_.values.size() > options_.max_entries) {
    throw ResourceError("value table exceeds " + std::to_string(options_.max_entries) +
                        " entries");
  }
  return value;
}

HorizonResult RtdpSolver::solve(std::size_t k) {
  if (k == 0) throw Error("horizon must be at least 1");
  extend_mdp_bound(p_, table_.bound, k);
  const BeliefPoint start(p_.initial());
  for (std::size_t trial = 0; trial < options_.trials; ++trial) {
    Rng rng(options_.seed + trials_run_++);
    BeliefPoint b = start;
    for (auto r = static_cast<std::uint32_t>(k); r > 0; --r) {
      if (is_target_belief(p_, b)) break;
      ActionId a = 0;
      backup(b, r, &a);
      auto branches = branch(p_, b, a);
      std::vector<double> weights;
      for (const auto& br : branches) weights.push_back(br.likelihood);
      b = std::move(branches[rng.sample(weights)].belief);
    }
  }

  const std::size_t n = options_.rollouts ? options_.rollouts : options_.trials;
  double sum = 0.0;
  double sum_sq = 0.0;
  std::size_t failures = 0;
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng(options_.seed + (std::uint64_t{1} << 40) + i);
    StateId s = rng.sample(p_.initial());
    BeliefPoint b = start;
    double total = 0.0;
    for (auto r = static_cast<std::uint32_t>(k); r > 0; --r) {
      if (p_.is_target(s)) break;
      auto a = greedy_action(p_, table_, b, r, allow_of(b));
      if (!a) throw Error("belief " + describe(p_, b.support()) + " has no allowed action");
      total += static_cast<double>(p_.cost(s, *a));
      s = rng.sample(p_.transition(s, *a));
      b = update_point(p_, b, *a, p_.observation(s));
    }
    if (!p_.is_target(s)) ++failures;
    sum += total;
    sum_sq += total * total;
  }

  HorizonResult result;
  result.k = k;
  result.exact = false;
  result.beliefs = table_.values.size();
  if (n > 0) {
    const double dn = static_cast<double>(n);
    result.t_k = sum / dn;
    double var = n > 1 ? std::max(0.0, (sum_sq - sum * sum / dn) / (dn - 1.0)) : 0.0;
    result.t_k_half_width = kZ99 * std::sqrt(var / dn);
  }
  result.alpha_k = binomial_upper_bound(failures, n);
  auto policy = std::make_shared<FiniteHorizonPolicy>();
  policy->horizon = k;
  policy->table = table_;
  result.policy = std::move(policy);
  return result;
}

HorizonResult rtdp_backend(const Pomdp& p, const WinningTable& w, std::size_t k,
                           RtdpOptions options) {
  RtdpSolver solver(p, w, options);
  return solver.solve(k);
}

double binomial_upper_bound(std::size_t failures, std::size_t n, double confidence) {
  if (n == 0 || failures >= n) return 1.0;
  return boost::math::ibeta_inv(static_cast<double>(failures + 1),
                                static_cast<double>(n - failures), confidence);
}

}  // namespace surecost
