#include "surecost/winning.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <string>

namespace surecost {

std::optional<NodeId> SupportMdp::find(const BeliefSupport& u) const {
  auto it = index_.find(u);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

SupportMdp build_support_mdp(const Pomdp& p, SupportMdpOptions options) {
  SupportMdp m;
  m.num_actions_ = p.num_actions();
  auto intern = [&](BeliefSupport u) -> NodeId {
    auto [it, inserted] = m.index_.try_emplace(u, static_cast<NodeId>(m.nodes_.size()));
    if (inserted) {
      bool all_targets = true;
      for (StateId s : u.states()) all_targets = all_targets && p.is_target(s);
      m.target_.push_back(all_targets);
      m.nodes_.push_back(std::move(u));
    }
    return it->second;
  };

  intern(BeliefPoint(p.initial()).support());
  for (NodeId n = 0; n < m.nodes_.size(); ++n) {
    for (ActionId a = 0; a < p.num_actions(); ++a) {
      std::vector<SupportEdge> out;
      for (auto& br : support_branches(p, m.nodes_[n], a)) {
        out.push_back({br.observation, intern(std::move(br.support))});
      }
      m.num_edges_ += out.size();
      if (m.num_edges_ > options.max_edges) {
        throw ResourceError("support MDP exceeds the edge budget of " +
                            std::to_string(options.max_edges));
      }
      m.edges_.push_back(std::move(out));
    }
  }
  return m;
}

std::size_t WinningTable::num_winning() const {
  return static_cast<std::size_t>(std::count(win_.begin(), win_.end(), true));
}

std::span<const ActionId> WinningTable::allow(const BeliefSupport& u) const {
  auto n = mdp_->find(u);
  if (!n) return {};
  return allow_[*n];
}

Distribution WinningTable::sigma_allow(NodeId n) const {
  return Distribution::uniform(allow_[n]);
}

namespace {

// Predecessors of every (state, support) pair, tagged with the action.
struct PairGraph {
  std::vector<std::size_t> offset;  // first pair of each node
  std::vector<NodeId> node_of;
  std::vector<bool> target;
  std::vector<std::size_t> pred_begin;
  std::vector<std::uint32_t> pred_pair;
  std::vector<ActionId> pred_action;
};

PairGraph pair_graph(const Pomdp& p, const SupportMdp& m) {
  const std::size_t nn = m.num_nodes();
  const std::size_t na = m.num_actions();
  PairGraph g;
  g.offset.reserve(nn + 1);
  for (NodeId n = 0; n < nn; ++n) {
    g.offset.push_back(g.node_of.size());
    for (StateId s : m.support(n).states()) {
      g.node_of.push_back(n);
      g.target.push_back(p.is_target(s));
    }
  }
  g.offset.push_back(g.node_of.size());
  if (g.node_of.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw ResourceError("too many (state, support) pairs");
  }

  std::vector<std::pair<std::uint32_t, std::uint32_t>> arcs;  // (to, from)
  std::vector<ActionId> arc_action;
  std::vector<NodeId> succ_of_obs(p.num_observations(), 0);
  for (NodeId n = 0; n < nn; ++n) {
    const auto states = m.support(n).states();
    for (ActionId a = 0; a < na; ++a) {
      for (const auto& e : m.edges(n, a)) succ_of_obs[e.observation] = e.node;
      for (std::size_t i = 0; i < states.size(); ++i) {
        const auto from = static_cast<std::uint32_t>(g.offset[n] + i);
        for (const auto& [t, w] : p.transition(states[i], a).entries()) {
          const NodeId next = succ_of_obs[p.observation(t)];
          const auto succ = m.support(next).states();
          const auto pos = std::lower_bound(succ.begin(), succ.end(), t) - succ.begin();
          arcs.emplace_back(static_cast<std::uint32_t>(g.offset[next] + pos), from);
          arc_action.push_back(a);
        }
      }
    }
  }

  const std::size_t np = g.node_of.size();
  g.pred_begin.assign(np + 1, 0);
  for (const auto& [to, from] : arcs) ++g.pred_begin[to + 1];
  for (std::size_t i = 0; i < np; ++i) g.pred_begin[i + 1] += g.pred_begin[i];
  g.pred_pair.resize(arcs.size());
  g.pred_action.resize(arcs.size());
  std::vector<std::size_t> fill(g.pred_begin.begin(), g.pred_begin.end() - 1);
  for (std::size_t k = 0; k < arcs.size(); ++k) {
    const std::size_t slot = fill[arcs[k].first]++;
    g.pred_pair[slot] = arcs[k].second;
    g.pred_action[slot] = arc_action[k];
  }
  return g;
}

}  // namespace

WinningTable almost_sure_winning(const Pomdp& p, std::shared_ptr<const SupportMdp> m) {
  const std::size_t nn = m->num_nodes();
  const std::size_t na = m->num_actions();
  const PairGraph g = pair_graph(p, *m);
  const std::size_t np = g.node_of.size();
  std::vector<bool> alive(nn, true);
  std::vector<bool> action_alive(nn * na, true);

  bool changed = true;
  while (changed) {
    changed = false;
    // Actions that may leave the candidate set.
    for (NodeId n = 0; n < nn; ++n) {
      if (!alive[n]) continue;
      bool any = false;
      for (ActionId a = 0; a < na; ++a) {
        auto idx = static_cast<std::size_t>(n) * na + a;
        if (!action_alive[idx]) continue;
        for (const auto& e : m->edges(n, a)) {
          if (!alive[e.node]) {
            action_alive[idx] = false;
            changed = true;
            break;
          }
        }
        any = any || action_alive[idx];
      }
      if (!any && !m->is_target(n)) {
        alive[n] = false;
        changed = true;
      }
    }
    // A support survives only if each of its states reaches a target
    // through surviving actions; the support alone cannot tell.
    std::vector<bool> reaches(np, false);
    std::deque<std::uint32_t> queue;
    for (std::uint32_t i = 0; i < np; ++i) {
      if (g.target[i] && alive[g.node_of[i]]) {
        reaches[i] = true;
        queue.push_back(i);
      }
    }
    while (!queue.empty()) {
      const std::uint32_t v = queue.front();
      queue.pop_front();
      for (std::size_t k = g.pred_begin[v]; k < g.pred_begin[v + 1]; ++k) {
        const std::uint32_t u = g.pred_pair[k];
        const NodeId un = g.node_of[u];
        if (reaches[u] || !alive[un] ||
            !action_alive[static_cast<std::size_t>(un) * na + g.pred_action[k]]) {
          continue;
        }
        reaches[u] = true;
        queue.push_back(u);
      }
    }
    for (NodeId n = 0; n < nn; ++n) {
      if (!alive[n]) continue;
      for (std::size_t i = g.offset[n]; i < g.offset[n + 1]; ++i) {
        if (!reaches[i]) {
          alive[n] = false;
          changed = true;
          break;
        }
      }
    }
  }

  WinningTable t;
  t.mdp_ = std::move(m);
  t.win_ = alive;
  t.allow_.resize(nn);
  for (NodeId n = 0; n < nn; ++n) {
    if (!alive[n]) continue;
    for (ActionId a = 0; a < na; ++a) {
      if (action_alive[static_cast<std::size_t>(n) * na + a]) t.allow_[n].push_back(a);
    }
  }
  return t;
}

WinningTable analyze_winning(const Pomdp& p, SupportMdpOptions options) {
  return almost_sure_winning(p, std::make_shared<const SupportMdp>(build_support_mdp(p, options)));
}

}  // namespace surecost
