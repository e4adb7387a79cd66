#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "surecost/belief.hpp"
#include "surecost/model.hpp"

namespace surecost {

using NodeId = std::uint32_t;

struct SupportEdge {
  ObsId observation;
  NodeId node;
};

struct SupportMdpOptions {
  std::size_t max_edges = 5'000'000;
};

/// Perfect-observation MDP over the belief supports reachable from the
/// initial support.
class SupportMdp {
 public:
  std::size_t num_nodes() const { return nodes_.size(); }
  std::size_t num_actions() const { return num_actions_; }
  std::size_t num_edges() const { return num_edges_; }
  NodeId initial() const { return 0; }

  const BeliefSupport& support(NodeId n) const { return nodes_[n]; }
  const std::vector<BeliefSupport>& nodes() const { return nodes_; }
  std::span<const SupportEdge> edges(NodeId n, ActionId a) const {
    return edges_[static_cast<std::size_t>(n) * num_actions_ + a];
  }
  bool is_target(NodeId n) const { return target_[n]; }
  std::optional<NodeId> find(const BeliefSupport& u) const;

  friend SupportMdp build_support_mdp(const Pomdp& p, SupportMdpOptions options);

 private:
  std::size_t num_actions_ = 0;
  std::size_t num_edges_ = 0;
  std::vector<BeliefSupport> nodes_;
  std::vector<std::vector<SupportEdge>> edges_;
  std::vector<bool> target_;
  std::unordered_map<BeliefSupport, NodeId, BeliefSupportHash> index_;
};

/// Breadth-first closure of supp(initial) under all actions. Expects targets
/// to be observable (see observe_targets). Throws ResourceError past the edge
/// budget.
SupportMdp build_support_mdp(const Pomdp& p, SupportMdpOptions options = {});

/// Almost-sure winning supports and their allowed actions.
class WinningTable {
 public:
  const SupportMdp& mdp() const { return *mdp_; }
  std::shared_ptr<const SupportMdp> mdp_ptr() const { return mdp_; }

  bool wins(NodeId n) const { return win_[n]; }
  bool initial_wins() const { return win_[mdp_->initial()]; }
  std::size_t num_winning() const;

  /// Allowed actions in increasing order; empty for losing nodes.
  std::span<const ActionId> allow(NodeId n) const { return allow_[n]; }
  /// Allowed actions of `u`, empty when `u` is not a winning support.
  std::span<const ActionId> allow(const BeliefSupport& u) const;
  /// Uniform distribution over allow(n).
  Distribution sigma_allow(NodeId n) const;

  std::optional<NodeId> find(const BeliefSupport& u) const { return mdp_->find(u); }

  friend WinningTable almost_sure_winning(const Pomdp& p, std::shared_ptr<const SupportMdp> m);

 private:
  std::shared_ptr<const SupportMdp> mdp_;
  std::vector<bool> win_;
  std::vector<std::vector<ActionId>> allow_;
};

/// Largest node set W that contains the targets, where every node keeps an
/// action whose successors stay in W and, for every state s of every node U,
/// the pair (s, U) reaches a target pair using only such actions. `m` must
/// have been built from `p`.
WinningTable almost_sure_winning(const Pomdp& p, std::shared_ptr<const SupportMdp> m);

/// build_support_mdp followed by almost_sure_winning.
WinningTable analyze_winning(const Pomdp& p, SupportMdpOptions options = {});

}  // namespace surecost
