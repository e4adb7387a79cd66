#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

#include "surecost/belief.hpp"
#include "surecost/model.hpp"
#include "surecost/winning.hpp"

namespace surecost {

/// One decision of the exact finite-horizon strategy. Leaves (remaining == 0
/// or target beliefs) carry no action.
struct DecisionNode {
  std::uint32_t remaining = 0;
  BeliefKey key;
  std::optional<ActionId> action;
  std::vector<std::pair<ObsId, std::uint32_t>> children;
};

struct TableKey {
  std::uint32_t remaining;
  BeliefKey belief;
  bool operator==(const TableKey&) const = default;
};

struct TableKeyHash {
  std::size_t operator()(const TableKey& k) const noexcept;
};

/// Value table of the discretized backend. Beliefs missing from `values` are
/// scored by `bound`.
struct ValueTable {
  std::uint32_t discretization = 100;
  std::unordered_map<TableKey, double, TableKeyHash> values;
  /// bound[r][s]: r-step optimal cost of the fully observable model. Rows stop
  /// early once they settle; later horizons reuse the last row.
  std::vector<std::vector<double>> bound;
};

/// Grows `rows` (the `bound` of a ValueTable) to cover horizon k.
void extend_mdp_bound(const Pomdp& p, std::vector<std::vector<double>>& rows, std::size_t k);

/// Belief rounded to multiples of 1/D and renormalized, keyed by counts.
BeliefKey discretize(const BeliefPoint& b, std::uint32_t d);

/// Strategy for the first `horizon` steps. Exactly one of `nodes` (exact
/// backend, node 0 is the root) and `table` (discretized backend) is used.
struct FiniteHorizonPolicy {
  std::size_t horizon = 0;
  std::vector<DecisionNode> nodes;
  std::optional<ValueTable> table;

  bool exact() const { return !table.has_value(); }
};

/// Bellman lookahead against a value table; nullopt if `allow` is empty.
std::optional<ActionId> greedy_action(const Pomdp& p, const ValueTable& t,
                                      const BeliefPoint& b, std::uint32_t remaining,
                                      std::span<const ActionId> allow,
                                      double* value = nullptr);

struct HorizonResult {
  std::size_t k = 0;
  double t_k = 0.0;
  double alpha_k = 0.0;
  bool exact = true;
  /// Discretized backend: 99% half-width of the T_k estimate.
  double t_k_half_width = 0.0;
  std::size_t beliefs = 0;
  std::shared_ptr<const FiniteHorizonPolicy> policy;
};

struct HorizonOptions {
  std::size_t max_beliefs = 2'000'000;
};

/// Exact value iteration on the layered belief DAG, restricted to allowed
/// actions. Keeps the DAG between calls so increasing horizons only add
/// layers.
class ExactHorizonSolver {
 public:
  ExactHorizonSolver(const Pomdp& p, const WinningTable& w, HorizonOptions options = {});

  HorizonResult solve(std::size_t k);
  std::size_t num_beliefs() const { return total_; }
  std::size_t depth() const { return layers_.size() - 1; }

 private:
  struct Branch {
    ObsId observation;
    double likelihood;
    std::uint32_t child;
  };
  struct Node {
    BeliefPoint belief;
    NodeId support;
    bool target;
    bool expanded = false;
    std::vector<ActionId> actions;
    std::vector<double> costs;
    std::vector<std::uint32_t> begin;  // per action offset into branches
    std::vector<Branch> branches;
  };
  struct Layer {
    std::vector<Node> nodes;
    std::unordered_map<BeliefKey, std::uint32_t, BeliefKeyHash> index;
  };

  std::uint32_t intern(Layer& layer, BeliefPoint b);
  void expand(std::size_t depth);

  const Pomdp& p_;
  const WinningTable& w_;
  HorizonOptions options_;
  std::vector<Layer> layers_;
  std::size_t total_ = 0;
};

HorizonResult exact_vi(const Pomdp& p, const WinningTable& w, std::size_t k,
                       HorizonOptions options = {});

struct RtdpOptions {
  std::uint32_t discretization = 100;
  std::size_t trials = 10'000;
  /// Fresh rollouts for the T_k and alpha_k estimates; 0 means `trials`.
  std::size_t rollouts = 0;
  std::uint64_t seed = 1;
  std::size_t max_entries = 2'000'000;
};

/// Trial-based value iteration over discretized beliefs. The table persists
/// between calls; values are indexed by remaining steps and so are reusable
/// across horizons.
class RtdpSolver {
 public:
  RtdpSolver(const Pomdp& p, const WinningTable& w, RtdpOptions options = {});

  HorizonResult solve(std::size_t k);
  const ValueTable& table() const { return table_; }

 private:
  std::span<const ActionId> allow_of(const BeliefPoint& b) const;
  double backup(const BeliefPoint& b, std::uint32_t remaining, ActionId* chosen);

  const Pomdp& p_;
  const WinningTable& w_;
  RtdpOptions options_;
  ValueTable table_;
  std::uint64_t trials_run_ = 0;
};

HorizonResult rtdp_backend(const Pomdp& p, const WinningTable& w, std::size_t k,
                           RtdpOptions options = {});

/// One-sided 99% upper confidence bound on a binomial proportion
/// (Clopper-Pearson).
double binomial_upper_bound(std::size_t failures, std::size_t n,
                            double confidence = 0.99);

}  // namespace surecost
