#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "surecost/model.hpp"

namespace surecost {

/// Update applied to an observation that cannot occur.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Set of states the system may be in, sorted and duplicate free.
class BeliefSupport {
 public:
  BeliefSupport() = default;
  /// Sorts and deduplicates `states`.
  explicit BeliefSupport(std::vector<StateId> states);

  std::span<const StateId> states() const { return states_; }
  std::size_t size() const { return states_.size(); }
  bool empty() const { return states_.empty(); }
  bool contains(StateId s) const;

  auto operator<=>(const BeliefSupport&) const = default;
  bool operator==(const BeliefSupport&) const = default;

 private:
  std::vector<StateId> states_;
};

struct BeliefSupportHash {
  std::size_t operator()(const BeliefSupport& u) const noexcept;
};

/// Canonical hashing key of a belief point: states in order, probabilities
/// rounded to 12 decimal digits.
struct BeliefKey {
  std::vector<std::pair<StateId, std::int64_t>> entries;
  bool operator==(const BeliefKey&) const = default;
};

struct BeliefKeyHash {
  std::size_t operator()(const BeliefKey& k) const noexcept;
};

inline constexpr double kBeliefKeyScale = 1e12;

/// Posterior distribution over states.
class BeliefPoint {
 public:
  using Entry = std::pair<StateId, double>;

  BeliefPoint() = default;
  explicit BeliefPoint(const Distribution& d);
  /// `entries` must be sorted by state with strictly positive mass.
  static BeliefPoint from_sorted(std::vector<Entry> entries);

  std::span<const Entry> entries() const { return entries_; }
  double at(StateId s) const;
  BeliefSupport support() const;
  BeliefKey key() const;

  bool operator==(const BeliefPoint&) const = default;

 private:
  std::vector<Entry> entries_;
};

/// Bayes successor for one observation, with its probability.
struct ObservationBranch {
  ObsId observation;
  double likelihood;
  BeliefPoint belief;
};

struct SupportBranch {
  ObsId observation;
  BeliefSupport support;
};

/// Expected one-step cost of playing `a` from `b`.
double expected_cost(const Pomdp& p, const BeliefPoint& b, ActionId a);

double obs_likelihood(const Pomdp& p, const BeliefPoint& b, ActionId a, ObsId z);

/// Throws DomainError when `z` has zero likelihood.
BeliefPoint update_point(const Pomdp& p, const BeliefPoint& b, ActionId a, ObsId z);

/// All observations with positive likelihood, in observation order.
std::vector<ObservationBranch> branch(const Pomdp& p, const BeliefPoint& b,
                                      ActionId a);

/// Empty result is reported as nullopt.
std::optional<BeliefSupport> update_support(const Pomdp& p, const BeliefSupport& u,
                                            ActionId a, ObsId z);

/// Nonempty successor supports keyed by observation, in observation order.
std::vector<SupportBranch> support_branches(const Pomdp& p, const BeliefSupport& u,
                                            ActionId a);

std::vector<BeliefSupport> successors(const Pomdp& p, const BeliefSupport& u,
                                      ActionId a);

std::string describe(const Pomdp& p, const BeliefSupport& u);

}  // namespace surecost
