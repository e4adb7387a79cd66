#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace surecost {

using StateId = std::uint32_t;
using ActionId = std::uint32_t;
using ObsId = std::uint32_t;

/// Tolerance on the total mass of a probability row.
inline constexpr double kMassTolerance = 1e-9;

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The model violates a structural invariant.
class ModelError : public Error {
 public:
  using Error::Error;
};

/// A configured size budget was exceeded.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// A numerical routine did not meet its accuracy contract.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Sparse probability distribution over indices, kept sorted by index.
class Distribution {
 public:
  using Entry = std::pair<std::uint32_t, double>;

  Distribution() = default;

  /// Builds from arbitrary (index, weight) pairs: merges duplicates, drops
  /// zero weights, sorts by index. Does not normalize.
  static Distribution from_entries(std::vector<Entry> entries);
  static Distribution point(std::uint32_t index);
  static Distribution uniform(std::span<const std::uint32_t> indices);

  std::span<const Entry> entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  double mass() const;
  double at(std::uint32_t index) const;
  std::vector<std::uint32_t> support() const;

  /// Rescales to unit mass. Throws ModelError if the mass is off by more than
  /// `tolerance`.
  void normalize(double tolerance = kMassTolerance);

  bool operator==(const Distribution&) const = default;

 private:
  std::vector<Entry> entries_;
};

enum class CostMode { kPositive, kGeneralInteger };

std::string to_string(CostMode mode);
CostMode cost_mode_from_string(const std::string& text);

/// Finite POMDP with integer costs and an absorbing target set.
///
/// Observations are deterministic functions of the state unless an
/// observation kernel (state reached, action) -> Distribution over
/// observations is attached; kernel models must go through
/// determinize_observations() before any solver sees them.
class Pomdp {
 public:
  friend class PomdpBuilder;

  const std::string& name() const { return name_; }
  std::size_t num_states() const { return state_names_.size(); }
  std::size_t num_actions() const { return action_names_.size(); }
  std::size_t num_observations() const { return observation_names_.size(); }

  const std::vector<std::string>& state_names() const { return state_names_; }
  const std::vector<std::string>& action_names() const { return action_names_; }
  const std::vector<std::string>& observation_names() const {
    return observation_names_;
  }

  const Distribution& transition(StateId s, ActionId a) const {
    return trans_[index(s, a)];
  }
  std::int64_t cost(StateId s, ActionId a) const { return cost_[index(s, a)]; }
  ObsId observation(StateId s) const { return obs_of_[s]; }
  const std::vector<ObsId>& observations() const { return obs_of_; }
  bool is_target(StateId s) const { return target_[s]; }
  std::vector<StateId> targets() const;
  const Distribution& initial() const { return initial_; }
  CostMode cost_mode() const { return cost_mode_; }

  bool has_observation_kernel() const { return obs_kernel_.has_value(); }
  /// Observation law on entering `s` via action `a`. Kernel models only.
  const Distribution& observation_kernel(StateId s, ActionId a) const {
    return (*obs_kernel_)[index(s, a)];
  }
  /// Observation attached to the initial states of a kernel model.
  ObsId initial_observation() const { return initial_obs_; }

  /// States carrying observation `z` (deterministic-observation models).
  std::vector<StateId> states_with_observation(ObsId z) const;

  std::optional<StateId> find_state(const std::string& name) const;
  std::optional<ActionId> find_action(const std::string& name) const;
  std::optional<ObsId> find_observation(const std::string& name) const;

 private:
  std::size_t index(StateId s, ActionId a) const {
    return static_cast<std::size_t>(s) * action_names_.size() + a;
  }

  std::string name_;
  std::vector<std::string> state_names_;
  std::vector<std::string> action_names_;
  std::vector<std::string> observation_names_;
  std::vector<Distribution> trans_;
  std::vector<std::int64_t> cost_;
  std::vector<ObsId> obs_of_;
  std::optional<std::vector<Distribution>> obs_kernel_;
  ObsId initial_obs_ = 0;
  std::vector<bool> target_;
  Distribution initial_;
  CostMode cost_mode_ = CostMode::kPositive;
};

/// Mutable staging area for a Pomdp. build() performs no validation so that
/// broken models can still be inspected with validate().
class PomdpBuilder {
 public:
  PomdpBuilder(std::vector<std::string> states, std::vector<std::string> actions,
               std::vector<std::string> observations);

  PomdpBuilder& name(std::string value);
  PomdpBuilder& transition(StateId s, ActionId a, Distribution d);
  PomdpBuilder& add_transition(StateId s, ActionId a, StateId next, double p);
  PomdpBuilder& cost(StateId s, ActionId a, std::int64_t c);
  PomdpBuilder& state_cost(StateId s, std::int64_t c);
  PomdpBuilder& observation(StateId s, ObsId z);
  PomdpBuilder& observation_kernel(StateId s, ActionId a, Distribution d);
  PomdpBuilder& initial_observation(ObsId z);
  PomdpBuilder& target(StateId s, bool is_target = true);
  PomdpBuilder& initial(Distribution d);
  PomdpBuilder& cost_mode(CostMode mode);

  /// Adds a self-loop for every action on `s`.
  PomdpBuilder& absorbing(StateId s);

  std::size_t num_states() const { return pomdp_.num_states(); }
  std::size_t num_actions() const { return pomdp_.num_actions(); }

  Pomdp build() const;

 private:
  std::vector<std::vector<Distribution::Entry>> rows_;
  Pomdp pomdp_;
};

struct Violation {
  std::string kind;
  std::string message;
  std::optional<StateId> state;
  std::optional<ActionId> action;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string summary() const;
};

/// Checks every structural invariant of `p`; never throws.
ValidationReport validate(const Pomdp& p);

/// Throws ModelError carrying the report summary if `p` is invalid.
void require_valid(const Pomdp& p);

/// Product construction S x Z that folds the observation kernel into the
/// transition law. Target copies are made absorbing.
Pomdp determinize_observations(const Pomdp& p);

/// Gives all targets one fresh private observation. Observations that were
/// used exclusively by targets are dropped.
Pomdp observe_targets(const Pomdp& p);

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;
};

struct ScaledModel {
  Pomdp pomdp;
  std::int64_t factor = 1;
};

/// Replaces the cost table of `p` by `costs` (row-major (state, action))
/// multiplied by the lcm of all denominators.
ScaledModel scale_costs(const Pomdp& p, std::span<const Rational> costs);

}  // namespace surecost
