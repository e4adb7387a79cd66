#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "surecost/model.hpp"

namespace surecost::testing {

/// State-level analysis of a model read as a fully observable MDP.
struct MdpOracle {
  std::vector<bool> winning;
  /// Actions whose successors all stay winning, per state.
  std::vector<std::vector<ActionId>> allowed;
  /// Minimal expected cost to the targets under almost-sure reaching;
  /// infinity outside the winning set.
  std::vector<double> value;
};

MdpOracle solve_mdp(const Pomdp& p);

/// Expected cost of playing uniformly over `allowed`, per state; infinity
/// outside the winning set.
std::vector<double> uniform_allowed_cost(const Pomdp& p, const MdpOracle& o);

/// Expectation of `value` under the initial distribution.
double initial_value(const Pomdp& p, const MdpOracle& o);

/// Random model where every state has its own observation. One target, one
/// trap, 3..max_states states, costs in 1..3.
Pomdp random_fully_observable(std::uint64_t seed, std::size_t max_states = 30);

/// Random small partially observable model: 3..6 states, 2 actions, 1..3
/// observations on the non-target states.
Pomdp random_pomdp(std::uint64_t seed);

struct MeanEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
};

/// Simulates F(2) under the strategy "enter, take five `a`, then `#`",
/// restarting whenever the play returns to s0.
MeanEstimate restart_chain_f2(std::size_t trials, std::uint64_t seed);

}  // namespace surecost::testing
