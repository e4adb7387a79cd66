#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "surecost/model.hpp"

namespace surecost {

/// Probabilistic finite automaton. An empty row means the letter is not
/// enabled; such runs are rejected.
struct Pfa {
  std::vector<std::string> states;
  std::vector<std::string> alphabet;
  /// delta[s][letter]
  std::vector<std::vector<Distribution>> delta;
  std::vector<bool> final;
  StateId initial = 0;

  std::size_t num_states() const { return states.size(); }
  std::optional<std::uint32_t> find_letter(const std::string& name) const;
};

/// Throws ModelError when a specified row is not a distribution.
void validate_pfa(const Pfa& pfa);

/// Two states s0 -a-> s with s final and a b-loop on s.
Pfa example_pfa();

/// Acceptance probability of `word` (letter names). Throws Error on letters
/// outside the alphabet.
double pfa_accept(const Pfa& pfa, std::span<const std::string> word);

/// POMDP whose optimal cost is minus infinity iff some word is accepted with
/// probability above one half. Disabled letters lead to a materialized
/// non-final reject state, so every PFA run stays inside the gadget.
Pomdp gen_reduction(const Pfa& pfa);

/// ($ w1 $ w2 ... $ wn $ # #)^k followed by the target action.
std::vector<std::string> reduction_strategy_word(std::span<const std::string> w,
                                                 std::size_t k);

/// Exact expected cost accumulated while playing the open-loop action word.
/// Requires all non-target states to share one observation.
double eval_word(const Pomdp& p, std::span<const std::string> word);
double eval_word(const Pomdp& p, std::span<const ActionId> word);

/// Three states: s0 with a risky action (target or sink) and a safe one
/// (target or retry).
Pomdp gen_toy();
/// The toy model without the safe action; its initial support loses.
Pomdp gen_toy_risky();

/// F(n): n loops of prime lengths behind one shared observation.
Pomdp gen_lower_bound(std::size_t n);

/// First n primes.
std::vector<std::size_t> first_primes(std::size_t n);

enum class CostVariant { kUnit, kWeighted };

/// 4x3 grid with one blocked cell, a goal and a trap.
Pomdp gen_grid(CostVariant costs = CostVariant::kUnit);

enum class CheeseSize { kSmall, kLarge };
Pomdp gen_cheese(CheeseSize size = CheeseSize::kSmall, CostVariant costs = CostVariant::kUnit);

enum class RobotVariant { kDeterministic, kRandom };
Pomdp gen_robot(RobotVariant variant = RobotVariant::kDeterministic,
                CostVariant costs = CostVariant::kUnit);

struct RockSampleOptions {
  /// Sensor half-efficiency distance.
  double d0 = 20.0;
  /// Seed of the rock placement when `rocks` is empty.
  std::uint64_t seed = 7;
  /// Explicit rock cells (x, y).
  std::vector<std::pair<int, int>> rocks;
};

/// n x n map, k rocks, exit on the east edge. Observations come from a
/// kernel; run determinize_observations before solving.
Pomdp gen_rocksample(std::size_t n, std::size_t k, const RockSampleOptions& options = {});

}  // namespace surecost
