#pragma once

#include <cstddef>
#include <cstdint>
#include <nlohmann/json.hpp>

#include "surecost/driver.hpp"
#include "surecost/model.hpp"

namespace surecost {

struct SimStats {
  std::size_t trials = 0;
  double mean = 0.0;
  double stddev = 0.0;
  /// Half-width of the 99% normal confidence interval on the mean.
  double half_width = 0.0;
  double reach_fraction = 0.0;
  double truncated_fraction = 0.0;
  std::uint64_t seed = 0;
  std::size_t step_cap = 0;
};

/// Runs `trials` independent plays of `policy` on `p` (a prepared model), the
/// i-th one driven by Rng(seed + i). Plays stop at a target or after
/// `step_cap` steps; truncated plays keep their accumulated cost.
SimStats simulate(const Pomdp& p, const CompositePolicy& policy, std::size_t trials,
                  std::uint64_t seed, std::size_t step_cap);

/// 100 * U_Allow rounded up, at least 1.
std::size_t default_step_cap(double u_allow);

nlohmann::json stats_to_json(const SimStats& s);

}  // namespace surecost
