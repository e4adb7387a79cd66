#include "surecost/montecarlo.hpp"

#include <algorithm>
#include <cmath>

#include "surecost/random.hpp"

namespace surecost {

namespace {

constexpr double kZ99 = 2.5758293035489004;

}  // namespace

SimStats simulate(const Pomdp& p, const CompositePolicy& policy, std::size_t trials,
                  std::uint64_t seed, std::size_t step_cap) {
  SimStats st;
  st.trials = trials;
  st.seed = seed;
  st.step_cap = step_cap;
  if (trials == 0) return st;

  double sum = 0.0;
  double sum_sq = 0.0;
  std::size_t reached = 0;
  std::size_t truncated = 0;
  for (std::size_t i = 0; i < trials; ++i) {
    Rng rng(seed + i);
    StateId s = rng.sample(p.initial());
    PolicyRun run(policy, p);
    double total = 0.0;
    std::size_t step = 0;
    while (!p.is_target(s) && step < step_cap) {
      ActionId a = run.act(rng);
      total += static_cast<double>(p.cost(s, a));
      s = rng.sample(p.transition(s, a));
      run.observe(a, p.observation(s));
      ++step;
    }
    if (p.is_target(s)) {
      ++reached;
    } else {
      ++truncated;
    }
    sum += total;
    sum_sq += total * total;
  }
  const double n = static_cast<double>(trials);
  st.mean = sum / n;
  double var = trials > 1 ? std::max(0.0, (sum_sq - sum * sum / n) / (n - 1.0)) : 0.0;
  st.stddev = std::sqrt(var);
  st.half_width = kZ99 * st.stddev / std::sqrt(n);
  st.reach_fraction = static_cast<double>(reached) / n;
  st.truncated_fraction = static_cast<double>(truncated) / n;
  return st;
}

std::size_t default_step_cap(double u_allow) {
  double cap = std::ceil(100.0 * u_allow);
  if (!(cap >= 1.0)) return 1;
  if (cap > 1e12) return static_cast<std::size_t>(1e12);
  return static_cast<std::size_t>(cap);
}

nlohmann::json stats_to_json(const SimStats& s) {
  return {{"trials", s.trials},
          {"mean", s.mean},
          {"stddev", s.stddev},
          {"half_width_99", s.half_width},
          {"reach_fraction", s.reach_fraction},
          {"truncated_fraction", s.truncated_fraction},
          {"seed", s.seed},
          {"step_cap", s.step_cap}};
}

}  // namespace surecost
