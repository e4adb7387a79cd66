#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace surecost::testing {
namespace {

bool stays_in(const Pomdp& p, StateId s, ActionId a, const std::vector<bool>& set) {
  for (const auto& [t, w] : p.transition(s, a).entries()) {
    if (w > 0.0 && !set[t]) return false;
  }
  return true;
}

Distribution random_row(std::mt19937_64& g, std::size_t n, std::size_t width) {
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::uniform_real_distribution<double> weight(0.1, 1.0);
  std::vector<Distribution::Entry> entries;
  double total = 0.0;
  for (std::size_t i = 0; i < width; ++i) {
    double w = weight(g);
    entries.emplace_back(static_cast<std::uint32_t>(pick(g)), w);
    total += w;
  }
  for (auto& e : entries) e.second /= total;
  auto d = Distribution::from_entries(std::move(entries));
  d.normalize();
  return d;
}

std::vector<std::string> names(const std::string& prefix, std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

}  // namespace

MdpOracle solve_mdp(const Pomdp& p) {
  const std::size_t n = p.num_states();
  const std::size_t m = p.num_actions();
  std::vector<bool> win(n, true);

  // Outer loop: shrink to the states that reach a target through actions
  // that cannot leave the current set.
  while (true) {
    std::vector<bool> reach(n, false);
    for (StateId s = 0; s < n; ++s) reach[s] = p.is_target(s) && win[s];
    bool grew = true;
    while (grew) {
      grew = false;
      for (StateId s = 0; s < n; ++s) {
        if (reach[s] || !win[s]) continue;
        for (ActionId a = 0; a < m; ++a) {
          if (!stays_in(p, s, a, win)) continue;
          bool hits = false;
          for (const auto& [t, w] : p.transition(s, a).entries()) hits |= w > 0.0 && reach[t];
          if (hits) {
            reach[s] = true;
            grew = true;
            break;
          }
        }
      }
    }
    if (reach == win) break;
    win = reach;
  }

  MdpOracle o;
  o.winning = win;
  o.allowed.resize(n);
  for (StateId s = 0; s < n; ++s) {
    if (!win[s]) continue;
    for (ActionId a = 0; a < m; ++a) {
      if (stays_in(p, s, a, win)) o.allowed[s].push_back(a);
    }
  }

  // Value iteration from zero; positive costs make it converge to the
  // cheapest proper strategy.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> v(n, 0.0);
  for (std::size_t it = 0; it < 2'000'000; ++it) {
    double delta = 0.0;
    for (StateId s = 0; s < n; ++s) {
      if (!win[s] || p.is_target(s)) continue;
      double best = inf;
      for (ActionId a : o.allowed[s]) {
        double q = static_cast<double>(p.cost(s, a));
        for (const auto& [t, w] : p.transition(s, a).entries()) q += w * v[t];
        best = std::min(best, q);
      }
      delta = std::max(delta, std::abs(best - v[s]) / std::max(1.0, best));
      v[s] = best;
    }
    if (delta < 1e-14) break;
  }
  for (StateId s = 0; s < n; ++s) {
    if (!win[s]) v[s] = inf;
  }
  o.value = std::move(v);
  return o;
}

std::vector<double> uniform_allowed_cost(const Pomdp& p, const MdpOracle& o) {
  const std::size_t n = p.num_states();
  std::vector<double> v(n, 0.0);
  for (std::size_t it = 0; it < 5'000'000; ++it) {
    double delta = 0.0;
    for (StateId s = 0; s < n; ++s) {
      if (!o.winning[s] || p.is_target(s)) continue;
      double total = 0.0;
      for (ActionId a : o.allowed[s]) {
        double q = static_cast<double>(p.cost(s, a));
        for (const auto& [t, w] : p.transition(s, a).entries()) q += w * v[t];
        total += q;
      }
      total /= static_cast<double>(o.allowed[s].size());
      delta = std::max(delta, std::abs(total - v[s]) / std::max(1.0, total));
      v[s] = total;
    }
    if (delta < 1e-14) break;
  }
  for (StateId s = 0; s < n; ++s) {
    if (!o.winning[s]) v[s] = std::numeric_limits<double>::infinity();
  }
  return v;
}

double initial_value(const Pomdp& p, const MdpOracle& o) {
  double total = 0.0;
  for (const auto& [s, w] : p.initial().entries()) total += w * o.value[s];
  return total;
}

Pomdp random_fully_observable(std::uint64_t seed, std::size_t max_states) {
  std::mt19937_64 g(seed);
  const std::size_t n = std::uniform_int_distribution<std::size_t>(3, max_states)(g);
  const std::size_t m = std::uniform_int_distribution<std::size_t>(1, 3)(g);
  PomdpBuilder b(names("s", n), names("a", m), names("o", n));
  b.name("random-fo-" + std::to_string(seed));
  std::uniform_int_distribution<std::size_t> width(1, 3);
  std::uniform_int_distribution<std::int64_t> cost(1, 3);
  std::bernoulli_distribution to_target(0.3);
  std::bernoulli_distribution to_trap(0.05);
  for (StateId s = 0; s < n; ++s) b.observation(s, s);
  b.absorbing(0).absorbing(1);
  b.target(0).state_cost(0, 0);
  for (StateId s = 2; s < n; ++s) {
    for (ActionId a = 0; a < m; ++a) {
      const double target_mass = to_target(g) ? 0.2 : 0.0;
      const double trap_mass = to_trap(g) ? 0.1 : 0.0;
      std::vector<Distribution::Entry> entries = {{0, target_mass}, {1, trap_mass}};
      const Distribution spread = random_row(g, n, width(g));
      for (const auto& [t, w] : spread.entries()) {
        entries.emplace_back(t, w * (1.0 - target_mass - trap_mass));
      }
      auto d = Distribution::from_entries(std::move(entries));
      d.normalize();
      b.transition(s, a, std::move(d)).cost(s, a, cost(g));
    }
  }
  b.initial(Distribution::point(2));
  return b.build();
}

Pomdp random_pomdp(std::uint64_t seed) {
  std::mt19937_64 g(seed);
  const std::size_t n = std::uniform_int_distribution<std::size_t>(3, 6)(g);
  const std::size_t z = std::uniform_int_distribution<std::size_t>(1, 3)(g);
  PomdpBuilder b(names("s", n), {"a0", "a1"}, names("o", z + 1));
  b.name("random-po-" + std::to_string(seed));
  std::uniform_int_distribution<std::size_t> width(1, 3);
  std::uniform_int_distribution<std::int64_t> cost(1, 2);
  std::uniform_int_distribution<ObsId> obs(0, static_cast<ObsId>(z - 1));
  b.absorbing(0).target(0).state_cost(0, 0).observation(0, static_cast<ObsId>(z));
  std::vector<ObsId> obs_of(n, 0);
  for (StateId s = 1; s < n; ++s) {
    obs_of[s] = obs(g);
    b.observation(s, obs_of[s]);
    for (ActionId a = 0; a < 2; ++a) {
      b.transition(s, a, random_row(g, n, width(g))).cost(s, a, cost(g));
    }
  }
  // The initial states share one observation.
  std::vector<std::uint32_t> init = {1};
  if (n > 3 && std::bernoulli_distribution(0.5)(g)) {
    init.push_back(2);
    b.observation(2, obs_of[1]);
  }
  b.initial(Distribution::uniform(init));
  return b.build();
}

MeanEstimate restart_chain_f2(std::size_t trials, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  std::bernoulli_distribution coin(0.5);
  double sum = 0.0;
  double sq = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    double cost = 0.0;
    bool done = false;
    while (!done) {
      cost += 1.0;  // `#` from s0 into a loop head
      int steps = 0;
      while (steps < 5) {
        cost += 1.0;
        if (!coin(g)) break;
        ++steps;
      }
      if (steps < 5) continue;
      cost += 1.0;  // `#` at the common loop end
      done = coin(g);
    }
    sum += cost;
    sq += cost * cost;
  }
  const double n = static_cast<double>(trials);
  const double mean = sum / n;
  const double var = std::max(0.0, (sq - n * mean * mean) / (n - 1.0));
  return {mean, std::sqrt(var / n)};
}

}  // namespace surecost::testing
