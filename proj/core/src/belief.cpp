#include "surecost/belief.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace surecost {

namespace {

inline void hash_combine(std::size_t& seed, std::size_t v) {
  seed ^= v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
}

struct Mass {
  ObsId obs;
  StateId state;
  double weight;
};

// Unnormalized successor mass grouped by (observation, state). Each state's
// mass is summed in iteration order, so results are bit-reproducible.
std::vector<Mass> propagate(const Pomdp& p, const BeliefPoint& b, ActionId a) {
  thread_local std::vector<double> acc;
  thread_local std::vector<std::uint8_t> seen;
  if (acc.size() < p.num_states()) {
    acc.assign(p.num_states(), 0.0);
    seen.assign(p.num_states(), 0);
  }
  std::vector<Mass> out;
  for (const auto& [s, w] : b.entries()) {
    for (const auto& [next, pr] : p.transition(s, a).entries()) {
      if (!seen[next]) {
        seen[next] = 1;
        acc[next] = w * pr;
        out.push_back({p.observation(next), next, 0.0});
      } else {
        acc[next] += w * pr;
      }
    }
  }
  // Bucket by observation, then order each bucket by state.
  std::vector<std::size_t> start(p.num_observations() + 1, 0);
  for (const auto& m : out) ++start[m.obs + 1];
  for (std::size_t z = 0; z < p.num_observations(); ++z) start[z + 1] += start[z];
  std::vector<Mass> grouped(out.size());
  std::vector<std::size_t> fill(start.begin(), start.end() - 1);
  for (const auto& m : out) {
    grouped[fill[m.obs]++] = {m.obs, m.state, acc[m.state]};
    seen[m.state] = 0;
  }
  for (std::size_t z = 0; z < p.num_observations(); ++z) {
    std::sort(grouped.begin() + static_cast<std::ptrdiff_t>(start[z]),
              grouped.begin() + static_cast<std::ptrdiff_t>(start[z + 1]),
              [](const Mass& x, const Mass& y) { return x.state < y.state; });
  }
  return grouped;
}

}  // namespace

BeliefSupport::BeliefSupport(std::vector<StateId> states) : states_(std::move(states)) {
  std::sort(states_.begin(), states_.end());
  states_.erase(std::unique(states_.begin(), states_.end()), states_.end());
}

bool BeliefSupport::contains(StateId s) const {
  return std::binary_search(states_.begin(), states_.end(), s);
}

std::size_t BeliefSupportHash::operator()(const BeliefSupport& u) const noexcept {
  std::size_t seed = u.size();
  for (auto s : u.states()) hash_combine(seed, s);
  return seed;
}

std::size_t BeliefKeyHash::operator()(const BeliefKey& k) const noexcept {
  std::size_t seed = k.entries.size();
  for (const auto& [s, q] : k.entries) {
    hash_combine(seed, s);
    hash_combine(seed, static_cast<std::size_t>(q));
  }
  return seed;
}

BeliefPoint::BeliefPoint(const Distribution& d) {
  for (const auto& [s, w] : d.entries()) {
    if (w > 0.0) entries_.emplace_back(s, w);
  }
}

BeliefPoint BeliefPoint::from_sorted(std::vector<Entry> entries) {
  BeliefPoint b;
  b.entries_ = std::move(entries);
  return b;
}

double BeliefPoint::at(StateId s) const {
  auto it = std::lower_bound(
      entries_.begin(), entries_.end(), s,
      [](const Entry& e, StateId key) { return e.first < key; });
  return (it != entries_.end() && it->first == s) ? it->second : 0.0;
}

BeliefSupport BeliefPoint::support() const {
  std::vector<StateId> states;
  states.reserve(entries_.size());
  for (const auto& e : entries_) states.push_back(e.first);
  return BeliefSupport(std::move(states));
}

BeliefKey BeliefPoint::key() const {
  BeliefKey k;
  k.entries.reserve(entries_.size());
  for (const auto& [s, w] : entries_) {
    k.entries.emplace_back(s, std::llround(w * kBeliefKeyScale));
  }
  return k;
}

double expected_cost(const Pomdp& p, const BeliefPoint& b, ActionId a) {
  double c = 0.0;
  for (const auto& [s, w] : b.entries()) c += w * static_cast<double>(p.cost(s, a));
  return c;
}

double obs_likelihood(const Pomdp& p, const BeliefPoint& b, ActionId a, ObsId z) {
  double lik = 0.0;
  for (const auto& m : propagate(p, b, a)) {
    if (m.obs == z) lik += m.weight;
  }
  return lik;
}

std::vector<ObservationBranch> branch(const Pomdp& p, const BeliefPoint& b,
                                      ActionId a) {
  const auto mass = propagate(p, b, a);
  std::vector<ObservationBranch> out;
  std::size_t i = 0;
  while (i < mass.size()) {
    std::size_t j = i;
    double lik = 0.0;
    while (j < mass.size() && mass[j].obs == mass[i].obs) lik += mass[j++].weight;
    if (lik > 0.0) {
      std::vector<BeliefPoint::Entry> entries;
      entries.reserve(j - i);
      for (std::size_t t = i; t < j; ++t) {
        entries.emplace_back(mass[t].state, mass[t].weight / lik);
      }
      out.push_back({mass[i].obs, lik, BeliefPoint::from_sorted(std::move(entries))});
    }
    i = j;
  }
  return out;
}

BeliefPoint update_point(const Pomdp& p, const BeliefPoint& b, ActionId a, ObsId z) {
  for (auto& br : branch(p, b, a)) {
    if (br.observation == z) return std::move(br.belief);
  }
  throw DomainError("observation " + p.observation_names()[z] +
                    " has zero likelihood under action " + p.action_names()[a]);
}

std::vector<SupportBranch> support_branches(const Pomdp& p, const BeliefSupport& u,
                                            ActionId a) {
  std::vector<std::pair<ObsId, StateId>> reach;
  for (StateId s : u.states()) {
    for (const auto& [next, pr] : p.transition(s, a).entries()) {
      if (pr > 0.0) reach.emplace_back(p.observation(next), next);
    }
  }
  std::sort(reach.begin(), reach.end());
  reach.erase(std::unique(reach.begin(), reach.end()), reach.end());
  std::vector<SupportBranch> out;
  std::size_t i = 0;
  while (i < reach.size()) {
    std::vector<StateId> states;
    std::size_t j = i;
    while (j < reach.size() && reach[j].first == reach[i].first) {
      states.push_back(reach[j++].second);
    }
    out.push_back({reach[i].first, BeliefSupport(std::move(states))});
    i = j;
  }
  return out;
}

std::optional<BeliefSupport> update_support(const Pomdp& p, const BeliefSupport& u,
                                            ActionId a, ObsId z) {
  for (auto& br : support_branches(p, u, a)) {
    if (br.observation == z) return std::move(br.support);
  }
  return std::nullopt;
}

std::vector<BeliefSupport> successors(const Pomdp& p, const BeliefSupport& u,
                                      ActionId a) {
  std::vector<BeliefSupport> out;
  for (auto& br : support_branches(p, u, a)) out.push_back(std::move(br.support));
  return out;
}

std::string describe(const Pomdp& p, const BeliefSupport& u) {
  std::string out = "{";
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (i) out += ",";
    out += p.state_names()[u.states()[i]];
  }
  return out + "}";
}

}  // namespace surecost
