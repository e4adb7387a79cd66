#include "surecost/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace surecost {

Distribution Distribution::from_entries(std::vector<Entry> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const Entry& x, const Entry& y) { return x.first < y.first; });
  Distribution d;
  for (const auto& [key, w] : entries) {
    if (!d.entries_.empty() && d.entries_.back().first == key) {
      d.entries_.back().second += w;
    } else {
      d.entries_.emplace_back(key, w);
    }
  }
  std::erase_if(d.entries_, [](const Entry& e) { return e.second == 0.0; });
  return d;
}

Distribution Distribution::point(std::uint32_t index) {
  Distribution d;
  d.entries_.emplace_back(index, 1.0);
  return d;
}

Distribution Distribution::uniform(std::span<const std::uint32_t> indices) {
  std::vector<Entry> entries;
  const double w = 1.0 / static_cast<double>(indices.size());
  for (auto i : indices) entries.emplace_back(i, w);
  return from_entries(std::move(entries));
}

double Distribution::mass() const {
  double m = 0.0;
  for (const auto& e : entries_) m += e.second;
  return m;
}

double Distribution::at(std::uint32_t index) const {
  auto it = std::lower_bound(
      entries_.begin(), entries_.end(), index,
      [](const Entry& e, std::uint32_t key) { return e.first < key; });
  return (it != entries_.end() && it->first == index) ? it->second : 0.0;
}

std::vector<std::uint32_t> Distribution::support() const {
  std::vector<std::uint32_t> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.first);
  return out;
}

void Distribution::normalize(double tolerance) {
  const double m = mass();
  if (std::abs(m - 1.0) > tolerance) {
    std::ostringstream os;
    os << "distribution mass " << m << " differs from 1";
    throw ModelError(os.str());
  }
  for (auto& e : entries_) e.second /= m;
}

std::string to_string(CostMode mode) {
  return mode == CostMode::kPositive ? "positive" : "general-integer";
}

CostMode cost_mode_from_string(const std::string& text) {
  if (text == "positive") return CostMode::kPositive;
  if (text == "general-integer") return CostMode::kGeneralInteger;
  throw ModelError("unknown cost mode '" + text + "'");
}

std::vector<StateId> Pomdp::targets() const {
  std::vector<StateId> out;
  for (StateId s = 0; s < num_states(); ++s) {
    if (target_[s]) out.push_back(s);
  }
  return out;
}

std::vector<StateId> Pomdp::states_with_observation(ObsId z) const {
  std::vector<StateId> out;
  for (StateId s = 0; s < num_states(); ++s) {
    if (obs_of_[s] == z) out.push_back(s);
  }
  return out;
}

namespace {

template <typename Id>
std::optional<Id> find_name(const std::vector<std::string>& names,
                            const std::string& name) {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) return std::nullopt;
  return static_cast<Id>(it - names.begin());
}

}  // namespace

std::optional<StateId> Pomdp::find_state(const std::string& name) const {
  return find_name<StateId>(state_names_, name);
}
std::optional<ActionId> Pomdp::find_action(const std::string& name) const {
  return find_name<ActionId>(action_names_, name);
}
std::optional<ObsId> Pomdp::find_observation(const std::string& name) const {
  return find_name<ObsId>(observation_names_, name);
}

PomdpBuilder::PomdpBuilder(std::vector<std::string> states,
                           std::vector<std::string> actions,
                           std::vector<std::string> observations) {
  const std::size_t n = states.size() * actions.size();
  pomdp_.state_names_ = std::move(states);
  pomdp_.action_names_ = std::move(actions);
  pomdp_.observation_names_ = std::move(observations);
  rows_.resize(n);
  pomdp_.trans_.resize(n);
  pomdp_.cost_.assign(n, 1);
  pomdp_.obs_of_.assign(pomdp_.num_states(), 0);
  pomdp_.target_.assign(pomdp_.num_states(), false);
}

PomdpBuilder& PomdpBuilder::name(std::string value) {
  pomdp_.name_ = std::move(value);
  return *this;
}

PomdpBuilder& PomdpBuilder::transition(StateId s, ActionId a, Distribution d) {
  auto& row = rows_[pomdp_.index(s, a)];
  row.assign(d.entries().begin(), d.entries().end());
  return *this;
}

PomdpBuilder& PomdpBuilder::add_transition(StateId s, ActionId a, StateId next,
                                           double p) {
  rows_[pomdp_.index(s, a)].emplace_back(next, p);
  return *this;
}

PomdpBuilder& PomdpBuilder::cost(StateId s, ActionId a, std::int64_t c) {
  pomdp_.cost_[pomdp_.index(s, a)] = c;
  return *this;
}

PomdpBuilder& PomdpBuilder::state_cost(StateId s, std::int64_t c) {
  for (ActionId a = 0; a < pomdp_.num_actions(); ++a) cost(s, a, c);
  return *this;
}

PomdpBuilder& PomdpBuilder::observation(StateId s, ObsId z) {
  pomdp_.obs_of_[s] = z;
  return *this;
}

PomdpBuilder& PomdpBuilder::observation_kernel(StateId s, ActionId a,
                                               Distribution d) {
  if (!pomdp_.obs_kernel_) {
    pomdp_.obs_kernel_.emplace(pomdp_.num_states() * pomdp_.num_actions());
  }
  (*pomdp_.obs_kernel_)[pomdp_.index(s, a)] = std::move(d);
  return *this;
}

PomdpBuilder& PomdpBuilder::initial_observation(ObsId z) {
  pomdp_.initial_obs_ = z;
  return *this;
}

PomdpBuilder& PomdpBuilder::target(StateId s, bool is_target) {
  pomdp_.target_[s] = is_target;
  return *this;
}

PomdpBuilder& PomdpBuilder::initial(Distribution d) {
  pomdp_.initial_ = std::move(d);
  return *this;
}

PomdpBuilder& PomdpBuilder::cost_mode(CostMode mode) {
  pomdp_.cost_mode_ = mode;
  return *this;
}

PomdpBuilder& PomdpBuilder::absorbing(StateId s) {
  for (ActionId a = 0; a < pomdp_.num_actions(); ++a) {
    transition(s, a, Distribution::point(s));
  }
  return *this;
}

Pomdp PomdpBuilder::build() const {
  Pomdp p = pomdp_;
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    p.trans_[i] = Distribution::from_entries(rows_[i]);
  }
  return p;
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    if (i) os << "; ";
    os << violations[i].message;
  }
  return os.str();
}

namespace {

std::string fmt_mass(double m) {
  std::ostringstream os;
  os.precision(12);
  os << m;
  return os.str();
}

void check_row(const Distribution& row, std::size_t bound, const char* what,
               std::optional<StateId> s, std::optional<ActionId> a,
               const Pomdp& p, std::vector<Violation>& out) {
  auto where = [&] {
    std::string w;
    if (s) w += " at state " + p.state_names()[*s];
    if (a) w += " action " + p.action_names()[*a];
    return w;
  };
  for (const auto& [key, w] : row.entries()) {
    if (w < 0.0) {
      out.push_back({"negative-probability",
                     std::string(what) + " has a negative entry" + where(), s, a});
    }
    if (key >= bound) {
      out.push_back({"index-range",
                     std::string(what) + " references an unknown index" + where(),
                     s, a});
    }
  }
  const double m = row.mass();
  if (std::abs(m - 1.0) > kMassTolerance) {
    out.push_back({"row-mass",
                   std::string(what) + " mass " + fmt_mass(m) + " != 1" + where(),
                   s, a});
  }
}

}  // namespace

ValidationReport validate(const Pomdp& p) {
  ValidationReport report;
  auto& out = report.violations;
  if (p.num_states() == 0) out.push_back({"empty", "model has no states", {}, {}});
  if (p.num_actions() == 0) out.push_back({"empty", "model has no actions", {}, {}});
  if (p.num_observations() == 0) {
    out.push_back({"empty", "model has no observations", {}, {}});
  }
  if (!out.empty()) return report;

  for (StateId s = 0; s < p.num_states(); ++s) {
    if (!p.has_observation_kernel() && p.observation(s) >= p.num_observations()) {
      out.push_back({"index-range",
                     "state " + p.state_names()[s] + " has an unknown observation",
                     s, {}});
    }
    for (ActionId a = 0; a < p.num_actions(); ++a) {
      check_row(p.transition(s, a), p.num_states(), "transition row", s, a, p, out);
      if (p.has_observation_kernel()) {
        check_row(p.observation_kernel(s, a), p.num_observations(),
                  "observation kernel row", s, a, p, out);
      }
      const auto c = p.cost(s, a);
      if (p.is_target(s)) {
        if (c != 0) {
          out.push_back({"target-cost",
                         "target cost nonzero at state " + p.state_names()[s] +
                             " action " + p.action_names()[a],
                         s, a});
        }
        if (std::abs(p.transition(s, a).at(s) - 1.0) > kMassTolerance) {
          out.push_back({"target-absorbing",
                         "target not absorbing at state " + p.state_names()[s] +
                             " action " + p.action_names()[a],
                         s, a});
        }
      } else if (p.cost_mode() == CostMode::kPositive && c < 1) {
        out.push_back({"nonpositive-cost",
                       "non-target cost below 1 at state " + p.state_names()[s] +
                           " action " + p.action_names()[a],
                       s, a});
      }
    }
  }

  const auto& init = p.initial();
  if (init.empty()) {
    out.push_back({"initial", "initial distribution is empty", {}, {}});
  } else {
    check_row(init, p.num_states(), "initial distribution", {}, {}, p, out);
    if (!p.has_observation_kernel()) {
      std::set<ObsId> seen;
      for (const auto& [s, w] : init.entries()) {
        if (s < p.num_states()) seen.insert(p.observation(s));
      }
      if (seen.size() > 1) {
        out.push_back({"initial-observation",
                       "initial support spans several observations", {}, {}});
      }
    } else if (p.initial_observation() >= p.num_observations()) {
      out.push_back({"index-range", "initial observation out of range", {}, {}});
    }
  }
  return report;
}

void require_valid(const Pomdp& p) {
  auto report = validate(p);
  if (!report.ok()) throw ModelError("invalid model: " + report.summary());
}

Pomdp determinize_observations(const Pomdp& p) {
  if (!p.has_observation_kernel()) {
    throw ModelError("determinize_observations needs an observation kernel");
  }
  for (StateId s = 0; s < p.num_states(); ++s) {
    for (ActionId a = 0; a < p.num_actions(); ++a) {
      if (std::abs(p.observation_kernel(s, a).mass() - 1.0) > kMassTolerance) {
        throw ModelError("observation kernel row at state " + p.state_names()[s] +
                         " action " + p.action_names()[a] + " does not sum to 1");
      }
    }
  }
  const auto nz = static_cast<StateId>(p.num_observations());
  auto lift = [nz](StateId s, ObsId z) { return s * nz + z; };

  std::vector<std::string> states;
  states.reserve(p.num_states() * nz);
  for (StateId s = 0; s < p.num_states(); ++s) {
    for (ObsId z = 0; z < nz; ++z) {
      states.push_back(p.state_names()[s] + "|" + p.observation_names()[z]);
    }
  }
  PomdpBuilder b(std::move(states), p.action_names(), p.observation_names());
  b.name(p.name()).cost_mode(p.cost_mode());
  for (StateId s = 0; s < p.num_states(); ++s) {
    for (ObsId z = 0; z < nz; ++z) {
      const StateId lifted = lift(s, z);
      b.observation(lifted, z).target(lifted, p.is_target(s));
      for (ActionId a = 0; a < p.num_actions(); ++a) {
        b.cost(lifted, a, p.cost(s, a));
        if (p.is_target(s)) {
          b.transition(lifted, a, Distribution::point(lifted));
          continue;
        }
        std::vector<Distribution::Entry> row;
        for (const auto& [next, pt] : p.transition(s, a).entries()) {
          for (const auto& [z2, po] : p.observation_kernel(next, a).entries()) {
            row.emplace_back(lift(next, z2), pt * po);
          }
        }
        b.transition(lifted, a, Distribution::from_entries(std::move(row)));
      }
    }
  }
  std::vector<Distribution::Entry> init;
  for (const auto& [s, w] : p.initial().entries()) {
    init.emplace_back(lift(s, p.initial_observation()), w);
  }
  b.initial(Distribution::from_entries(std::move(init)));
  return b.build();
}

Pomdp observe_targets(const Pomdp& p) {
  if (p.has_observation_kernel()) {
    throw ModelError("observe_targets needs deterministic observations");
  }
  const auto targets = p.targets();
  for (StateId t : targets) {
    for (ActionId a = 0; a < p.num_actions(); ++a) {
      if (p.cost(t, a) != 0 ||
          std::abs(p.transition(t, a).at(t) - 1.0) > kMassTolerance) {
        throw ModelError("target " + p.state_names()[t] +
                         " is not absorbing with zero cost");
      }
    }
  }
  {
    bool has_target = false, has_other = false;
    for (const auto& [s, w] : p.initial().entries()) {
      (p.is_target(s) ? has_target : has_other) = true;
    }
    if (has_target && has_other) {
      throw ModelError("initial support mixes target and non-target states");
    }
  }

  const std::size_t nz = p.num_observations();
  std::vector<bool> used_by_other(nz, false), used_by_target(nz, false);
  for (StateId s = 0; s < p.num_states(); ++s) {
    (p.is_target(s) ? used_by_target : used_by_other)[p.observation(s)] = true;
  }
  // Observations that only targets carried disappear; everything else keeps
  // its relative order and the fresh target observation goes last.
  std::vector<ObsId> remap(nz, 0);
  std::vector<std::string> names;
  for (ObsId z = 0; z < nz; ++z) {
    if (used_by_target[z] && !used_by_other[z]) continue;
    remap[z] = static_cast<ObsId>(names.size());
    names.push_back(p.observation_names()[z]);
  }
  const auto target_obs = static_cast<ObsId>(names.size());
  std::string fresh = "target";
  while (std::find(names.begin(), names.end(), fresh) != names.end()) {
    fresh += "'";
  }
  names.push_back(fresh);

  PomdpBuilder b(p.state_names(), p.action_names(), std::move(names));
  b.name(p.name()).cost_mode(p.cost_mode()).initial(p.initial());
  for (StateId s = 0; s < p.num_states(); ++s) {
    b.observation(s, p.is_target(s) ? target_obs : remap[p.observation(s)]);
    b.target(s, p.is_target(s));
    for (ActionId a = 0; a < p.num_actions(); ++a) {
      b.transition(s, a, p.transition(s, a));
      b.cost(s, a, p.cost(s, a));
    }
  }
  return b.build();
}

ScaledModel scale_costs(const Pomdp& p, std::span<const Rational> costs) {
  if (costs.size() != p.num_states() * p.num_actions()) {
    throw ModelError("cost table size does not match the model");
  }
  std::int64_t factor = 1;
  for (const auto& c : costs) {
    if (c.den <= 0) throw ModelError("cost denominators must be positive");
    const auto g = std::gcd(c.num, c.den);
    factor = std::lcm(factor, c.den / (g == 0 ? 1 : g));
  }
  PomdpBuilder b(p.state_names(), p.action_names(), p.observation_names());
  b.name(p.name()).cost_mode(p.cost_mode()).initial(p.initial());
  for (StateId s = 0; s < p.num_states(); ++s) {
    b.observation(s, p.observation(s)).target(s, p.is_target(s));
    for (ActionId a = 0; a < p.num_actions(); ++a) {
      const auto& c = costs[static_cast<std::size_t>(s) * p.num_actions() + a];
      const auto g = std::max<std::int64_t>(1, std::gcd(c.num, c.den));
      b.transition(s, a, p.transition(s, a));
      b.cost(s, a, (c.num / g) * (factor / (c.den / g)));
      if (p.has_observation_kernel()) {
        b.observation_kernel(s, a, p.observation_kernel(s, a));
      }
    }
  }
  if (p.has_observation_kernel()) b.initial_observation(p.initial_observation());
  return {b.build(), factor};
}

}  // namespace surecost
