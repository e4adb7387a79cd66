#include "surecost/generators.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>

#include "surecost/random.hpp"

namespace surecost {

namespace {

std::vector<std::uint32_t> to_ids(const Pomdp& p, std::span<const std::string> word) {
  std::vector<std::uint32_t> ids;
  ids.reserve(word.size());
  for (const auto& name : word) {
    auto a = p.find_action(name);
    if (!a) throw Error("unknown action '" + name + "' in word");
    ids.push_back(*a);
  }
  return ids;
}

// Wall pattern of a grid cell in the given direction order, e.g. "NW".
struct Maze {
  int rows = 0;
  int cols = 0;
  std::vector<int> cell;  // row-major; -1 blocked, else state id

  bool open(int r, int c) const {
    return r >= 0 && c >= 0 && r < rows && c < cols && cell[r * cols + c] >= 0;
  }
};

constexpr int kDr[4] = {-1, 0, 1, 0};  // n e s w
constexpr int kDc[4] = {0, 1, 0, -1};
constexpr char kDirName[4] = {'N', 'E', 'S', 'W'};

}  // namespace

std::optional<std::uint32_t> Pfa::find_letter(const std::string& name) const {
  for (std::uint32_t i = 0; i < alphabet.size(); ++i) {
    if (alphabet[i] == name) return i;
  }
  return std::nullopt;
}

void validate_pfa(const Pfa& pfa) {
  if (pfa.states.empty()) throw ModelError("PFA has no states");
  if (pfa.initial >= pfa.num_states()) throw ModelError("PFA initial state out of range");
  if (pfa.final.size() != pfa.num_states() || pfa.delta.size() != pfa.num_states()) {
    throw ModelError("PFA tables do not match the state count");
  }
  for (std::size_t s = 0; s < pfa.num_states(); ++s) {
    if (pfa.delta[s].size() != pfa.alphabet.size()) {
      throw ModelError("PFA row of " + pfa.states[s] + " does not match the alphabet");
    }
    for (std::size_t a = 0; a < pfa.alphabet.size(); ++a) {
      const auto& d = pfa.delta[s][a];
      if (d.empty()) continue;
      for (const auto& [t, w] : d.entries()) {
        if (t >= pfa.num_states() || w < 0.0) {
          throw ModelError("PFA row (" + pfa.states[s] + ", " + pfa.alphabet[a] + ") is invalid");
        }
      }
      if (std::fabs(d.mass() - 1.0) > kMassTolerance) {
        throw ModelError("PFA row (" + pfa.states[s] + ", " + pfa.alphabet[a] +
                         ") has mass " + std::to_string(d.mass()));
      }
    }
  }
}

Pfa example_pfa() {
  Pfa pfa;
  pfa.states = {"s0", "s"};
  pfa.alphabet = {"a", "b"};
  pfa.delta.assign(2, std::vector<Distribution>(2));
  pfa.delta[0][0] = Distribution::point(1);
  pfa.delta[1][1] = Distribution::point(1);
  pfa.final = {false, true};
  pfa.initial = 0;
  return pfa;
}

double pfa_accept(const Pfa& pfa, std::span<const std::string> word) {
  validate_pfa(pfa);
  std::vector<double> v(pfa.num_states(), 0.0);
  v[pfa.initial] = 1.0;
  for (const auto& name : word) {
    auto a = pfa.find_letter(name);
    if (!a) throw Error("letter '" + name + "' is not in the alphabet");
    std::vector<double> next(pfa.num_states(), 0.0);
    for (std::size_t s = 0; s < v.size(); ++s) {
      if (v[s] == 0.0) continue;
      for (const auto& [t, w] : pfa.delta[s][*a].entries()) next[t] += v[s] * w;
    }
    v = std::move(next);
  }
  double acc = 0.0;
  for (std::size_t s = 0; s < v.size(); ++s) {
    if (pfa.final[s]) acc += v[s];
  }
  return acc;
}

Pomdp gen_reduction(const Pfa& pfa) {
  validate_pfa(pfa);
  const std::size_t m = pfa.alphabet.size();
  bool needs_reject = false;
  for (const auto& row : pfa.delta) {
    for (const auto& d : row) needs_reject = needs_reject || d.empty();
  }
  const std::size_t n = pfa.num_states() + (needs_reject ? 1 : 0);
  const StateId reject = static_cast<StateId>(pfa.num_states());
  auto pfa_name = [&](std::size_t s) {
    return s < pfa.num_states() ? pfa.states[s] : std::string("reject");
  };
  auto is_final = [&](std::size_t s) { return s < pfa.num_states() && pfa.final[s]; };
  auto row = [&](std::size_t s, std::size_t a) {
    if (s >= pfa.num_states() || pfa.delta[s][a].empty()) return Distribution::point(reject);
    return pfa.delta[s][a];
  };

  // (s,1) -> 2s, (s,-1) -> 2s+1.
  std::vector<std::string> states;
  for (std::size_t s = 0; s < n; ++s) {
    states.push_back("(" + pfa_name(s) + ",1)");
    states.push_back("(" + pfa_name(s) + ",-1)");
  }
  const StateId good = static_cast<StateId>(2 * n);
  const StateId bad = good + 1;
  const StateId target = good + 2;
  const StateId lose = good + 3;
  states.insert(states.end(), {"good", "bad", "target", "lose"});

  std::vector<std::string> actions = pfa.alphabet;
  const ActionId hash = static_cast<ActionId>(m);
  const ActionId dollar = hash + 1;
  const ActionId root = hash + 2;
  actions.insert(actions.end(), {"#", "$", "√"});

  PomdpBuilder b(states, actions, {"o"});
  b.name("reduction").cost_mode(CostMode::kGeneralInteger);
  const StateId start = 2 * pfa.initial;
  for (StateId s = 0; s < states.size(); ++s) {
    for (ActionId a = 0; a < actions.size(); ++a) b.transition(s, a, Distribution::point(lose));
  }
  for (std::size_t s = 0; s < n; ++s) {
    const auto up = static_cast<StateId>(2 * s);
    const auto down = up + 1;
    b.transition(up, dollar, Distribution::point(down));
    for (std::size_t a = 0; a < m; ++a) {
      const Distribution next = row(s, a);
      std::vector<Distribution::Entry> entries;
      for (const auto& [t, w] : next.entries()) entries.emplace_back(2 * t, w);
      b.transition(down, static_cast<ActionId>(a), Distribution::from_entries(entries));
    }
    b.transition(down, hash, Distribution::point(is_final(s) ? good : bad));
    b.state_cost(up, 1).state_cost(down, -1);
  }
  b.transition(good, hash, Distribution::point(start));
  b.transition(bad, hash, Distribution::point(start));
  b.transition(start, root, Distribution::point(target));
  b.absorbing(target).absorbing(lose);
  b.state_cost(good, -1).state_cost(bad, 1).state_cost(target, 0).state_cost(lose, 1);
  b.target(target);
  b.initial(Distribution::point(start));
  return b.build();
}

std::vector<std::string> reduction_strategy_word(std::span<const std::string> w,
                                                 std::size_t k) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < k; ++i) {
    for (const auto& letter : w) {
      out.push_back("$");
      out.push_back(letter);
    }
    out.insert(out.end(), {"$", "#", "#"});
  }
  out.push_back("√");
  return out;
}

double eval_word(const Pomdp& p, std::span<const std::string> word) {
  auto ids = to_ids(p, word);
  return eval_word(p, std::span<const ActionId>(ids));
}

double eval_word(const Pomdp& p, std::span<const ActionId> word) {
  std::optional<ObsId> shared;
  for (StateId s = 0; s < p.num_states(); ++s) {
    if (p.is_target(s)) continue;
    if (shared && *shared != p.observation(s)) {
      throw Error("eval_word needs a model whose non-target states share one observation");
    }
    shared = p.observation(s);
  }
  std::vector<double> d(p.num_states(), 0.0);
  for (const auto& [s, w] : p.initial().entries()) d[s] = w;
  double total = 0.0;
  for (ActionId a : word) {
    if (a >= p.num_actions()) throw Error("action index out of range in word");
    std::vector<double> next(p.num_states(), 0.0);
    for (StateId s = 0; s < d.size(); ++s) {
      if (d[s] == 0.0) continue;
      total += d[s] * static_cast<double>(p.cost(s, a));
      for (const auto& [t, w] : p.transition(s, a).entries()) next[t] += d[s] * w;
    }
    d = std::move(next);
  }
  return total;
}

Pomdp gen_toy() {
  PomdpBuilder b({"s0", "T", "B"}, {"risky", "safe"}, {"s0", "T", "B"});
  b.name("toy");
  b.add_transition(0, 0, 1, 0.5).add_transition(0, 0, 2, 0.5);
  b.add_transition(0, 1, 1, 0.5).add_transition(0, 1, 0, 0.5);
  b.absorbing(1).absorbing(2);
  b.observation(0, 0).observation(1, 1).observation(2, 2);
  b.target(1).state_cost(1, 0);
  b.initial(Distribution::point(0));
  return b.build();
}

Pomdp gen_toy_risky() {
  PomdpBuilder b({"s0", "T", "B"}, {"risky"}, {"s0", "T", "B"});
  b.name("toy-risky");
  b.add_transition(0, 0, 1, 0.5).add_transition(0, 0, 2, 0.5);
  b.absorbing(1).absorbing(2);
  b.observation(0, 0).observation(1, 1).observation(2, 2);
  b.target(1).state_cost(1, 0);
  b.initial(Distribution::point(0));
  return b.build();
}

std::vector<std::size_t> first_primes(std::size_t n) {
  std::vector<std::size_t> primes;
  for (std::size_t c = 2; primes.size() < n; ++c) {
    bool prime = true;
    for (auto q : primes) {
      if (q * q > c) break;
      if (c % q == 0) {
        prime = false;
        break;
      }
    }
    if (prime) primes.push_back(c);
  }
  return primes;
}

Pomdp gen_lower_bound(std::size_t n) {
  if (n == 0) throw Error("lower-bound family needs n >= 1");
  const auto primes = first_primes(n);
  std::vector<std::string> states = {"s0", "bad", "target"};
  std::vector<StateId> head;
  for (std::size_t i = 0; i < n; ++i) {
    head.push_back(static_cast<StateId>(states.size()));
    for (std::size_t j = 1; j <= primes[i]; ++j) {
      states.push_back("q" + std::to_string(i + 1) + "_" + std::to_string(j));
    }
  }
  PomdpBuilder b(states, {"a", "#"}, {"s0", "bad", "target", "z"});
  b.name("F(" + std::to_string(n) + ")");
  const ActionId a = 0;
  const ActionId hash = 1;
  b.transition(0, a, Distribution::point(1));
  for (std::size_t i = 0; i < n; ++i) b.add_transition(0, hash, head[i], 1.0 / static_cast<double>(n));
  b.absorbing(1).absorbing(2);
  b.observation(0, 0).observation(1, 1).observation(2, 2);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t len = primes[i];
    for (std::size_t j = 0; j < len; ++j) {
      const auto q = static_cast<StateId>(head[i] + j);
      const auto next = static_cast<StateId>(head[i] + (j + 1) % len);
      b.observation(q, 3);
      b.add_transition(q, a, next, 0.5).add_transition(q, a, 0, 0.5);
      if (j + 1 == len) {
        b.add_transition(q, hash, 2, 0.5).add_transition(q, hash, 0, 0.5);
      } else {
        b.transition(q, hash, Distribution::point(1));
      }
    }
  }
  b.target(2).state_cost(2, 0);
  b.initial(Distribution::point(0));
  return b.build();
}

Pomdp gen_grid(CostVariant costs) {
  // Row-major 3x4 with (1,1) blocked; state 3 is the goal, 6 the trap.
  Maze mz{3, 4, {0, 1, 2, 3, 4, -1, 5, 6, 7, 8, 9, 10}};
  const StateId goal = 3;
  const StateId trap = 6;
  std::vector<std::string> states;
  for (int i = 0; i < 11; ++i) states.push_back(std::to_string(i));
  PomdpBuilder b(states, {"n", "e", "s", "w"}, {"none", "W", "E", "EW", "goal", "trap"});
  b.name(costs == CostVariant::kUnit ? "grid" : "grid-weighted");
  for (int r = 0; r < mz.rows; ++r) {
    for (int c = 0; c < mz.cols; ++c) {
      const int id = mz.cell[r * mz.cols + c];
      if (id < 0) continue;
      const auto s = static_cast<StateId>(id);
      if (s == goal || s == trap) continue;
      auto dest = [&](int d) {
        int nr = r + kDr[d];
        int nc = c + kDc[d];
        return mz.open(nr, nc) ? static_cast<StateId>(mz.cell[nr * mz.cols + nc]) : s;
      };
      for (int d = 0; d < 4; ++d) {
        const auto a = static_cast<ActionId>(d);
        b.add_transition(s, a, dest(d), 0.96);
        b.add_transition(s, a, dest((d + 1) % 4), 0.02);
        b.add_transition(s, a, dest((d + 3) % 4), 0.02);
      }
      const bool west = !mz.open(r, c - 1);
      const bool east = !mz.open(r, c + 1);
      b.observation(s, static_cast<ObsId>((west ? 1 : 0) + (east ? 2 : 0)));
    }
  }
  b.absorbing(goal).absorbing(trap);
  b.observation(goal, 4).observation(trap, 5);
  b.target(goal).state_cost(goal, 0);
  if (costs == CostVariant::kWeighted) {
    for (StateId s : {0u, 1u, 4u, 7u, 8u}) b.state_cost(s, 2);
  }
  b.initial(Distribution::point(0));
  return b.build();
}

Pomdp gen_cheese(CheeseSize size, CostVariant costs) {
  const int width = size == CheeseSize::kSmall ? 5 : 7;
  const int goal_col = size == CheeseSize::kSmall ? 2 : 4;
  // Row 0: baseline; row 1: arm cells under every even column; row 2: the
  // goal under goal_col, traps under the other arms.
  Maze mz{3, width, std::vector<int>(static_cast<std::size_t>(3 * width), -1)};
  std::vector<std::string> states = {"start"};
  for (int c = 0; c < width; ++c) {
    mz.cell[c] = static_cast<int>(states.size());
    states.push_back(std::to_string(c));
  }
  int next_label = width;
  for (int c = 0; c < width; c += 2) {
    mz.cell[width + c] = static_cast<int>(states.size());
    states.push_back(std::to_string(next_label++));
  }
  int traps = 0;
  for (int c = 0; c < width; c += 2) {
    mz.cell[2 * width + c] = static_cast<int>(states.size());
    states.push_back(c == goal_col ? std::string("goal") : "trap" + std::to_string(++traps));
  }

  std::vector<std::string> obs_names;
  std::map<std::string, ObsId> obs_index;
  auto obs = [&](const std::string& name) {
    auto [it, inserted] = obs_index.try_emplace(name, static_cast<ObsId>(obs_names.size()));
    if (inserted) obs_names.push_back(name);
    return it->second;
  };
  std::vector<ObsId> obs_of(states.size());
  obs_of[0] = obs("start");
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < width; ++c) {
      const int id = mz.cell[r * width + c];
      if (id < 0) continue;
      std::string walls;
      for (int d = 0; d < 4; ++d) {
        if (!mz.open(r + kDr[d], c + kDc[d])) walls += kDirName[d];
      }
      obs_of[static_cast<std::size_t>(id)] = obs(walls);
    }
  }
  obs("trap");
  obs("goal");

  PomdpBuilder b(states, {"n", "e", "s", "w"}, obs_names);
  b.name(std::string(size == CheeseSize::kSmall ? "cheese-small" : "cheese-large") +
         (costs == CostVariant::kUnit ? "" : "-weighted"));
  // The start spreads over five baseline cells: all of them in the small
  // maze, all but the two ends in the large one.
  const int first = size == CheeseSize::kSmall ? 0 : 1;
  for (int d = 0; d < 4; ++d) {
    for (int c = first; c < first + 5; ++c) {
      b.add_transition(0, static_cast<ActionId>(d), static_cast<StateId>(1 + c), 0.2);
    }
  }
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < width; ++c) {
      const int id = mz.cell[r * width + c];
      if (id < 0) continue;
      const auto s = static_cast<StateId>(id);
      if (r == 2) {
        b.absorbing(s);
        const bool goal = c == goal_col;
        b.observation(s, obs_index.at(goal ? "goal" : "trap"));
        if (goal) b.target(s).state_cost(s, 0);
        continue;
      }
      b.observation(s, obs_of[s]);
      for (int d = 0; d < 4; ++d) {
        int nr = r + kDr[d];
        int nc = c + kDc[d];
        StateId dest = mz.open(nr, nc) ? static_cast<StateId>(mz.cell[nr * width + nc]) : s;
        b.transition(s, static_cast<ActionId>(d), Distribution::point(dest));
      }
      if (costs == CostVariant::kWeighted && r == 0) b.state_cost(s, 2);
    }
  }
  b.observation(0, obs_of[0]);
  b.initial(Distribution::point(0));
  return b.build();
}

Pomdp gen_robot(RobotVariant variant, CostVariant costs) {
  // Cells (row, col): 1 = (1,0), 2 = (1,1), 3 = (0,1), goal = (0,2).
  const int cell_row[3] = {1, 1, 0};
  const int cell_col[3] = {0, 1, 1};
  // Open sides per cell, indexed n e s w.
  const bool open[3][4] = {{false, true, false, false},
                           {true, false, false, true},
                           {false, true, true, false}};
  auto cell_at = [&](int r, int c) -> int {
    for (int i = 0; i < 3; ++i) {
      if (cell_row[i] == r && cell_col[i] == c) return i;
    }
    return -1;
  };

  std::vector<std::string> states = {"start", "damaged", "goal"};
  for (int i = 0; i < 3; ++i) {
    for (int o = 0; o < 4; ++o) states.push_back(std::to_string(i + 1) + kDirName[o]);
  }
  auto pose = [](int cell, int o) { return static_cast<StateId>(3 + 4 * cell + o); };

  std::vector<std::string> obs_names = {"start", "damaged", "goal"};
  std::map<std::string, ObsId> obs_index;
  std::vector<ObsId> obs_of(states.size());
  obs_of[0] = 0;
  obs_of[1] = 1;
  obs_of[2] = 2;
  for (int i = 0; i < 3; ++i) {
    for (int o = 0; o < 4; ++o) {
      // Walls seen front, right, back, left.
      std::string view;
      for (int rel = 0; rel < 4; ++rel) view += open[i][(o + rel) % 4] ? 'o' : 'w';
      auto [it, inserted] = obs_index.try_emplace(view, static_cast<ObsId>(obs_names.size()));
      if (inserted) obs_names.push_back(view);
      obs_of[pose(i, o)] = it->second;
    }
  }

  PomdpBuilder b(states, {"f", "l", "r"}, obs_names);
  std::string name = variant == RobotVariant::kDeterministic ? "robot-det" : "robot-ran";
  if (costs == CostVariant::kWeighted) name += "-weighted";
  b.name(name);
  for (StateId s = 0; s < states.size(); ++s) b.observation(s, obs_of[s]);
  for (ActionId a = 0; a < 3; ++a) {
    for (int o = 0; o < 4; ++o) b.add_transition(0, a, pose(0, o), 0.25);
  }
  const double fail = variant == RobotVariant::kRandom ? 0.04 : 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int o = 0; o < 4; ++o) {
      const StateId s = pose(i, o);
      StateId forward = 1;
      if (open[i][o]) {
        int r = cell_row[i] + kDr[o];
        int c = cell_col[i] + kDc[o];
        int j = cell_at(r, c);
        forward = j >= 0 ? pose(j, o) : 2;
      }
      const StateId targets[3] = {forward, pose(i, (o + 3) % 4), pose(i, (o + 1) % 4)};
      for (ActionId a = 0; a < 3; ++a) {
        b.add_transition(s, a, targets[a], 1.0 - fail);
        if (fail > 0.0) b.add_transition(s, a, s, fail);
      }
    }
  }
  b.absorbing(1).absorbing(2);
  b.target(2).state_cost(2, 0);
  if (costs == CostVariant::kWeighted) {
    for (StateId s = 0; s < states.size(); ++s) {
      if (s == 2) continue;
      b.cost(s, 1, 2).cost(s, 2, 2);
    }
  }
  b.initial(Distribution::point(0));
  return b.build();
}

Pomdp gen_rocksample(std::size_t n, std::size_t k, const RockSampleOptions& options) {
  if (n == 0) throw Error("RockSample needs a positive map size");
  if (k > 16) throw Error("RockSample supports at most 16 rocks");
  std::vector<std::pair<int, int>> rocks = options.rocks;
  if (rocks.empty()) {
    if (k > n * n) throw Error("more rocks than map cells");
    Rng rng(options.seed);
    std::set<std::pair<int, int>> used;
    while (rocks.size() < k) {
      std::pair<int, int> cell{static_cast<int>(rng.pick(n)), static_cast<int>(rng.pick(n))};
      if (used.insert(cell).second) rocks.push_back(cell);
    }
  }
  if (rocks.size() != k) throw Error("rock list does not match the rock count");
  const int ni = static_cast<int>(n);
  std::set<std::pair<int, int>> distinct;
  for (const auto& [x, y] : rocks) {
    if (x < 0 || y < 0 || x >= ni || y >= ni) throw Error("rock outside the map");
    if (!distinct.insert({x, y}).second) throw Error("two rocks share a cell");
  }
  const std::size_t configs = std::size_t{1} << k;
  auto state_of = [&](int x, int y, std::size_t mask) {
    return static_cast<StateId>((static_cast<std::size_t>(x) * n + static_cast<std::size_t>(y)) * configs + mask);
  };
  const auto exit = static_cast<StateId>(n * n * configs);
  auto rock_at = [&](int x, int y) -> int {
    for (std::size_t i = 0; i < rocks.size(); ++i) {
      if (rocks[i].first == x && rocks[i].second == y) return static_cast<int>(i);
    }
    return -1;
  };

  std::vector<std::string> states;
  states.reserve(exit + 1);
  for (int x = 0; x < ni; ++x) {
    for (int y = 0; y < ni; ++y) {
      for (std::size_t mask = 0; mask < configs; ++mask) {
        std::string bits;
        for (std::size_t i = 0; i < k; ++i) bits += (mask >> i) & 1 ? 'G' : 'B';
        states.push_back("x" + std::to_string(x) + "y" + std::to_string(y) + (k ? "r" + bits : ""));
      }
    }
  }
  states.push_back("exit");
  std::vector<std::string> actions = {"N", "S", "E", "W", "sample"};
  for (std::size_t i = 0; i < k; ++i) actions.push_back("check" + std::to_string(i + 1));
  const ObsId good = 0;
  const ObsId bad = 1;

  PomdpBuilder b(states, actions, {"good", "bad"});
  b.name("rocksample-" + std::to_string(n) + "-" + std::to_string(k));
  for (int x = 0; x < ni; ++x) {
    for (int y = 0; y < ni; ++y) {
      for (std::size_t mask = 0; mask < configs; ++mask) {
        const StateId s = state_of(x, y, mask);
        b.observation(s, bad);
        // n s e w
        const int dx[4] = {0, 0, 1, -1};
        const int dy[4] = {1, -1, 0, 0};
        for (ActionId a = 0; a < 4; ++a) {
          int nx = x + dx[a];
          int ny = y + dy[a];
          if (nx >= ni) {
            b.transition(s, a, Distribution::point(exit)).cost(s, a, 50);
          } else if (nx < 0 || ny < 0 || ny >= ni) {
            b.transition(s, a, Distribution::point(s)).cost(s, a, 100);
          } else {
            b.transition(s, a, Distribution::point(state_of(nx, ny, mask))).cost(s, a, 50);
          }
        }
        const int r = rock_at(x, y);
        if (r >= 0 && ((mask >> r) & 1)) {
          b.transition(s, 4, Distribution::point(state_of(x, y, mask & ~(std::size_t{1} << r))))
              .cost(s, 4, 1);
        } else {
          b.transition(s, 4, Distribution::point(s)).cost(s, 4, 50);
        }
        for (std::size_t i = 0; i < k; ++i) {
          b.transition(s, static_cast<ActionId>(5 + i), Distribution::point(s))
              .cost(s, static_cast<ActionId>(5 + i), 1);
        }
      }
    }
  }
  b.absorbing(exit).observation(exit, bad).target(exit).state_cost(exit, 0);

  // Observation law on entering a state: checks read the rock, everything
  // else reports the fixed observation.
  for (StateId s = 0; s <= exit; ++s) {
    for (ActionId a = 0; a < actions.size(); ++a) {
      if (a < 5 || s == exit) {
        b.observation_kernel(s, a, Distribution::point(bad));
        continue;
      }
      const std::size_t i = a - 5;
      const std::size_t cell = s / configs;
      const int x = static_cast<int>(cell / n);
      const int y = static_cast<int>(cell % n);
      const double dist = std::hypot(x - rocks[i].first, y - rocks[i].second);
      const double eta = std::pow(2.0, -dist / options.d0);
      const double correct = 0.5 * (1.0 + eta);
      const bool is_good = (s % configs >> i) & 1;
      std::vector<Distribution::Entry> e = {{good, is_good ? correct : 1.0 - correct},
                                            {bad, is_good ? 1.0 - correct : correct}};
      b.observation_kernel(s, a, Distribution::from_entries(e));
    }
  }
  b.initial_observation(bad);
  std::vector<Distribution::Entry> init;
  for (std::size_t mask = 0; mask < configs; ++mask) {
    init.emplace_back(state_of(0, ni / 2, mask), 1.0 / static_cast<double>(configs));
  }
  b.initial(Distribution::from_entries(init));
  return b.build();
}

}  // namespace surecost
