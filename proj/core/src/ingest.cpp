#include "surecost/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

namespace surecost {

using nlohmann::json;

SyntaxError::SyntaxError(const std::string& message, std::size_t line, std::size_t column)
    : Error(line ? message + " at line " + std::to_string(line) + ", column " +
                       std::to_string(column)
                 : message),
      line_(line),
      column_(column) {}

namespace {

std::pair<std::size_t, std::size_t> line_col(std::string_view text, std::size_t offset) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < std::min(offset, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    auto [line, col] = line_col(text, e.byte > 0 ? e.byte - 1 : 0);
    std::string what = e.what();
    auto pos = what.find("syntax error");
    throw SyntaxError(pos == std::string::npos ? what : what.substr(pos), line, col);
  }
}

// Name -> index for one category, rejecting duplicates.
std::map<std::string, std::uint32_t> name_index(std::string_view text, const json& list,
                                                const std::string& key,
                                                const std::string& what) {
  if (!list.is_array()) throw SyntaxError("'" + key + "' must be an array of names");
  std::map<std::string, std::uint32_t> index;
  for (std::uint32_t i = 0; i < list.size(); ++i) {
    if (!list[i].is_string()) throw SyntaxError("'" + key + "' must be an array of names");
    auto name = list[i].get<std::string>();
    if (!index.emplace(name, i).second) {
      // Locate the second occurrence inside the list for the message.
      std::size_t line = 0;
      std::size_t col = 0;
      auto start = text.find("\"" + key + "\"");
      if (start != std::string_view::npos) {
        const std::string quoted = json(name).dump();
        auto first = text.find(quoted, start + key.size() + 2);
        auto second = first == std::string_view::npos ? first : text.find(quoted, first + 1);
        if (second != std::string_view::npos) std::tie(line, col) = line_col(text, second);
      }
      throw SyntaxError("duplicate " + what + " name '" + name + "'", line, col);
    }
  }
  return index;
}

std::uint32_t lookup(const std::map<std::string, std::uint32_t>& index, const json& name,
                     const std::string& what) {
  if (!name.is_string()) throw SyntaxError(what + " reference must be a name, got " + name.dump());
  auto it = index.find(name.get<std::string>());
  if (it == index.end()) throw SyntaxError("unknown " + what + " '" + name.get<std::string>() + "'");
  return it->second;
}

std::vector<std::string> names_of(const json& list) {
  std::vector<std::string> out;
  for (const auto& n : list) out.push_back(n.get<std::string>());
  return out;
}

double probability(const json& v) {
  if (!v.is_number()) throw SyntaxError("probability must be a number, got " + v.dump());
  double p = v.get<double>();
  if (p < 0.0 || p > 1.0 + kMassTolerance) {
    throw SyntaxError("probability " + v.dump() + " outside [0, 1]");
  }
  return p;
}

// Copies `p` into a builder so that it can be edited.
PomdpBuilder to_builder(const Pomdp& p) {
  PomdpBuilder b(p.state_names(), p.action_names(), p.observation_names());
  b.name(p.name()).cost_mode(p.cost_mode()).initial(p.initial());
  for (StateId s = 0; s < p.num_states(); ++s) {
    b.observation(s, p.observation(s)).target(s, p.is_target(s));
    for (ActionId a = 0; a < p.num_actions(); ++a) {
      b.transition(s, a, p.transition(s, a)).cost(s, a, p.cost(s, a));
      if (p.has_observation_kernel()) b.observation_kernel(s, a, p.observation_kernel(s, a));
    }
  }
  if (p.has_observation_kernel()) b.initial_observation(p.initial_observation());
  return b;
}

Pomdp apply_targets(const Pomdp& p, const std::vector<std::string>& targets) {
  if (targets.empty()) return p;
  PomdpBuilder b = to_builder(p);
  for (const auto& name : targets) {
    auto s = p.find_state(name);
    if (!s) throw Error("unknown target state '" + name + "'");
    b.absorbing(*s).state_cost(*s, 0).target(*s);
  }
  return b.build();
}

}  // namespace

Pomdp parse_native(std::string_view text) {
  json doc = parse_json(text);
  if (!doc.is_object()) throw SyntaxError("model document must be a JSON object");
  try {
    if (doc.value("format", std::string()) != kNativeFormat) {
      throw SyntaxError("unsupported format tag " + doc.value("format", json("")).dump() +
                        ", expected \"" + std::string(kNativeFormat) + "\"");
    }
    auto states = name_index(text, doc.at("states"), "states", "state");
    auto actions = name_index(text, doc.at("actions"), "actions", "action");
    auto observations = name_index(text, doc.at("observations"), "observations", "observation");
    PomdpBuilder b(names_of(doc.at("states")), names_of(doc.at("actions")),
                   names_of(doc.at("observations")));
    b.name(doc.value("name", std::string("model")));
    b.cost_mode(cost_mode_from_string(doc.value("cost_mode", std::string("positive"))));

    const bool kernel = doc.contains("observation_kernel");
    std::vector<bool> observed(b.num_states(), false);
    for (const auto& e : doc.value("observation_of", json::array())) {
      auto s = lookup(states, e.at(0), "state");
      b.observation(s, lookup(observations, e.at(1), "observation"));
      observed[s] = true;
    }
    if (!kernel) {
      for (std::size_t s = 0; s < observed.size(); ++s) {
        if (!observed[s]) {
          throw SyntaxError("state '" + doc["states"][s].get<std::string>() +
                            "' has no observation");
        }
      }
    } else {
      std::map<std::pair<StateId, ActionId>, std::vector<Distribution::Entry>> rows;
      for (const auto& e : doc.at("observation_kernel")) {
        auto s = lookup(states, e.at(0), "state");
        auto a = lookup(actions, e.at(1), "action");
        rows[{s, a}].emplace_back(lookup(observations, e.at(2), "observation"),
                                  probability(e.at(3)));
      }
      for (auto& [key, entries] : rows) {
        b.observation_kernel(key.first, key.second, Distribution::from_entries(std::move(entries)));
      }
      for (StateId s = 0; s < b.num_states(); ++s) {
        for (ActionId a = 0; a < b.num_actions(); ++a) {
          if (!rows.contains({s, a})) b.observation_kernel(s, a, Distribution());
        }
      }
      b.initial_observation(lookup(observations, doc.at("initial_observation"), "observation"));
    }

    for (const auto& e : doc.value("transitions", json::array())) {
      auto a = lookup(actions, e.at(0), "action");
      auto s = lookup(states, e.at(1), "state");
      auto t = lookup(states, e.at(2), "state");
      b.add_transition(s, a, t, probability(e.at(3)));
    }
    std::set<StateId> targets;
    for (const auto& t : doc.value("targets", json::array())) {
      auto s = lookup(states, t, "state");
      targets.insert(s);
      b.target(s).state_cost(s, 0);
    }
    for (const auto& e : doc.value("costs", json::array())) {
      auto s = lookup(states, e.at(0), "state");
      auto a = lookup(actions, e.at(1), "action");
      if (!e.at(2).is_number_integer()) throw SyntaxError("cost must be an integer, got " + e.at(2).dump());
      b.cost(s, a, e.at(2).get<std::int64_t>());
    }
    std::vector<Distribution::Entry> init;
    for (const auto& e : doc.at("initial")) {
      init.emplace_back(lookup(states, e.at(0), "state"), probability(e.at(1)));
    }
    b.initial(Distribution::from_entries(std::move(init)));

    Pomdp p = b.build();
    auto report = validate(p);
    if (!report.ok()) throw ModelError("invalid model: " + report.summary());
    return p;
  } catch (const json::exception& e) {
    throw SyntaxError(std::string("malformed model document: ") + e.what());
  }
}

std::string write_native(const Pomdp& p) {
  const auto& sn = p.state_names();
  const auto& an = p.action_names();
  const auto& zn = p.observation_names();
  std::ostringstream os;
  auto list = [&](const std::string& key, const std::vector<json>& items, bool last = false) {
    os << "  \"" << key << "\": [";
    for (std::size_t i = 0; i < items.size(); ++i) {
      os << (i ? ",\n    " : "\n    ") << items[i].dump();
    }
    os << (items.empty() ? "]" : "\n  ]") << (last ? "\n" : ",\n");
  };
  os << "{\n";
  os << "  \"format\": " << json(kNativeFormat).dump() << ",\n";
  os << "  \"name\": " << json(p.name()).dump() << ",\n";
  os << "  \"cost_mode\": " << json(to_string(p.cost_mode())).dump() << ",\n";
  os << "  \"states\": " << json(sn).dump() << ",\n";
  os << "  \"actions\": " << json(an).dump() << ",\n";
  os << "  \"observations\": " << json(zn).dump() << ",\n";

  std::vector<json> items;
  for (StateId s = 0; s < p.num_states(); ++s) items.push_back(json::array({sn[s], zn[p.observation(s)]}));
  list("observation_of", items);
  if (p.has_observation_kernel()) {
    items.clear();
    for (StateId s = 0; s < p.num_states(); ++s) {
      for (ActionId a = 0; a < p.num_actions(); ++a) {
        for (const auto& [z, w] : p.observation_kernel(s, a).entries()) {
          items.push_back(json::array({sn[s], an[a], zn[z], w}));
        }
      }
    }
    list("observation_kernel", items);
    os << "  \"initial_observation\": " << json(zn[p.initial_observation()]).dump() << ",\n";
  }
  items.clear();
  for (StateId s = 0; s < p.num_states(); ++s) {
    for (ActionId a = 0; a < p.num_actions(); ++a) {
      for (const auto& [t, w] : p.transition(s, a).entries()) {
        items.push_back(json::array({an[a], sn[s], sn[t], w}));
      }
    }
  }
  list("transitions", items);
  items.clear();
  for (StateId s = 0; s < p.num_states(); ++s) {
    const std::int64_t def = p.is_target(s) ? 0 : 1;
    for (ActionId a = 0; a < p.num_actions(); ++a) {
      if (p.cost(s, a) != def) items.push_back(json::array({sn[s], an[a], p.cost(s, a)}));
    }
  }
  list("costs", items);
  json targets = json::array();
  for (StateId s : p.targets()) targets.push_back(sn[s]);
  os << "  \"targets\": " << targets.dump() << ",\n";
  items.clear();
  for (const auto& [s, w] : p.initial().entries()) items.push_back(json::array({sn[s], w}));
  list("initial", items, true);
  os << "}\n";
  return os.str();
}

namespace {

struct Token {
  std::string text;
  std::size_t line;
  std::size_t column;
};

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t line = 1;
  std::size_t col = 1;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
      continue;
    }
    if (c == '\n') {
      ++line;
      col = 1;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      ++col;
      continue;
    }
    if (c == ':') {
      out.push_back({":", line, col});
      ++i;
      ++col;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && text[j] != ':' && text[j] != '#' &&
           !std::isspace(static_cast<unsigned char>(text[j]))) {
      ++j;
    }
    out.push_back({std::string(text.substr(i, j - i)), line, col});
    col += j - i;
    i = j;
  }
  return out;
}

bool is_number(const std::string& s) {
  if (s.empty()) return false;
  char* end = nullptr;
  std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

const std::set<std::string> kKeywords = {"discount", "values", "states", "actions",
                                         "observations", "start", "T", "O", "R"};

class CassandraParser {
 public:
  explicit CassandraParser(std::string_view text) : tokens_(tokenize(text)) {}

  CassandraResult run(const CassandraOptions& options);

 private:
  [[noreturn]] void fail(const std::string& message, const Token* at = nullptr) const {
    const Token* t = at ? at : (pos_ < tokens_.size() ? &tokens_[pos_] : nullptr);
    if (t) throw SyntaxError(message, t->line, t->column);
    throw SyntaxError(message + " at end of input");
  }
  bool done() const { return pos_ >= tokens_.size(); }
  const Token& peek() const { return tokens_[pos_]; }
  const Token& next() {
    if (done()) fail("unexpected end of input");
    return tokens_[pos_++];
  }
  void expect_colon() {
    if (done() || peek().text != ":") fail("expected ':'");
    ++pos_;
  }
  bool at_statement_start() const {
    if (done()) return true;
    if (!kKeywords.contains(peek().text)) return false;
    return pos_ + 1 < tokens_.size() && tokens_[pos_ + 1].text == ":";
  }
  double number() {
    const Token& t = next();
    if (!is_number(t.text)) fail("expected a number, got '" + t.text + "'", &t);
    return std::strtod(t.text.c_str(), nullptr);
  }
  std::vector<std::string> declaration() {
    std::vector<std::string> names;
    if (!done() && is_number(peek().text) && (pos_ + 1 >= tokens_.size() || at_next_is_statement())) {
      const Token& t = next();
      long n = std::strtol(t.text.c_str(), nullptr, 10);
      if (n <= 0) fail("count must be positive", &t);
      for (long i = 0; i < n; ++i) names.push_back(std::to_string(i));
      return names;
    }
    while (!at_statement_start()) names.push_back(next().text);
    if (names.empty()) fail("empty declaration");
    return names;
  }
  bool at_next_is_statement() const {
    std::size_t k = pos_ + 1;
    if (k >= tokens_.size()) return true;
    return kKeywords.contains(tokens_[k].text) && k + 1 < tokens_.size() &&
           tokens_[k + 1].text == ":";
  }
  // Indices selected by a name, a number or '*'.
  std::vector<std::uint32_t> select(const Token& t, const std::vector<std::string>& names,
                                    const std::string& what) const {
    std::vector<std::uint32_t> out;
    if (t.text == "*") {
      for (std::uint32_t i = 0; i < names.size(); ++i) out.push_back(i);
      return out;
    }
    auto it = std::find(names.begin(), names.end(), t.text);
    if (it != names.end()) return {static_cast<std::uint32_t>(it - names.begin())};
    if (!t.text.empty() && std::all_of(t.text.begin(), t.text.end(), ::isdigit)) {
      auto i = std::strtoul(t.text.c_str(), nullptr, 10);
      if (i < names.size()) return {static_cast<std::uint32_t>(i)};
    }
    fail("unknown " + what + " '" + t.text + "'", &t);
  }
  // Identifiers of an entry up to the last one not followed by ':'.
  std::vector<const Token*> entry_idents(std::size_t max) {
    std::vector<const Token*> ids;
    while (true) {
      ids.push_back(&next());
      if (ids.size() == max || done() || peek().text != ":") break;
      ++pos_;
    }
    return ids;
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

CassandraResult CassandraParser::run(const CassandraOptions& options) {
  CassandraResult result{Pomdp(), {}};
  std::vector<std::string> S;
  std::vector<std::string> A;
  std::vector<std::string> Z;
  std::string values = "reward";
  std::optional<std::vector<double>> start;
  std::vector<double> T;
  std::vector<double> O;
  std::vector<double> R;
  bool have_o = false;
  auto ready = [&](const Token& at) {
    if (S.empty() || A.empty() || Z.empty()) {
      fail("states, actions and observations must be declared before entries", &at);
    }
    const std::size_t rsize = A.size() * S.size() * S.size() * Z.size();
    if (rsize > 50'000'000) fail("model too large for the dense reward table", &at);
    if (T.empty()) {
      T.assign(A.size() * S.size() * S.size(), 0.0);
      O.assign(A.size() * S.size() * Z.size(), 0.0);
      R.assign(rsize, 0.0);
    }
  };
  auto t_at = [&](std::size_t a, std::size_t s, std::size_t t) -> double& {
    return T[(a * S.size() + s) * S.size() + t];
  };
  auto o_at = [&](std::size_t a, std::size_t t, std::size_t z) -> double& {
    return O[(a * S.size() + t) * Z.size() + z];
  };
  auto r_at = [&](std::size_t a, std::size_t s, std::size_t t, std::size_t z) -> double& {
    return R[((a * S.size() + s) * S.size() + t) * Z.size() + z];
  };

  while (!done()) {
    const Token& kw = next();
    if (kw.text == "start" && !done() && peek().text != ":") {
      fail("unsupported construct 'start " + peek().text + "'", &peek());
    }
    if (!kKeywords.contains(kw.text)) fail("unexpected token '" + kw.text + "'", &kw);
    expect_colon();
    if (kw.text == "discount") {
      number();
      result.warnings.push_back("discount factor ignored; the objective is undiscounted total cost");
    } else if (kw.text == "values") {
      values = next().text;
      if (values != "reward" && values != "cost") fail("values must be 'reward' or 'cost'", &kw);
    } else if (kw.text == "states") {
      S = declaration();
    } else if (kw.text == "actions") {
      A = declaration();
    } else if (kw.text == "observations") {
      Z = declaration();
    } else if (kw.text == "start") {
      if (S.empty()) fail("start before states", &kw);
      std::vector<double> b(S.size(), 0.0);
      if (!done() && peek().text == "uniform") {
        next();
        std::fill(b.begin(), b.end(), 1.0 / static_cast<double>(S.size()));
      } else if (!done() && is_number(peek().text) && !at_next_is_statement()) {
        for (auto& x : b) x = number();
      } else {
        const Token& t = next();
        auto sel = select(t, S, "state");
        b[sel.at(0)] = 1.0;
      }
      start = std::move(b);
    } else if (kw.text == "T") {
      ready(kw);
      auto ids = entry_idents(3);
      auto as = select(*ids[0], A, "action");
      if (ids.size() == 3) {
        auto ss = select(*ids[1], S, "state");
        auto ts = select(*ids[2], S, "state");
        double p = number();
        for (auto a : as) for (auto s : ss) for (auto t : ts) t_at(a, s, t) = p;
      } else if (ids.size() == 2) {
        auto ss = select(*ids[1], S, "state");
        std::vector<double> row(S.size());
        if (!done() && peek().text == "uniform") {
          next();
          std::fill(row.begin(), row.end(), 1.0 / static_cast<double>(S.size()));
        } else {
          for (auto& x : row) x = number();
        }
        for (auto a : as) for (auto s : ss) for (std::size_t t = 0; t < S.size(); ++t) t_at(a, s, t) = row[t];
      } else {
        std::vector<double> m(S.size() * S.size(), 0.0);
        if (!done() && peek().text == "identity") {
          next();
          for (std::size_t s = 0; s < S.size(); ++s) m[s * S.size() + s] = 1.0;
        } else if (!done() && peek().text == "uniform") {
          next();
          std::fill(m.begin(), m.end(), 1.0 / static_cast<double>(S.size()));
        } else {
          for (auto& x : m) x = number();
        }
        for (auto a : as) {
          for (std::size_t s = 0; s < S.size(); ++s) {
            for (std::size_t t = 0; t < S.size(); ++t) t_at(a, s, t) = m[s * S.size() + t];
          }
        }
      }
    } else if (kw.text == "O") {
      ready(kw);
      have_o = true;
      auto ids = entry_idents(3);
      auto as = select(*ids[0], A, "action");
      if (ids.size() == 3) {
        auto ts = select(*ids[1], S, "state");
        auto zs = select(*ids[2], Z, "observation");
        double p = number();
        for (auto a : as) for (auto t : ts) for (auto z : zs) o_at(a, t, z) = p;
      } else if (ids.size() == 2) {
        auto ts = select(*ids[1], S, "state");
        std::vector<double> row(Z.size());
        if (!done() && peek().text == "uniform") {
          next();
          std::fill(row.begin(), row.end(), 1.0 / static_cast<double>(Z.size()));
        } else {
          for (auto& x : row) x = number();
        }
        for (auto a : as) for (auto t : ts) for (std::size_t z = 0; z < Z.size(); ++z) o_at(a, t, z) = row[z];
      } else {
        std::vector<double> m(S.size() * Z.size());
        if (!done() && peek().text == "uniform") {
          next();
          std::fill(m.begin(), m.end(), 1.0 / static_cast<double>(Z.size()));
        } else {
          for (auto& x : m) x = number();
        }
        for (auto a : as) {
          for (std::size_t t = 0; t < S.size(); ++t) {
            for (std::size_t z = 0; z < Z.size(); ++z) o_at(a, t, z) = m[t * Z.size() + z];
          }
        }
      }
    } else if (kw.text == "R") {
      ready(kw);
      auto ids = entry_idents(4);
      if (ids.size() < 3) fail("reward entries need at least action, start and end state", ids[0]);
      auto as = select(*ids[0], A, "action");
      auto ss = select(*ids[1], S, "state");
      auto ts = select(*ids[2], S, "state");
      if (ids.size() == 4) {
        auto zs = select(*ids[3], Z, "observation");
        double v = number();
        for (auto a : as) for (auto s : ss) for (auto t : ts) for (auto z : zs) r_at(a, s, t, z) = v;
      } else {
        std::vector<double> row(Z.size());
        for (auto& x : row) x = number();
        for (auto a : as) for (auto s : ss) for (auto t : ts) for (std::size_t z = 0; z < Z.size(); ++z) r_at(a, s, t, z) = row[z];
      }
    }
    if (!at_statement_start()) fail("unexpected token '" + peek().text + "'");
  }

  if (S.empty() || A.empty() || Z.empty()) fail("states, actions and observations must be declared");
  if (T.empty()) fail("no transition entries");
  if (!have_o) fail("no observation entries");

  const CostSource source = options.cost_source.value_or(
      values == "reward" ? CostSource::kNegatedRewards : CostSource::kDirect);
  std::set<StateId> targets;
  for (const auto& name : options.targets) {
    auto it = std::find(S.begin(), S.end(), name);
    if (it == S.end()) throw Error("unknown target state '" + name + "'");
    targets.insert(static_cast<StateId>(it - S.begin()));
  }

  // Deterministic, action-independent observations become a plain labelling.
  bool deterministic = true;
  std::vector<ObsId> label(S.size(), 0);
  for (std::size_t t = 0; t < S.size() && deterministic; ++t) {
    for (std::size_t a = 0; a < A.size() && deterministic; ++a) {
      std::optional<ObsId> point;
      for (std::size_t z = 0; z < Z.size(); ++z) {
        double w = o_at(a, t, z);
        if (w == 0.0) continue;
        if (std::fabs(w - 1.0) > kMassTolerance || point) deterministic = false;
        point = static_cast<ObsId>(z);
      }
      if (!point) deterministic = false;
      if (deterministic && a > 0 && label[t] != *point) deterministic = false;
      if (deterministic) label[t] = *point;
    }
  }

  PomdpBuilder b(S, A, Z);
  b.name(options.name);
  for (StateId s = 0; s < S.size(); ++s) {
    b.observation(s, label[s]);
    for (ActionId a = 0; a < A.size(); ++a) {
      std::vector<Distribution::Entry> row;
      double reward = 0.0;
      for (std::size_t t = 0; t < S.size(); ++t) {
        double p = t_at(a, s, t);
        if (p == 0.0) continue;
        row.emplace_back(static_cast<StateId>(t), p);
        for (std::size_t z = 0; z < Z.size(); ++z) reward += p * o_at(a, t, z) * r_at(a, s, t, z);
      }
      b.transition(s, a, Distribution::from_entries(std::move(row)));
      if (!deterministic) {
        std::vector<Distribution::Entry> obs;
        for (std::size_t z = 0; z < Z.size(); ++z) {
          if (o_at(a, s, z) != 0.0) obs.emplace_back(static_cast<ObsId>(z), o_at(a, s, z));
        }
        b.observation_kernel(s, a, Distribution::from_entries(std::move(obs)));
      }
      if (targets.contains(s)) continue;
      double c = source == CostSource::kNegatedRewards ? -reward : reward;
      double rounded = std::round(c);
      if (std::fabs(c - rounded) > 1e-9 * std::max(1.0, std::fabs(c))) {
        throw ModelError("non-integer cost " + std::to_string(c) + " at (" + S[s] + ", " + A[a] +
                         "); rescale the rewards");
      }
      b.cost(s, a, static_cast<std::int64_t>(rounded));
    }
  }
  if (!deterministic) b.initial_observation(0);
  for (StateId s : targets) b.absorbing(s).state_cost(s, 0).target(s);
  std::vector<Distribution::Entry> init;
  if (start) {
    for (std::size_t s = 0; s < S.size(); ++s) {
      if ((*start)[s] > 0.0) init.emplace_back(static_cast<StateId>(s), (*start)[s]);
    }
  } else {
    for (std::size_t s = 0; s < S.size(); ++s) init.emplace_back(static_cast<StateId>(s), 1.0 / static_cast<double>(S.size()));
  }
  b.initial(Distribution::from_entries(std::move(init)));
  Pomdp p = b.build();
  auto report = validate(p);
  if (!report.ok()) throw ModelError("invalid model: " + report.summary());
  result.pomdp = (!deterministic && options.determinize) ? determinize_observations(p) : std::move(p);
  return result;
}

}  // namespace

CassandraResult parse_cassandra(std::string_view text, const CassandraOptions& options) {
  CassandraParser parser(text);
  return parser.run(options);
}

Pfa parse_pfa(std::string_view text) {
  json doc = parse_json(text);
  try {
    if (doc.value("format", std::string()) != "surecost-pfa/1") {
      throw SyntaxError("unsupported PFA format tag, expected \"surecost-pfa/1\"");
    }
    Pfa pfa;
    auto states = name_index(text, doc.at("states"), "states", "state");
    auto letters = name_index(text, doc.at("alphabet"), "alphabet", "letter");
    pfa.states = names_of(doc.at("states"));
    pfa.alphabet = names_of(doc.at("alphabet"));
    pfa.initial = lookup(states, doc.at("initial"), "state");
    pfa.final.assign(pfa.states.size(), false);
    for (const auto& f : doc.at("final")) pfa.final[lookup(states, f, "state")] = true;
    std::vector<std::vector<std::vector<Distribution::Entry>>> rows(
        pfa.states.size(), std::vector<std::vector<Distribution::Entry>>(pfa.alphabet.size()));
    for (const auto& e : doc.at("transitions")) {
      auto s = lookup(states, e.at(0), "state");
      auto a = lookup(letters, e.at(1), "letter");
      rows[s][a].emplace_back(lookup(states, e.at(2), "state"), probability(e.at(3)));
    }
    pfa.delta.resize(pfa.states.size());
    for (std::size_t s = 0; s < rows.size(); ++s) {
      for (auto& r : rows[s]) pfa.delta[s].push_back(Distribution::from_entries(std::move(r)));
    }
    validate_pfa(pfa);
    return pfa;
  } catch (const json::exception& e) {
    throw SyntaxError(std::string("malformed PFA document: ") + e.what());
  }
}

std::string write_pfa(const Pfa& pfa) {
  json transitions = json::array();
  for (std::size_t s = 0; s < pfa.num_states(); ++s) {
    for (std::size_t a = 0; a < pfa.alphabet.size(); ++a) {
      for (const auto& [t, w] : pfa.delta[s][a].entries()) {
        transitions.push_back(json::array({pfa.states[s], pfa.alphabet[a], pfa.states[t], w}));
      }
    }
  }
  json final = json::array();
  for (std::size_t s = 0; s < pfa.num_states(); ++s) {
    if (pfa.final[s]) final.push_back(pfa.states[s]);
  }
  json doc = {{"format", "surecost-pfa/1"},
              {"states", pfa.states},
              {"alphabet", pfa.alphabet},
              {"initial", pfa.states[pfa.initial]},
              {"final", final},
              {"transitions", transitions}};
  return doc.dump(2) + "\n";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
  if (!out) throw Error("failed writing '" + path + "'");
}

Pomdp load_model(const std::string& path, const CassandraOptions& options,
                 std::vector<std::string>* warnings) {
  const std::string text = read_file(path);
  const bool classic = path.size() >= 6 && path.substr(path.size() - 6) == ".pomdp";
  if (classic) {
    CassandraOptions opts = options;
    if (opts.name == "pomdp") {
      auto slash = path.find_last_of('/');
      opts.name = path.substr(slash == std::string::npos ? 0 : slash + 1);
      opts.name.resize(opts.name.size() - 6);
    }
    auto r = parse_cassandra(text, opts);
    if (warnings) *warnings = r.warnings;
    return std::move(r.pomdp);
  }
  return apply_targets(parse_native(text), options.targets);
}

}  // namespace surecost
