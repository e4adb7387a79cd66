#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "surecost/generators.hpp"
#include "surecost/model.hpp"

namespace surecost {

/// Malformed input text. Line and column are 1-based, 0 when unknown.
class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& message, std::size_t line = 0, std::size_t column = 0);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

inline constexpr const char* kNativeFormat = "surecost-pomdp/1";

/// Parses and validates a native JSON model document.
Pomdp parse_native(std::string_view text);
std::string write_native(const Pomdp& p);

enum class CostSource { kNegatedRewards, kDirect };

struct CassandraOptions {
  /// Defaults to negated rewards for `values: reward`, direct otherwise.
  std::optional<CostSource> cost_source;
  /// Target state names; their rows become zero-cost self-loops.
  std::vector<std::string> targets;
  /// Fold an action- or state-dependent observation kernel into the states.
  bool determinize = true;
  std::string name = "pomdp";
};

struct CassandraResult {
  Pomdp pomdp;
  std::vector<std::string> warnings;
};

/// Classic discrete `.pomdp` dialect subset.
CassandraResult parse_cassandra(std::string_view text, const CassandraOptions& options = {});

/// PFA documents: {"format": "surecost-pfa/1", "states", "alphabet",
/// "initial", "final", "transitions": [[from, letter, to, p], ...]}.
Pfa parse_pfa(std::string_view text);
std::string write_pfa(const Pfa& pfa);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view text);

/// Loads a model by extension: `.pomdp` uses the classic dialect, anything
/// else the native format.
Pomdp load_model(const std::string& path, const CassandraOptions& options = {},
                 std::vector<std::string>* warnings = nullptr);

}  // namespace surecost
