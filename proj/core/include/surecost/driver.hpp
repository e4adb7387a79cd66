#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "surecost/belief.hpp"
#include "surecost/bound.hpp"
#include "surecost/horizon.hpp"
#include "surecost/model.hpp"
#include "surecost/random.hpp"
#include "surecost/winning.hpp"

namespace surecost {

/// Library version string.
std::string version();

/// A policy was asked for a decision it does not define.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Allowed actions per winning support, played uniformly.
using FallbackTable = std::map<BeliefSupport, std::vector<ActionId>>;

FallbackTable fallback_table(const WinningTable& w);

/// Plays the finite-horizon strategy for its horizon, then the uniform
/// allowed strategy on the current support.
class CompositePolicy {
 public:
  CompositePolicy(std::shared_ptr<const FiniteHorizonPolicy> finite, FallbackTable fallback);

  /// Policy that only plays the uniform allowed strategy.
  static CompositePolicy fallback_only(const WinningTable& w);

  std::size_t horizon() const { return finite_ ? finite_->horizon : 0; }
  const FiniteHorizonPolicy* finite() const { return finite_.get(); }
  const FallbackTable& fallback() const { return fallback_; }

 private:
  std::shared_ptr<const FiniteHorizonPolicy> finite_;
  FallbackTable fallback_;
};

/// Executes a CompositePolicy along one play.
class PolicyRun {
 public:
  PolicyRun(const CompositePolicy& policy, const Pomdp& p);

  /// Throws ContractError when the policy is undefined at the current belief.
  ActionId act(Rng& rng);
  void observe(ActionId a, ObsId z);

  const BeliefSupport& support() const { return support_; }
  std::size_t steps() const { return steps_; }
  bool in_finite_part() const;

 private:
  const CompositePolicy& policy_;
  const Pomdp& p_;
  BeliefPoint belief_;
  BeliefSupport support_;
  std::size_t steps_ = 0;
  std::int64_t node_ = 0;
};

/// Transformations applied before solving or simulating: validation, folding
/// of an observation kernel, and a private observation for the targets.
Pomdp prepare(const Pomdp& p);

enum class StopMode { kAdditive, kMultiplicative };
enum class Backend { kExact, kDiscretized };
enum class SolveStatus { kConverged, kInfeasible, kUnconverged };

std::string to_string(StopMode m);
std::string to_string(Backend b);
std::string to_string(SolveStatus s);
StopMode stop_mode_from_string(const std::string& s);
Backend backend_from_string(const std::string& s);

struct SolveOptions {
  double epsilon = 0.1;
  StopMode mode = StopMode::kAdditive;
  Backend backend = Backend::kExact;
  bool geometric = false;
  std::optional<std::size_t> max_horizon;
  std::optional<double> time_limit_seconds;
  SupportMdpOptions support;
  BoundOptions bound;
  HorizonOptions horizon;
  RtdpOptions rtdp;
};

struct IterationRecord {
  std::size_t k = 0;
  double t_k = 0.0;
  double alpha_k = 0.0;
  double bound_k = 0.0;
  double seconds = 0.0;
};

struct SolveReport {
  std::string model;
  SolveStatus status = SolveStatus::kConverged;
  std::string stop_reason;
  StopMode mode = StopMode::kAdditive;
  double epsilon = 0.0;
  Backend backend = Backend::kExact;
  double u_allow = 0.0;
  double allow_value = 0.0;
  std::size_t supports = 0;
  std::size_t winning_supports = 0;
  std::size_t chain_states = 0;
  double residual = 0.0;
  std::size_t horizon_cap = 0;
  std::vector<IterationRecord> iterations;
  std::size_t final_k = 0;
  double lower = 0.0;
  double upper = 0.0;
  double seconds = 0.0;

  bool exact() const { return backend == Backend::kExact; }
};

struct SolveResult {
  SolveReport report;
  std::optional<CompositePolicy> policy;
  /// The prepared model the policy refers to.
  std::shared_ptr<const Pomdp> model;
};

/// Iterates horizons until alpha_k * U_Allow <= epsilon (additive) or
/// <= epsilon * T_k (multiplicative). Refuses general-integer costs.
SolveResult approximate(const Pomdp& p, const SolveOptions& options = {});

nlohmann::json report_to_json(const SolveReport& r);

/// Policy document; state, action and observation names refer to `p`.
nlohmann::json export_policy(const CompositePolicy& cp, const Pomdp& p);
CompositePolicy import_policy(const nlohmann::json& doc, const Pomdp& p);

}  // namespace surecost
