#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "surecost/model.hpp"
#include "surecost/winning.hpp"

namespace surecost {

/// Markov chain induced by playing uniformly over the allowed actions, on
/// pairs (state, winning support) with the state inside the support.
struct ProductChain {
  struct Pair {
    StateId state;
    NodeId support;
  };
  std::vector<Pair> pairs;
  /// Sparse rows: (pair index, probability).
  std::vector<std::vector<std::pair<std::size_t, double>>> kernel;
  std::vector<double> cost;
  std::vector<bool> absorbing;

  std::size_t size() const { return pairs.size(); }
  /// Index of (s, n), or size() when absent.
  std::size_t find(StateId s, NodeId n) const;

  std::vector<std::size_t> offsets;  // first pair index of every support node
};

ProductChain build_chain(const Pomdp& p, const WinningTable& w);

struct BoundOptions {
  /// Chains up to this size use dense elimination, larger ones a sparse LU.
  std::size_t dense_limit = 2000;
  double residual_tolerance = 1e-8;
};

struct BoundReport {
  double u_allow = 0.0;
  std::vector<double> hitting;
  double residual = 0.0;
  bool dense = true;
};

/// Solves h = c + P h with h = 0 on absorbing pairs. Throws NumericError when
/// the residual check fails, Error when the system is singular.
BoundReport hitting_bound(const ProductChain& ch, BoundOptions options = {});

/// Expected total cost of the uniform allowed strategy from the initial
/// distribution.
double initial_hitting_cost(const Pomdp& p, const WinningTable& w,
                            const ProductChain& ch, const BoundReport& r);

}  // namespace surecost
