#include "surecost/bound.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

namespace surecost {

namespace {

using Row = std::vector<std::pair<std::size_t, double>>;

// Unknown index of every pair; absorbing pairs map to npos.
constexpr std::size_t npos = static_cast<std::size_t>(-1);

std::vector<long double> solve_dense(const ProductChain& ch,
                                     const std::vector<std::size_t>& var,
                                     std::size_t n) {
  std::vector<long double> a(n * n, 0.0L);
  std::vector<long double> b(n, 0.0L);
  for (std::size_t i = 0; i < ch.size(); ++i) {
    if (var[i] == npos) continue;
    std::size_t r = var[i];
    a[r * n + r] += 1.0L;
    b[r] = ch.cost[i];
    for (const auto& [j, pr] : ch.kernel[i]) {
      if (var[j] != npos) a[r * n + var[j]] -= pr;
    }
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::fabs(a[r * n + col]) > std::fabs(a[piv * n + col])) piv = r;
    }
    if (std::fabs(a[piv * n + col]) < 1e-300L) {
      throw Error("product chain system is singular");
    }
    if (piv != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a[piv * n + c], a[col * n + c]);
      std::swap(b[piv], b[col]);
    }
    const long double d = a[col * n + col];
    for (std::size_t r = col + 1; r < n; ++r) {
      long double f = a[r * n + col] / d;
      if (f == 0.0L) continue;
      a[r * n + col] = 0.0L;
      for (std::size_t c = col + 1; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
      b[r] -= f * b[col];
    }
  }
  std::vector<long double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    long double s = b[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= a[i * n + c] * x[c];
    x[i] = s / a[i * n + i];
  }
  return x;
}

std::vector<long double> residual(const ProductChain& ch,
                                  const std::vector<std::size_t>& var,
                                  const std::vector<long double>& x) {
  std::vector<long double> r(x.size());
  for (std::size_t i = 0; i < ch.size(); ++i) {
    if (var[i] == npos) continue;
    long double s = ch.cost[i] - x[var[i]];
    for (const auto& [j, pr] : ch.kernel[i]) {
      if (var[j] != npos) s += static_cast<long double>(pr) * x[var[j]];
    }
    r[var[i]] = s;
  }
  return r;
}

Eigen::SparseMatrix<double> system_matrix(const ProductChain& ch,
                                          const std::vector<std::size_t>& var,
                                          std::size_t n, Eigen::VectorXd& b) {
  std::vector<Eigen::Triplet<double>> trip;
  b.resize(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < ch.size(); ++i) {
    if (var[i] == npos) continue;
    auto r = static_cast<Eigen::Index>(var[i]);
    trip.emplace_back(r, r, 1.0);
    b[r] = ch.cost[i];
    for (const auto& [j, pr] : ch.kernel[i]) {
      if (var[j] != npos) trip.emplace_back(r, static_cast<Eigen::Index>(var[j]), -pr);
    }
  }
  Eigen::SparseMatrix<double> a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  a.setFromTriplets(trip.begin(), trip.end());
  a.makeCompressed();
  return a;
}

// Solves with `solve` and refines against extended precision residuals.
template <typename Solve>
std::vector<long double> refine(const ProductChain& ch, const std::vector<std::size_t>& var,
                                std::size_t n, const Eigen::VectorXd& b, Solve&& solve) {
  Eigen::VectorXd h = solve(b);
  std::vector<long double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = h[static_cast<Eigen::Index>(i)];
  for (int round = 0; round < 3; ++round) {
    auto r = residual(ch, var, x);
    Eigen::VectorXd rv(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) rv[static_cast<Eigen::Index>(i)] = static_cast<double>(r[i]);
    Eigen::VectorXd d = solve(rv);
    for (std::size_t i = 0; i < n; ++i) x[i] += d[static_cast<Eigen::Index>(i)];
  }
  return x;
}

std::vector<long double> solve_sparse(const ProductChain& ch,
                                      const std::vector<std::size_t>& var,
                                      std::size_t n) {
  Eigen::VectorXd b;
  const Eigen::SparseMatrix<double> a = system_matrix(ch, var, n, b);
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) throw Error("product chain system is singular");
  return refine(ch, var, n, b, [&](const Eigen::VectorXd& rhs) {
    Eigen::VectorXd y = lu.solve(rhs);
    return y;
  });
}

}  // namespace

std::size_t ProductChain::find(StateId s, NodeId n) const {
  if (n + 1 >= offsets.size()) return size();
  auto first = pairs.begin() + static_cast<std::ptrdiff_t>(offsets[n]);
  auto last = pairs.begin() + static_cast<std::ptrdiff_t>(offsets[n + 1]);
  auto it = std::lower_bound(first, last, s,
                             [](const Pair& x, StateId key) { return x.state < key; });
  if (it == last || it->state != s) return size();
  return static_cast<std::size_t>(it - pairs.begin());
}

ProductChain build_chain(const Pomdp& p, const WinningTable& w) {
  const SupportMdp& m = w.mdp();
  ProductChain ch;
  ch.offsets.reserve(m.num_nodes() + 1);
  for (NodeId n = 0; n < m.num_nodes(); ++n) {
    ch.offsets.push_back(ch.pairs.size());
    if (!w.wins(n)) continue;
    for (StateId s : m.support(n).states()) ch.pairs.push_back({s, n});
  }
  ch.offsets.push_back(ch.pairs.size());

  ch.kernel.resize(ch.size());
  ch.cost.assign(ch.size(), 0.0);
  ch.absorbing.assign(ch.size(), false);
  for (std::size_t i = 0; i < ch.size(); ++i) {
    const auto [s, n] = ch.pairs[i];
    if (p.is_target(s)) {
      ch.absorbing[i] = true;
      continue;
    }
    auto allow = w.allow(n);
    const double weight = 1.0 / static_cast<double>(allow.size());
    Row row;
    double cost = 0.0;
    for (ActionId a : allow) {
      cost += weight * static_cast<double>(p.cost(s, a));
      auto edges = m.edges(n, a);
      for (const auto& [next, pr] : p.transition(s, a).entries()) {
        ObsId z = p.observation(next);
        auto e = std::find_if(edges.begin(), edges.end(),
                              [z](const SupportEdge& x) { return x.observation == z; });
        row.emplace_back(ch.find(next, e->node), weight * pr);
      }
    }
    std::sort(row.begin(), row.end());
    Row merged;
    for (const auto& [j, pr] : row) {
      if (!merged.empty() && merged.back().first == j) {
        merged.back().second += pr;
      } else {
        merged.emplace_back(j, pr);
      }
    }
    ch.kernel[i] = std::move(merged);
    ch.cost[i] = cost;
  }
  return ch;
}

BoundReport hitting_bound(const ProductChain& ch, BoundOptions options) {
  // Every pair must reach the absorbing set.
  std::vector<std::vector<std::size_t>> preds(ch.size());
  for (std::size_t i = 0; i < ch.size(); ++i) {
    for (const auto& [j, pr] : ch.kernel[i]) {
      if (pr > 0.0) preds[j].push_back(i);
    }
  }
  std::vector<bool> seen(ch.size(), false);
  std::deque<std::size_t> queue;
  for (std::size_t i = 0; i < ch.size(); ++i) {
    if (ch.absorbing[i]) {
      seen[i] = true;
      queue.push_back(i);
    }
  }
  while (!queue.empty()) {
    auto v = queue.front();
    queue.pop_front();
    for (auto u : preds[v]) {
      if (!seen[u]) {
        seen[u] = true;
        queue.push_back(u);
      }
    }
  }
  for (std::size_t i = 0; i < ch.size(); ++i) {
    if (!seen[i]) {
      throw Error("product chain pair " + std::to_string(i) +
                  " cannot reach the target set");
    }
  }

  std::vector<std::size_t> var(ch.size(), npos);
  std::size_t n = 0;
  for (std::size_t i = 0; i < ch.size(); ++i) {
    if (!ch.absorbing[i]) var[i] = n++;
  }

  BoundReport report;
  report.dense = n <= options.dense_limit;
  std::vector<long double> x;
  if (n > 0) x = report.dense ? solve_dense(ch, var, n) : solve_sparse(ch, var, n);

  long double hmax = 0.0L;
  for (auto v : x) hmax = std::max(hmax, std::fabs(v));
  long double rmax = 0.0L;
  for (auto v : residual(ch, var, x)) rmax = std::max(rmax, std::fabs(v));
  report.residual = static_cast<double>(rmax);
  if (rmax > options.residual_tolerance * std::max(1.0L, hmax)) {
    throw NumericError("hitting cost residual " + std::to_string(report.residual) +
                       " exceeds tolerance");
  }

  report.hitting.assign(ch.size(), 0.0);
  for (std::size_t i = 0; i < ch.size(); ++i) {
    if (var[i] != npos) {
      report.hitting[i] = static_cast<double>(x[var[i]]);
      report.u_allow = std::max(report.u_allow, report.hitting[i]);
    }
  }
  return report;
}

double initial_hitting_cost(const Pomdp& p, const WinningTable& w,
                            const ProductChain& ch, const BoundReport& r) {
  NodeId n0 = w.mdp().initial();
  double total = 0.0;
  for (const auto& [s, pr] : p.initial().entries()) {
    std::size_t i = ch.find(s, n0);
    if (i < ch.size()) total += pr * r.hitting[i];
  }
  return total;
}

}  // namespace surecost
