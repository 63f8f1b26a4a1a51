#pragma once

#include <algorithm>
#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "signalprice/core.hpp"
#include "signalprice/decomposition.hpp"
#include "signalprice/errors.hpp"
#include "signalprice/linrev.hpp"
#include "signalprice/pricing.hpp"
#include "signalprice/public_signaling.hpp"
#include "signalprice/random.hpp"

namespace signalprice {

struct Graph {
  int m = 0;  // vertices 0..m-1
  std::vector<std::pair<int, int>> edges;

  void validate() const {
    if (m < 2) throw InvalidInstance("graph needs at least 2 vertices");
    std::set<std::pair<int, int>> seen;
    for (auto [u, v] : edges) {
      if (u == v) throw InvalidInstance("self-loop");
      if (u < 0 || v < 0 || u >= m || v >= m)
        throw InvalidInstance("edge references missing vertex");
      auto key = std::minmax(u, v);
      if (!seen.insert(key).second) throw InvalidInstance("duplicate edge");
    }
  }

  bool adjacent(int u, int v) const {
    for (auto [a, b] : edges)
      if ((a == u && b == v) || (a == v && b == u)) return true;
    return false;
  }
};

// Best revenue with no information disclosed: exact pricing at the prior.
inline double no_signaling_value(const AuctionInstance& inst) {
  auto dists =
      project(inst, PosteriorProfile::common(inst.prior_posterior(), inst.num_buyers()));
  return exact_optimal_prices(dists).value;
}

// Best revenue when the state is announced: exact pricing at each basis
// posterior, weighted by the prior.
inline double full_revelation_value(const AuctionInstance& inst) {
  const int d = inst.num_states();
  double total = 0.0;
  for (int theta = 0; theta < d; ++theta) {
    if (inst.prior[theta] == 0.0) continue;
    auto dists = project(
        inst, PosteriorProfile::common(Posterior::basis(d, theta), inst.num_buyers()));
    total += inst.prior[theta] * exact_optimal_prices(dists).value;
  }
  return total;
}

struct PublicBruteResult {
  double grid_value = 0.0;          // prices restricted to P^b
  double unrestricted_value = 0.0;  // prices free in [0,1]
};

// Exact q-restricted public optimum: the consistency program with exact
// per-posterior price optima as coefficients, reported both on the price
// grid and unrestricted.
inline PublicBruteResult brute_force_public(const AuctionInstance& inst, int q, int b,
                                            std::size_t cap = default_cell_cap()) {
  inst.validate();
  QUniformSet posteriors = enumerate_q_uniform(inst.num_states(), q, cap);
  PublicBruteResult out;
  for (int pass = 0; pass < 2; ++pass) {
    std::optional<int> grid = pass == 0 ? std::optional<int>(b) : std::nullopt;
    auto coeffs = exact_coefficients(inst, posteriors, grid);
    std::vector<double> U(coeffs.size());
    for (std::size_t k = 0; k < coeffs.size(); ++k) U[k] = coeffs[k].estimate;
    LpSolution lp = detail::solve_consistency_lp(posteriors.posteriors, U, inst.prior);
    if (lp.status != LpStatus::Optimal)
      throw InfeasiblePrior("consistency program not solvable for this prior");
    (pass == 0 ? out.grid_value : out.unrestricted_value) = lp.value;
  }
  return out;
}

struct LinRevBrute {
  double value = 0.0;
  std::vector<int> xi;  // posterior index per buyer
  std::vector<int> p;   // price index per buyer
};

// Exhaustive maximum over all (xi, p) assignments. Guarded by the cell cap;
// this is the cross-check oracle for the dynamic program.
inline LinRevBrute brute_force_max_linrev(const LinRevProblem& prob,
                                          std::size_t cap = default_cell_cap()) {
  const int cells = prob.cells_per_buyer();
  double total = 1.0;
  for (int i = 0; i < prob.n; ++i) {
    total *= cells;
    if (total > static_cast<double>(cap))
      throw TooLarge("MAX-LINREV enumeration exceeds cap");
  }
  LinRevBrute best;
  best.value = -1.0;
  std::vector<int> xi(prob.n, 0), p(prob.n, 0);
  const int np = prob.num_posteriors;
  const int gp = static_cast<int>(prob.grid.size());
  auto walk = [&](auto&& self, int i) -> void {
    if (i == prob.n) {
      double obj = linrev_objective(prob, xi, p);
      if (obj > best.value) best = {obj, xi, p};
      return;
    }
    for (xi[i] = 0; xi[i] < np; ++xi[i])
      for (p[i] = 0; p[i] < gp; ++p[i]) self(self, i + 1);
  };
  walk(walk, 0);
  return best;
}

// Single-buyer auction from a graph: one state per vertex, uniform prior;
// vertex valuations are 1 on the own state, 0 on neighbours, 1/2 elsewhere,
// each with probability 1/m^2; the remaining mass sits on a flat vector at
// 1/2 + l/((1-eps)2m), clamped into the valuation range.
inline AuctionInstance gen_hardness_instance(const Graph& graph, int k = 2, int l = 5,
                                             double eps = 0.5) {
  (void)k;
  graph.validate();
  const int m = graph.m;
  AuctionInstance inst;
  inst.states.reserve(m);
  for (int u = 0; u < m; ++u) inst.states.push_back("v" + std::to_string(u));
  inst.prior.assign(m, 1.0 / m);

  ValuationDistribution dist;
  for (int u = 0; u < m; ++u) {
    ValuationDistribution::Atom atom;
    atom.values.assign(m, 0.5);
    atom.values[u] = 1.0;
    for (int v = 0; v < m; ++v)
      if (graph.adjacent(u, v)) atom.values[v] = 0.0;
    atom.prob = 1.0 / (static_cast<double>(m) * m);
    dist.support.push_back(std::move(atom));
  }
  ValuationDistribution::Atom outside;
  outside.values.assign(m, std::min(1.0, 0.5 + l / ((1.0 - eps) * 2.0 * m)));
  outside.prob = 1.0 - 1.0 / m;
  dist.support.push_back(std::move(outside));

  inst.buyers.push_back(std::move(dist));
  inst.validate();
  return inst;
}

inline AuctionInstance gen_random_instance(std::uint64_t seed, int n, int d,
                                           int support_size) {
  if (n < 1 || d < 1 || support_size < 1)
    throw InvalidInstance("n, d and support size must be >= 1");
  Rng rng(seed);
  AuctionInstance inst;
  inst.states.reserve(d);
  for (int j = 0; j < d; ++j) inst.states.push_back("t" + std::to_string(j));

  auto normalized = [&](int count) {
    std::vector<double> v(count);
    double sum = 0.0;
    for (double& x : v) {
      x = rng.uniform01() + 1e-9;  // keep entries strictly positive
      sum += x;
    }
    double acc = 0.0;
    for (int j = 0; j + 1 < count; ++j) {
      v[j] /= sum;
      acc += v[j];
    }
    v[count - 1] = 1.0 - acc;  // exact unit sum
    return v;
  };

  inst.prior = normalized(d);
  for (int i = 0; i < n; ++i) {
    ValuationDistribution dist;
    std::vector<double> probs = normalized(support_size);
    for (int s = 0; s < support_size; ++s) {
      ValuationDistribution::Atom atom;
      atom.values.resize(d);
      for (int j = 0; j < d; ++j) atom.values[j] = rng.uniform01();
      atom.prob = probs[s];
      dist.support.push_back(std::move(atom));
    }
    inst.buyers.push_back(std::move(dist));
  }
  inst.validate();
  return inst;
}

}  // namespace signalprice
