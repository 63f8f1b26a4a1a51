#pragma once

#include <vector>

#include "signalprice/errors.hpp"
#include "signalprice/pricing.hpp"

namespace signalprice {

// max over (xi, p) of Rev(V, p, xi) + sum_i w[i][xi_i][p_i], with xi_i
// ranging over a shared posterior set and p_i over the price grid. Both the
// dynamic program and the exhaustive oracle consume this flattened form:
// the per-buyer buy probabilities z and the linear bonuses w, indexed by
// (buyer, posterior index, price index).
struct LinRevProblem {
  int n = 0;                   // buyers
  int num_posteriors = 0;      // |Xi^q_i|
  std::vector<double> grid;    // P^b values, size b+1
  std::vector<double> z;       // buy probabilities, [i][xi][p]
  std::vector<double> w;       // linear bonuses, [i][xi][p]

  int cells_per_buyer() const {
    return num_posteriors * static_cast<int>(grid.size());
  }
  int idx(int i, int xi, int p) const {
    return (i * num_posteriors + xi) * static_cast<int>(grid.size()) + p;
  }
};

// Builds the z table from per-buyer scalar distributions, one per posterior
// (the projections of each buyer's valuation law onto each posterior).
inline LinRevProblem make_linrev_problem(
    const std::vector<std::vector<ScalarDistribution>>& projected, int b,
    std::vector<double> w) {
  LinRevProblem prob;
  prob.n = static_cast<int>(projected.size());
  if (prob.n == 0) throw InvalidInstance("no buyers");
  prob.num_posteriors = static_cast<int>(projected[0].size());
  prob.grid = PriceGrid{b}.values();
  prob.z.assign(static_cast<std::size_t>(prob.n) * prob.cells_per_buyer(), 0.0);
  for (int i = 0; i < prob.n; ++i) {
    if (static_cast<int>(projected[i].size()) != prob.num_posteriors)
      throw InvalidInstance("posterior set size mismatch across buyers");
    for (int xi = 0; xi < prob.num_posteriors; ++xi)
      for (int p = 0; p < static_cast<int>(prob.grid.size()); ++p)
        prob.z[prob.idx(i, xi, p)] =
            scalar_buy_probability(projected[i][xi], prob.grid[p]);
  }
  if (w.empty()) w.assign(prob.z.size(), 0.0);
  if (w.size() != prob.z.size()) throw InvalidInstance("w table size mismatch");
  prob.w = std::move(w);
  return prob;
}

// Rev(V, p, xi) for a concrete (xi, p) assignment, from the z table.
inline double linrev_revenue(const LinRevProblem& prob, const std::vector<int>& xi,
                             const std::vector<int>& p) {
  double rev = 0.0;
  for (int i = prob.n - 1; i >= 0; --i) {
    double zi = prob.z[prob.idx(i, xi[i], p[i])];
    rev = zi * prob.grid[p[i]] + (1.0 - zi) * rev;
  }
  return rev;
}

inline double linrev_objective(const LinRevProblem& prob, const std::vector<int>& xi,
                               const std::vector<int>& p) {
  double obj = linrev_revenue(prob, xi, p);
  for (int i = 0; i < prob.n; ++i) obj += prob.w[prob.idx(i, xi[i], p[i])];
  return obj;
}

}  // namespace signalprice
