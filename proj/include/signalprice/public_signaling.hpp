#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "signalprice/core.hpp"
#include "signalprice/decomposition.hpp"
#include "signalprice/errors.hpp"
#include "signalprice/pricing.hpp"
#include "signalprice/simplex.hpp"

namespace signalprice {

struct PublicCoefficient {
  PriceVector prices;
  double estimate = 0.0;
};

// Approximate objective coefficients: for each posterior, project the
// instance onto it and run the sampling price search. Sub-seeds are derived
// per posterior, so estimates are independent of evaluation order.
inline std::vector<PublicCoefficient> estimate_coefficients(const AuctionInstance& inst,
                                                            const QUniformSet& posteriors,
                                                            long long K, int b,
                                                            std::uint64_t seed) {
  if (K < 1 || b < 1) throw InvalidInstance("K and b must be >= 1");
  std::vector<PublicCoefficient> out;
  out.reserve(posteriors.size());
  const int n = inst.num_buyers();
  for (std::size_t k = 0; k < posteriors.size(); ++k) {
    auto dists = project(inst, PosteriorProfile::common(posteriors.posteriors[k], n));
    PricingResult r = find_apx_prices(dists, K, b, derive_seed(seed, k));
    out.push_back({r.prices, r.estimate});
  }
  return out;
}

// Sampling-free coefficients: exact backward induction per posterior,
// either grid-restricted or over all of [0,1].
inline std::vector<PublicCoefficient> exact_coefficients(const AuctionInstance& inst,
                                                         const QUniformSet& posteriors,
                                                         std::optional<int> grid_b) {
  std::vector<PublicCoefficient> out;
  out.reserve(posteriors.size());
  const int n = inst.num_buyers();
  for (std::size_t k = 0; k < posteriors.size(); ++k) {
    auto dists = project(inst, PosteriorProfile::common(posteriors.posteriors[k], n));
    PricingOutcome r =
        grid_b ? optimal_prices_on_grid(dists, *grid_b) : exact_optimal_prices(dists);
    out.push_back({r.prices, r.value});
  }
  return out;
}

namespace detail {

// max sum_k gamma_k U_k  s.t.  sum_k gamma_k xi_k(theta) = mu_theta, gamma >= 0.
// (Summing the consistency rows forces sum gamma = 1.)
inline LpSolution solve_consistency_lp(const std::vector<Posterior>& posteriors,
                                       const std::vector<double>& coeffs,
                                       const std::vector<double>& prior) {
  LpProblem lp;
  lp.num_vars = static_cast<int>(posteriors.size());
  lp.objective = coeffs;
  const int d = static_cast<int>(prior.size());
  for (int theta = 0; theta < d; ++theta) {
    std::vector<std::pair<int, double>> row;
    for (int k = 0; k < lp.num_vars; ++k) {
      double v = posteriors[k].probs[theta];
      if (v != 0.0) row.emplace_back(k, v);
    }
    lp.add_row(std::move(row), '=', prior[theta]);
  }
  return solve_lp(lp);
}

}  // namespace detail

struct PublicSolution {
  PosteriorDistribution gamma;          // positive-weight posteriors, mean = prior
  std::vector<PriceVector> price_map;   // aligned with gamma.atoms
  double value = 0.0;                   // exact revenue of (gamma, price_map)
  double lp_value = 0.0;                // objective under the coefficient estimates
};

inline PublicSolution solve_public(const AuctionInstance& inst, int q, long long K, int b,
                                   std::uint64_t seed, bool use_exact_coefficients = false,
                                   std::size_t cap = default_cell_cap()) {
  inst.validate();
  QUniformSet posteriors = enumerate_q_uniform(inst.num_states(), q, cap);
  std::vector<PublicCoefficient> coeffs =
      use_exact_coefficients ? exact_coefficients(inst, posteriors, b)
                             : estimate_coefficients(inst, posteriors, K, b, seed);

  std::vector<double> U(coeffs.size());
  for (std::size_t k = 0; k < coeffs.size(); ++k) U[k] = coeffs[k].estimate;
  LpSolution lp = detail::solve_consistency_lp(posteriors.posteriors, U, inst.prior);
  if (lp.status != LpStatus::Optimal)
    throw InfeasiblePrior(
        "consistency program not solvable for this prior; raise q so the prior "
        "lies on a finer posterior lattice");

  PublicSolution sol;
  sol.lp_value = lp.value;
  sol.gamma.mean = inst.prior_posterior();
  const int n = inst.num_buyers();
  for (std::size_t k = 0; k < posteriors.size(); ++k) {
    double wt = lp.x[k];
    if (wt <= 1e-15) continue;
    sol.gamma.atoms.push_back({posteriors.posteriors[k], wt});
    sol.price_map.push_back(coeffs[k].prices);
  }
  // The guarantee is about true revenue, so re-evaluate the chosen prices
  // exactly instead of trusting the sampled estimates.
  double value = 0.0;
  for (std::size_t k = 0; k < sol.gamma.atoms.size(); ++k)
    value += sol.gamma.atoms[k].weight *
             revenue(inst, PosteriorProfile::common(sol.gamma.atoms[k].posterior, n),
                     sol.price_map[k]);
  sol.value = value;
  return sol;
}

// One public signal per support atom: phi_theta(s_k) = gamma_k xi_k(theta) / mu_theta,
// f(s_k) = price_map[k]. Zero-prior states get a degenerate row; they never occur.
inline SignalingScheme recover_scheme_public(const AuctionInstance& inst,
                                             const PublicSolution& sol) {
  const int n = inst.num_buyers();
  const int d = inst.num_states();
  const std::size_t m = sol.gamma.atoms.size();
  if (m == 0) throw InconsistentDistribution("empty posterior distribution");

  std::vector<double> mass(d, 0.0);
  for (const auto& a : sol.gamma.atoms)
    for (int theta = 0; theta < d; ++theta) mass[theta] += a.weight * a.posterior.probs[theta];
  for (int theta = 0; theta < d; ++theta)
    if (std::abs(mass[theta] - inst.prior[theta]) > kDerivedTol)
      throw InconsistentDistribution("posterior distribution is not consistent with the prior");

  SignalingScheme scheme;
  scheme.signals.assign(n, {});
  scheme.prices.assign(n, {});
  for (std::size_t k = 0; k < m; ++k) {
    std::string label = "s" + std::to_string(k);
    for (int i = 0; i < n; ++i) {
      scheme.signals[i].push_back(label);
      scheme.prices[i].push_back(sol.price_map[k].prices[i]);
    }
  }
  scheme.kernel.assign(d, {});
  for (int theta = 0; theta < d; ++theta) {
    if (inst.prior[theta] > 0.0) {
      for (std::size_t k = 0; k < m; ++k) {
        double p = sol.gamma.atoms[k].weight * sol.gamma.atoms[k].posterior.probs[theta] /
                   inst.prior[theta];
        if (p > 0.0)
          scheme.kernel[theta].push_back({std::vector<int>(n, static_cast<int>(k)), p});
      }
    } else {
      scheme.kernel[theta].push_back({std::vector<int>(n, 0), 1.0});
    }
  }
  return scheme;
}

struct PublicParams {
  double eta = 0.0;
  double eps = 0.0;
  double tau = 0.0;
  int q = 0;
  int b = 0;
  long long K = 0;
};

// Accuracy-to-parameter map for the public solver at additive error lambda.
// tau splits the failure budget over the exact posterior count.
inline PublicParams public_params(double lambda, int n, int d) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw InvalidInstance("lambda must lie in (0,1)");
  PublicParams p;
  p.eta = lambda / 3.0;
  p.eps = lambda / 6.0;
  p.q = q_public(p.eta);
  double count = binomial_coefficient(p.q + d - 1, d - 1);
  if (!std::isfinite(count)) count = 1e300;
  p.tau = lambda / (3.0 * count);
  p.b = worst_case_grid(p.eps);
  p.K = worst_case_samples(p.eps, p.tau, n);
  return p;
}

}  // namespace signalprice
