#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "signalprice/core.hpp"
#include "signalprice/errors.hpp"
#include "signalprice/random.hpp"

namespace signalprice {

// Scalar-valuation counterpart of ValuationDistribution, for the
// non-Bayesian auctions obtained by projecting onto a posterior.
struct ScalarDistribution {
  struct Atom {
    double value = 0.0;
    double prob = 0.0;
  };
  std::vector<Atom> support;  // sorted ascending by value, values distinct

  void validate() const {
    double sum = 0.0;
    for (const Atom& a : support) {
      if (!(a.prob > 0.0)) throw InvalidInstance("scalar atom with non-positive probability");
      if (!(a.value >= 0.0 && a.value <= 1.0))
        throw InvalidInstance("scalar valuation outside [0,1]");
      sum += a.prob;
    }
    if (std::abs(sum - 1.0) > kInputTol)
      throw InvalidInstance("scalar probabilities do not sum to 1");
  }

  static ScalarDistribution from_pairs(std::vector<Atom> atoms) {
    std::sort(atoms.begin(), atoms.end(),
              [](const Atom& a, const Atom& b) { return a.value < b.value; });
    ScalarDistribution d;
    for (const Atom& a : atoms) {
      if (!d.support.empty() && d.support.back().value == a.value)
        d.support.back().prob += a.prob;
      else
        d.support.push_back(a);
    }
    return d;
  }
};

// Prices {x/b : x = 0..b}.
struct PriceGrid {
  int b = 1;

  std::vector<double> values() const {
    std::vector<double> v(b + 1);
    for (int x = 0; x <= b; ++x) v[x] = static_cast<double>(x) / b;
    return v;
  }
};

struct PricingResult {
  PriceVector prices;
  double estimate = 0.0;  // revenue under the empirical distribution
};

struct PricingOutcome {
  PriceVector prices;
  double value = 0.0;
};

inline double scalar_buy_probability(const ScalarDistribution& dist, double price) {
  double z = 0.0;
  for (const auto& a : dist.support)
    if (a.value >= price - kBuyTol) z += a.prob;
  return std::min(z, 1.0);
}

// Rev(V, p) for a non-Bayesian auction, by the backward recursion.
inline double scalar_revenue(const std::vector<ScalarDistribution>& dists,
                             const PriceVector& prices) {
  if (dists.size() != prices.prices.size())
    throw InvalidInstance("dists/prices dimension mismatch");
  double rev = 0.0;
  for (int i = static_cast<int>(dists.size()) - 1; i >= 0; --i) {
    double z = scalar_buy_probability(dists[i], prices.prices[i]);
    rev = z * prices.prices[i] + (1.0 - z) * rev;
  }
  return rev;
}

inline double scalar_revenue_from(const std::vector<ScalarDistribution>& dists,
                                  const PriceVector& prices, int start_buyer) {
  double rev = 0.0;
  for (int i = static_cast<int>(dists.size()) - 1; i >= start_buyer - 1; --i) {
    double z = scalar_buy_probability(dists[i], prices.prices[i]);
    rev = z * prices.prices[i] + (1.0 - z) * rev;
  }
  return rev;
}

// Pushforward of buyer i's valuation distribution under v -> v . xi_i,
// with equal scalar values merged.
inline std::vector<ScalarDistribution> project(const AuctionInstance& inst,
                                               const PosteriorProfile& profile) {
  const int n = inst.num_buyers();
  if (static_cast<int>(profile.per_buyer.size()) != n)
    throw InvalidInstance("profile dimension mismatch");
  std::vector<ScalarDistribution> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    std::vector<ScalarDistribution::Atom> atoms;
    atoms.reserve(inst.buyers[i].support.size());
    for (const auto& a : inst.buyers[i].support) {
      if (a.values.size() != profile.per_buyer[i].probs.size())
        throw InvalidInstance("valuation/posterior dimension mismatch");
      atoms.push_back({dot(a.values, profile.per_buyer[i]), a.prob});
    }
    out.push_back(ScalarDistribution::from_pairs(std::move(atoms)));
  }
  return out;
}

namespace detail {

// Backward induction over an explicit candidate price set per buyer.
// The objective p*Pr[v>=p] + (1-Pr)*r is piecewise linear in p with
// breakpoints only at support values, so support values plus a no-sale
// price of 1 are enough for the exact optimum. Ties go to the higher price.
inline PricingOutcome induct(const std::vector<ScalarDistribution>& dists,
                             const std::vector<std::vector<double>>& candidates) {
  const int n = static_cast<int>(dists.size());
  PricingOutcome out;
  out.prices.prices.assign(n, 1.0);
  double r = 0.0;
  for (int i = n - 1; i >= 0; --i) {
    double best_obj = -1.0;
    double best_p = 1.0;
    for (double p : candidates[i]) {
      double z = scalar_buy_probability(dists[i], p);
      double obj = z * p + (1.0 - z) * r;
      if (obj > best_obj || (obj == best_obj && p > best_p)) {
        best_obj = obj;
        best_p = p;
      }
    }
    out.prices.prices[i] = best_p;
    r = best_obj;
  }
  out.value = r;
  return out;
}

}  // namespace detail

// Exact optimum of max_p Rev(V, p) over p in [0,1]^n.
inline PricingOutcome exact_optimal_prices(const std::vector<ScalarDistribution>& dists) {
  if (dists.empty()) throw InvalidInstance("no buyers");
  const int n = static_cast<int>(dists.size());
  std::vector<std::vector<double>> candidates(n);
  for (int i = 0; i < n; ++i) {
    if (dists[i].support.empty()) throw InvalidInstance("empty scalar distribution");
    for (const auto& a : dists[i].support) candidates[i].push_back(a.value);
    if (candidates[i].back() != 1.0) candidates[i].push_back(1.0);
  }
  return detail::induct(dists, candidates);
}

// Exact optimum restricted to the price grid P^b.
inline PricingOutcome optimal_prices_on_grid(const std::vector<ScalarDistribution>& dists,
                                             int b) {
  if (dists.empty()) throw InvalidInstance("no buyers");
  if (b < 1) throw InvalidInstance("grid size must be >= 1");
  std::vector<std::vector<double>> candidates(dists.size(), PriceGrid{b}.values());
  return detail::induct(dists, candidates);
}

// Empirical distribution of K i.i.d. draws, merged per support atom.
inline ScalarDistribution empirical_of(const ScalarDistribution& dist, long long K,
                                       Rng& rng) {
  std::vector<double> pmf;
  pmf.reserve(dist.support.size());
  for (const auto& a : dist.support) pmf.push_back(a.prob);
  std::vector<long long> counts(dist.support.size(), 0);
  for (long long k = 0; k < K; ++k) counts[rng.pick(pmf)]++;
  std::vector<ScalarDistribution::Atom> atoms;
  for (std::size_t j = 0; j < counts.size(); ++j)
    if (counts[j] > 0)
      atoms.push_back({dist.support[j].value,
                       static_cast<double>(counts[j]) / static_cast<double>(K)});
  return ScalarDistribution::from_pairs(std::move(atoms));
}

// Sample K valuations per buyer, then run the grid-restricted backward
// induction on the empirical distributions; returns the grid prices and the
// empirical revenue estimate.
inline PricingResult find_apx_prices(const std::vector<ScalarDistribution>& dists,
                                     long long K, int b, std::uint64_t seed) {
  if (K < 1) throw InvalidInstance("sample count must be >= 1");
  std::vector<ScalarDistribution> empirical;
  empirical.reserve(dists.size());
  for (std::size_t i = 0; i < dists.size(); ++i) {
    Rng rng(derive_seed(seed, i));
    empirical.push_back(empirical_of(dists[i], K, rng));
  }
  PricingOutcome got = optimal_prices_on_grid(empirical, b);
  return PricingResult{got.prices, got.value};
}

// One backward pass p_i <- max(p_i, Rev_{>i}) under the already-lifted
// suffix; afterwards p_i >= Rev_{>i}(V, p) for every i and the revenue has
// not decreased.
inline PriceVector lift_prices(const std::vector<ScalarDistribution>& dists,
                               const PriceVector& prices) {
  prices.validate();
  const int n = static_cast<int>(dists.size());
  if (static_cast<int>(prices.prices.size()) != n)
    throw InvalidInstance("dists/prices dimension mismatch");
  PriceVector lifted = prices;
  double suffix = 0.0;  // Rev_{>i} under lifted suffix prices
  for (int i = n - 1; i >= 0; --i) {
    lifted.prices[i] = std::max(lifted.prices[i], suffix);
    double z = scalar_buy_probability(dists[i], lifted.prices[i]);
    suffix = z * lifted.prices[i] + (1.0 - z) * suffix;
  }
  return lifted;
}

// Slightly-decreased distributions: each support value w maps to
// max(w - eps, 0), so Pr[v' >= p - eps] >= Pr[v >= p] at every price.
inline std::vector<ScalarDistribution> decrease_distribution(
    const std::vector<ScalarDistribution>& dists, double eps) {
  if (!(eps > 0.0)) throw InvalidInstance("eps must be positive");
  std::vector<ScalarDistribution> out;
  out.reserve(dists.size());
  for (const auto& d : dists) {
    std::vector<ScalarDistribution::Atom> atoms;
    atoms.reserve(d.support.size());
    for (const auto& a : d.support) atoms.push_back({std::max(a.value - eps, 0.0), a.prob});
    out.push_back(ScalarDistribution::from_pairs(std::move(atoms)));
  }
  return out;
}

// Sample/grid sizes with the guarantee constants; exposed because the
// constants are loose in practice and callers may override.
inline int worst_case_grid(double eps) {
  return static_cast<int>(std::ceil(2.0 / eps));
}

inline long long worst_case_samples(double eps, double tau, int n) {
  double b = std::ceil(2.0 / eps);
  double k = (8.0 / (eps * eps)) * (std::log(2.0) + n * std::log(b) - std::log(tau));
  return static_cast<long long>(std::ceil(std::max(k, 1.0)));
}

}  // namespace signalprice
