#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "signalprice/errors.hpp"
#include "signalprice/random.hpp"

namespace signalprice {

// A point of the probability simplex over states.
struct Posterior {
  std::vector<double> probs;

  int dim() const { return static_cast<int>(probs.size()); }

  void validate() const {
    double sum = 0.0;
    for (double p : probs) {
      if (!(p >= -kInputTol)) throw InvalidInstance("posterior entry negative");
      sum += p;
    }
    if (std::abs(sum - 1.0) > kInputTol)
      throw InvalidInstance("posterior does not sum to 1");
  }

  static Posterior basis(int d, int state) {
    Posterior xi;
    xi.probs.assign(d, 0.0);
    xi.probs[state] = 1.0;
    return xi;
  }
};

// One posterior per buyer.
struct PosteriorProfile {
  std::vector<Posterior> per_buyer;

  static PosteriorProfile common(const Posterior& xi, int n) {
    PosteriorProfile prof;
    prof.per_buyer.assign(n, xi);
    return prof;
  }
};

struct PriceVector {
  std::vector<double> prices;

  void validate() const {
    for (double p : prices)
      if (!(p >= 0.0 && p <= 1.0)) throw InvalidInstance("price outside [0,1]");
  }
};

// Finite-support distribution over valuation vectors in [0,1]^d.
struct ValuationDistribution {
  struct Atom {
    std::vector<double> values;
    double prob = 0.0;
  };
  std::vector<Atom> support;

  void validate(int d) const {
    double sum = 0.0;
    for (const Atom& a : support) {
      if (static_cast<int>(a.values.size()) != d)
        throw InvalidInstance("valuation vector has wrong dimension");
      if (!(a.prob > 0.0)) throw InvalidInstance("support atom with non-positive probability");
      for (double v : a.values)
        if (!(v >= 0.0 && v <= 1.0)) throw InvalidInstance("valuation outside [0,1]");
      sum += a.prob;
    }
    if (std::abs(sum - 1.0) > kInputTol)
      throw InvalidInstance("valuation probabilities do not sum to 1");
  }
};

struct AuctionInstance {
  std::vector<std::string> states;
  std::vector<double> prior;
  std::vector<ValuationDistribution> buyers;

  int num_states() const { return static_cast<int>(states.size()); }
  int num_buyers() const { return static_cast<int>(buyers.size()); }

  void validate() const {
    const int d = num_states();
    if (d == 0) throw InvalidInstance("no states");
    if (buyers.empty()) throw InvalidInstance("no buyers");
    if (static_cast<int>(prior.size()) != d)
      throw InvalidInstance("prior dimension mismatch");
    double sum = 0.0;
    for (double p : prior) {
      if (!(p >= 0.0)) throw InvalidInstance("prior entry negative");
      sum += p;
    }
    if (std::abs(sum - 1.0) > kInputTol) throw InvalidInstance("prior does not sum to 1");
    for (const auto& b : buyers) b.validate(d);
  }

  Posterior prior_posterior() const { return Posterior{prior}; }
};

// Randomized map from states to signal profiles plus a factorized price
// function. Kernels are stored sparsely over profiles; signal labels are
// opaque strings, profiles reference them by per-buyer index.
struct SignalingScheme {
  struct KernelEntry {
    std::vector<int> profile;  // signal index per buyer
    double prob = 0.0;
  };

  std::vector<std::vector<std::string>> signals;   // per buyer
  std::vector<std::vector<KernelEntry>> kernel;    // per state
  std::vector<std::vector<double>> prices;         // per buyer, aligned with signals; NaN = undefined

  int num_buyers() const { return static_cast<int>(signals.size()); }

  int signal_index(int buyer, const std::string& label) const {
    const auto& labels = signals.at(buyer);
    auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) throw InvalidScheme("unknown signal label: " + label);
    return static_cast<int>(it - labels.begin());
  }

  void validate(const AuctionInstance& inst) const {
    const int n = inst.num_buyers();
    const int d = inst.num_states();
    if (num_buyers() != n || static_cast<int>(prices.size()) != n)
      throw InvalidScheme("scheme buyer count mismatch");
    if (static_cast<int>(kernel.size()) != d) throw InvalidScheme("kernel state count mismatch");
    for (int i = 0; i < n; ++i)
      if (prices[i].size() != signals[i].size())
        throw InvalidScheme("price table size mismatch");
    for (int theta = 0; theta < d; ++theta) {
      double row = 0.0;
      for (const KernelEntry& e : kernel[theta]) {
        if (static_cast<int>(e.profile.size()) != n)
          throw InvalidScheme("kernel profile arity mismatch");
        for (int i = 0; i < n; ++i) {
          int s = e.profile[i];
          if (s < 0 || s >= static_cast<int>(signals[i].size()))
            throw InvalidScheme("kernel references unknown signal");
          if (e.prob > 0.0 && std::isnan(prices[i][s]))
            throw InvalidScheme("price undefined for live signal");
        }
        if (e.prob < -kInputTol) throw InvalidScheme("negative kernel probability");
        row += e.prob;
      }
      if (std::abs(row - 1.0) > kDerivedTol)
        throw InvalidScheme("kernel row does not sum to 1");
    }
  }
};

// K valuation matrices drawn i.i.d. from an instance's distributions.
struct EmpiricalSample {
  std::vector<std::vector<std::vector<double>>> draws;  // [k][buyer] -> valuation vector
  std::uint64_t seed = 0;
};

inline double dot(const std::vector<double>& v, const Posterior& xi) {
  double acc = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j) acc += v[j] * xi.probs[j];
  return acc;
}

// Pr_{v~dist}[ v . xi >= price ]; equality counts as buying.
inline double buy_probability(const ValuationDistribution& dist, const Posterior& xi,
                              double price) {
  if (!(price >= 0.0 && price <= 1.0)) throw InvalidInstance("price outside [0,1]");
  double z = 0.0;
  for (const auto& atom : dist.support) {
    if (atom.values.size() != xi.probs.size())
      throw InvalidInstance("valuation/posterior dimension mismatch");
    if (dot(atom.values, xi) >= price - kBuyTol) z += atom.prob;
  }
  return std::min(z, 1.0);
}

// Seller's expected revenue restricted to buyers start..n (1-based start);
// backward recursion Rev_{>=i} = z_i p_i + (1 - z_i) Rev_{>=i+1}.
inline double revenue_from(const AuctionInstance& inst, const PosteriorProfile& profile,
                           const PriceVector& prices, int start_buyer) {
  const int n = inst.num_buyers();
  if (start_buyer < 1 || start_buyer > n + 1)
    throw InvalidInstance("start buyer out of range");
  if (static_cast<int>(profile.per_buyer.size()) != n ||
      static_cast<int>(prices.prices.size()) != n)
    throw InvalidInstance("profile/prices dimension mismatch");
  double rev = 0.0;
  for (int i = n; i >= start_buyer; --i) {
    double z = buy_probability(inst.buyers[i - 1], profile.per_buyer[i - 1],
                               prices.prices[i - 1]);
    rev = z * prices.prices[i - 1] + (1.0 - z) * rev;
  }
  return rev;
}

inline double revenue(const AuctionInstance& inst, const PosteriorProfile& profile,
                      const PriceVector& prices) {
  return revenue_from(inst, profile, prices, 1);
}

// Marginal probability of a buyer's signal under one state:
// phi_{i,theta}(s_i) = sum over profiles fixing s_i.
inline double signal_marginal(const SignalingScheme& scheme, int theta, int buyer,
                              int signal) {
  double m = 0.0;
  for (const auto& e : scheme.kernel[theta])
    if (e.profile[buyer] == signal) m += e.prob;
  return m;
}

// Bayes posterior of a buyer's signal.
inline Posterior posterior_of_signal(const AuctionInstance& inst,
                                     const SignalingScheme& scheme, int buyer,
                                     const std::string& signal) {
  const int d = inst.num_states();
  int s = scheme.signal_index(buyer, signal);
  Posterior xi;
  xi.probs.assign(d, 0.0);
  double denom = 0.0;
  for (int theta = 0; theta < d; ++theta) {
    double w = inst.prior[theta] * signal_marginal(scheme, theta, buyer, s);
    xi.probs[theta] = w;
    denom += w;
  }
  if (denom <= 0.0) throw ZeroProbabilitySignal("signal has zero marginal probability");
  for (double& p : xi.probs) p /= denom;
  return xi;
}

// Expected revenue of a committed (scheme, price function) pair:
// sum_theta mu_theta sum_s phi_theta(s) Rev(V, f(s), xi_s).
inline double scheme_value(const AuctionInstance& inst, const SignalingScheme& scheme) {
  scheme.validate(inst);
  const int n = inst.num_buyers();
  const int d = inst.num_states();

  // Posteriors depend on the per-buyer signal only; compute them once.
  std::vector<std::vector<Posterior>> xi(n);
  for (int i = 0; i < n; ++i) {
    xi[i].resize(scheme.signals[i].size());
    for (std::size_t s = 0; s < scheme.signals[i].size(); ++s) {
      double denom = 0.0;
      Posterior post;
      post.probs.assign(d, 0.0);
      for (int theta = 0; theta < d; ++theta) {
        double w = inst.prior[theta] * signal_marginal(scheme, theta, i, static_cast<int>(s));
        post.probs[theta] = w;
        denom += w;
      }
      if (denom > 0.0)
        for (double& p : post.probs) p /= denom;
      xi[i][s] = post;
    }
  }

  double total = 0.0;
  for (int theta = 0; theta < d; ++theta) {
    for (const auto& e : scheme.kernel[theta]) {
      if (e.prob <= 0.0) continue;
      PosteriorProfile prof;
      PriceVector pv;
      prof.per_buyer.reserve(n);
      pv.prices.reserve(n);
      for (int i = 0; i < n; ++i) {
        prof.per_buyer.push_back(xi[i][e.profile[i]]);
        pv.prices.push_back(scheme.prices[i][e.profile[i]]);
      }
      total += inst.prior[theta] * e.prob * revenue(inst, prof, pv);
    }
  }
  return total;
}

// K i.i.d. valuation matrices; per-buyer sub-seeds keep the draw for buyer i
// independent of the other buyers' support sizes.
inline EmpiricalSample sample_valuations(const AuctionInstance& inst, int K,
                                         std::uint64_t seed) {
  if (K < 1) throw InvalidInstance("sample count must be >= 1");
  const int n = inst.num_buyers();
  EmpiricalSample out;
  out.seed = seed;
  out.draws.assign(K, std::vector<std::vector<double>>(n));

  for (int i = 0; i < n; ++i) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    std::vector<double> pmf;
    pmf.reserve(inst.buyers[i].support.size());
    for (const auto& atom : inst.buyers[i].support) pmf.push_back(atom.prob);
    for (int k = 0; k < K; ++k)
      out.draws[k][i] = inst.buyers[i].support[rng.pick(pmf)].values;
  }
  return out;
}

}  // namespace signalprice
