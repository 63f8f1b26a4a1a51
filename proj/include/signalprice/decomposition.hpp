#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "signalprice/core.hpp"
#include "signalprice/errors.hpp"
#include "signalprice/random.hpp"

namespace signalprice {

// All posteriors with entries in {0, 1/q, ..., 1}: averages of multisets of
// q basis vectors. Stored as integer count vectors so membership and
// identity are exact.
struct QUniformSet {
  int d = 0;
  int q = 0;
  std::vector<std::vector<int>> counts;  // each sums to q
  std::vector<Posterior> posteriors;     // counts scaled by 1/q

  std::size_t size() const { return counts.size(); }
};

inline double binomial_coefficient(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double c = 1.0;
  for (int j = 1; j <= k; ++j) c = c * (n - k + j) / j;
  return c;
}

inline std::size_t q_uniform_count(int d, int q) {
  double c = binomial_coefficient(q + d - 1, d - 1);
  return static_cast<std::size_t>(std::llround(c));
}

// Count vectors in lexicographically decreasing order, so basis vector e_1
// comes first and e_d last.
inline QUniformSet enumerate_q_uniform(int d, int q,
                                       std::size_t cap = default_cell_cap()) {
  if (d < 1 || q < 1) throw InvalidInstance("d and q must be >= 1");
  double count = binomial_coefficient(q + d - 1, d - 1);
  if (count > static_cast<double>(cap))
    throw TooLarge("q-uniform set has " + std::to_string(count) + " elements, cap " +
                   std::to_string(cap));
  QUniformSet set;
  set.d = d;
  set.q = q;
  std::vector<int> k(d, 0);
  auto emit = [&](auto&& self, int pos, int rem) -> void {
    if (pos == d - 1) {
      k[pos] = rem;
      set.counts.push_back(k);
      Posterior xi;
      xi.probs.resize(d);
      for (int j = 0; j < d; ++j) xi.probs[j] = static_cast<double>(k[j]) / q;
      set.posteriors.push_back(std::move(xi));
      return;
    }
    for (int v = rem; v >= 0; --v) {
      k[pos] = v;
      self(self, pos + 1, rem - v);
    }
  };
  emit(emit, 0, q);
  return set;
}

// Weighted posterior set; valid when the weights form a distribution and
// the weighted mean matches `mean` (the consistency condition).
struct PosteriorDistribution {
  struct Atom {
    Posterior posterior;
    double weight = 0.0;
  };
  std::vector<Atom> atoms;
  Posterior mean;

  void validate() const {
    double sum = 0.0;
    std::vector<double> m(mean.probs.size(), 0.0);
    for (const Atom& a : atoms) {
      if (!(a.weight > 0.0)) throw InconsistentDistribution("non-positive atom weight");
      sum += a.weight;
      for (std::size_t j = 0; j < m.size(); ++j) m[j] += a.weight * a.posterior.probs[j];
    }
    if (std::abs(sum - 1.0) > kInputTol)
      throw InconsistentDistribution("weights do not sum to 1");
    for (std::size_t j = 0; j < m.size(); ++j)
      if (std::abs(m[j] - mean.probs[j]) > kInputTol)
        throw InconsistentDistribution("weighted mean does not match prior");
  }
};

// Exact law of the empirical mean of q i.i.d. draws of basis vectors with
// state probabilities xi: atom (k_1..k_d)/q has multinomial weight
// multinomial(q;k) * prod_j xi_j^{k_j}. Zero-weight atoms are omitted by
// enumerating over the support of xi only. Weights are accumulated in long
// double so the mean matches xi to ~1e-15 even for q in the hundreds.
inline PosteriorDistribution decompose(const Posterior& xi, int q,
                                       std::size_t cap = default_cell_cap()) {
  if (q < 1) throw InvalidInstance("q must be >= 1");
  xi.validate();
  const int d = xi.dim();

  std::vector<int> support;
  for (int j = 0; j < d; ++j)
    if (xi.probs[j] > 0.0) support.push_back(j);
  const int ds = static_cast<int>(support.size());
  double count = binomial_coefficient(q + ds - 1, ds - 1);
  if (count > static_cast<double>(cap))
    throw TooLarge("decomposition has " + std::to_string(count) + " atoms, cap " +
                   std::to_string(cap));

  PosteriorDistribution out;
  out.mean = xi;

  std::vector<int> k(ds, 0);
  // weight carried as prod over placed states of C(rem, k_j) xi_j^{k_j}
  auto emit = [&](auto&& self, int pos, int rem, long double weight) -> void {
    if (pos == ds - 1) {
      long double w = weight * std::pow(static_cast<long double>(xi.probs[support[pos]]),
                                        static_cast<long double>(rem));
      k[pos] = rem;
      if (w > 0.0L) {
        Posterior atom;
        atom.probs.assign(d, 0.0);
        for (int j = 0; j < ds; ++j)
          atom.probs[support[j]] = static_cast<double>(k[j]) / q;
        out.atoms.push_back({std::move(atom), static_cast<double>(w)});
      }
      return;
    }
    long double choose = 1.0L;
    long double p_pow = 1.0L;
    const long double pj = xi.probs[support[pos]];
    for (int v = 0; v <= rem; ++v) {
      k[pos] = v;
      self(self, pos + 1, rem - v, weight * choose * p_pow);
      choose = choose * (rem - v) / (v + 1);
      p_pow *= pj;
    }
  };
  emit(emit, 0, q, 1.0L);
  return out;
}

// Monte-Carlo stand-in for decompose when the exact atom set would blow the
// cap: empirical mean vectors of `draws` simulations, merged.
inline PosteriorDistribution decompose_sampled(const Posterior& xi, int q, int draws,
                                               std::uint64_t seed) {
  if (q < 1 || draws < 1) throw InvalidInstance("q and draws must be >= 1");
  xi.validate();
  const int d = xi.dim();
  Rng rng(seed);
  std::map<std::vector<int>, long long> hist;
  for (int t = 0; t < draws; ++t) {
    std::vector<int> k(d, 0);
    for (int j = 0; j < q; ++j) k[rng.pick(xi.probs)]++;
    hist[k]++;
  }
  PosteriorDistribution out;
  std::vector<double> m(d, 0.0);
  for (const auto& [k, c] : hist) {
    Posterior atom;
    atom.probs.resize(d);
    for (int j = 0; j < d; ++j) atom.probs[j] = static_cast<double>(k[j]) / q;
    double w = static_cast<double>(c) / draws;
    for (int j = 0; j < d; ++j) m[j] += w * atom.probs[j];
    out.atoms.push_back({std::move(atom), w});
  }
  out.mean = Posterior{std::move(m)};
  return out;
}

// Pr_{xi~gamma}[ V_i xi' >= V_i xi - eps ] >= 1 - alpha for every row of V,
// evaluated exactly over the finite atom set.
inline bool is_decreasing(const PosteriorDistribution& gamma, const Posterior& xi,
                          const std::vector<std::vector<double>>& V, double alpha,
                          double eps) {
  for (const auto& row : V) {
    if (row.size() != xi.probs.size())
      throw InvalidInstance("valuation/posterior dimension mismatch");
    double base = dot(row, xi);
    double mass = 0.0;
    for (const auto& a : gamma.atoms)
      if (dot(row, a.posterior) >= base - eps) mass += a.weight;
    if (mass < 1.0 - alpha) return false;
  }
  return true;
}

// Decomposition grain guaranteeing an (alpha, eps)-decreasing law.
inline int q_for(double alpha, double eps) {
  if (!(alpha > 0.0 && alpha < 1.0 && eps > 0.0 && eps < 1.0))
    throw InvalidInstance("alpha and eps must lie in (0,1)");
  return static_cast<int>(std::ceil(32.0 / (eps * eps) * std::log(4.0 / alpha)));
}

// Grain used by the public solver at accuracy eta.
inline int q_public(double eta) {
  if (!(eta > 0.0 && eta < 1.0)) throw InvalidInstance("eta must lie in (0,1)");
  return static_cast<int>(std::ceil(128.0 / (eta * eta) * std::log(6.0 / eta)));
}

}  // namespace signalprice
