#pragma once

#include "signalprice/signalprice.hpp"

namespace fixtures {

using namespace signalprice;

// Single buyer, two states (H, L), prior (0.3, 0.7); two equally likely
// valuation types (3/4, 1/4) and (1, 0). No-signaling optimum 0.3, best
// public value 0.35.
inline AuctionInstance two_type() {
  AuctionInstance inst;
  inst.states = {"H", "L"};
  inst.prior = {0.3, 0.7};
  ValuationDistribution dist;
  dist.support.push_back({{0.75, 0.25}, 0.5});
  dist.support.push_back({{1.0, 0.0}, 0.5});
  inst.buyers.push_back(dist);
  return inst;
}

// Single buyer with the single valuation vector (1, 0): signaling cannot
// beat the prior expectation 0.3.
inline AuctionInstance one_type() {
  AuctionInstance inst;
  inst.states = {"H", "L"};
  inst.prior = {0.3, 0.7};
  ValuationDistribution dist;
  dist.support.push_back({{1.0, 0.0}, 1.0});
  inst.buyers.push_back(dist);
  return inst;
}

// Two deterministic buyers with valuations 1/2 and 1: the instance where
// naively shifting prices down loses half the revenue.
inline std::vector<ScalarDistribution> two_buyer_deterministic() {
  ScalarDistribution first, second;
  first.support.push_back({0.5, 1.0});
  second.support.push_back({1.0, 1.0});
  return {first, second};
}

inline AuctionInstance two_buyer_deterministic_instance() {
  AuctionInstance inst;
  inst.states = {"only"};
  inst.prior = {1.0};
  ValuationDistribution b1, b2;
  b1.support.push_back({{0.5}, 1.0});
  b2.support.push_back({{1.0}, 1.0});
  inst.buyers = {b1, b2};
  return inst;
}

inline std::vector<ScalarDistribution> random_scalar_dists(Rng& rng, int n,
                                                           int max_support) {
  std::vector<ScalarDistribution> dists;
  for (int i = 0; i < n; ++i) {
    int support = 1 + static_cast<int>(rng.uniform01() * max_support);
    if (support > max_support) support = max_support;
    std::vector<ScalarDistribution::Atom> atoms;
    double total = 0.0;
    std::vector<double> weights(support);
    for (double& w : weights) {
      w = rng.uniform01() + 1e-3;
      total += w;
    }
    double acc = 0.0;
    for (int s = 0; s < support; ++s) {
      double prob = (s + 1 == support) ? 1.0 - acc : weights[s] / total;
      acc += weights[s] / total;
      atoms.push_back({rng.uniform01(), prob});
    }
    dists.push_back(ScalarDistribution::from_pairs(std::move(atoms)));
  }
  return dists;
}

}  // namespace fixtures
