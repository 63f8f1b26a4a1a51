#include <catch2/catch_amalgamated.hpp>

#include "fixtures.hpp"
#include "signalprice/signalprice.hpp"

using namespace signalprice;
using Catch::Approx;

TEST_CASE("projection is the pushforward with merged values") {
  AuctionInstance inst = fixtures::two_type();
  auto dists = project(inst, PosteriorProfile::common(inst.prior_posterior(), 1));
  REQUIRE(dists.size() == 1);
  REQUIRE(dists[0].support.size() == 2);
  double k1 = dot(inst.buyers[0].support[0].values, inst.prior_posterior());
  double k2 = dot(inst.buyers[0].support[1].values, inst.prior_posterior());
  CHECK(dists[0].support[0].value == std::min(k1, k2));  // ~0.3
  CHECK(dists[0].support[1].value == std::max(k1, k2));  // ~0.4
  CHECK(k1 == Approx(0.4).margin(1e-12));
  CHECK(k2 == Approx(0.3).margin(1e-12));
  CHECK(dists[0].support[0].prob == 0.5);

  auto at_basis = project(inst, PosteriorProfile::common(Posterior::basis(2, 0), 1));
  CHECK(at_basis[0].support[0].value == 0.75);
  CHECK(at_basis[0].support[1].value == 1.0);

  AuctionInstance flat;
  flat.states = {"a", "b", "c"};
  flat.prior = {0.2, 0.5, 0.3};
  ValuationDistribution constant;
  constant.support.push_back({{0.6, 0.6, 0.6}, 1.0});
  flat.buyers = {constant};
  auto merged = project(flat, PosteriorProfile::common(flat.prior_posterior(), 1));
  REQUIRE(merged[0].support.size() == 1);
  CHECK(merged[0].support[0].value == Approx(0.6).margin(1e-12));
  CHECK(merged[0].support[0].prob == 1.0);
}

TEST_CASE("exact optimal prices by backward induction") {
  auto exfail = fixtures::two_buyer_deterministic();
  PricingOutcome best = exact_optimal_prices(exfail);
  CHECK(best.value == Approx(1.0));

  ScalarDistribution spread;
  spread.support = {{0.3, 0.5}, {0.8, 0.5}};
  PricingOutcome one = exact_optimal_prices({spread});
  CHECK(one.prices.prices[0] == 0.8);
  CHECK(one.value == Approx(0.4));

  ScalarDistribution low;
  low.support = {{0.3, 0.5}, {0.4, 0.5}};
  PricingOutcome sell_all = exact_optimal_prices({low});
  CHECK(sell_all.prices.prices[0] == 0.3);
  CHECK(sell_all.value == Approx(0.3));

  CHECK_THROWS_AS(exact_optimal_prices({}), InvalidInstance);
  ScalarDistribution empty;
  CHECK_THROWS_AS(exact_optimal_prices({empty}), InvalidInstance);
}

TEST_CASE("ties break toward the higher price") {
  // both prices sell with probability 1/2; the higher one must win
  ScalarDistribution dist;
  dist.support = {{0.25, 0.5}, {0.5, 0.25}, {1.0, 0.25}};
  // price 0.5: 0.5*0.5 = 0.25; price 1.0: 0.25*1.0 = 0.25 -> pick 1.0
  PricingOutcome best = exact_optimal_prices({dist});
  CHECK(best.value == Approx(0.25));
  CHECK(best.prices.prices[0] == 1.0);
}

TEST_CASE("sampled price search lands near the exact optimum") {
  ScalarDistribution sure;
  sure.support = {{1.0, 1.0}};
  PricingResult det = find_apx_prices({sure}, 17, 10, 5);
  CHECK(det.prices.prices[0] == 1.0);
  CHECK(det.estimate == Approx(1.0));

  PricingResult exfail = find_apx_prices(fixtures::two_buyer_deterministic(), 1, 100, 5);
  auto true_dists = fixtures::two_buyer_deterministic();
  CHECK(scalar_revenue(true_dists, exfail.prices) >= 1.0 - 1.0 / 100);

  AuctionInstance inst = fixtures::two_type();
  auto projected = project(inst, PosteriorProfile::common(inst.prior_posterior(), 1));
  PricingResult sampled = find_apx_prices(projected, 4000, 10, 42);
  CHECK(std::abs(sampled.estimate - 0.3) < 0.05);
}

TEST_CASE("grid induction converges at rate 1/b") {
  Rng rng(21);
  for (int trial = 0; trial < 25; ++trial) {
    auto dists = fixtures::random_scalar_dists(rng, 3, 4);
    double exact = exact_optimal_prices(dists).value;
    for (int b : {10, 50}) {
      PricingOutcome grid = optimal_prices_on_grid(dists, b);
      CHECK(grid.value <= exact + 1e-12);
      CHECK(grid.value >= exact - 1.0 / b - 1e-12);
    }
  }
}

TEST_CASE("price lifting raises prices to the continuation value") {
  auto exfail = fixtures::two_buyer_deterministic();
  PriceVector lifted = lift_prices(exfail, PriceVector{{0.5, 1.0}});
  CHECK(lifted.prices[0] == 1.0);
  CHECK(lifted.prices[1] == 1.0);

  ScalarDistribution single;
  single.support = {{0.6, 1.0}};
  PriceVector same = lift_prices({single}, PriceVector{{0.2}});
  CHECK(same.prices[0] == 0.2);

  PriceVector fixed_point = lift_prices(exfail, PriceVector{{1.0, 1.0}});
  CHECK(fixed_point.prices[0] == 1.0);
  CHECK(fixed_point.prices[1] == 1.0);
}

TEST_CASE("lifting never loses revenue and satisfies its postcondition") {
  Rng rng(22);
  for (int trial = 0; trial < 60; ++trial) {
    auto dists = fixtures::random_scalar_dists(rng, 4, 4);
    PriceVector prices{{rng.uniform01(), rng.uniform01(), rng.uniform01(), rng.uniform01()}};
    PriceVector lifted = lift_prices(dists, prices);
    CHECK(scalar_revenue(dists, lifted) >= scalar_revenue(dists, prices) - 1e-12);
    for (int i = 0; i < 4; ++i)
      CHECK(lifted.prices[i] >= scalar_revenue_from(dists, lifted, i + 2) - 1e-12);
  }
}

TEST_CASE("decreased distributions shift support down by eps") {
  ScalarDistribution unit;
  unit.support = {{1.0, 1.0}};
  auto shifted = decrease_distribution({unit}, 0.1);
  CHECK(shifted[0].support[0].value == Approx(0.9));

  ScalarDistribution tiny;
  tiny.support = {{0.05, 1.0}};
  auto clamped = decrease_distribution({tiny}, 0.1);
  CHECK(clamped[0].support[0].value == 0.0);

  Rng rng(23);
  for (int trial = 0; trial < 40; ++trial) {
    auto dists = fixtures::random_scalar_dists(rng, 2, 4);
    double eps = 0.05 + 0.2 * rng.uniform01();
    auto dec = decrease_distribution(dists, eps);
    for (std::size_t i = 0; i < dists.size(); ++i)
      for (double p : PriceGrid{20}.values())
        CHECK(scalar_buy_probability(dec[i], p - eps) >=
              scalar_buy_probability(dists[i], p) - 1e-12);
  }
}

TEST_CASE("optimal revenue drops by at most eps under decreased valuations") {
  Rng rng(24);
  for (int trial = 0; trial < 60; ++trial) {
    int n = 1 + static_cast<int>(rng.next() % 4);
    auto dists = fixtures::random_scalar_dists(rng, n, 4);
    for (double eps : {0.05, 0.1}) {
      double base = exact_optimal_prices(dists).value;
      double dec = exact_optimal_prices(decrease_distribution(dists, eps)).value;
      CHECK(dec >= base - eps - 1e-9);
    }
  }
}

TEST_CASE("optimal value is invariant under splitting an atom") {
  Rng rng(25);
  for (int trial = 0; trial < 30; ++trial) {
    auto dists = fixtures::random_scalar_dists(rng, 3, 3);
    auto split = dists;
    auto& atoms = split[1].support;
    ScalarDistribution::Atom half = atoms[0];
    half.prob /= 2.0;
    atoms[0].prob /= 2.0;
    atoms.push_back(half);  // same value, mass split in two
    CHECK(exact_optimal_prices(split).value ==
          Approx(exact_optimal_prices(dists).value).margin(1e-12));
  }
}
