// Acceptance suite: one line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "signalprice/signalprice.hpp"

using namespace signalprice;

namespace {

struct Check {
  bool ok = true;
  std::ostringstream detail;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << (detail.str().empty() ? "" : "; ") << what;
    }
  }
};

double ms_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
      .count();
}

std::string fmt(double x) {
  std::ostringstream ss;
  ss.precision(12);
  ss << x;
  return ss.str();
}

// shared artifacts for the round-trip criterion
struct RecoveredSolution {
  AuctionInstance inst;
  SignalingScheme scheme;
  std::vector<Posterior> labeled;   // expected induced posteriors, per signal of buyer 0
  std::vector<int> label_buyers;    // buyer owning each labeled signal
  std::vector<std::string> labels;
  double reported = 0.0;
};
std::vector<RecoveredSolution> g_recovered;

bool criterion1(Check& c) {
  AuctionInstance inst = fixtures::two_type();
  c.expect(no_signaling_value(inst) == 0.3, "no-signaling value not exactly 0.3");

  PublicBruteResult brute = brute_force_public(inst, 2, 4);
  c.expect(std::abs(brute.unrestricted_value - 0.35) <= 1e-9,
           "restricted public optimum at q=2 is " + fmt(brute.unrestricted_value));

  PublicSolution exact = solve_public(inst, 2, 1, 4, 0, /*exact=*/true);
  SignalingScheme scheme = recover_scheme_public(inst, exact);
  bool table = scheme.kernel[0].size() == 1 &&
               std::abs(scheme.kernel[0][0].prob - 1.0) <= 1e-9 &&
               scheme.kernel[1].size() == 2 &&
               std::abs(scheme.kernel[1][0].prob - 3.0 / 7.0) <= 1e-9 &&
               std::abs(scheme.kernel[1][1].prob - 4.0 / 7.0) <= 1e-9;
  c.expect(table, "recovered kernel does not match the signal table");
  {
    RecoveredSolution rec;
    rec.inst = inst;
    rec.scheme = scheme;
    for (std::size_t k = 0; k < exact.gamma.atoms.size(); ++k) {
      rec.labeled.push_back(exact.gamma.atoms[k].posterior);
      rec.label_buyers.push_back(0);
      rec.labels.push_back(scheme.signals[0][k]);
    }
    rec.reported = exact.value;
    g_recovered.push_back(std::move(rec));
  }

  // sampled runs at lambda = 0.05 with q = 2, b = 4 pinned
  const double lambda = 0.05;
  const double eps = lambda / 6.0;
  const double tau = lambda / (3.0 * 3.0);  // |Xi^2| = 3 for d = 2
  const long long K = worst_case_samples(eps, tau, inst.num_buyers());
  int good = 0;
  double worst_ms = 0.0;
  for (int run = 0; run < 100; ++run) {
    auto started = std::chrono::steady_clock::now();
    PublicSolution sol = solve_public(inst, 2, K, 4, 1000 + run);
    double elapsed = ms_since(started);
    worst_ms = std::max(worst_ms, elapsed);
    if (sol.value >= 0.30) ++good;
    RecoveredSolution rec;
    rec.inst = inst;
    rec.scheme = recover_scheme_public(inst, sol);
    for (std::size_t k = 0; k < sol.gamma.atoms.size(); ++k) {
      rec.labeled.push_back(sol.gamma.atoms[k].posterior);
      rec.label_buyers.push_back(0);
      rec.labels.push_back(rec.scheme.signals[0][k]);
    }
    rec.reported = sol.value;
    g_recovered.push_back(std::move(rec));
  }
  c.expect(good >= 95, "only " + std::to_string(good) + "/100 sampled runs reached 0.30");
  c.expect(worst_ms < 1000.0, "slowest sampled run took " + fmt(worst_ms) + " ms");
  c.detail << (c.detail.str().empty() ? "" : "; ") << good
           << "/100 sampled runs >= 0.30, K=" << K << ", worst run " << fmt(worst_ms)
           << " ms";
  return c.ok;
}

bool criterion2(Check& c) {
  AuctionInstance inst = fixtures::one_type();
  for (int q : {1, 2, 4}) {
    double v = brute_force_public(inst, q, 4).unrestricted_value;
    c.expect(std::abs(v - 0.3) <= 1e-9, "q=" + std::to_string(q) + " gives " + fmt(v));
  }
  return c.ok;
}

bool criterion3(Check& c) {
  const double eps = 0.1;
  auto dists = fixtures::two_buyer_deterministic();
  AuctionInstance inst = fixtures::two_buyer_deterministic_instance();
  PosteriorProfile prior = PosteriorProfile::common(inst.prior_posterior(), 2);

  double rev_high = revenue(inst, prior, PriceVector{{0.6, 1.0}});
  c.expect(rev_high == 1.0, "revenue(0.6, 1.0) = " + fmt(rev_high));
  double rev_low = revenue(inst, prior, PriceVector{{0.5, 1.0 - eps}});
  c.expect(rev_low == 0.5, "revenue(0.5, 0.9) = " + fmt(rev_low));

  PriceVector lifted = lift_prices(dists, PriceVector{{0.5, 1.0}});
  c.expect(lifted.prices[0] == 1.0 && lifted.prices[1] == 1.0,
           "lift(0.5, 1.0) = (" + fmt(lifted.prices[0]) + ", " + fmt(lifted.prices[1]) + ")");

  auto decreased = decrease_distribution(dists, eps);
  PriceVector reduced{{std::max(lifted.prices[0] - eps, 0.0),
                       std::max(lifted.prices[1] - eps, 0.0)}};
  double rev_dec = scalar_revenue(decreased, reduced);
  c.expect(std::abs(rev_dec - 0.9) <= 1e-12,
           "decreased revenue at lifted-minus-eps prices = " + fmt(rev_dec));
  return c.ok;
}

bool criterion4(Check& c) {
  auto started = std::chrono::steady_clock::now();
  Rng rng(404);
  for (int trial = 0; trial < 200; ++trial) {
    int n = 1 + static_cast<int>(rng.next() % 4);
    auto dists = fixtures::random_scalar_dists(rng, n, 4);
    double base = exact_optimal_prices(dists).value;
    for (double eps : {0.05, 0.1}) {
      double dec = exact_optimal_prices(decrease_distribution(dists, eps)).value;
      c.expect(dec >= base - eps - 1e-9,
               "drop " + fmt(base - dec) + " exceeds eps=" + fmt(eps));
    }
  }
  double elapsed = ms_since(started);
  c.expect(elapsed < 10000.0, "suite took " + fmt(elapsed) + " ms");
  c.detail << (c.detail.str().empty() ? "" : "; ") << "200 instances in " << fmt(elapsed)
           << " ms";
  return c.ok;
}

bool criterion5(Check& c) {
  Rng rng(505);
  for (int trial = 0; trial < 100; ++trial) {
    int d = 2 + static_cast<int>(rng.next() % 3);
    int q = 1 + static_cast<int>(rng.next() % 6);
    std::vector<double> v(d);
    double sum = 0.0;
    for (double& x : v) {
      x = rng.uniform01() + 1e-6;
      sum += x;
    }
    double acc = 0.0;
    for (int j = 0; j + 1 < d; ++j) {
      v[j] /= sum;
      acc += v[j];
    }
    v[d - 1] = 1.0 - acc;
    Posterior xi{v};
    PosteriorDistribution gamma = decompose(xi, q);
    double wsum = 0.0;
    std::vector<double> mean(d, 0.0);
    for (const auto& a : gamma.atoms) {
      wsum += a.weight;
      for (int j = 0; j < d; ++j) mean[j] += a.weight * a.posterior.probs[j];
    }
    c.expect(std::abs(wsum - 1.0) <= 1e-12, "weights sum to " + fmt(wsum));
    for (int j = 0; j < d; ++j)
      c.expect(std::abs(mean[j] - xi.probs[j]) <= 1e-12,
               "mean deviates by " + fmt(std::abs(mean[j] - xi.probs[j])));
  }

  // trend check: the decreasing fraction grows with the grain
  const double eps = 1.0 / 3.0;
  int checked = 0;
  for (int trial = 0; trial < 50; ++trial) {
    int d = 2 + static_cast<int>(rng.next() % 2);
    std::vector<double> v(d);
    double sum = 0.0;
    for (double& x : v) {
      x = rng.uniform01() + 1e-6;
      sum += x;
    }
    double acc = 0.0;
    for (int j = 0; j + 1 < d; ++j) {
      v[j] /= sum;
      acc += v[j];
    }
    v[d - 1] = 1.0 - acc;
    Posterior xi{v};
    std::vector<std::vector<double>> V(2, std::vector<double>(d));
    for (auto& row : V)
      for (double& x : row) x = rng.uniform01();

    double prev = -1.0;
    for (int q : {4, 8, 16}) {
      PosteriorDistribution gamma = decompose(xi, q);
      double fraction = 1.0;
      for (const auto& row : V) {
        double base = dot(row, xi);
        double mass = 0.0;
        for (const auto& a : gamma.atoms)
          if (dot(row, a.posterior) >= base - eps) mass += a.weight;
        fraction = std::min(fraction, mass);
      }
      c.expect(fraction >= prev - 1e-12,
               "fraction fell from " + fmt(prev) + " to " + fmt(fraction) + " at q=" +
                   std::to_string(q));
      prev = fraction;
      ++checked;
    }
  }
  c.detail << (c.detail.str().empty() ? "" : "; ") << "100 exactness draws, " << checked
           << " trend points";
  return c.ok;
}

bool criterion6(Check& c) {
  auto started = std::chrono::steady_clock::now();
  Rng rng(606);
  const double delta = 0.05;
  for (int trial = 0; trial < 100; ++trial) {
    int n = 1 + static_cast<int>(rng.next() % 3);
    int q = 1 + static_cast<int>(rng.next() % 2);
    int b = 1 + static_cast<int>(rng.next() % 3);
    QUniformSet set = enumerate_q_uniform(2, q);
    AuctionInstance inst = gen_random_instance(rng.next(), n, 2, 3);
    std::vector<std::vector<ScalarDistribution>> projected(n);
    for (int i = 0; i < n; ++i)
      for (const auto& xi : set.posteriors) {
        std::vector<ScalarDistribution::Atom> atoms;
        for (const auto& a : inst.buyers[i].support)
          atoms.push_back({dot(a.values, xi), a.prob});
        projected[i].push_back(ScalarDistribution::from_pairs(std::move(atoms)));
      }
    LinRevProblem prob = make_linrev_problem(projected, b, {});
    for (double& w : prob.w) w = rng.uniform01();

    DpResult dp = dp_max_linrev(prob, delta);
    LinRevBrute brute = brute_force_max_linrev(prob);
    double gap = brute.value - dp.value;
    c.expect(gap >= 0.0, "dp exceeded the exhaustive optimum by " + fmt(-gap));
    c.expect(gap <= delta, "dp gap " + fmt(gap) + " exceeds delta");
  }
  double elapsed = ms_since(started);
  c.expect(elapsed < 5000.0, "suite took " + fmt(elapsed) + " ms");
  c.detail << (c.detail.str().empty() ? "" : "; ") << "100 instances in " << fmt(elapsed)
           << " ms";
  return c.ok;
}

bool criterion7(Check& c) {
  auto started = std::chrono::steady_clock::now();
  Rng rng(707);
  const double lambda = 0.2;
  const double delta = lambda / 4.0, beta = lambda / 4.0;
  for (int trial = 0; trial < 20; ++trial) {
    AuctionInstance inst = gen_random_instance(rng.next(), 1, 2, 3);
    DenseLp6Result dense = dense_lp6_solve(inst, 2, 4);
    PublicBruteResult brute = brute_force_public(inst, 2, 4);
    c.expect(std::abs(dense.value - brute.grid_value) <= 1e-6,
             "dense/restricted gap " + fmt(std::abs(dense.value - brute.grid_value)));

    PrivateSolution sol = solve_private(inst, 2, 4, delta, beta, 0, 17 + trial);
    c.expect(sol.value >= dense.value - lambda,
             "private value " + fmt(sol.value) + " below dense " + fmt(dense.value) +
                 " - lambda");
    double reeval = scheme_value(inst, sol.scheme);
    c.expect(std::abs(reeval - sol.value) <= 1e-9,
             "recovered scheme re-evaluates to " + fmt(reeval) + " vs " + fmt(sol.value));

    RecoveredSolution rec;
    rec.inst = inst;
    rec.scheme = sol.scheme;
    PrivateProgram prog = build_private_program(inst, inst, 2, 4);
    for (std::size_t s = 0; s < sol.scheme.signals[0].size(); ++s) {
      const std::string& label = sol.scheme.signals[0][s];
      // labels are "x<posterior index>p<price index>"
      int xi_idx = std::stoi(label.substr(1, label.find('p') - 1));
      rec.labeled.push_back(prog.xi_set.posteriors[xi_idx]);
      rec.label_buyers.push_back(0);
      rec.labels.push_back(label);
    }
    rec.reported = sol.value;
    g_recovered.push_back(std::move(rec));
  }
  double elapsed = ms_since(started);
  c.expect(elapsed < 60000.0, "suite took " + fmt(elapsed) + " ms");
  c.detail << (c.detail.str().empty() ? "" : "; ") << "20 instances in " << fmt(elapsed)
           << " ms";
  return c.ok;
}

bool criterion8(Check& c) {
  c.expect(!g_recovered.empty(), "no recovered solutions were collected");
  for (const auto& rec : g_recovered) {
    double value = scheme_value(rec.inst, rec.scheme);
    c.expect(std::abs(value - rec.reported) <= 1e-9,
             "scheme value " + fmt(value) + " vs reported " + fmt(rec.reported));
    for (std::size_t s = 0; s < rec.labels.size(); ++s) {
      Posterior xi =
          posterior_of_signal(rec.inst, rec.scheme, rec.label_buyers[s], rec.labels[s]);
      for (std::size_t j = 0; j < xi.probs.size(); ++j)
        c.expect(std::abs(xi.probs[j] - rec.labeled[s].probs[j]) <= 1e-9,
                 "induced posterior drifts from its label");
    }
  }
  c.detail << (c.detail.str().empty() ? "" : "; ") << g_recovered.size()
           << " solutions round-tripped";
  return c.ok;
}

bool criterion9(Check& c) {
  Graph triangle{3, {{0, 1}, {1, 2}, {0, 2}}};
  Graph path{4, {{0, 1}, {1, 2}, {2, 3}}};
  for (const Graph& g : {triangle, path}) {
    AuctionInstance inst = gen_hardness_instance(g);
    try {
      inst.validate();
    } catch (const std::exception& e) {
      c.expect(false, std::string("instance invariants failed: ") + e.what());
      continue;
    }
    c.expect(static_cast<int>(inst.buyers[0].support.size()) == g.m + 1,
             "support size mismatch");
    for (int u = 0; u < g.m; ++u) {
      const auto& atom = inst.buyers[0].support[u];
      c.expect(std::abs(atom.prob - 1.0 / (g.m * g.m)) <= 1e-15, "vertex atom probability");
      for (int v = 0; v < g.m; ++v) {
        double expected = u == v ? 1.0 : (g.adjacent(u, v) ? 0.0 : 0.5);
        c.expect(atom.values[v] == expected,
                 "valuation pattern wrong at (" + std::to_string(u) + "," +
                     std::to_string(v) + ")");
      }
    }
    c.expect(std::abs(inst.buyers[0].support[g.m].prob - (1.0 - 1.0 / g.m)) <= 1e-15,
             "outside atom probability");
  }
  return c.ok;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<bool(Check&)>>> criteria = {
      {"worked two-type example (exact values and 100 sampled runs)", criterion1},
      {"one-type invariance across grains", criterion2},
      {"two-buyer lifting example is tight to eps", criterion3},
      {"optimal revenue drops at most eps under decreased valuations", criterion4},
      {"decomposition exactness and decreasing-fraction trend", criterion5},
      {"dynamic program within delta of exhaustive search", criterion6},
      {"private/public agreement on single-buyer instances", criterion7},
      {"scheme recovery round-trips posteriors and values", criterion8},
      {"hardness gadget structure", criterion9},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check check;
    bool ok = false;
    std::string error;
    try {
      ok = criteria[i].second(check);
    } catch (const std::exception& e) {
      ok = false;
      error = e.what();
    }
    std::string detail = check.detail.str();
    if (!error.empty()) detail += (detail.empty() ? "" : "; ") + ("exception: " + error);
    std::printf("[%s] criterion %zu: %s%s%s\n", ok ? "PASS" : "FAIL", i + 1,
                criteria[i].first.c_str(), detail.empty() ? "" : " -- ", detail.c_str());
    if (!ok) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
