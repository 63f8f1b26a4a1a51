#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "signalprice/core.hpp"
#include "signalprice/decomposition.hpp"
#include "signalprice/errors.hpp"
#include "signalprice/linrev.hpp"
#include "signalprice/pricing.hpp"
#include "signalprice/simplex.hpp"

namespace signalprice {

// Identifier of one exponential-family column: a state, one posterior index
// per buyer, one grid-price index per buyer.
struct YColumnId {
  int theta = 0;
  std::vector<int> xi;
  std::vector<int> p;

  friend bool operator<(const YColumnId& a, const YColumnId& b) {
    if (a.theta != b.theta) return a.theta < b.theta;
    if (a.xi != b.xi) return a.xi < b.xi;
    return a.p < b.p;
  }
  friend bool operator==(const YColumnId& a, const YColumnId& b) {
    return a.theta == b.theta && a.xi == b.xi && a.p == b.p;
  }
};

// Shared state of the private solver: posterior lattice, price grid, the
// evaluation distributions (empirical or exact), their per-posterior
// projections, the buy-probability table, and the dual variable layout
//   a (n x d) | w (d x n x X x P) | c (n x X).
struct PrivateProgram {
  int n = 0, d = 0, q = 0, b = 0;
  QUniformSet xi_set;
  std::vector<double> grid;
  std::vector<double> prior;
  std::vector<std::vector<ScalarDistribution>> projected;  // [i][xi]
  std::vector<double> z;                                   // [i][xi][p]

  int X() const { return static_cast<int>(xi_set.size()); }
  int P() const { return static_cast<int>(grid.size()); }

  int a_index(int i, int theta) const { return i * d + theta; }
  int w_index(int theta, int i, int xi, int p) const {
    return n * d + ((theta * n + i) * X() + xi) * P() + p;
  }
  int c_index(int i, int xi) const { return n * d + d * n * X() * P() + i * X() + xi; }
  int dim() const { return n * d + d * n * X() * P() + n * X(); }

  double buy_prob(int i, int xi, int p) const {
    return z[(static_cast<std::size_t>(i) * X() + xi) * P() + p];
  }

  double revenue_of(const std::vector<int>& xi, const std::vector<int>& p) const {
    double rev = 0.0;
    for (int i = n - 1; i >= 0; --i) {
      double zi = buy_prob(i, xi[i], p[i]);
      rev = zi * grid[p[i]] + (1.0 - zi) * rev;
    }
    return rev;
  }
};

// Structured view of a dual vector: a indexed (i, theta), w indexed
// (theta, i, xi, p) and non-positive, c indexed (i, xi).
struct DualPoint {
  std::vector<double> x;

  double a(const PrivateProgram& prog, int i, int theta) const {
    return x[prog.a_index(i, theta)];
  }
  double w(const PrivateProgram& prog, int theta, int i, int xi, int p) const {
    return x[prog.w_index(theta, i, xi, p)];
  }
  double c(const PrivateProgram& prog, int i, int xi) const {
    return x[prog.c_index(i, xi)];
  }

  void validate(const PrivateProgram& prog) const {
    if (static_cast<int>(x.size()) != prog.dim())
      throw InvalidInstance("dual point dimension mismatch");
    for (int theta = 0; theta < prog.d; ++theta)
      for (int i = 0; i < prog.n; ++i)
        for (int xi = 0; xi < prog.X(); ++xi)
          for (int p = 0; p < prog.P(); ++p)
            if (w(prog, theta, i, xi, p) > kDerivedTol)
              throw InvalidInstance("dual point has positive w entry");
  }
};

// Empirical counterpart of an instance: per-buyer atom frequencies from K
// i.i.d. draws, merged onto the original support.
inline AuctionInstance empirical_instance(const AuctionInstance& inst, long long K,
                                          std::uint64_t seed) {
  AuctionInstance out;
  out.states = inst.states;
  out.prior = inst.prior;
  for (int i = 0; i < inst.num_buyers(); ++i) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    std::vector<double> pmf;
    for (const auto& a : inst.buyers[i].support) pmf.push_back(a.prob);
    std::vector<long long> counts(pmf.size(), 0);
    for (long long k = 0; k < K; ++k) counts[rng.pick(pmf)]++;
    ValuationDistribution dist;
    for (std::size_t s = 0; s < counts.size(); ++s)
      if (counts[s] > 0)
        dist.support.push_back({inst.buyers[i].support[s].values,
                                static_cast<double>(counts[s]) / static_cast<double>(K)});
    out.buyers.push_back(std::move(dist));
  }
  return out;
}

inline PrivateProgram build_private_program(const AuctionInstance& inst,
                                            const AuctionInstance& eval_dists, int q, int b,
                                            std::size_t cap = default_cell_cap()) {
  PrivateProgram prog;
  prog.n = inst.num_buyers();
  prog.d = inst.num_states();
  prog.q = q;
  prog.b = b;
  prog.prior = inst.prior;
  prog.xi_set = enumerate_q_uniform(prog.d, q, cap);
  prog.grid = PriceGrid{b}.values();
  prog.projected.resize(prog.n);
  for (int i = 0; i < prog.n; ++i) {
    prog.projected[i].reserve(prog.xi_set.size());
    for (const auto& xi : prog.xi_set.posteriors) {
      std::vector<ScalarDistribution::Atom> atoms;
      for (const auto& a : eval_dists.buyers[i].support)
        atoms.push_back({dot(a.values, xi), a.prob});
      prog.projected[i].push_back(ScalarDistribution::from_pairs(std::move(atoms)));
    }
  }
  prog.z.assign(static_cast<std::size_t>(prog.n) * prog.X() * prog.P(), 0.0);
  for (int i = 0; i < prog.n; ++i)
    for (int xi = 0; xi < prog.X(); ++xi)
      for (int p = 0; p < prog.P(); ++p)
        prog.z[(static_cast<std::size_t>(i) * prog.X() + xi) * prog.P() + p] =
            scalar_buy_probability(prog.projected[i][xi], prog.grid[p]);
  return prog;
}

// ---------------------------------------------------------------------------
// MAX-LINREV dynamic program
// ---------------------------------------------------------------------------

struct DpResult {
  double value = 0.0;       // exact objective of the reconstructed pair
  double table_bound = 0.0; // max_a M(1,a) + a
  std::vector<int> xi;
  std::vector<int> p;
};

// Additive delta-approximation of MAX-LINREV on a value grid A = {0, 1/c,
// ..., n} with c = ceil(n/delta). M(i,a) is the best revenue over buyers
// i..n restricted to cells whose linear bonuses can still reach a; the
// returned value re-evaluates the reconstructed argmax exactly, so it never
// exceeds the true optimum and is within delta of it.
inline DpResult dp_max_linrev(const LinRevProblem& prob, double delta) {
  if (!(delta > 0.0)) throw InvalidInstance("delta must be positive");
  const int n = prob.n;
  const int P = static_cast<int>(prob.grid.size());
  const int cells = prob.cells_per_buyer();
  const int c = static_cast<int>(std::ceil(n / delta));
  const int ticks = n * c + 1;  // a_t = t / c
  const double neg_inf = -std::numeric_limits<double>::infinity();
  constexpr double kGrace = 1e-12;  // admits half-ulp boundary transitions

  std::vector<double> avals(ticks);
  for (int t = 0; t < ticks; ++t) avals[t] = static_cast<double>(t) / c;

  std::vector<std::vector<double>> M(n, std::vector<double>(ticks, neg_inf));
  std::vector<std::vector<int>> bp_cell(n, std::vector<int>(ticks, -1));
  std::vector<std::vector<int>> bp_next(n, std::vector<int>(ticks, -1));
  // suffix argmax of M(i+1, .): best tick >= t, smallest tick on ties
  std::vector<double> suf_val(ticks + 1, neg_inf);
  std::vector<int> suf_arg(ticks + 1, -1);

  for (int i = n - 1; i >= 0; --i) {
    const bool last = (i == n - 1);
    for (int cell = 0; cell < cells; ++cell) {
      const int xi = cell / P;
      const int p = cell % P;
      const double w = prob.w[prob.idx(i, xi, p)];
      const double zi = prob.z[prob.idx(i, xi, p)];
      const double sell = zi * prob.grid[p];
      // feasible targets: a_t <= w + a', i.e. t <= w*c + t'
      for (int t = 0; t < ticks; ++t) {
        double cand;
        int nxt = -1;
        if (last) {
          // no continuation: need w >= a_t
          if (w < avals[t] - kGrace) break;  // w fixed, avals increasing
          cand = sell;
          nxt = 0;
        } else {
          int tmin = static_cast<int>(std::ceil(avals[t] * c - w * c)) - 1;
          if (tmin < 0) tmin = 0;
          while (tmin < ticks && w + avals[tmin] < avals[t] - kGrace) ++tmin;
          if (tmin >= ticks || suf_arg[tmin] < 0) continue;
          nxt = suf_arg[tmin];
          cand = sell + (1.0 - zi) * M[i + 1][nxt];
        }
        if (cand > M[i][t]) {
          M[i][t] = cand;
          bp_cell[i][t] = cell;
          bp_next[i][t] = nxt;
        }
      }
    }
    // rebuild suffix argmax over level i
    suf_val[ticks] = neg_inf;
    suf_arg[ticks] = -1;
    for (int t = ticks - 1; t >= 0; --t) {
      if (M[i][t] >= suf_val[t + 1]) {  // ties to the smaller tick
        suf_val[t] = M[i][t];
        suf_arg[t] = t;
      } else {
        suf_val[t] = suf_val[t + 1];
        suf_arg[t] = suf_arg[t + 1];
      }
    }
  }

  int best_t = -1;
  double best = neg_inf;
  for (int t = 0; t < ticks; ++t) {
    if (M[0][t] == neg_inf) continue;
    double v = M[0][t] + avals[t];
    if (v > best) {
      best = v;
      best_t = t;
    }
  }
  if (best_t < 0) throw NumericalFailure("dp table has no feasible entry");

  DpResult res;
  res.table_bound = best;
  res.xi.resize(n);
  res.p.resize(n);
  int t = best_t;
  for (int i = 0; i < n; ++i) {
    int cell = bp_cell[i][t];
    res.xi[i] = cell / P;
    res.p[i] = cell % P;
    t = bp_next[i][t];
  }
  res.value = linrev_objective(prob, res.xi, res.p);
  return res;
}

// ---------------------------------------------------------------------------
// Separation oracle and ellipsoid method
// ---------------------------------------------------------------------------

// A halfspace g.x <= rhs containing the feasible set and violated at the
// query point. `column` is set when the cut is one of the exponential-family
// rows.
struct Cut {
  std::vector<std::pair<int, double>> coeffs;
  double rhs = 0.0;
  std::optional<YColumnId> column;
  const char* kind = "";
};

struct OracleOutcome {
  bool feasible = false;
  Cut cut;
};

// Approximate separation oracle for the feasibility problem at objective
// level rho. Polynomial constraints are checked exactly and in a fixed
// order; the exponential family is checked per state through the dynamic
// program on clamped, shifted bonuses.
class PrivateSeparationOracle {
 public:
  PrivateSeparationOracle(const PrivateProgram& prog, double rho, double delta)
      : prog_(prog), rho_(rho), delta_(delta) {
    lin_.n = prog.n;
    lin_.num_posteriors = prog.X();
    lin_.grid = prog.grid;
    lin_.z = prog.z;
    lin_.w.assign(prog.z.size(), 0.0);
  }

  OracleOutcome operator()(const std::vector<double>& x) const {
    static constexpr double kViol = 1e-12;
    const int n = prog_.n, d = prog_.d, X = prog_.X(), P = prog_.P();
    const double box = n + 1.0;

    {  // objective level: sum_i sum_theta mu_theta a_{i,theta} <= rho
      Cut cut;
      double lhs = 0.0;
      for (int i = 0; i < n; ++i)
        for (int theta = 0; theta < d; ++theta) {
          cut.coeffs.emplace_back(prog_.a_index(i, theta), prog_.prior[theta]);
          lhs += prog_.prior[theta] * x[prog_.a_index(i, theta)];
        }
      cut.rhs = rho_;
      cut.kind = "objective";
      if (lhs > rho_ + kViol) return {false, std::move(cut)};
    }
    // sum_theta xi(theta) w_{theta,i,xi,p} + c_{i,xi} >= 0
    for (int i = 0; i < n; ++i)
      for (int xi = 0; xi < X; ++xi)
        for (int p = 0; p < P; ++p) {
          double lhs = x[prog_.c_index(i, xi)];
          for (int theta = 0; theta < d; ++theta)
            lhs += prog_.xi_set.posteriors[xi].probs[theta] *
                   x[prog_.w_index(theta, i, xi, p)];
          if (lhs < -kViol) {
            Cut cut;
            cut.coeffs.emplace_back(prog_.c_index(i, xi), -1.0);
            for (int theta = 0; theta < d; ++theta)
              cut.coeffs.emplace_back(prog_.w_index(theta, i, xi, p),
                                      -prog_.xi_set.posteriors[xi].probs[theta]);
            cut.rhs = 0.0;
            cut.kind = "price-mix";
            return {false, std::move(cut)};
          }
        }
    // c_{i,xi} <= sum_theta xi(theta) a_{i,theta}
    for (int i = 0; i < n; ++i)
      for (int xi = 0; xi < X; ++xi) {
        double lhs = x[prog_.c_index(i, xi)];
        for (int theta = 0; theta < d; ++theta)
          lhs -= prog_.xi_set.posteriors[xi].probs[theta] * x[prog_.a_index(i, theta)];
        if (lhs > kViol) {
          Cut cut;
          cut.coeffs.emplace_back(prog_.c_index(i, xi), 1.0);
          for (int theta = 0; theta < d; ++theta)
            cut.coeffs.emplace_back(prog_.a_index(i, theta),
                                    -prog_.xi_set.posteriors[xi].probs[theta]);
          cut.rhs = 0.0;
          cut.kind = "posterior-mix";
          return {false, std::move(cut)};
        }
      }
    // w <= 0
    for (int theta = 0; theta < d; ++theta)
      for (int i = 0; i < n; ++i)
        for (int xi = 0; xi < X; ++xi)
          for (int p = 0; p < P; ++p) {
            int j = prog_.w_index(theta, i, xi, p);
            if (x[j] > kViol) return {false, Cut{{{j, 1.0}}, 0.0, std::nullopt, "w-sign"}};
          }
    // box bounds keeping the dual point inside the initial ball
    for (int j = 0; j < prog_.dim(); ++j) {
      bool is_w = j >= n * d && j < n * d + d * n * X * P;
      if (x[j] > box + kViol && !is_w)
        return {false, Cut{{{j, 1.0}}, box, std::nullopt, "box"}};
      if (x[j] < -box - kViol)
        return {false, Cut{{{j, -1.0}}, box, std::nullopt, "box"}};
    }
    // exponential family: Rev(p, xi) + sum_i w_{theta,i,xi_i,p_i} <= 0
    for (int theta = 0; theta < d; ++theta) {
      for (int i = 0; i < n; ++i)
        for (int xi = 0; xi < X; ++xi)
          for (int p = 0; p < P; ++p) {
            double w = x[prog_.w_index(theta, i, xi, p)];
            lin_.w[lin_.idx(i, xi, p)] = std::clamp(w, -1.0, 0.0) + 1.0;
          }
      DpResult dp = dp_max_linrev(lin_, delta_);
      if (dp.value - n > kDpViol) {
        // re-check against the unclamped duals; a genuine violation implies
        // no clamp was active on the argmax cells
        double viol = prog_.revenue_of(dp.xi, dp.p);
        Cut cut;
        for (int i = 0; i < n; ++i) {
          int j = prog_.w_index(theta, i, dp.xi[i], dp.p[i]);
          viol += x[j];
          cut.coeffs.emplace_back(j, 1.0);
        }
        if (viol > kDpViol) {
          cut.rhs = -prog_.revenue_of(dp.xi, dp.p);
          cut.kind = "revenue";
          cut.column = YColumnId{theta, dp.xi, dp.p};
          return {false, std::move(cut)};
        }
      }
    }
    return {true, {}};
  }

  static constexpr double kDpViol = 1e-9;

 private:
  const PrivateProgram& prog_;
  double rho_;
  double delta_;
  mutable LinRevProblem lin_;
};

struct EllipsoidResult {
  bool feasible = false;
  std::vector<double> point;
  std::vector<YColumnId> y_cuts;  // exponential-family cuts encountered
  int iterations = 0;
  double log_volume_drop = 0.0;  // ln(vol0 / vol) lower bound
};

// Standard central-cut ellipsoid on a ball of radius R. Declares Infeasible
// after ceil(2 dim^2 ln(R/r)) cuts or as soon as the ellipsoid provably
// contains no ball of radius r.
template <typename Oracle>
EllipsoidResult ellipsoid_feasibility(const Oracle& oracle, int dim, double R,
                                      double r = 1e-6) {
  if (dim < 1) throw InvalidInstance("dimension must be >= 1");
  const long long max_iter =
      static_cast<long long>(std::ceil(2.0 * dim * dim * std::log(R / r)));

  std::vector<double> x(dim, 0.0);
  std::vector<std::vector<double>> B(dim, std::vector<double>(dim, 0.0));
  for (int i = 0; i < dim; ++i) B[i][i] = R * R;

  EllipsoidResult res;
  const double shrink_per_cut = 1.0 / (2.0 * (dim + 1.0));

  for (long long iter = 0; iter < max_iter; ++iter) {
    OracleOutcome out = oracle(x);
    if (out.feasible) {
      res.feasible = true;
      res.point = x;
      res.iterations = static_cast<int>(iter);
      return res;
    }
    if (out.cut.column) res.y_cuts.push_back(*out.cut.column);

    std::vector<double> g(dim, 0.0);
    for (const auto& [j, v] : out.cut.coeffs) g[j] += v;
    std::vector<double> Bg(dim, 0.0);
    for (int i = 0; i < dim; ++i) {
      double acc = 0.0;
      for (int j = 0; j < dim; ++j) acc += B[i][j] * g[j];
      Bg[i] = acc;
    }
    double gBg = 0.0;
    for (int i = 0; i < dim; ++i) gBg += g[i] * Bg[i];
    if (!std::isfinite(gBg))
      throw NumericalFailure("ellipsoid shape matrix degenerated (iteration " +
                             std::to_string(iter) + ", cut " + out.cut.kind + ")");
    if (gBg <= 0.0) {
      // collapsed below machine resolution along g: thinner than any r-ball
      res.iterations = static_cast<int>(iter + 1);
      return res;
    }
    double norm = std::sqrt(gBg);

    if (dim == 1) {
      x[0] -= 0.5 * Bg[0] / norm;
      B[0][0] *= 0.25;
    } else {
      double step = 1.0 / (dim + 1.0);
      for (int i = 0; i < dim; ++i) x[i] -= step * Bg[i] / norm;
      double scale = static_cast<double>(dim) * dim / (static_cast<double>(dim) * dim - 1.0);
      double coef = 2.0 / (dim + 1.0);
      for (int i = 0; i < dim; ++i)
        for (int j = i; j < dim; ++j) {
          double v = scale * (0.5 * (B[i][j] + B[j][i]) - coef * Bg[i] * Bg[j] / gBg);
          B[i][j] = v;
          B[j][i] = v;
        }
    }
    res.log_volume_drop += shrink_per_cut;

    double min_diag = B[0][0];
    bool finite = true;
    for (int i = 0; i < dim; ++i) {
      min_diag = std::min(min_diag, B[i][i]);
      finite = finite && std::isfinite(B[i][i]) && std::isfinite(x[i]);
    }
    if (!finite) throw NumericalFailure("ellipsoid iterate is not finite");
    if (min_diag < r * r) {  // some semi-axis below r: no r-ball fits
      res.iterations = static_cast<int>(iter + 1);
      return res;
    }
  }
  res.iterations = static_cast<int>(max_iter);
  return res;
}

// ---------------------------------------------------------------------------
// Lifting, recovery, dense reference programs, bisection driver
// ---------------------------------------------------------------------------

using SparseY = std::map<YColumnId, double>;

// Per-buyer marginal tables of the polynomial variable blocks.
struct MarginalVars {
  std::vector<double> gamma;  // [i][xi]
  std::vector<double> t;      // [i][xi][p]

  static MarginalVars zeros(const PrivateProgram& prog) {
    MarginalVars v;
    v.gamma.assign(static_cast<std::size_t>(prog.n) * prog.X(), 0.0);
    v.t.assign(static_cast<std::size_t>(prog.n) * prog.X() * prog.P(), 0.0);
    return v;
  }
  double& gamma_at(const PrivateProgram& prog, int i, int xi) {
    return gamma[static_cast<std::size_t>(i) * prog.X() + xi];
  }
  double& t_at(const PrivateProgram& prog, int i, int xi, int p) {
    return t[(static_cast<std::size_t>(i) * prog.X() + xi) * prog.P() + p];
  }
  double gamma_at(const PrivateProgram& prog, int i, int xi) const {
    return gamma[static_cast<std::size_t>(i) * prog.X() + xi];
  }
  double t_at(const PrivateProgram& prog, int i, int xi, int p) const {
    return t[(static_cast<std::size_t>(i) * prog.X() + xi) * prog.P() + p];
  }
};

// Turns a point satisfying the relaxed coupling inequalities into one
// satisfying them with equality: per state, spread the per-buyer slacks as a
// scaled product measure, ybar = y + prod_i slack_i / iota^{n-1}. The
// objective never decreases since revenues are non-negative.
inline SparseY lift_relaxed(const PrivateProgram& prog, const MarginalVars& vars,
                            const SparseY& y, std::size_t cap = default_cell_cap()) {
  const int n = prog.n, d = prog.d, X = prog.X(), P = prog.P();
  SparseY out;

  for (int theta = 0; theta < d; ++theta) {
    // slack_{i,xi,p} = xi(theta) t_{i,xi,p} - sum of matching y columns
    std::vector<double> slack(static_cast<std::size_t>(n) * X * P, 0.0);
    double ymass = 0.0;
    for (int i = 0; i < n; ++i)
      for (int xi = 0; xi < X; ++xi)
        for (int p = 0; p < P; ++p)
          slack[(static_cast<std::size_t>(i) * X + xi) * P + p] =
              prog.xi_set.posteriors[xi].probs[theta] * vars.t_at(prog, i, xi, p);
    for (const auto& [id, v] : y) {
      if (id.theta != theta) continue;
      ymass += v;
      for (int i = 0; i < n; ++i)
        slack[(static_cast<std::size_t>(i) * X + id.xi[i]) * P + id.p[i]] -= v;
      if (v > 0.0) out[id] += v;
    }
    double iota = prog.prior[theta] - ymass;
    double max_neg = 0.0;
    for (double& s : slack) {
      max_neg = std::min(max_neg, s);
      if (s < 0.0) s = 0.0;
    }
    if (max_neg < -kDerivedTol)
      throw InconsistentSolution("negative coupling slack beyond tolerance");
    if (iota <= kInputTol) continue;  // tight state: ybar = y

    // per-buyer lists of positive slack cells
    std::vector<std::vector<std::pair<int, double>>> cells(n);  // (xi*P+p, slack)
    double combos = 1.0;
    for (int i = 0; i < n; ++i) {
      for (int xi = 0; xi < X; ++xi)
        for (int p = 0; p < P; ++p) {
          double s = slack[(static_cast<std::size_t>(i) * X + xi) * P + p];
          if (s > 0.0) cells[i].emplace_back(xi * P + p, s);
        }
      combos *= static_cast<double>(cells[i].size());
    }
    if (combos > static_cast<double>(cap))
      throw TooLarge("lifted product measure exceeds cap");
    if (combos == 0.0) continue;

    double denom = std::pow(iota, n - 1);
    YColumnId id;
    id.theta = theta;
    id.xi.assign(n, 0);
    id.p.assign(n, 0);
    auto walk = [&](auto&& self, int i, double prod) -> void {
      if (i == n) {
        out[id] += prod / denom;
        return;
      }
      for (const auto& [cell, s] : cells[i]) {
        id.xi[i] = cell / P;
        id.p[i] = cell % P;
        self(self, i + 1, prod * s);
      }
    };
    walk(walk, 0, 1.0);
  }
  return out;
}

// Signals are (posterior, price) pairs; phi_theta(s) = ybar / mu_theta and
// f_i(s_i) is the price in the label. For an equality-feasible ybar the
// induced posterior of each signal equals its label.
inline SignalingScheme recover_scheme_private(const AuctionInstance& inst,
                                              const SparseY& ybar,
                                              const PrivateProgram& prog) {
  const int n = prog.n, d = prog.d;
  SignalingScheme scheme;
  scheme.signals.assign(n, {});
  scheme.prices.assign(n, {});

  // per-buyer set of used (xi, p) pairs, in deterministic order
  std::vector<std::map<std::pair<int, int>, int>> index(n);
  for (const auto& [id, v] : ybar) {
    if (v <= 0.0) continue;
    for (int i = 0; i < n; ++i)
      index[i].emplace(std::make_pair(id.xi[i], id.p[i]), 0);
  }
  for (int i = 0; i < n; ++i) {
    int next = 0;
    for (auto& [key, slot] : index[i]) {
      slot = next++;
      scheme.signals[i].push_back("x" + std::to_string(key.first) + "p" +
                                  std::to_string(key.second));
      scheme.prices[i].push_back(prog.grid[key.second]);
    }
  }

  scheme.kernel.assign(d, {});
  std::vector<double> row_mass(d, 0.0);
  for (const auto& [id, v] : ybar) {
    if (v <= 0.0) continue;
    if (inst.prior[id.theta] <= 0.0)
      throw InconsistentSolution("y mass on a zero-prior state");
    SignalingScheme::KernelEntry e;
    e.profile.resize(n);
    for (int i = 0; i < n; ++i)
      e.profile[i] = index[i].at(std::make_pair(id.xi[i], id.p[i]));
    e.prob = v / inst.prior[id.theta];
    row_mass[id.theta] += e.prob;
    scheme.kernel[id.theta].push_back(std::move(e));
  }
  for (int theta = 0; theta < d; ++theta) {
    if (inst.prior[theta] <= 0.0) {
      scheme.kernel[theta].push_back({std::vector<int>(n, 0), 1.0});
      continue;
    }
    if (std::abs(row_mass[theta] - 1.0) > kDerivedTol)
      throw InconsistentSolution("kernel row does not normalize after recovery");
  }
  return scheme;
}

struct DenseLpResult {
  MarginalVars vars;
  SparseY y;
  double value = 0.0;
};

// Full coupling program over every column, for desk-scale cross-checks.
// `relaxed` switches the coupling rows from equalities to >=.
inline DenseLpResult dense_coupling_lp(const PrivateProgram& prog, bool relaxed,
                                       std::size_t cap = default_cell_cap(),
                                       const std::vector<double>* objective_y = nullptr) {
  const int n = prog.n, d = prog.d, X = prog.X(), P = prog.P();
  double combos = 1.0;
  for (int i = 0; i < n; ++i) combos *= static_cast<double>(X) * P;
  if (static_cast<double>(d) * combos > static_cast<double>(cap))
    throw TooLarge("dense coupling program exceeds cap");
  const long long ycount = d * static_cast<long long>(combos);

  // enumerate all (xi, p) assignments once
  std::vector<YColumnId> columns;
  columns.reserve(static_cast<std::size_t>(ycount));
  YColumnId cur;
  cur.xi.assign(n, 0);
  cur.p.assign(n, 0);
  auto walk = [&](auto&& self, int i) -> void {
    if (i == n) {
      columns.push_back(cur);
      return;
    }
    for (cur.xi[i] = 0; cur.xi[i] < X; ++cur.xi[i])
      for (cur.p[i] = 0; cur.p[i] < P; ++cur.p[i]) self(self, i + 1);
  };
  for (cur.theta = 0; cur.theta < d; ++cur.theta) walk(walk, 0);

  const int y0 = 0;
  const int t0 = static_cast<int>(columns.size());
  const int g0 = t0 + n * X * P;
  LpProblem lp;
  lp.num_vars = g0 + n * X;
  lp.objective.assign(lp.num_vars, 0.0);
  for (std::size_t k = 0; k < columns.size(); ++k)
    lp.objective[y0 + k] = objective_y ? (*objective_y)[k]
                                       : prog.revenue_of(columns[k].xi, columns[k].p);

  auto t_var = [&](int i, int xi, int p) { return t0 + (i * X + xi) * P + p; };
  auto g_var = [&](int i, int xi) { return g0 + i * X + xi; };

  // coupling rows: sum of matching y (-) xi(theta) t = or <= 0
  std::vector<std::vector<std::pair<int, double>>> coupling(
      static_cast<std::size_t>(d) * n * X * P);
  for (std::size_t k = 0; k < columns.size(); ++k)
    for (int i = 0; i < n; ++i) {
      std::size_t row =
          ((static_cast<std::size_t>(columns[k].theta) * n + i) * X + columns[k].xi[i]) * P +
          columns[k].p[i];
      coupling[row].emplace_back(y0 + static_cast<int>(k), 1.0);
    }
  for (int theta = 0; theta < d; ++theta)
    for (int i = 0; i < n; ++i)
      for (int xi = 0; xi < X; ++xi)
        for (int p = 0; p < P; ++p) {
          std::size_t row = ((static_cast<std::size_t>(theta) * n + i) * X + xi) * P + p;
          auto coeffs = coupling[row];
          coeffs.emplace_back(t_var(i, xi, p), -prog.xi_set.posteriors[xi].probs[theta]);
          lp.add_row(std::move(coeffs), relaxed ? '<' : '=', 0.0);
        }
  for (int i = 0; i < n; ++i)
    for (int xi = 0; xi < X; ++xi) {
      std::vector<std::pair<int, double>> coeffs;
      for (int p = 0; p < P; ++p) coeffs.emplace_back(t_var(i, xi, p), 1.0);
      coeffs.emplace_back(g_var(i, xi), -1.0);
      lp.add_row(std::move(coeffs), '=', 0.0);
    }
  for (int i = 0; i < n; ++i)
    for (int theta = 0; theta < d; ++theta) {
      std::vector<std::pair<int, double>> coeffs;
      for (int xi = 0; xi < X; ++xi) {
        double v = prog.xi_set.posteriors[xi].probs[theta];
        if (v != 0.0) coeffs.emplace_back(g_var(i, xi), v);
      }
      lp.add_row(std::move(coeffs), '=', prog.prior[theta]);
    }

  LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::Optimal)
    throw NumericalFailure("dense coupling program not solvable");

  DenseLpResult out;
  out.value = sol.value;
  out.vars = MarginalVars::zeros(prog);
  for (int i = 0; i < n; ++i)
    for (int xi = 0; xi < X; ++xi) {
      out.vars.gamma_at(prog, i, xi) = sol.x[g_var(i, xi)];
      for (int p = 0; p < P; ++p)
        out.vars.t_at(prog, i, xi, p) = sol.x[t_var(i, xi, p)];
    }
  for (std::size_t k = 0; k < columns.size(); ++k)
    if (sol.x[y0 + k] > 1e-15) out.y[columns[k]] = sol.x[y0 + k];
  return out;
}

struct DenseLp6Result {
  MarginalVars vars;
  SparseY y;
  double value = 0.0;
};

// Exact optimum of the full coupling program with equality rows; test
// oracle for tiny instances only.
inline DenseLp6Result dense_lp6_solve(const AuctionInstance& inst, int q, int b,
                                      std::size_t cap = default_cell_cap()) {
  inst.validate();
  PrivateProgram prog = build_private_program(inst, inst, q, b, cap);
  DenseLpResult r = dense_coupling_lp(prog, /*relaxed=*/false, cap);
  return {std::move(r.vars), std::move(r.y), r.value};
}

struct BisectionStep {
  double rho = 0.0;
  bool feasible = false;
  int iterations = 0;
  int y_cuts = 0;
  double log_volume_drop = 0.0;
};

struct PrivateSolution {
  MarginalVars vars;
  SparseY y;              // lifted solution, feasible for the equality program
  double value = 0.0;     // exact revenue of the recovered scheme's columns
  double lp_value = 0.0;  // reduced-program objective (evaluation dists)
  SignalingScheme scheme;
  std::vector<BisectionStep> trace;
  double rho_infeasible = 0.0;  // final bracket [rho1, rho2]
  double rho_feasible = 1.0;
};

// Reduced primal restricted to the recorded columns; coupling rows stay
// inequalities and are lifted afterwards.
inline void solve_reduced_primal(const PrivateProgram& prog,
                                 const std::vector<YColumnId>& columns,
                                 MarginalVars& vars, SparseY& y, double& value) {
  const int n = prog.n, X = prog.X(), P = prog.P();
  std::vector<YColumnId> cols = columns;
  std::sort(cols.begin(), cols.end());
  cols.erase(std::unique(cols.begin(), cols.end()), cols.end());

  const int t0 = static_cast<int>(cols.size());
  const int g0 = t0 + n * X * P;
  LpProblem lp;
  lp.num_vars = g0 + n * X;
  lp.objective.assign(lp.num_vars, 0.0);
  for (std::size_t k = 0; k < cols.size(); ++k)
    lp.objective[k] = prog.revenue_of(cols[k].xi, cols[k].p);

  auto t_var = [&](int i, int xi, int p) { return t0 + (i * X + xi) * P + p; };
  auto g_var = [&](int i, int xi) { return g0 + i * X + xi; };

  std::map<std::tuple<int, int, int, int>, std::vector<std::pair<int, double>>> coupling;
  for (std::size_t k = 0; k < cols.size(); ++k)
    for (int i = 0; i < n; ++i)
      coupling[{cols[k].theta, i, cols[k].xi[i], cols[k].p[i]}].emplace_back(
          static_cast<int>(k), 1.0);
  for (auto& [key, coeffs] : coupling) {
    auto [theta, i, xi, p] = key;
    coeffs.emplace_back(t_var(i, xi, p), -prog.xi_set.posteriors[xi].probs[theta]);
    lp.add_row(std::move(coeffs), '<', 0.0);
  }
  for (int i = 0; i < n; ++i)
    for (int xi = 0; xi < X; ++xi) {
      std::vector<std::pair<int, double>> coeffs;
      for (int p = 0; p < P; ++p) coeffs.emplace_back(t_var(i, xi, p), 1.0);
      coeffs.emplace_back(g_var(i, xi), -1.0);
      lp.add_row(std::move(coeffs), '=', 0.0);
    }
  for (int i = 0; i < n; ++i)
    for (int theta = 0; theta < prog.d; ++theta) {
      std::vector<std::pair<int, double>> coeffs;
      for (int xi = 0; xi < X; ++xi) {
        double v = prog.xi_set.posteriors[xi].probs[theta];
        if (v != 0.0) coeffs.emplace_back(g_var(i, xi), v);
      }
      lp.add_row(std::move(coeffs), '=', prog.prior[theta]);
    }

  LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::Optimal)
    throw NumericalFailure("reduced primal not solvable");
  value = sol.value;
  vars = MarginalVars::zeros(prog);
  for (int i = 0; i < n; ++i)
    for (int xi = 0; xi < X; ++xi) {
      vars.gamma_at(prog, i, xi) = sol.x[g_var(i, xi)];
      for (int p = 0; p < P; ++p) vars.t_at(prog, i, xi, p) = sol.x[t_var(i, xi, p)];
    }
  y.clear();
  for (std::size_t k = 0; k < cols.size(); ++k)
    if (sol.x[k] > 1e-15) y[cols[k]] = sol.x[k];
}

// Bisection over the dual objective level, each step solved by the
// ellipsoid method with the approximate separation oracle; the recorded
// cuts of the last infeasible level parameterize the reduced primal, whose
// solution is lifted and turned into a scheme. K = 0 evaluates on the exact
// distributions instead of an empirical sample.
inline PrivateSolution solve_private(const AuctionInstance& inst, int q, int b,
                                     double delta, double beta, long long K,
                                     std::uint64_t seed,
                                     std::size_t cap = default_cell_cap()) {
  inst.validate();
  if (!(beta > 0.0) || !(delta > 0.0)) throw InvalidInstance("delta and beta must be positive");
  AuctionInstance eval = K > 0 ? empirical_instance(inst, K, seed) : inst;
  PrivateProgram prog = build_private_program(inst, eval, q, b, cap);

  PrivateSolution sol;
  double rho1 = 0.0, rho2 = 1.0;
  std::vector<YColumnId> h_star;
  const double R = (prog.n + 2.0) * std::sqrt(static_cast<double>(prog.dim()));
  while (rho2 - rho1 > beta) {
    double rho3 = 0.5 * (rho1 + rho2);
    PrivateSeparationOracle oracle(prog, rho3, delta);
    EllipsoidResult run = ellipsoid_feasibility(oracle, prog.dim(), R);
    sol.trace.push_back({rho3, run.feasible, run.iterations,
                         static_cast<int>(run.y_cuts.size()), run.log_volume_drop});
    if (run.feasible) {
      rho2 = rho3;
    } else {
      rho1 = rho3;
      h_star = std::move(run.y_cuts);
    }
  }
  sol.rho_infeasible = rho1;
  sol.rho_feasible = rho2;

  solve_reduced_primal(prog, h_star, sol.vars, sol.y, sol.lp_value);
  sol.y = lift_relaxed(prog, sol.vars, sol.y, cap);
  sol.scheme = recover_scheme_private(inst, sol.y, prog);

  // true value of the lifted solution, on the actual distributions
  PrivateProgram truth =
      K > 0 ? build_private_program(inst, inst, q, b, cap) : prog;
  double value = 0.0;
  for (const auto& [id, v] : sol.y) value += v * truth.revenue_of(id.xi, id.p);
  sol.value = value;
  return sol;
}

struct PrivateParams {
  double eta = 0.0;
  double delta = 0.0;
  double beta = 0.0;
  double eps = 0.0;
  int q = 0;
  int b = 0;
  long long K = 0;
};

// Accuracy-to-parameter map for the private solver at additive error lambda.
inline PrivateParams private_params(double lambda, int n, int d) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw InvalidInstance("lambda must lie in (0,1)");
  PrivateParams p;
  p.eta = lambda / 4.0;
  p.delta = lambda / 4.0;
  p.beta = lambda / 4.0;
  p.eps = lambda / 4.0;
  p.q = q_for(p.eta / 3.0, p.eta / 3.0);
  p.b = static_cast<int>(std::ceil(3.0 / p.eta));
  double logX = std::lgamma(p.q + d) - std::lgamma(p.q + 1.0) - std::lgamma(static_cast<double>(d));
  double logP = std::log(p.b + 1.0);
  double k = 8.0 * (std::log(2.0) + n * logX + n * logP - std::log(p.eps)) / (p.eps * p.eps);
  p.K = static_cast<long long>(std::ceil(std::max(k, 1.0)));
  return p;
}

}  // namespace signalprice
