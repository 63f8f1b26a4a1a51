#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "signalprice/errors.hpp"

namespace signalprice {

enum class LpStatus { Optimal, Infeasible, Unbounded };

// maximize c.x  s.t.  rows (<=, =, >=), x >= 0
struct LpProblem {
  int num_vars = 0;
  std::vector<double> objective;

  struct Row {
    std::vector<std::pair<int, double>> coeffs;
    char rel = '=';  // '<', '=', '>'
    double rhs = 0.0;
  };
  std::vector<Row> rows;

  void add_row(std::vector<std::pair<int, double>> coeffs, char rel, double rhs) {
    rows.push_back({std::move(coeffs), rel, rhs});
  }
};

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> x;
  double value = 0.0;
};

// Dense two-phase simplex with Bland's rule: deterministic and cycle-free.
// Intended for the small programs this library builds (at most a few
// thousand cells); not a general-purpose LP code.
class SimplexSolver {
 public:
  explicit SimplexSolver(const LpProblem& p) : n_(p.num_vars) {
    const int m = static_cast<int>(p.rows.size());
    // column layout: structural | slack/surplus | artificial
    int num_slack = 0;
    for (const auto& r : p.rows)
      if (r.rel != '=') ++num_slack;
    slack_begin_ = n_;
    art_begin_ = n_ + num_slack;
    int num_art = 0;
    for (const auto& r : p.rows) {
      bool rhs_neg = r.rhs < 0.0;
      char rel = r.rel;
      if (rhs_neg) rel = (rel == '<') ? '>' : (rel == '>') ? '<' : '=';
      if (rel != '<') ++num_art;
    }
    cols_ = art_begin_ + num_art;

    tab_.assign(m, std::vector<double>(cols_ + 1, 0.0));
    basis_.assign(m, -1);
    int slack = slack_begin_, art = art_begin_;
    for (int i = 0; i < m; ++i) {
      const auto& r = p.rows[i];
      double sign = r.rhs < 0.0 ? -1.0 : 1.0;
      for (const auto& [j, v] : r.coeffs) tab_[i][j] += sign * v;
      tab_[i][cols_] = sign * r.rhs;
      char rel = r.rel;
      if (sign < 0.0) rel = (rel == '<') ? '>' : (rel == '>') ? '<' : '=';
      if (rel == '<') {
        tab_[i][slack] = 1.0;
        basis_[i] = slack++;
      } else if (rel == '>') {
        tab_[i][slack++] = -1.0;
        tab_[i][art] = 1.0;
        basis_[i] = art++;
      } else {
        tab_[i][art] = 1.0;
        basis_[i] = art++;
      }
    }
    objective_ = p.objective;
    objective_.resize(cols_, 0.0);
  }

  LpSolution solve() {
    if (!phase1()) return {LpStatus::Infeasible, {}, 0.0};
    drop_redundant_rows();
    if (!phase2()) return {LpStatus::Unbounded, {}, 0.0};
    LpSolution sol;
    sol.status = LpStatus::Optimal;
    sol.x.assign(n_, 0.0);
    for (std::size_t i = 0; i < basis_.size(); ++i)
      if (basis_[i] < n_) sol.x[basis_[i]] = tab_[i][cols_];
    sol.value = 0.0;
    for (int j = 0; j < n_; ++j) sol.value += objective_[j] * sol.x[j];
    return sol;
  }

 private:
  static constexpr double kPivTol = 1e-9;
  static constexpr double kFeasTol = 1e-7;

  bool phase1() {
    if (art_begin_ == cols_) return true;  // no artificials
    // maximize -sum(artificials); reduced costs from rows with basic artificials
    std::vector<double> r(cols_, 0.0);
    for (int j = art_begin_; j < cols_; ++j) r[j] = -1.0;
    for (std::size_t i = 0; i < basis_.size(); ++i)
      if (basis_[i] >= art_begin_)
        for (int j = 0; j < cols_; ++j) r[j] += tab_[i][j];
    if (!run(r, /*forbid_artificials=*/false)) return false;  // cannot be unbounded
    double infeasibility = 0.0;
    for (std::size_t i = 0; i < basis_.size(); ++i)
      if (basis_[i] >= art_begin_) infeasibility += tab_[i][cols_];
    return infeasibility <= kFeasTol;
  }

  void drop_redundant_rows() {
    for (std::size_t i = 0; i < basis_.size();) {
      if (basis_[i] >= art_begin_) {
        // try to pivot the artificial out on any structural/slack column
        int enter = -1;
        for (int j = 0; j < art_begin_; ++j)
          if (std::abs(tab_[i][j]) > kPivTol) {
            enter = j;
            break;
          }
        if (enter >= 0) {
          pivot(static_cast<int>(i), enter, nullptr);
        } else {
          tab_.erase(tab_.begin() + i);  // redundant constraint
          basis_.erase(basis_.begin() + i);
          continue;
        }
      }
      ++i;
    }
  }

  bool phase2() {
    std::vector<double> r = objective_;
    for (std::size_t i = 0; i < basis_.size(); ++i) {
      double cb = objective_[basis_[i]];
      if (cb != 0.0)
        for (int j = 0; j < cols_; ++j) r[j] -= cb * tab_[i][j];
    }
    return run(r, /*forbid_artificials=*/true);
  }

  // Bland: entering = lowest-index improving column; leaving = min ratio,
  // ties to the lowest basis index.
  bool run(std::vector<double>& r, bool forbid_artificials) {
    const int limit = forbid_artificials ? art_begin_ : cols_;
    const std::size_t max_iters =
        2000 + 200 * static_cast<std::size_t>(cols_) * (basis_.size() + 1);
    for (std::size_t iter = 0; iter < max_iters; ++iter) {
      int enter = -1;
      for (int j = 0; j < limit; ++j)
        if (r[j] > kPivTol) {
          enter = j;
          break;
        }
      if (enter < 0) return true;
      int leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < basis_.size(); ++i) {
        if (tab_[i][enter] > kPivTol) {
          double ratio = tab_[i][cols_] / tab_[i][enter];
          if (ratio < best - kPivTol ||
              (ratio < best + kPivTol && (leave < 0 || basis_[i] < basis_[leave]))) {
            best = ratio;
            leave = static_cast<int>(i);
          }
        }
      }
      if (leave < 0) return false;  // unbounded
      pivot(leave, enter, &r);
    }
    throw NumericalFailure("simplex iteration cap exceeded");
  }

  void pivot(int row, int col, std::vector<double>* r) {
    double piv = tab_[row][col];
    for (int j = 0; j <= cols_; ++j) tab_[row][j] /= piv;
    tab_[row][col] = 1.0;
    for (std::size_t i = 0; i < tab_.size(); ++i) {
      if (static_cast<int>(i) == row) continue;
      double f = tab_[i][col];
      if (f == 0.0) continue;
      for (int j = 0; j <= cols_; ++j) tab_[i][j] -= f * tab_[row][j];
      tab_[i][col] = 0.0;
    }
    if (r) {
      double f = (*r)[col];
      if (f != 0.0)
        for (int j = 0; j < cols_; ++j) (*r)[j] -= f * tab_[row][j];
      (*r)[col] = 0.0;
    }
    basis_[row] = col;
  }

  int n_ = 0;
  int cols_ = 0;
  int slack_begin_ = 0;
  int art_begin_ = 0;
  std::vector<std::vector<double>> tab_;
  std::vector<int> basis_;
  std::vector<double> objective_;
};

inline LpSolution solve_lp(const LpProblem& p) { return SimplexSolver(p).solve(); }

}  // namespace signalprice
