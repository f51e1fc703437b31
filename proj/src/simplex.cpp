#include "persuasion/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "persuasion/error.hpp"

namespace persuasion::oracle {

namespace {

enum class ColKind { Original, Slack, Artificial };

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), a_(rows * (cols + 1), 0.0), basis_(rows, 0) {}

  double& at(std::size_t r, std::size_t c) { return a_[r * (cols_ + 1) + c]; }
  double at(std::size_t r, std::size_t c) const { return a_[r * (cols_ + 1) + c]; }
  double& rhs(std::size_t r) { return at(r, cols_); }
  double rhs(std::size_t r) const { return at(r, cols_); }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::vector<std::size_t>& basis() { return basis_; }

  // Reduced costs d_j = c_j - c_B B^{-1} A_j for the given cost vector.
  void price(const std::vector<double>& cost) {
    reduced_.assign(cost.begin(), cost.end());
    value_ = 0.0;
    for (std::size_t r = 0; r < rows_; ++r) {
      const double cb = cost[basis_[r]];
      if (cb == 0.0) continue;
      const double* row = &a_[r * (cols_ + 1)];
      for (std::size_t c = 0; c < cols_; ++c) reduced_[c] -= cb * row[c];
      value_ += cb * row[cols_];
    }
  }

  void pivot(std::size_t pr, std::size_t pc) {
    double* prow = &a_[pr * (cols_ + 1)];
    const double inv = 1.0 / prow[pc];
    for (std::size_t c = 0; c <= cols_; ++c) prow[c] *= inv;
    prow[pc] = 1.0;
    for (std::size_t r = 0; r < rows_; ++r) {
      if (r == pr) continue;
      double* row = &a_[r * (cols_ + 1)];
      const double f = row[pc];
      if (f == 0.0) continue;
      for (std::size_t c = 0; c <= cols_; ++c) row[c] -= f * prow[c];
      row[pc] = 0.0;
    }
    const double f = reduced_[pc];
    if (f != 0.0) {
      for (std::size_t c = 0; c < cols_; ++c) reduced_[c] -= f * prow[c];
      value_ += f * prow[cols_];
      reduced_[pc] = 0.0;
    }
    basis_[pr] = pc;
  }

  const std::vector<double>& reduced() const { return reduced_; }
  double value() const { return value_; }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> a_;
  std::vector<std::size_t> basis_;
  std::vector<double> reduced_;
  double value_ = 0.0;
};

enum class PhaseResult { Optimal, Unbounded };

PhaseResult run_phase(Tableau& t, const std::vector<bool>& may_enter, const SimplexOptions& opts,
                      std::size_t& pivots) {
  const double piv_tol = 1e-9;
  std::size_t degenerate = 0;
  bool bland = opts.rule == PivotRule::Bland;
  for (;;) {
    const auto& d = t.reduced();
    std::size_t enter = t.cols();
    double best = opts.tol;
    for (std::size_t c = 0; c < t.cols(); ++c) {
      if (!may_enter[c] || !(d[c] > opts.tol)) continue;
      if (bland) {
        enter = c;
        break;
      }
      if (d[c] > best) {
        best = d[c];
        enter = c;
      }
    }
    if (enter == t.cols()) return PhaseResult::Optimal;

    std::size_t leave = t.rows();
    double ratio = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < t.rows(); ++r) {
      const double a = t.at(r, enter);
      if (a <= piv_tol) continue;
      const double q = std::max(t.rhs(r), 0.0) / a;
      if (q < ratio - 1e-14) {
        ratio = q;
        leave = r;
      } else if (q <= ratio + 1e-14 && t.basis()[r] < t.basis()[leave]) {
        ratio = std::min(ratio, q);
        leave = r;
      }
    }
    if (leave == t.rows()) return PhaseResult::Unbounded;

    if (++pivots > opts.max_pivots) throw NumericError("simplex: pivot cap exceeded");
    if (ratio <= 1e-14) {
      if (++degenerate >= opts.degenerate_run) bland = true;
    } else {
      degenerate = 0;
      bland = opts.rule == PivotRule::Bland;
    }
    t.pivot(leave, enter);
  }
}

}  // namespace

LpSolution simplex_solve(const LinearProgram& lp, const SimplexOptions& opts) {
  const std::size_t n = lp.objective.size();
  const std::size_t m = lp.rows.size();
  for (const LpRow& row : lp.rows) {
    if (row.coef.size() != n) throw ValidationError("simplex: row width differs from objective");
  }

  // Flip rows so every right-hand side is nonnegative; a >= row with zero rhs becomes <=.
  std::vector<double> sign(m, 1.0);
  std::vector<Sense> sense(m);
  for (std::size_t r = 0; r < m; ++r) {
    Sense s = lp.rows[r].sense;
    const double b = lp.rows[r].rhs;
    if (b < 0.0 || (b == 0.0 && s == Sense::GreaterEq)) {
      sign[r] = -1.0;
      if (s == Sense::LessEq) s = Sense::GreaterEq;
      else if (s == Sense::GreaterEq) s = Sense::LessEq;
    }
    sense[r] = s;
  }

  std::size_t cols = n;
  std::vector<ColKind> kind(n, ColKind::Original);
  std::vector<std::size_t> surplus(m, SIZE_MAX), unit(m, SIZE_MAX);
  for (std::size_t r = 0; r < m; ++r) {
    if (sense[r] == Sense::GreaterEq) {
      surplus[r] = cols++;
      kind.push_back(ColKind::Slack);
    }
  }
  for (std::size_t r = 0; r < m; ++r) {
    unit[r] = cols++;
    kind.push_back(sense[r] == Sense::LessEq ? ColKind::Slack : ColKind::Artificial);
  }

  Tableau t(m, cols);
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = 0; c < n; ++c) t.at(r, c) = sign[r] * lp.rows[r].coef[c];
    if (surplus[r] != SIZE_MAX) t.at(r, surplus[r]) = -1.0;
    t.at(r, unit[r]) = 1.0;
    t.rhs(r) = sign[r] * lp.rows[r].rhs;
    t.basis()[r] = unit[r];
  }

  LpSolution sol;
  std::vector<bool> may_enter(cols, true);
  double bscale = 1.0;
  for (std::size_t r = 0; r < m; ++r) bscale = std::max(bscale, std::abs(t.rhs(r)));

  const bool need_phase1 =
      std::any_of(kind.begin(), kind.end(), [](ColKind k) { return k == ColKind::Artificial; });
  if (need_phase1) {
    std::vector<double> cost(cols, 0.0);
    for (std::size_t c = 0; c < cols; ++c) {
      if (kind[c] == ColKind::Artificial) cost[c] = -1.0;
    }
    t.price(cost);
    run_phase(t, may_enter, opts, sol.pivots);
    if (t.value() < -1e-9 * bscale) {
      sol.status = LpStatus::Infeasible;
      return sol;
    }
    // Drive zero-level artificials out of the basis where possible.
    for (std::size_t r = 0; r < m; ++r) {
      if (kind[t.basis()[r]] != ColKind::Artificial) continue;
      std::size_t best = cols;
      double mag = 1e-9;
      for (std::size_t c = 0; c < cols; ++c) {
        if (kind[c] != ColKind::Artificial && std::abs(t.at(r, c)) > mag) {
          mag = std::abs(t.at(r, c));
          best = c;
        }
      }
      if (best != cols) {
        t.pivot(r, best);
        ++sol.pivots;
      }
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (kind[c] == ColKind::Artificial) may_enter[c] = false;
    }
  }

  std::vector<double> cost(cols, 0.0);
  std::copy(lp.objective.begin(), lp.objective.end(), cost.begin());
  t.price(cost);
  if (run_phase(t, may_enter, opts, sol.pivots) == PhaseResult::Unbounded) {
    sol.status = LpStatus::Unbounded;
    return sol;
  }

  sol.status = LpStatus::Optimal;
  sol.x.assign(n, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    const std::size_t c = t.basis()[r];
    if (c < n) sol.x[c] = std::max(t.rhs(r), 0.0);
  }
  sol.objective = 0.0;
  for (std::size_t c = 0; c < n; ++c) sol.objective += lp.objective[c] * sol.x[c];
  sol.duals.assign(m, 0.0);
  sol.dual_objective = 0.0;
  for (std::size_t r = 0; r < m; ++r) {
    sol.duals[r] = -sign[r] * t.reduced()[unit[r]] + 0.0;
    sol.dual_objective += sol.duals[r] * lp.rows[r].rhs;
  }
  return sol;
}

}  // namespace persuasion::oracle
