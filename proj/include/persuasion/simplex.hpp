#pragma once

#include <cstddef>
#include <vector>

namespace persuasion::oracle {

enum class Sense { LessEq, GreaterEq, Equal };

struct LpRow {
  std::vector<double> coef;  // dense, one entry per variable
  Sense sense = Sense::LessEq;
  double rhs = 0.0;
};

/// maximize c'x subject to the rows and x >= 0.
struct LinearProgram {
  std::vector<double> objective;
  std::vector<LpRow> rows;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

enum class PivotRule {
  Bland,                  // smallest improving index
  DantzigWithBlandGuard,  // largest reduced cost; Bland after a run of degenerate pivots
};

struct SimplexOptions {
  PivotRule rule = PivotRule::DantzigWithBlandGuard;
  double tol = 1e-11;
  std::size_t max_pivots = 1000000;
  std::size_t degenerate_run = 50;
};

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> x;
  std::vector<double> duals;  // one per row, sign convention of the dual of a max problem
  double objective = 0.0;
  double dual_objective = 0.0;
  std::size_t pivots = 0;
};

/// Two-phase dense tableau simplex. Deterministic for a fixed input and options.
/// Throws NumericError when max_pivots is exceeded.
LpSolution simplex_solve(const LinearProgram& lp, const SimplexOptions& opts = {});

}  // namespace persuasion::oracle
