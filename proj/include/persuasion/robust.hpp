#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "persuasion/model.hpp"
#include "persuasion/oracle.hpp"

namespace persuasion::robust {

struct RobustRow {
  RationalityLevel level = RationalityLevel::fully_rational();
  double opt_payoff = 0.0;
  double scheme_payoff = 0.0;
  double log_ratio = 0.0;  // +inf when the scheme earns nothing against a positive optimum
  double ratio = 0.0;      // exp(log_ratio), possibly +inf
  std::string solver;
};

struct RobustReport {
  std::vector<RobustRow> rows;
  double gamma = 0.0;  // max ratio, possibly +inf
  bool infinite() const noexcept;
};

struct RobustOptions {
  oracle::GridOptions grid;  // for instances without an exact solver
};

/// Optimal payoff at one level and the name of the solver that produced it.
struct OptimumValue {
  double payoff = 0.0;
  double log_payoff = 0.0;
  Scheme scheme;
  std::string solver;
};
OptimumValue optimum(const Instance& inst, const RationalityLevel& level,
                     const RobustOptions& opts = {});

/// Worst ratio of the optimal payoff to the scheme's payoff over the given levels.
RobustReport robust_ratio(const Instance& inst, const Scheme& scheme,
                          std::span<const RationalityLevel> levels, const RobustOptions& opts = {});

/// The fully rational optimal censorship, used unchanged against every finite beta.
Scheme sisu_robust_scheme(const Instance& inst);

/// Two states whose prior mean is 0: the fully rational optimum pools everything at 0,
/// which earns 1/2 at beta = 1 while revealing the low state earns almost 1 - eps/2.
Instance no_info_trap_instance(double eps);

/// Three states on which the fully rational optimal direct scheme degrades without bound.
Instance direct_fragility_instance(double eps);

/// lambda = (1/2, 1/2), v = (1, 2), u = (0, 1): optimal schemes at distant levels are
/// mutually poor.
Instance cross_level_instance();

enum class FloorKind {
  LevelFloor,  // 1 / (beta e^beta)
  ExactOpt,    // optimal payoff at beta
};

struct FactorRevealingOptions {
  std::size_t grid_points = 201;
  FloorKind floor = FloorKind::LevelFloor;
};

struct FactorRevealingResult {
  double bound = 0.0;        // 1 / max Gamma'
  double gamma_prime = 0.0;  // max Gamma'
  std::vector<double> grid;
  std::vector<double> floors;
  Scheme scheme;  // maximizer
};

/// Lower bound on the robust ratio of any scheme whose signals lie on the grid: maximize
/// Gamma' subject to V_beta(pi) >= Gamma' * floor(beta) for every level. The grid is uniform
/// on [v_1, v_m] plus v, and (beta+2)/(beta+1) for each level.
FactorRevealingResult factor_revealing_bound(const Instance& inst,
                                             std::span<const double> levels,
                                             const FactorRevealingOptions& opts = {});

struct BinaryRobust {
  Scheme scheme;   // q * pooled + (1 - q) * reveal
  Scheme pooled;   // censorship of state 2 at delta_pool
  Scheme reveal;   // full revelation
  double q = 0.0;
  double delta_pool = 0.0;
  double certified_bound = 0.0;  // (4 sqrt(e K) + 1)^2
};

/// Mixture that stays within a constant factor of optimal for every beta in [beta0, K beta0].
/// Requires beta0 >= (lambda_2/lambda_1) / (v_2 - max(v_1, 0)) when v_2 > 0.
BinaryRobust binary_robust_scheme(const Instance& inst2, double beta0, double K);

}  // namespace persuasion::robust
