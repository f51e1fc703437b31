#include "persuasion/robust.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "persuasion/error.hpp"
#include "persuasion/numeric.hpp"
#include "persuasion/sdsu.hpp"
#include "persuasion/sisu.hpp"

namespace persuasion::robust {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

bool RobustReport::infinite() const noexcept { return std::isinf(gamma); }

OptimumValue optimum(const Instance& inst, const RationalityLevel& level, const RobustOptions& opts) {
  OptimumValue out;
  if (level.is_fully_rational()) {
    out.scheme = make_censorship(inst, sisu::rational_optimal(inst));
    out.solver = "rational-censorship";
  } else if (level.beta() == 0.0) {
    out.scheme = Scheme::no_info(inst);
    out.solver = "constant";
  } else if (inst.state_independent()) {
    out.scheme = sisu::quantal_optimal(inst, level).scheme;
    out.solver = "sisu-quantal";
  } else if (inst.size() == 2) {
    out.scheme = sdsu::binary_optimal(inst, level).scheme;
    out.solver = "binary-exact";
  } else {
    out.scheme = sdsu::optimal_pairwise(inst, level, opts.grid);
    out.solver = "pairwise-grid";
  }
  out.payoff = evaluate_payoff(inst, level, out.scheme);
  out.log_payoff = log_payoff(inst, level, out.scheme);
  return out;
}

RobustReport robust_ratio(const Instance& inst, const Scheme& scheme,
                          std::span<const RationalityLevel> levels, const RobustOptions& opts) {
  if (levels.empty()) throw ValidationError("robust ratio needs at least one level");
  RobustReport report;
  report.gamma = -kInf;
  for (const RationalityLevel& level : levels) {
    const OptimumValue opt = optimum(inst, level, opts);
    RobustRow row;
    row.level = level;
    row.opt_payoff = opt.payoff;
    row.scheme_payoff = evaluate_payoff(inst, level, scheme);
    row.solver = opt.solver;
    const double own = log_payoff(inst, level, scheme);
    if (!std::isfinite(opt.log_payoff)) {
      row.log_ratio = 0.0;  // both earn nothing
    } else if (!std::isfinite(own)) {
      row.log_ratio = kInf;
    } else {
      row.log_ratio = opt.log_payoff - own;
    }
    row.ratio = std::exp(row.log_ratio);
    report.gamma = std::max(report.gamma, row.ratio);
    report.rows.push_back(std::move(row));
  }
  return report;
}

Scheme sisu_robust_scheme(const Instance& inst) {
  return make_censorship(inst, sisu::rational_optimal(inst));
}

Instance no_info_trap_instance(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw ValidationError("eps must lie in (0, 1)");
  const double l2 = eps / (4.0 - eps);
  const double l1 = 1.0 - l2;
  const double v1 = std::log(l2);
  const double v2 = -l1 * v1 / l2;
  return Instance::from_states({{l1, v1, 1.0}, {l2, v2, 1.0}});
}

Instance direct_fragility_instance(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw ValidationError("eps must lie in (0, 1)");
  const double half = (1.0 - eps) / 2.0;
  return Instance::from_states({{eps, -0.01, 1.0}, {half, 0.01, 1.0}, {half, 3.0, 1.0}});
}

Instance cross_level_instance() {
  return Instance::from_states({{0.5, 1.0, 0.0}, {0.5, 2.0, 1.0}});
}

FactorRevealingResult factor_revealing_bound(const Instance& inst, std::span<const double> levels,
                                             const FactorRevealingOptions& opts) {
  if (levels.empty()) throw ValidationError("factor-revealing bound needs at least one level");
  for (double b : levels) {
    if (!std::isfinite(b) || b <= 0.0) throw ValidationError("levels must be finite and positive");
  }
  const std::size_t m = inst.size();
  const double lo = inst.v(0), hi = inst.v(m - 1);

  std::vector<double> grid = numeric::linspace(lo, hi, opts.grid_points);
  for (double v : inst.values()) grid.push_back(v);
  for (double b : levels) {
    const double d = (b + 2.0) / (b + 1.0);
    if (d >= lo && d <= hi) grid.push_back(d);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end(), [](double a, double b) { return same_delta(a, b); }),
             grid.end());
  const std::size_t K = grid.size();

  FactorRevealingResult out;
  out.grid = grid;
  std::vector<double> log_floor;
  for (double b : levels) {
    const auto level = RationalityLevel::finite(b);
    if (opts.floor == FloorKind::LevelFloor) {
      log_floor.push_back(-std::log(b) - b);
    } else {
      log_floor.push_back(optimum(inst, level).log_payoff);
    }
    out.floors.push_back(std::exp(log_floor.back()));
  }

  const std::size_t nvar = m * K + 1;
  const std::size_t gamma_var = m * K;
  oracle::LinearProgram lp;
  lp.objective.assign(nvar, 0.0);
  lp.objective[gamma_var] = 1.0;
  for (std::size_t k = 0; k < K; ++k) {
    oracle::LpRow row{std::vector<double>(nvar, 0.0), oracle::Sense::GreaterEq, 0.0};
    for (std::size_t i = 0; i < m; ++i) row.coef[i * K + k] = inst.lambda(i) * (grid[k] - inst.v(i));
    lp.rows.push_back(std::move(row));
  }
  for (std::size_t i = 0; i < m; ++i) {
    oracle::LpRow row{std::vector<double>(nvar, 0.0), oracle::Sense::Equal, 1.0};
    for (std::size_t k = 0; k < K; ++k) row.coef[i * K + k] = 1.0;
    lp.rows.push_back(std::move(row));
  }
  for (std::size_t l = 0; l < levels.size(); ++l) {
    const auto level = RationalityLevel::finite(levels[l]);
    oracle::LpRow row{std::vector<double>(nvar, 0.0), oracle::Sense::GreaterEq, 0.0};
    for (std::size_t i = 0; i < m; ++i) {
      if (inst.u(i) == 0.0 || !std::isfinite(inst.log_lambda(i))) continue;
      for (std::size_t k = 0; k < K; ++k) {
        row.coef[i * K + k] = std::exp(inst.log_lambda(i) + std::log(inst.u(i)) +
                                       log_response(level, grid[k]) - log_floor[l]);
      }
    }
    row.coef[gamma_var] = -1.0;
    lp.rows.push_back(std::move(row));
  }

  const auto sol = oracle::simplex_solve(lp);
  if (sol.status != oracle::LpStatus::Optimal) {
    throw NumericError("factor-revealing LP has no optimum");
  }
  out.gamma_prime = sol.x[gamma_var];
  out.bound = out.gamma_prime > 0.0 ? 1.0 / out.gamma_prime : kInf;

  // Each signal is relabelled to its true posterior mean, which only raises the response.
  std::vector<Signal> signals;
  for (std::size_t k = 0; k < K; ++k) {
    std::vector<std::pair<std::size_t, double>> members;
    for (std::size_t i = 0; i < m; ++i) {
      if (sol.x[i * K + k] > 0.0) members.emplace_back(i, sol.x[i * K + k]);
    }
    if (members.empty()) continue;
    const auto mean = pooled_mean(inst, members);
    Signal s{mean ? *mean : grid[k], {}};
    for (auto [i, p] : members) s.mass[i] = p;
    signals.push_back(std::move(s));
  }
  std::vector<double> totals(m, 0.0);
  for (const Signal& s : signals) {
    for (const auto& [i, p] : s.mass) totals[i] += p;
  }
  for (Signal& s : signals) {
    for (auto& [i, p] : s.mass) p /= totals[i];
  }
  out.scheme = Scheme(std::move(signals));
  return out;
}

BinaryRobust binary_robust_scheme(const Instance& inst2, double beta0, double K) {
  if (inst2.size() != 2) throw ValidationError("binary robust scheme needs two states");
  if (!(K >= 1.0) || !std::isfinite(K)) throw ValidationError("K must be finite and at least 1");
  if (!(beta0 > 0.0) || !std::isfinite(beta0)) throw ValidationError("beta0 must be finite and positive");
  const double v1 = inst2.v(0), v2 = inst2.v(1);
  const double floor_v = std::max(v1, 0.0);
  if (v2 > 0.0) {
    const double need = std::exp(inst2.log_lambda(1) - inst2.log_lambda(0)) / (v2 - floor_v);
    if (beta0 < need * (1.0 - 1e-12)) {
      throw ValidationError("beta0 is below (lambda2/lambda1)/(v2 - max(v1, 0)) = " + std::to_string(need));
    }
  }
  BinaryRobust out;
  out.delta_pool = std::min(inst2.prior_mean(), floor_v + 1.0 / (K * beta0));
  const double p = sdsu::binary_pool_probability(inst2, out.delta_pool);
  out.pooled = make_censorship(inst2, censorship_params(inst2, {0}, 1, p));
  out.reveal = Scheme::full_reveal(inst2);
  const double root = std::sqrt(16.0 * std::numbers::e * K);
  out.q = root / (1.0 + root);
  const Scheme parts[2] = {out.pooled, out.reveal};
  const double weights[2] = {out.q, 1.0 - out.q};
  out.scheme = mix(parts, weights);
  const double c = 4.0 * std::sqrt(std::numbers::e * K) + 1.0;
  out.certified_bound = c * c;
  return out;
}

}  // namespace persuasion::robust
