#include "persuasion/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "persuasion/error.hpp"
#include "persuasion/numeric.hpp"

namespace persuasion::oracle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double default_margin(const RationalityLevel& level) {
  if (level.is_finite() && level.beta() > 0.0) return 2.0 / level.beta();
  return 1.0;
}

bool near_any(const std::vector<double>& sorted, double x) {
  auto it = std::lower_bound(sorted.begin(), sorted.end(), x);
  if (it != sorted.end() && same_delta(*it, x)) return true;
  return it != sorted.begin() && same_delta(*std::prev(it), x);
}

}  // namespace

std::vector<double> make_grid(const Instance& inst, const RationalityLevel& level,
                              const GridOptions& opts) {
  std::vector<double> base(inst.values().begin(), inst.values().end());
  base.push_back(0.0);
  for (double x : opts.extra) {
    if (!std::isfinite(x)) throw ValidationError("grid points must be finite");
    base.push_back(x);
  }
  std::sort(base.begin(), base.end());
  base.erase(std::unique(base.begin(), base.end()), base.end());

  const double margin = opts.margin >= 0.0 ? opts.margin : default_margin(level);
  const double lo = inst.v(0) - margin;
  const double hi = inst.v(inst.size() - 1) + margin;
  std::vector<double> grid = base;
  for (double x : numeric::linspace(lo, hi, opts.points)) {
    if (!near_any(base, x)) grid.push_back(x);
  }
  std::sort(grid.begin(), grid.end());
  return grid;
}

GridLpResult grid_lp_optimal(const Instance& inst, const RationalityLevel& level,
                             const GridOptions& opts) {
  const std::size_t m = inst.size();
  GridLpResult out;
  out.grid = make_grid(inst, level, opts);

  struct Column {
    std::size_t i, j;  // i == j for a singleton reveal
    double delta, a, b;
  };
  std::vector<Column> cols;
  LinearProgram lp;
  auto reward = [&](std::size_t i, double share) {
    return inst.lambda(i) * inst.u(i) * share;
  };
  for (std::size_t i = 0; i < m; ++i) {
    cols.push_back(Column{i, i, inst.v(i), 1.0, 0.0});
    lp.objective.push_back(reward(i, 1.0) * response(level, inst.v(i)));
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (!std::isfinite(inst.log_lambda(i))) continue;
    for (std::size_t j = i + 1; j < m; ++j) {
      if (!std::isfinite(inst.log_lambda(j))) continue;
      const double ratio = std::exp(inst.log_lambda(j) - inst.log_lambda(i));
      auto first = std::upper_bound(out.grid.begin(), out.grid.end(), inst.v(i));
      for (auto it = first; it != out.grid.end() && *it < inst.v(j); ++it) {
        const double d = *it;
        const double up = ratio * (inst.v(j) - d);
        const double down = d - inst.v(i);
        const double a = up / (up + down);
        const double b = down / (up + down);
        cols.push_back(Column{i, j, d, a, b});
        lp.objective.push_back((reward(i, a) + reward(j, b)) * response(level, d));
      }
    }
  }
  const std::size_t n = cols.size();
  for (std::size_t i = 0; i < m; ++i) lp.rows.push_back(LpRow{std::vector<double>(n, 0.0), Sense::Equal, 1.0});
  for (std::size_t c = 0; c < n; ++c) {
    lp.rows[cols[c].i].coef[c] += cols[c].a;
    if (cols[c].j != cols[c].i) lp.rows[cols[c].j].coef[c] += cols[c].b;
  }

  const LpSolution sol = simplex_solve(lp);
  if (sol.status != LpStatus::Optimal) throw NumericError("grid LP did not reach an optimum");
  out.pivots = sol.pivots;
  out.eta = sol.duals;
  out.dual_value = sol.dual_objective;

  std::vector<Signal> signals;
  std::vector<double> totals(m, 0.0);
  for (std::size_t c = 0; c < n; ++c) {
    const double x = sol.x[c];
    if (!(x > 0.0)) continue;
    const Column& col = cols[c];
    Signal s{col.delta, {{col.i, col.a * x}}};
    totals[col.i] += col.a * x;
    if (col.j != col.i) {
      s.mass[col.j] = col.b * x;
      totals[col.j] += col.b * x;
    }
    signals.push_back(std::move(s));
  }
  for (Signal& s : signals) {
    for (auto& [i, p] : s.mass) p /= totals[i];
  }
  out.scheme = Scheme(std::move(signals));
  out.value = evaluate_payoff(inst, level, out.scheme);
  out.duality_gap = std::abs(sol.objective - sol.dual_objective);

  // Recover a plausibility multiplier per grid point from the mass multipliers.
  out.alpha.reserve(out.grid.size());
  for (double d : out.grid) {
    double lo = -kInf;
    double hi = kInf;
    for (std::size_t i = 0; i < m; ++i) {
      const double li = inst.lambda(i);
      if (li == 0.0 || inst.v(i) == d) continue;
      const double gap = li * inst.u(i) * response(level, d) - out.eta[i];
      const double slope = li * (inst.v(i) - d);
      if (slope > 0.0) lo = std::max(lo, gap / slope);
      else hi = std::min(hi, gap / slope);
    }
    double alpha = std::isfinite(lo) ? lo : (std::isfinite(hi) ? hi : 0.0);
    out.alpha.push_back(alpha);
    for (std::size_t i = 0; i < m; ++i) {
      const double li = inst.lambda(i);
      const double lhs = li * (inst.v(i) - d) * alpha + out.eta[i];
      out.dual_violation = std::max(out.dual_violation, li * inst.u(i) * response(level, d) - lhs);
    }
  }
  return out;
}

BinarySearchResult exhaustive_binary_search(const Instance& inst2, const RationalityLevel& level,
                                            std::vector<double> grid) {
  if (inst2.size() != 2) throw ValidationError("exhaustive binary search needs two states");
  const double v1 = inst2.v(0), v2 = inst2.v(1);
  const double l1 = inst2.lambda(0), l2 = inst2.lambda(1);
  const double u1 = inst2.u(0), u2 = inst2.u(1);
  const double mean = inst2.prior_mean();
  if (grid.empty()) grid = numeric::linspace(v1, v2, 10000);

  auto share = [&](double d) {
    if (d <= v1 || l2 == 0.0) return 0.0;
    if (d >= mean) return 1.0;
    return std::clamp(l1 * (d - v1) / (l2 * (v2 - d)), 0.0, 1.0);
  };
  BinarySearchResult best{v1, 0.0, -kInf, Scheme{}};
  for (double g : grid) {
    const double d = std::clamp(g, v1, mean);
    const double p = share(d);
    const double val = l1 * u1 * response(level, d) +
                       l2 * u2 * (p * response(level, d) + (1.0 - p) * response(level, v2));
    if (val > best.payoff) best = BinarySearchResult{d, p, val, Scheme{}};
  }
  CensorshipParams params{1, best.p, best.delta, {0}};
  best.scheme = make_censorship(inst2, params);
  return best;
}

bool SimulationReport::all_within() const noexcept {
  return std::all_of(signals.begin(), signals.end(), [](const SignalRate& s) { return s.within; });
}

SimulationReport gumbel_simulate(const Instance& inst, const RationalityLevel& level,
                                 const Scheme& scheme, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw ValidationError("simulation needs n >= 1");
  require_valid(inst, scheme);
  SimulationReport report;
  report.seed = seed;
  report.n = n;
  std::mt19937_64 rng(seed);
  auto gumbel = [&rng]() {
    const double u = (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
    return -std::log(-std::log(u));
  };
  const double beta = level.is_fully_rational() ? kInf : level.beta();
  for (const Signal& s : scheme.signals()) {
    const double p = response(level, s.delta);
    std::size_t hits = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const double e0 = gumbel();
      const double e1 = gumbel();
      bool act;
      if (std::isinf(beta)) act = s.delta <= 0.0;
      else act = e1 > beta * s.delta + e0;
      hits += act ? 1 : 0;
    }
    SignalRate row;
    row.delta = s.delta;
    row.expected = p;
    row.rate = static_cast<double>(hits) / static_cast<double>(n);
    row.tolerance = 4.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
    row.within = std::abs(row.rate - p) <= row.tolerance + 1e-15;
    report.signals.push_back(row);
  }
  return report;
}

}  // namespace persuasion::oracle
