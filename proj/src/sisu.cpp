#include "persuasion/sisu.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "persuasion/error.hpp"
#include "persuasion/numeric.hpp"

namespace persuasion::sisu {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kResidualCap = 1e-8;

double require_positive_beta(const RationalityLevel& level) {
  if (level.is_fully_rational() || level.beta() <= 0.0) {
    throw ValidationError("tangency map needs a finite beta > 0");
  }
  return level.beta();
}

double rank_key(double v, double u) {
  if (u > 0.0) return v / u;
  return v > 0.0 ? kInf : -kInf;
}

// Weights proportional to the prior, scaled so the largest is 1.
std::vector<double> relative_weights(const Instance& inst) {
  double top = -kInf;
  for (double l : inst.log_lambdas()) top = std::max(top, l);
  std::vector<double> w;
  for (double l : inst.log_lambdas()) w.push_back(std::exp(l - top));
  return w;
}

numeric::BisectOptions tight() {
  numeric::BisectOptions opts;
  opts.residual_tol = 1e-15;
  opts.width_tol = 4e-16;
  return opts;
}

}  // namespace

CensorshipParams rational_optimal(const Instance& inst) {
  const std::size_t m = inst.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return rank_key(inst.v(a), inst.u(a)) < rank_key(inst.v(b), inst.u(b));
  });

  const auto w = relative_weights(inst);
  double scale = 0.0;
  for (std::size_t i = 0; i < m; ++i) scale += w[i] * std::abs(inst.v(i));
  const double tol = 1e-12 * std::max(1.0, scale);

  std::size_t pos = 0;
  double before = 0.0;
  double prefix = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    if (prefix <= tol) {
      pos = k;
      before = prefix;
    }
    prefix += w[order[k]] * inst.v(order[k]);
  }

  const std::size_t t = order[pos];
  double p = 1.0;
  if (inst.v(t) > 0.0 && w[t] > 0.0) p = std::clamp(-before / (w[t] * inst.v(t)), 0.0, 1.0) + 0.0;

  std::vector<std::size_t> high(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(pos));
  CensorshipParams params = censorship_params(inst, std::move(high), t, p);
  if (std::isfinite(params.pooling_signal) && p < 1.0 && inst.v(t) > 0.0 &&
      std::abs(params.pooling_signal) <= 1e-9 * std::max(1.0, inst.v(t))) {
    // The threshold constraint binds: the posterior sits exactly on the step. It does not bind
    // when p underflows to zero.
    params.pooling_signal = 0.0;
  }
  return params;
}

double tangency_residual(const RationalityLevel& level, double k, double delta_dd) {
  return response_derivative(level, k) * (delta_dd - k) -
         (response(level, delta_dd) - response(level, k));
}

double kappa(const RationalityLevel& level, double delta_dd) {
  const double beta = require_positive_beta(level);
  if (!(delta_dd >= 0.0) || !std::isfinite(delta_dd)) {
    throw ValidationError("kappa needs a finite delta >= 0");
  }
  if (delta_dd == 0.0) return 0.0;
  const double t = beta * delta_dd;
  const double st = logistic::sigma(t);
  auto r = [&](double s) {
    return logistic::sigma_prime(s) * (t - s) - (st - logistic::sigma(s));
  };
  double lo = -1.0;
  for (int it = 0; r(lo) <= 0.0; ++it) {
    if (it > 200) throw NumericError("kappa: bracket expansion failed");
    lo *= 2.0;
  }
  const double s = numeric::bisect(r, lo, 0.0, tight());
  const double k = s / beta;
  if (!(std::abs(tangency_residual(level, k, delta_dd)) <= 1e-10)) {
    throw NumericError("kappa: tangency residual above 1e-10");
  }
  return k;
}

double kappa_inverse(const RationalityLevel& level, double k) {
  const double beta = require_positive_beta(level);
  if (!(k <= 0.0) || !std::isfinite(k)) throw ValidationError("kappa_inverse needs a finite k <= 0");
  if (k == 0.0) return 0.0;
  const double x = beta * k;
  const double sx = logistic::sigma(x);
  const double dx = logistic::sigma_prime(x);
  auto h = [&](double t) { return logistic::sigma(t) - sx - dx * (t - x); };
  double hi = 1.0;
  for (int it = 0; h(hi) <= 0.0; ++it) {
    if (it > 1000) throw NumericError("kappa_inverse: bracket expansion failed");
    hi *= 2.0;
  }
  return numeric::bisect(h, 0.0, hi, tight()) / beta;
}

double pool_probability(const Instance& inst, const RationalityLevel& level, std::size_t i) {
  require_positive_beta(level);
  if (i >= inst.size()) throw ValidationError("state index out of range");
  if (inst.v(i) < 0.0) throw ValidationError("pool probability needs v_i >= 0");
  const double k = kappa(level, inst.v(i));
  double top = -kInf;
  for (std::size_t j = 0; j < i; ++j) top = std::max(top, inst.log_lambda(j));
  if (!std::isfinite(top)) return 0.0;
  // Prefix sum relative to its own largest weight, so its sign survives underflow.
  double num = 0.0;
  for (std::size_t j = 0; j < i; ++j) {
    num -= std::exp(inst.log_lambda(j) - top) * (inst.v(j) - k);
  }
  if (num == 0.0) return 0.0;
  if (!std::isfinite(inst.log_lambda(i)) || inst.v(i) == k) return num > 0.0 ? kInf : -kInf;
  const double p = num / (inst.v(i) - k) * std::exp(top - inst.log_lambda(i));
  if (p == 0.0) return num > 0.0 ? 0.0 : -std::numeric_limits<double>::denorm_min();
  return p;
}

// ---------------------------------------------------------------------------
// Normalization

bool Normalized::is_identity() const noexcept {
  return std::all_of(origin.begin(), origin.end(), [](const auto& o) { return o.has_value(); });
}

Scheme Normalized::restrict(const Scheme& scheme) const {
  std::vector<Signal> out;
  for (const Signal& s : scheme.signals()) {
    Signal r{s.delta, {}};
    for (const auto& [i, p] : s.mass) {
      if (i < origin.size() && origin[i]) r.mass[*origin[i]] = p;
    }
    out.push_back(std::move(r));
  }
  return scheme.is_split() ? Scheme::split(std::move(out)) : Scheme(std::move(out));
}

Normalized normalize_instance(const Instance& inst) {
  const std::size_t m = inst.size();
  const bool need_low = inst.v(0) >= 0.0;
  const bool need_high = inst.v(m - 1) <= 0.0;
  std::vector<std::optional<std::size_t>> origin;
  if (!need_low && !need_high) {
    for (std::size_t i = 0; i < m; ++i) origin.emplace_back(i);
    return Normalized{inst, std::move(origin)};
  }
  const double dummy_u = inst.state_independent() ? inst.u(0) : 0.0;
  std::vector<double> lw, v, u;
  if (need_low) {
    lw.push_back(-kInf);
    v.push_back(std::min(inst.v(0), 0.0) - 1.0);
    u.push_back(dummy_u);
    origin.emplace_back(std::nullopt);
  }
  for (std::size_t i = 0; i < m; ++i) {
    lw.push_back(inst.log_weight_mode() ? inst.raw_log_weights()[i] : inst.log_lambda(i));
    v.push_back(inst.v(i));
    u.push_back(inst.u(i));
    origin.emplace_back(i);
  }
  if (need_high) {
    lw.push_back(-kInf);
    v.push_back(1.0);
    u.push_back(dummy_u);
    origin.emplace_back(std::nullopt);
  }
  if (inst.log_weight_mode()) {
    return Normalized{Instance::from_log_weights(std::move(lw), std::move(v), std::move(u)),
                      std::move(origin)};
  }
  std::vector<State> states;
  std::size_t r = 0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    const double l = origin[k] ? inst.lambda(r++) : 0.0;
    states.push_back(State{l, v[k], u[k]});
  }
  return Normalized{Instance::from_states(std::move(states)), std::move(origin)};
}

// ---------------------------------------------------------------------------
// Optimality conditions

double SisuResiduals::max() const noexcept {
  return std::max({complementary_slackness, tangency, threshold_location, sign, probability});
}

SisuResiduals sisu_residuals(const Instance& normalized, const RationalityLevel& level,
                             const TangentSolution& sol) {
  SisuResiduals r;
  const double vt = normalized.v(sol.threshold_state);
  r.complementary_slackness = std::abs((1.0 - sol.threshold_prob) * (sol.delta_dd - vt));
  r.tangency = std::abs(tangency_residual(level, sol.delta_d, sol.delta_dd));
  double below = -kInf;
  for (double v : normalized.values()) {
    if (v <= sol.delta_dd) below = std::max(below, v);
  }
  r.threshold_location = std::isfinite(below) ? std::abs(below - vt) : kInf;
  r.sign = std::max({0.0, sol.delta_d, -sol.delta_dd});
  r.probability = std::max({0.0, -sol.threshold_prob, sol.threshold_prob - 1.0});
  return r;
}

namespace {

QuantalOptimum finish(const Instance& inst, const RationalityLevel& level, CensorshipParams params,
                      std::string note) {
  QuantalOptimum out;
  out.scheme = make_censorship(inst, params);
  out.params = std::move(params);
  out.payoff = evaluate_payoff(inst, level, out.scheme);
  out.log_payoff = log_payoff(inst, level, out.scheme);
  out.note = std::move(note);
  return out;
}

// Mean of v over the prefix [0, last] with the threshold weighted by p.
double prefix_mean(const Instance& inst, std::size_t last, double p) {
  std::vector<std::pair<std::size_t, double>> members;
  for (std::size_t j = 0; j < last; ++j) members.emplace_back(j, 1.0);
  members.emplace_back(last, p);
  const auto mean = pooled_mean(inst, members);
  if (!mean) throw NumericError("pooled prefix has zero mass");
  return *mean;
}

CensorshipParams to_caller(const Normalized& norm, const CensorshipParams& p) {
  CensorshipParams out;
  std::vector<std::size_t> high;
  for (std::size_t h : p.high_states) {
    if (norm.origin[h]) high.push_back(*norm.origin[h]);
  }
  const auto& t = norm.origin[p.threshold_state];
  if (t) {
    out.threshold_state = *t;
    out.threshold_prob = p.threshold_prob;
    out.high_states = std::move(high);
  } else if (!high.empty()) {
    out.threshold_state = high.back();
    out.threshold_prob = 1.0;
    high.pop_back();
    out.high_states = std::move(high);
  } else {
    out.threshold_state = 0;
    out.threshold_prob = 0.0;
  }
  const bool pooled = !out.high_states.empty() || out.threshold_prob > 0.0;
  out.pooling_signal = pooled ? p.pooling_signal : kNaN;
  return out;
}

}  // namespace

QuantalOptimum quantal_optimal(const Instance& inst, const RationalityLevel& level) {
  if (!inst.state_independent()) {
    throw ValidationError(
        "sender utility depends on the state; use the state-dependent solvers instead");
  }
  const std::size_t m = inst.size();
  if (level.is_fully_rational()) return finish(inst, level, rational_optimal(inst), "");
  if (level.beta() == 0.0) {
    std::vector<std::size_t> high(m - 1);
    std::iota(high.begin(), high.end(), std::size_t{0});
    return finish(inst, level, censorship_params(inst, std::move(high), m - 1, 1.0),
                  "beta = 0: every scheme earns half the total sender utility; no-info returned by "
                  "convention");
  }

  Normalized norm = normalize_instance(inst);
  const Instance& ni = norm.instance;
  const std::size_t n = ni.size();
  std::size_t first_nonneg = 0;
  while (ni.v(first_nonneg) < 0.0) ++first_nonneg;

  std::optional<std::size_t> pick;
  double pick_p = 0.0;
  for (std::size_t i = first_nonneg; i < n; ++i) {
    const double p = pool_probability(ni, level, i);
    if (p >= 0.0) {
      pick = i;
      pick_p = p;
    }
  }

  TangentSolution sol;
  double pooled = 0.0;
  if (pick && pick_p <= 1.0) {
    sol.threshold_state = *pick;
    sol.threshold_prob = pick_p;
    sol.delta_dd = ni.v(*pick);
    const double k = kappa(level, sol.delta_dd);
    bool has_mass = pick_p > 0.0 && std::isfinite(ni.log_lambda(*pick));
    for (std::size_t j = 0; j < *pick; ++j) has_mass = has_mass || std::isfinite(ni.log_lambda(j));
    // The pooled mean equals k exactly; it only moves when p underflows to zero.
    sol.delta_d = k;
    pooled = has_mass ? prefix_mean(ni, *pick, pick_p) : k;
  } else {
    // Every state up to the threshold is pooled; the low-side posterior lies strictly
    // between the threshold and the next state.
    sol.threshold_state = pick ? *pick : first_nonneg - 1;
    sol.threshold_prob = 1.0;
    sol.delta_d = prefix_mean(ni, sol.threshold_state, 1.0);
    sol.delta_dd = kappa_inverse(level, std::min(sol.delta_d, 0.0));
    pooled = sol.delta_d;
  }

  const SisuResiduals res = sisu_residuals(ni, level, sol);
  if (!(res.max() <= kResidualCap)) {
    std::ostringstream msg;
    msg.precision(3);
    msg << "optimality residual " << res.max() << " exceeds 1e-8";
    throw NumericError(msg.str());
  }

  CensorshipParams np;
  np.threshold_state = sol.threshold_state;
  np.threshold_prob = sol.threshold_prob;
  np.pooling_signal = pooled;
  for (std::size_t j = 0; j < sol.threshold_state; ++j) np.high_states.push_back(j);

  std::string note;
  if (!same_delta(pooled, sol.delta_d)) {
    note = "threshold probability underflows; the pooling signal is the mean of the representable scheme";
  }
  QuantalOptimum out = finish(inst, level, to_caller(norm, np), std::move(note));
  out.tangent = sol;
  out.normalized = std::move(norm);
  return out;
}

MonotonicityReport threshold_monotonicity_check(const Instance& inst,
                                                std::span<const RationalityLevel> levels) {
  MonotonicityReport report;
  for (const RationalityLevel& level : levels) {
    const auto opt = quantal_optimal(inst, level);
    MonotonicityRow row{level, opt.params.threshold_state, opt.params.threshold_prob};
    if (!report.rows.empty()) {
      const MonotonicityRow& prev = report.rows.back();
      const bool drop = row.threshold_state < prev.threshold_state ||
                        (row.threshold_state == prev.threshold_state &&
                         row.threshold_prob < prev.threshold_prob - 1e-9);
      if (drop) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "threshold (" << prev.threshold_state + 1 << ", " << prev.threshold_prob
            << ") at beta=" << prev.level.label() << " exceeds (" << row.threshold_state + 1 << ", "
            << row.threshold_prob << ") at beta=" << level.label();
        report.violations.push_back(msg.str());
        report.monotone = false;
      }
    }
    report.rows.push_back(row);
  }
  return report;
}

LevelledInstance direct_gap_instance(std::size_t m) {
  if (m < 2) throw ValidationError("direct gap instance needs m >= 2");
  const double beta = std::exp(static_cast<double>(m));
  std::vector<double> lw, v, u;
  for (std::size_t i = 1; i <= m; ++i) {
    const double bi = beta * static_cast<double>(i);
    lw.push_back(bi + std::log1p(std::exp(-bi)));
    v.push_back(static_cast<double>(i));
    u.push_back(1.0);
  }
  return LevelledInstance{Instance::from_log_weights(std::move(lw), std::move(v), std::move(u)),
                          RationalityLevel::finite(beta)};
}

// ---------------------------------------------------------------------------
// Direct-scheme search

namespace {

struct DirectEvaluator {
  const Instance& inst;
  const RationalityLevel& level;

  // log payoff of the direct scheme pooling [0, t) plus p of t high, the rest low.
  double operator()(std::size_t t, double p) const {
    const std::size_t m = inst.size();
    std::vector<std::pair<std::size_t, double>> high, low;
    for (std::size_t j = 0; j < t; ++j) high.emplace_back(j, 1.0);
    if (p > 0.0) high.emplace_back(t, p);
    if (p < 1.0) low.emplace_back(t, 1.0 - p);
    for (std::size_t j = t + 1; j < m; ++j) low.emplace_back(j, 1.0);
    std::vector<double> terms;
    side(high, terms);
    side(low, terms);
    return numeric::log_sum_exp(terms);
  }

  void side(const std::vector<std::pair<std::size_t, double>>& members,
            std::vector<double>& terms) const {
    const auto mean = pooled_mean(inst, members);
    if (!mean) return;
    const double lw = log_response(level, *mean);
    if (!std::isfinite(lw)) return;
    for (auto [i, p] : members) {
      if (inst.u(i) > 0.0 && std::isfinite(inst.log_lambda(i))) {
        terms.push_back(inst.log_lambda(i) + std::log(inst.u(i)) + std::log(p) + lw);
      }
    }
  }
};

}  // namespace

DirectSearchResult best_direct(const Instance& inst, const RationalityLevel& level,
                               std::size_t grid_points) {
  if (grid_points < 2) throw ValidationError("best_direct needs at least two grid points");
  const DirectEvaluator eval{inst, level};
  double best = -kInf;
  std::size_t best_t = inst.size() - 1;
  double best_p = 1.0;
  for (std::size_t t = 0; t < inst.size(); ++t) {
    double local = -kInf;
    std::size_t local_k = 0;
    for (std::size_t k = 0; k < grid_points; ++k) {
      const double p = static_cast<double>(k) / static_cast<double>(grid_points - 1);
      const double val = eval(t, p);
      if (val > local) {
        local = val;
        local_k = k;
      }
    }
    const double step = 1.0 / static_cast<double>(grid_points - 1);
    const double a = std::max(0.0, (static_cast<double>(local_k) - 1.0) * step);
    const double b = std::min(1.0, (static_cast<double>(local_k) + 1.0) * step);
    const double refined = numeric::golden_section_max([&](double p) { return eval(t, p); }, a, b);
    double local_p = static_cast<double>(local_k) * step;
    if (const double val = eval(t, refined); val > local) {
      local = val;
      local_p = refined;
    }
    if (local > best) {
      best = local;
      best_t = t;
      best_p = local_p;
    }
  }
  std::vector<std::size_t> high(best_t);
  std::iota(high.begin(), high.end(), std::size_t{0});
  DirectSearchResult out{censorship_params(inst, std::move(high), best_t, best_p), Scheme{}, 0.0,
                         0.0};
  out.scheme = make_direct(inst, out.params);
  out.payoff = evaluate_payoff(inst, level, out.scheme);
  out.log_payoff = log_payoff(inst, level, out.scheme);
  return out;
}

}  // namespace persuasion::sisu
