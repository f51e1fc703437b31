#include "persuasion/sdsu.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include "persuasion/error.hpp"
#include "persuasion/numeric.hpp"
#include "persuasion/sisu.hpp"

namespace persuasion::sdsu {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_binary(const Instance& inst) {
  if (inst.size() != 2) throw ValidationError("two-state instance required");
}

double require_positive_beta(const RationalityLevel& level) {
  if (level.is_fully_rational() || level.beta() <= 0.0) {
    throw ValidationError("finite beta > 0 required");
  }
  return level.beta();
}

Regime classify(const Instance& inst, const CensorshipParams& params) {
  std::size_t pooled = params.high_states.size() + (params.threshold_prob > 0.0 ? 1 : 0);
  if (pooled == inst.size() && params.threshold_prob >= 1.0) return Regime::NoInfo;
  if (pooled <= 1 && params.threshold_prob == 0.0) return Regime::FullReveal;
  return Regime::Partial;
}

BinaryOptimum package(const Instance& inst, const RationalityLevel& level, CensorshipParams params,
                      Regime regime, std::string note) {
  BinaryOptimum out;
  out.scheme = make_censorship(inst, params);
  out.params = std::move(params);
  out.regime = regime;
  out.payoff = evaluate_payoff(inst, level, out.scheme);
  out.note = std::move(note);
  return out;
}

CensorshipParams binary_params(double p, double delta) {
  return CensorshipParams{1, p, delta, {0}};
}

std::string pair_label(std::size_t i, std::size_t j) {
  return "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
}

// Contribution of a list of signals to the payoff.
double signals_value(const Instance& inst, const RationalityLevel& level,
                     const std::vector<Signal>& signals) {
  double total = 0.0;
  for (const Signal& s : signals) {
    double weight = 0.0;
    for (const auto& [i, p] : s.mass) weight += inst.lambda(i) * inst.u(i) * p;
    if (weight > 0.0) total += weight * response(level, s.delta);
  }
  return total;
}

}  // namespace

std::string regime_name(Regime r) {
  switch (r) {
    case Regime::FullReveal: return "full-reveal";
    case Regime::Partial: return "partial";
    case Regime::NoInfo: return "no-info";
  }
  return "unknown";
}

double binary_gamma(const Instance& inst2, const RationalityLevel& level, double delta) {
  require_binary(inst2);
  const double beta = require_positive_beta(level);
  const double v1 = inst2.v(0), v2 = inst2.v(1);
  if (!(delta >= v1 && delta < v2)) throw ValidationError("binary_gamma needs v1 <= delta < v2");
  const double ratio = (v1 - delta) / (v2 - delta);
  // (W(v2) - W(delta)) / ((v2 - delta) W'(delta)), assembled in the log domain.
  const double d = beta * (v2 - delta);
  const double chord = std::exp(numeric::log_expm1(d) + logistic::softplus(beta * delta) -
                                logistic::softplus(beta * v2) - std::log(d));
  return ratio + chord * (1.0 - ratio);
}

double binary_pool_probability(const Instance& inst2, double delta) {
  require_binary(inst2);
  const double v1 = inst2.v(0), v2 = inst2.v(1);
  if (delta <= v1 || !std::isfinite(inst2.log_lambda(1))) return 0.0;
  if (!std::isfinite(inst2.log_lambda(0))) return 0.0;
  if (delta >= inst2.prior_mean()) return 1.0;
  const double odds = std::exp(inst2.log_lambda(0) - inst2.log_lambda(1));
  return std::clamp(odds * (delta - v1) / (v2 - delta), 0.0, 1.0);
}

BinaryOptimum binary_optimal(const Instance& inst2, const RationalityLevel& level) {
  require_binary(inst2);
  const CensorshipParams reveal = binary_params(0.0, inst2.v(0));
  if (level.is_fully_rational()) {
    CensorshipParams params = sisu::rational_optimal(inst2);
    const Regime regime = classify(inst2, params);
    return package(inst2, level, std::move(params), regime, "fully rational optimum");
  }
  if (level.beta() == 0.0) {
    return package(inst2, level, reveal, Regime::FullReveal,
                   "beta = 0: every scheme ties; full revelation returned by convention");
  }
  if (!std::isfinite(inst2.log_lambda(0)) || !std::isfinite(inst2.log_lambda(1))) {
    return package(inst2, level, reveal, Regime::FullReveal, "one state carries all prior mass");
  }
  const double u1 = inst2.u(0), u2 = inst2.u(1);
  if (u1 == 0.0 && u2 == 0.0) {
    return package(inst2, level, reveal, Regime::FullReveal, "zero sender utility");
  }
  if (u2 == 0.0) {
    // Pooling only drags state 1's posterior upward; revealing it is optimal.
    return package(inst2, level, reveal, Regime::FullReveal, "u2 = 0: revealing state 1 is optimal");
  }
  const double target = u1 / u2;
  const double v1 = inst2.v(0);
  const double mean = inst2.prior_mean();
  if (binary_gamma(inst2, level, v1) <= target) {
    return package(inst2, level, reveal, Regime::FullReveal, "");
  }
  if (binary_gamma(inst2, level, mean) >= target) {
    return package(inst2, level, binary_params(1.0, mean), Regime::NoInfo, "");
  }
  numeric::BisectOptions opts;
  opts.residual_tol = 0.0;
  opts.width_tol = 1e-15;
  const double delta =
      numeric::bisect([&](double d) { return binary_gamma(inst2, level, d) - target; }, v1, mean, opts);
  const double p = binary_pool_probability(inst2, delta);
  CensorshipParams params = censorship_params(inst2, {0}, 1, p);
  return package(inst2, level, std::move(params), Regime::Partial, "");
}

// ---------------------------------------------------------------------------
// Binary support

Scheme decompose_binary_support(const Instance& inst, const Scheme& scheme) {
  require_valid(inst, scheme);
  std::vector<Signal> out;
  for (const Signal& s : scheme.signals()) {
    if (s.mass.size() <= 2) {
      out.push_back(s);
      continue;
    }
    const double d = s.delta;
    double top = -kInf;
    for (const auto& [i, p] : s.mass) top = std::max(top, inst.log_lambda(i));
    struct Side {
      std::size_t state;
      double pi;
      double balance;  // relative prior mass times distance to delta
    };
    std::vector<Side> below, above;
    std::vector<Signal> pieces;
    for (const auto& [i, p] : s.mass) {
      const double w = std::exp(inst.log_lambda(i) - top) * p;
      if (w == 0.0 || inst.v(i) == d) {
        pieces.push_back(Signal{d, {{i, p}}});
      } else if (inst.v(i) < d) {
        below.push_back(Side{i, p, w * (d - inst.v(i))});
      } else {
        above.push_back(Side{i, p, w * (inst.v(i) - d)});
      }
    }
    std::map<std::size_t, double> given;
    std::map<std::size_t, std::size_t> last_piece;
    std::size_t b = 0, a = 0;
    double rem_b = below.empty() ? 0.0 : below[0].balance;
    double rem_a = above.empty() ? 0.0 : above[0].balance;
    while (b < below.size() && a < above.size()) {
      const double t = std::min(rem_b, rem_a);
      const double pb = below[b].pi * t / below[b].balance;
      const double pa = above[a].pi * t / above[a].balance;
      given[below[b].state] += pb;
      given[above[a].state] += pa;
      last_piece[below[b].state] = pieces.size();
      last_piece[above[a].state] = pieces.size();
      pieces.push_back(Signal{d, {{below[b].state, pb}, {above[a].state, pa}}});
      rem_b -= t;
      rem_a -= t;
      const bool done_b = rem_b <= 1e-15 * below[b].balance;
      const bool done_a = rem_a <= 1e-15 * above[a].balance;
      if (done_b && ++b < below.size()) rem_b = below[b].balance;
      if (done_a && ++a < above.size()) rem_a = above[a].balance;
    }
    // Rounding leftovers go back to the last piece holding the state.
    for (const auto* side : {&below, &above}) {
      for (const Side& x : *side) {
        const double left = x.pi - given[x.state];
        if (left == 0.0) continue;
        auto it = last_piece.find(x.state);
        if (it != last_piece.end()) pieces[it->second].mass[x.state] += left;
        else pieces.push_back(Signal{d, {{x.state, left}}});
      }
    }
    for (Signal& p : pieces) out.push_back(std::move(p));
  }
  return Scheme::split(std::move(out));
}

Scheme pairwise_reoptimize(const Instance& inst, const RationalityLevel& level,
                           const Scheme& scheme) {
  require_valid(inst, scheme);
  if (scheme.max_support() > 2) {
    throw ValidationError("pairwise re-optimization needs signals with at most two states");
  }
  std::vector<Signal> out;
  std::map<std::pair<std::size_t, std::size_t>, std::vector<Signal>> groups;
  for (const Signal& s : scheme.signals()) {
    if (s.mass.size() == 1) {
      out.push_back(s);
    } else {
      auto it = s.mass.begin();
      const std::size_t i = it->first;
      const std::size_t j = std::next(it)->first;
      groups[{i, j}].push_back(s);
    }
  }
  for (auto& [key, signals] : groups) {
    const auto [i, j] = key;
    double pi_i = 0.0, pi_j = 0.0;
    for (const Signal& s : signals) {
      pi_i += s.mass.at(i);
      pi_j += s.mass.at(j);
    }
    const double li = inst.log_lambda(i) + std::log(pi_i);
    const double lj = inst.log_lambda(j) + std::log(pi_j);
    if (!std::isfinite(li) || !std::isfinite(lj)) {
      for (Signal& s : signals) out.push_back(std::move(s));
      continue;
    }
    const Instance pair = Instance::from_log_weights({li, lj}, {inst.v(i), inst.v(j)},
                                                     {inst.u(i), inst.u(j)});
    const BinaryOptimum best = binary_optimal(pair, level);
    std::vector<Signal> replaced;
    for (const Signal& s : best.scheme.signals()) {
      Signal r{s.delta, {}};
      for (const auto& [k, p] : s.mass) r.mass[k == 0 ? i : j] = (k == 0 ? pi_i : pi_j) * p;
      replaced.push_back(std::move(r));
    }
    const bool better = signals_value(inst, level, replaced) >= signals_value(inst, level, signals);
    for (Signal& s : better ? replaced : signals) out.push_back(std::move(s));
  }
  return Scheme::split(std::move(out));
}

Scheme optimal_pairwise(const Instance& inst, const RationalityLevel& level,
                        const oracle::GridOptions& grid) {
  const auto seed = oracle::grid_lp_optimal(inst, level, grid);
  return pairwise_reoptimize(inst, level, decompose_binary_support(inst, seed.scheme));
}

// ---------------------------------------------------------------------------
// Assignment LP

PairLP build_gap_lp(const Instance& inst, const RationalityLevel& level, const Scheme& scheme) {
  require_valid(inst, scheme);
  PairLP lp;
  lp.states = inst.size();
  std::map<std::pair<std::size_t, std::size_t>, int> seen;
  for (const Signal& s : scheme.signals()) {
    if (s.mass.size() > 2) throw ValidationError("assignment LP needs signals with at most two states");
    const double w = response(level, s.delta);
    if (s.mass.size() == 1) {
      const auto [i, p] = *s.mass.begin();
      if (inst.lambda(i) == 0.0) continue;
      if (++seen[{i, i}] > 1) throw ValidationError("state revealed by more than one signal");
      lp.edges.push_back(PairEdge{i, i, s.delta, inst.lambda(i) * inst.u(i) * w, 0.0});
      continue;
    }
    auto it = s.mass.begin();
    std::size_t i = it->first, j = std::next(it)->first;
    double pi = it->second, pj = std::next(it)->second;
    if (++seen[{i, j}] > 1) {
      throw ValidationError("pair " + pair_label(i, j) + " shares more than one signal");
    }
    if (pj > pi) {
      std::swap(i, j);
      std::swap(pi, pj);
    }
    const double c = pj / pi;
    const double reward = (inst.lambda(i) * inst.u(i) + inst.lambda(j) * inst.u(j) * c) * w;
    lp.edges.push_back(PairEdge{i, j, s.delta, reward, c});
  }
  return lp;
}

double gap_objective(const PairLP& lp, const std::vector<double>& x) {
  double total = 0.0;
  for (std::size_t e = 0; e < lp.edges.size(); ++e) total += lp.edges[e].reward * x.at(e);
  return total;
}

GapSolution solve_gap_fractional(const PairLP& lp) {
  const std::size_t n = lp.edges.size();
  oracle::LinearProgram prog;
  for (const PairEdge& e : lp.edges) prog.objective.push_back(e.reward);
  for (std::size_t s = 0; s < lp.states; ++s) {
    oracle::LpRow item{std::vector<double>(n, 0.0), oracle::Sense::LessEq, 1.0};
    oracle::LpRow bin{std::vector<double>(n, 0.0), oracle::Sense::LessEq, 1.0};
    for (std::size_t e = 0; e < n; ++e) {
      if (lp.edges[e].item == s) item.coef[e] = 1.0;
      if (lp.edges[e].bin == s && lp.edges[e].item != s) bin.coef[e] = lp.edges[e].cost;
    }
    prog.rows.push_back(std::move(item));
    prog.rows.push_back(std::move(bin));
  }
  const auto sol = oracle::simplex_solve(prog);
  if (sol.status != oracle::LpStatus::Optimal) throw NumericError("assignment LP not solved");
  return GapSolution{sol.x, sol.objective};
}

GapSolution solve_gap_integral(const PairLP& lp) {
  if (lp.states > 10) {
    throw NumericError("integral assignment is capped at 10 states; use solve_gap_fractional");
  }
  const std::size_t m = lp.states;
  std::vector<std::vector<std::size_t>> options(m);
  for (std::size_t e = 0; e < lp.edges.size(); ++e) options[lp.edges[e].item].push_back(e);
  for (auto& o : options) {
    std::stable_sort(o.begin(), o.end(), [&](std::size_t a, std::size_t b) {
      return lp.edges[a].reward > lp.edges[b].reward;
    });
  }
  std::vector<double> tail(m + 1, 0.0);
  for (std::size_t s = m; s-- > 0;) {
    tail[s] = tail[s + 1] + (options[s].empty() ? 0.0 : lp.edges[options[s].front()].reward);
  }
  std::vector<double> load(m, 0.0);
  std::vector<double> x(lp.edges.size(), 0.0);
  GapSolution best{x, 0.0};
  std::function<void(std::size_t, double)> dfs = [&](std::size_t s, double value) {
    if (s == m) {
      if (value > best.value) best = GapSolution{x, value};
      return;
    }
    if (value + tail[s] <= best.value) return;
    for (std::size_t e : options[s]) {
      const PairEdge& edge = lp.edges[e];
      const bool self = edge.bin == edge.item;
      if (!self && load[edge.bin] + edge.cost > 1.0 + 1e-12) continue;
      if (!self) load[edge.bin] += edge.cost;
      x[e] = 1.0;
      dfs(s + 1, value + edge.reward);
      x[e] = 0.0;
      if (!self) load[edge.bin] -= edge.cost;
    }
    dfs(s + 1, value);
  };
  dfs(0, 0.0);
  return best;
}

FourApprox four_approx(const Instance& inst, const RationalityLevel& level,
                       const oracle::GridOptions& grid) {
  FourApprox out;
  out.seed = optimal_pairwise(inst, level, grid);
  out.lp = build_gap_lp(inst, level, out.seed);
  out.fractional = solve_gap_fractional(out.lp);
  out.integral = solve_gap_integral(out.lp);
  if (out.integral.value < 0.5 * out.fractional.value - 1e-12) {
    throw NumericError("integral assignment below half of the fractional optimum");
  }
  std::vector<Signal> signals;
  std::vector<double> used(inst.size(), 0.0);
  for (std::size_t e = 0; e < out.lp.edges.size(); ++e) {
    if (out.integral.x[e] < 0.5) continue;
    const PairEdge& edge = out.lp.edges[e];
    Signal s{edge.delta, {{edge.item, 0.5}}};
    used[edge.item] += 0.5;
    if (edge.bin != edge.item) {
      s.mass[edge.bin] = 0.5 * edge.cost;
      used[edge.bin] += 0.5 * edge.cost;
    }
    signals.push_back(std::move(s));
  }
  for (std::size_t i = 0; i < inst.size(); ++i) {
    const double rest = 1.0 - used[i];
    if (rest > 0.0) signals.push_back(Signal{inst.v(i), {{i, rest}}});
  }
  out.scheme = Scheme::split(std::move(signals));
  return out;
}

ApproxScheme censorship_m_approx(const Instance& inst, const RationalityLevel& level) {
  const std::size_t m = inst.size();
  ApproxScheme best;
  best.scheme = Scheme::full_reveal(inst);
  best.params = CensorshipParams{0, 0.0, std::numeric_limits<double>::quiet_NaN(), {}};
  best.payoff = evaluate_payoff(inst, level, best.scheme);
  best.chosen = "full-reveal";
  for (std::size_t i = 0; i < m; ++i) {
    if (!std::isfinite(inst.log_lambda(i))) continue;
    for (std::size_t j = i + 1; j < m; ++j) {
      if (!std::isfinite(inst.log_lambda(j))) continue;
      const Instance pair = Instance::from_log_weights(
          {inst.log_lambda(i), inst.log_lambda(j)}, {inst.v(i), inst.v(j)}, {inst.u(i), inst.u(j)});
      const BinaryOptimum local = binary_optimal(pair, level);
      const std::size_t map[2] = {i, j};
      CensorshipParams params;
      params.threshold_state = map[local.params.threshold_state];
      params.threshold_prob = local.params.threshold_prob;
      params.pooling_signal = local.params.pooling_signal;
      for (std::size_t h : local.params.high_states) params.high_states.push_back(map[h]);
      std::sort(params.high_states.begin(), params.high_states.end());
      Scheme scheme = make_censorship(inst, params);
      const double value = evaluate_payoff(inst, level, scheme);
      if (value > best.payoff) {
        best = ApproxScheme{std::move(scheme), std::move(params), value, pair_label(i, j)};
      }
    }
  }
  return best;
}

ApproxScheme direct_m_approx(const Instance& inst, const RationalityLevel& level,
                             const oracle::GridOptions& grid) {
  const FourApprox base = four_approx(inst, level, grid);
  ApproxScheme best;
  best.scheme = Scheme::no_info(inst);
  best.payoff = evaluate_payoff(inst, level, best.scheme);
  best.chosen = "no-info";
  for (const Signal& keep : base.scheme.signals()) {
    std::vector<std::pair<std::size_t, double>> rest;
    for (std::size_t i = 0; i < inst.size(); ++i) {
      const auto it = keep.mass.find(i);
      const double left = 1.0 - (it == keep.mass.end() ? 0.0 : it->second);
      if (left > 0.0) rest.emplace_back(i, left);
    }
    std::vector<Signal> signals{keep};
    if (const auto mean = pooled_mean(inst, rest)) {
      Signal pool{*mean, {}};
      for (auto [i, p] : rest) pool.mass[i] = p;
      signals.push_back(std::move(pool));
    } else {
      for (auto [i, p] : rest) signals.push_back(Signal{inst.v(i), {{i, p}}});
    }
    Scheme scheme(std::move(signals));
    if (!validate_scheme(inst, scheme).valid()) continue;
    const double value = evaluate_payoff(inst, level, scheme);
    if (value > best.payoff) {
      std::ostringstream label;
      label.precision(17);
      label << "signal at " << keep.delta;
      best = ApproxScheme{std::move(scheme), std::nullopt, value, label.str()};
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Signal-count lower bound

LevelledInstance signal_count_instance(std::size_t m) {
  if (m < 3) throw ValidationError("signal count instance needs m >= 3");
  const double target = 2.0 * static_cast<double>(m);
  auto g = [&](double b) { return b / std::log(b) - target; };
  double lo = std::exp(1.0);
  double hi = 2.0 * lo;
  while (g(hi) < 0.0) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) >= 0.0 ? hi : lo) = mid;
  }
  const double beta = hi;
  std::vector<double> exps;
  for (std::size_t i = 1; i < m; ++i) exps.push_back(beta * static_cast<double>(i));
  const double log_k1 = -numeric::log_sum_exp(exps);
  std::vector<double> lw, v, u;
  for (std::size_t i = 1; i <= m; ++i) {
    const double di = static_cast<double>(i);
    if (i < m) {
      lw.push_back(log_k1 + std::log((static_cast<double>(m) - di - 1.0 / beta) * beta) + beta * di);
    } else {
      lw.push_back(0.0);
    }
    v.push_back(di);
    u.push_back(i == m ? 1.0 : 0.0);
  }
  const double log_k2 = -numeric::log_sum_exp(lw);
  return LevelledInstance{Instance::from_log_weights(std::move(lw), std::move(v), std::move(u)),
                          RationalityLevel::finite(beta), std::exp(log_k1), log_k2};
}

Scheme signal_count_witness(const Instance& inst, const RationalityLevel& level) {
  const double beta = require_positive_beta(level);
  const std::size_t m = inst.size();
  const std::size_t top = m - 1;
  std::vector<Signal> signals;
  for (std::size_t i = 0; i < top; ++i) {
    const double vi = inst.v(i);
    const double share = std::exp(inst.log_lambda(i) - inst.log_lambda(top) -
                                  std::log((inst.v(top) - vi - 1.0 / beta) * beta));
    signals.push_back(Signal{vi + 1.0 / beta, {{i, 1.0}, {top, share}}});
  }
  return Scheme(std::move(signals));
}

Scheme pair_pool_scheme(const Instance& inst, std::size_t i, double delta) {
  const std::size_t top = inst.size() - 1;
  if (i >= top) throw ValidationError("pair pooling needs a state below the top state");
  const double vi = inst.v(i), vm = inst.v(top);
  if (!(delta >= vi && delta <= vm)) throw ValidationError("pooling signal outside [v_i, v_m]");
  const std::pair<std::size_t, double> both[2] = {{i, 1.0}, {top, 1.0}};
  const double avg = *pooled_mean(inst, both);
  std::vector<Signal> signals;
  for (std::size_t k = 0; k < inst.size(); ++k) {
    if (k != i && k != top) signals.push_back(Signal{inst.v(k), {{k, 1.0}}});
  }
  if (same_delta(delta, avg)) {
    signals.push_back(Signal{avg, {{i, 1.0}, {top, 1.0}}});
  } else if (delta <= avg) {
    const double q = delta == vi ? 0.0
                                 : std::exp(inst.log_lambda(i) - inst.log_lambda(top)) *
                                       (delta - vi) / (vm - delta);
    signals.push_back(Signal{delta, {{i, 1.0}, {top, std::min(q, 1.0)}}});
    if (q < 1.0) signals.push_back(Signal{vm, {{top, 1.0 - q}}});
  } else {
    const double r = delta == vm ? 0.0
                                 : std::exp(inst.log_lambda(top) - inst.log_lambda(i)) *
                                       (vm - delta) / (delta - vi);
    signals.push_back(Signal{delta, {{top, 1.0}, {i, std::min(r, 1.0)}}});
    if (r < 1.0) signals.push_back(Signal{vi, {{i, 1.0 - r}}});
  }
  return Scheme(std::move(signals));
}

// ---------------------------------------------------------------------------
// Partition enumeration

EnumeratedBest best_censorship(const Instance& inst, const RationalityLevel& level,
                               std::size_t p_points, bool direct) {
  const std::size_t m = inst.size();
  if (m > 12) throw ValidationError("partition enumeration is capped at 12 states");
  if (p_points < 2) throw ValidationError("need at least two threshold probabilities");
  std::vector<double> log_lu(m);
  for (std::size_t i = 0; i < m; ++i) {
    log_lu[i] = inst.u(i) > 0.0 ? inst.log_lambda(i) + std::log(inst.u(i)) : -kInf;
  }
  using Members = std::vector<std::pair<std::size_t, double>>;
  auto side = [&](const Members& members, std::vector<double>& terms) {
    const auto mean = pooled_mean(inst, members);
    if (!mean) return;
    const double lw = log_response(level, *mean);
    if (!std::isfinite(lw)) return;
    for (auto [i, p] : members) {
      if (std::isfinite(log_lu[i])) terms.push_back(log_lu[i] + std::log(p) + lw);
    }
  };
  auto evaluate = [&](std::size_t t, unsigned mask, double p) {
    Members high, low;
    std::vector<double> terms;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == t) continue;
      if (mask & (1u << i)) high.emplace_back(i, 1.0);
      else low.emplace_back(i, 1.0);
    }
    if (p > 0.0) high.emplace_back(t, p);
    if (p < 1.0) low.emplace_back(t, 1.0 - p);
    side(high, terms);
    if (direct) {
      side(low, terms);
    } else {
      for (auto [i, q] : low) {
        const double lw = log_response(level, inst.v(i));
        if (std::isfinite(log_lu[i]) && std::isfinite(lw)) terms.push_back(log_lu[i] + std::log(q) + lw);
      }
    }
    return numeric::log_sum_exp(terms);
  };

  double best = -kInf;
  std::size_t best_t = 0;
  unsigned best_mask = 0;
  double best_p = 0.0;
  const double step = 1.0 / static_cast<double>(p_points - 1);
  for (std::size_t t = 0; t < m; ++t) {
    for (unsigned mask = 0; mask < (1u << m); ++mask) {
      if (mask & (1u << t)) continue;
      double local = -kInf;
      std::size_t local_k = 0;
      for (std::size_t k = 0; k < p_points; ++k) {
        const double val = evaluate(t, mask, static_cast<double>(k) * step);
        if (val > local) {
          local = val;
          local_k = k;
        }
      }
      double local_p = static_cast<double>(local_k) * step;
      const double a = std::max(0.0, local_p - step);
      const double b = std::min(1.0, local_p + step);
      const double refined =
          numeric::golden_section_max([&](double p) { return evaluate(t, mask, p); }, a, b);
      if (const double val = evaluate(t, mask, refined); val > local) {
        local = val;
        local_p = refined;
      }
      if (local > best) {
        best = local;
        best_t = t;
        best_mask = mask;
        best_p = local_p;
      }
    }
  }
  std::vector<std::size_t> high;
  for (std::size_t i = 0; i < m; ++i) {
    if (i != best_t && (best_mask & (1u << i))) high.push_back(i);
  }
  EnumeratedBest out{censorship_params(inst, std::move(high), best_t, best_p), Scheme{}, 0.0};
  out.scheme = direct ? make_direct(inst, out.params) : make_censorship(inst, out.params);
  out.log_payoff = log_payoff(inst, level, out.scheme);
  return out;
}

}  // namespace persuasion::sdsu
