#include "persuasion/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "persuasion/error.hpp"
#include "persuasion/numeric.hpp"

namespace persuasion {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kMergeTol = 1e-12;
constexpr double kSumTol = 1e-12;
constexpr double kPoolingTol = 1e-10;

std::string index_label(std::size_t i) { return std::to_string(i + 1); }

void check_partition(const Instance& inst, const CensorshipParams& params) {
  const std::size_t m = inst.size();
  if (params.threshold_state >= m) throw ValidationError("threshold state out of range");
  if (!(params.threshold_prob >= 0.0 && params.threshold_prob <= 1.0)) {
    throw ValidationError("threshold probability must lie in [0, 1]");
  }
  std::size_t prev = m;
  for (std::size_t h : params.high_states) {
    if (h >= m) throw ValidationError("high state out of range");
    if (h == params.threshold_state) {
      throw ValidationError("threshold state " + index_label(h) + " cannot also be a high state");
    }
    if (prev != m && h <= prev) throw ValidationError("high states must be sorted and distinct");
    prev = h;
  }
}

std::vector<bool> high_mask(const Instance& inst, const CensorshipParams& params) {
  std::vector<bool> in_high(inst.size(), false);
  for (std::size_t h : params.high_states) in_high[h] = true;
  return in_high;
}

std::vector<std::pair<std::size_t, double>> high_members(const CensorshipParams& params) {
  std::vector<std::pair<std::size_t, double>> members;
  for (std::size_t h : params.high_states) members.emplace_back(h, 1.0);
  if (params.threshold_prob > 0.0) {
    members.emplace_back(params.threshold_state, params.threshold_prob);
  }
  return members;
}

std::vector<std::pair<std::size_t, double>> low_members(const Instance& inst,
                                                        const CensorshipParams& params) {
  const auto in_high = high_mask(inst, params);
  std::vector<std::pair<std::size_t, double>> members;
  for (std::size_t i = 0; i < inst.size(); ++i) {
    if (i == params.threshold_state) {
      if (params.threshold_prob < 1.0) members.emplace_back(i, 1.0 - params.threshold_prob);
    } else if (!in_high[i]) {
      members.emplace_back(i, 1.0);
    }
  }
  return members;
}

// Signals carrying the pooled high side of a censorship or direct scheme.
void emit_high_side(const Instance& inst, const CensorshipParams& params,
                    std::vector<Signal>& out) {
  check_partition(inst, params);
  const auto members = high_members(params);
  const auto mean = pooled_mean(inst, members);
  if (mean) {
    const double tol = kPoolingTol * std::max(1.0, std::abs(*mean));
    if (!(std::abs(*mean - params.pooling_signal) <= tol)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "pooling signal " << params.pooling_signal << " disagrees with the pooled mean "
          << *mean;
      throw ValidationError(msg.str());
    }
    Signal s{params.pooling_signal, {}};
    for (auto [i, p] : members) s.mass[i] += p;
    out.push_back(std::move(s));
    return;
  }
  if (params.threshold_prob > 0.0) {
    throw ValidationError("pooled mass is zero while the threshold probability is positive");
  }
  for (auto [i, p] : members) {
    const double delta =
        std::isfinite(params.pooling_signal) ? params.pooling_signal : inst.v(i);
    out.push_back(Signal{delta, {{i, p}}});
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Instance

void Instance::check_common() const {
  const std::size_t m = v_.size();
  if (m == 0) throw ValidationError("instance has no states");
  if (u_.size() != m) throw ValidationError("v and u have different lengths");
  for (std::size_t i = 0; i < m; ++i) {
    if (!std::isfinite(v_[i])) throw ValidationError("v of state " + index_label(i) + " is not finite");
    if (!std::isfinite(u_[i]) || u_[i] < 0.0) {
      throw ValidationError("u of state " + index_label(i) + " must be finite and nonnegative");
    }
    if (i > 0 && !(v_[i] > v_[i - 1])) {
      throw ValidationError("v must be strictly increasing (state " + index_label(i) + ")");
    }
  }
}

Instance Instance::from_states(std::vector<State> states) {
  Instance out;
  double sum = 0.0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    const State& s = states[i];
    if (!std::isfinite(s.lambda) || s.lambda < 0.0) {
      throw ValidationError("lambda of state " + index_label(i) + " must be finite and nonnegative");
    }
    sum += s.lambda;
    out.v_.push_back(s.v);
    out.u_.push_back(s.u);
  }
  out.check_common();
  if (!(std::abs(sum - 1.0) <= kSumTol)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "prior must sum to 1 within 1e-12 (got " << sum << ")";
    throw ValidationError(msg.str());
  }
  for (const State& s : states) {
    const double l = s.lambda / sum;
    out.lambda_.push_back(l);
    out.log_lambda_.push_back(l > 0.0 ? std::log(l) : kNegInf);
  }
  return out;
}

Instance Instance::from_log_weights(std::vector<double> log_weights, std::vector<double> v,
                                    std::vector<double> u) {
  Instance out;
  out.v_ = std::move(v);
  out.u_ = std::move(u);
  out.check_common();
  if (log_weights.size() != out.v_.size()) {
    throw ValidationError("log weights and v have different lengths");
  }
  for (std::size_t i = 0; i < log_weights.size(); ++i) {
    if (std::isnan(log_weights[i]) || log_weights[i] == std::numeric_limits<double>::infinity()) {
      throw ValidationError("log weight of state " + index_label(i) + " must be < +inf");
    }
  }
  const double lse = numeric::log_sum_exp(log_weights);
  if (!std::isfinite(lse)) throw ValidationError("all log weights are -inf");
  for (double lw : log_weights) {
    const double l = lw - lse;
    out.log_lambda_.push_back(l);
    out.lambda_.push_back(std::exp(l));
  }
  out.raw_log_weights_ = std::move(log_weights);
  return out;
}

const std::vector<double>& Instance::raw_log_weights() const {
  if (!raw_log_weights_) throw ValidationError("instance is not in log-weight mode");
  return *raw_log_weights_;
}

bool Instance::state_independent() const noexcept {
  return std::all_of(u_.begin(), u_.end(), [&](double x) { return x == u_.front(); });
}

double Instance::prior_mean() const {
  std::vector<std::pair<std::size_t, double>> all;
  for (std::size_t i = 0; i < size(); ++i) all.emplace_back(i, 1.0);
  return *pooled_mean(*this, all);
}

std::optional<double> pooled_mean(const Instance& inst,
                                  std::span<const std::pair<std::size_t, double>> members) {
  double top = kNegInf;
  std::vector<double> logw;
  logw.reserve(members.size());
  for (auto [i, p] : members) {
    const double lw = p > 0.0 ? inst.log_lambda(i) + std::log(p) : kNegInf;
    logw.push_back(lw);
    top = std::max(top, lw);
  }
  if (!std::isfinite(top)) return std::nullopt;
  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k < members.size(); ++k) {
    const double w = std::exp(logw[k] - top);
    num += w * inst.v(members[k].first);
    den += w;
  }
  return num / den;
}

// ---------------------------------------------------------------------------
// Scheme

bool same_delta(double a, double b) noexcept {
  return std::abs(a - b) <= kMergeTol * std::max(1.0, std::abs(a));
}

namespace {

std::vector<std::size_t> support_of(const Signal& s) {
  std::vector<std::size_t> out;
  for (const auto& [i, p] : s.mass) out.push_back(i);
  return out;
}

std::vector<Signal> normalize_signals(std::vector<Signal> signals, bool split) {
  for (Signal& s : signals) {
    if (!std::isfinite(s.delta)) throw ValidationError("signal delta must be finite");
    std::erase_if(s.mass, [](const auto& kv) { return !(kv.second != 0.0); });
  }
  std::erase_if(signals, [](const Signal& s) { return s.mass.empty(); });
  std::stable_sort(signals.begin(), signals.end(),
                   [](const Signal& a, const Signal& b) { return a.delta < b.delta; });
  std::vector<Signal> out;
  std::size_t start = 0;
  while (start < signals.size()) {
    std::size_t end = start + 1;
    while (end < signals.size() && same_delta(signals[end - 1].delta, signals[end].delta)) ++end;
    std::vector<Signal> group;
    for (std::size_t k = start; k < end; ++k) {
      Signal& s = signals[k];
      auto target = group.end();
      if (!group.empty() && !split) {
        target = group.begin();
      } else if (split) {
        const auto key = support_of(s);
        target = std::find_if(group.begin(), group.end(),
                              [&](const Signal& g) { return support_of(g) == key; });
      }
      if (target == group.end()) {
        group.push_back(Signal{signals[start].delta, std::move(s.mass)});
      } else {
        for (const auto& [i, p] : s.mass) target->mass[i] += p;
      }
    }
    for (Signal& g : group) out.push_back(std::move(g));
    start = end;
  }
  return out;
}

}  // namespace

Scheme::Scheme(std::vector<Signal> signals) : signals_(normalize_signals(std::move(signals), false)) {}

Scheme Scheme::split(std::vector<Signal> signals) {
  Scheme out;
  out.signals_ = normalize_signals(std::move(signals), true);
  out.split_ = true;
  return out;
}

Scheme Scheme::full_reveal(const Instance& inst) {
  std::vector<Signal> signals;
  for (std::size_t i = 0; i < inst.size(); ++i) signals.push_back(Signal{inst.v(i), {{i, 1.0}}});
  return Scheme(std::move(signals));
}

Scheme Scheme::no_info(const Instance& inst) {
  Signal s{inst.prior_mean(), {}};
  for (std::size_t i = 0; i < inst.size(); ++i) s.mass[i] = 1.0;
  return Scheme(std::vector<Signal>{s});
}

Scheme Scheme::canonical() const {
  if (!split_) return *this;
  return Scheme(signals_);
}

std::vector<double> Scheme::state_totals(std::size_t m) const {
  std::vector<double> totals(m, 0.0);
  for (const Signal& s : signals_) {
    for (const auto& [i, p] : s.mass) {
      if (i < m) totals[i] += p;
    }
  }
  return totals;
}

std::size_t Scheme::max_signals_per_state() const {
  std::map<std::size_t, std::size_t> count;
  for (const Signal& s : signals_) {
    for (const auto& [i, p] : s.mass) {
      if (p > 0.0) ++count[i];
    }
  }
  std::size_t best = 0;
  for (const auto& [i, c] : count) best = std::max(best, c);
  return best;
}

std::size_t Scheme::max_support() const {
  std::size_t best = 0;
  for (const Signal& s : signals_) best = std::max(best, s.mass.size());
  return best;
}

// ---------------------------------------------------------------------------
// Validation and payoff

double ValidationReport::max_plausibility_residual() const noexcept {
  double worst = 0.0;
  for (double r : plausibility_residuals) worst = std::max(worst, std::abs(r));
  return worst;
}

double ValidationReport::max_total_deviation() const noexcept {
  double worst = 0.0;
  for (double t : state_totals) worst = std::max(worst, std::abs(t - 1.0));
  return worst;
}

ValidationReport validate_scheme(const Instance& inst, const Scheme& scheme) {
  ValidationReport report;
  const std::size_t m = inst.size();
  report.state_totals.assign(m, 0.0);
  for (std::size_t k = 0; k < scheme.size(); ++k) {
    const Signal& s = scheme.signals()[k];
    double residual = 0.0;
    if (s.mass.empty()) report.violations.push_back("signal " + std::to_string(k) + " has empty support");
    for (const auto& [i, p] : s.mass) {
      if (i >= m) {
        report.violations.push_back("signal " + std::to_string(k) + " references unknown state " +
                                    index_label(i));
        continue;
      }
      if (!(p >= 0.0 && p <= 1.0 + kTotalTol)) {
        report.violations.push_back("state " + index_label(i) + " has emission probability outside [0,1]");
      }
      residual += inst.lambda(i) * (inst.v(i) - s.delta) * p;
      report.state_totals[i] += p;
    }
    report.plausibility_residuals.push_back(residual);
    if (!(std::abs(residual) <= kPlausibilityTol)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "signal at delta=" << s.delta << " violates Bayes plausibility (residual " << residual
          << ")";
      report.violations.push_back(msg.str());
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (!(std::abs(report.state_totals[i] - 1.0) <= kTotalTol)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "state " << index_label(i) << " emits total probability " << report.state_totals[i];
      report.violations.push_back(msg.str());
    }
  }
  return report;
}

void require_valid(const Instance& inst, const Scheme& scheme) {
  const auto report = validate_scheme(inst, scheme);
  if (!report.valid()) throw ValidationError("invalid scheme: " + report.violations.front());
}

double evaluate_payoff(const Instance& inst, const RationalityLevel& level, const Scheme& scheme) {
  require_valid(inst, scheme);
  double total = 0.0;
  for (const Signal& s : scheme.signals()) {
    double weight = 0.0;
    for (const auto& [i, p] : s.mass) weight += inst.lambda(i) * inst.u(i) * p;
    if (weight > 0.0) total += weight * response(level, s.delta);
  }
  return total;
}

double log_payoff(const Instance& inst, const RationalityLevel& level, const Scheme& scheme) {
  require_valid(inst, scheme);
  std::vector<double> terms;
  for (const Signal& s : scheme.signals()) {
    const double lw = log_response(level, s.delta);
    if (!std::isfinite(lw)) continue;
    for (const auto& [i, p] : s.mass) {
      if (p > 0.0 && inst.u(i) > 0.0 && std::isfinite(inst.log_lambda(i))) {
        terms.push_back(inst.log_lambda(i) + std::log(inst.u(i)) + std::log(p) + lw);
      }
    }
  }
  return numeric::log_sum_exp(terms);
}

// ---------------------------------------------------------------------------
// Builders

CensorshipParams censorship_params(const Instance& inst, std::vector<std::size_t> high,
                                   std::size_t threshold, double p) {
  std::sort(high.begin(), high.end());
  CensorshipParams params{threshold, p, std::numeric_limits<double>::quiet_NaN(), std::move(high)};
  check_partition(inst, params);
  const auto mean = pooled_mean(inst, high_members(params));
  if (mean) {
    params.pooling_signal = *mean;
  } else if (p > 0.0) {
    throw ValidationError("pooled mass is zero while the threshold probability is positive");
  }
  return params;
}

Scheme make_censorship(const Instance& inst, const CensorshipParams& params) {
  std::vector<Signal> signals;
  emit_high_side(inst, params, signals);
  for (auto [i, p] : low_members(inst, params)) signals.push_back(Signal{inst.v(i), {{i, p}}});
  return Scheme(std::move(signals));
}

std::optional<double> direct_low_signal(const Instance& inst, const CensorshipParams& params) {
  check_partition(inst, params);
  return pooled_mean(inst, low_members(inst, params));
}

Scheme make_direct(const Instance& inst, const CensorshipParams& params) {
  std::vector<Signal> signals;
  emit_high_side(inst, params, signals);
  const auto members = low_members(inst, params);
  const auto low = pooled_mean(inst, members);
  if (low) {
    Signal s{*low, {}};
    for (auto [i, p] : members) s.mass[i] += p;
    signals.push_back(std::move(s));
  } else {
    for (auto [i, p] : members) signals.push_back(Signal{inst.v(i), {{i, p}}});
  }
  return Scheme(std::move(signals));
}

Scheme mix(std::span<const Scheme> schemes, std::span<const double> weights) {
  if (schemes.empty()) throw ValidationError("mix needs at least one scheme");
  if (schemes.size() != weights.size()) throw ValidationError("mix needs one weight per scheme");
  double sum = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) throw ValidationError("mix weights must be nonnegative");
    sum += w;
  }
  if (!(std::abs(sum - 1.0) <= kSumTol)) throw ValidationError("mix weights must sum to 1");
  std::vector<Signal> signals;
  for (std::size_t k = 0; k < schemes.size(); ++k) {
    if (weights[k] == 0.0) continue;
    for (const Signal& s : schemes[k].signals()) {
      Signal scaled{s.delta, {}};
      for (const auto& [i, p] : s.mass) scaled.mass[i] = weights[k] * p;
      signals.push_back(std::move(scaled));
    }
  }
  return Scheme(std::move(signals));
}

}  // namespace persuasion
