#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "persuasion/response.hpp"

namespace persuasion {

struct State {
  double lambda = 0.0;
  double v = 0.0;
  double u = 0.0;
};

/// Finite state space with prior weights, receiver utility differences and sender utilities.
///
/// States are indexed from 0 in code and from 1 in every serialized form. Values of v are
/// strictly increasing. In log-weight mode the unnormalized log weights are kept verbatim
/// and the normalized log prior is exact even where the linear prior underflows.
class Instance {
 public:
  /// Prior probabilities must sum to 1 within 1e-12; they are then renormalized exactly.
  static Instance from_states(std::vector<State> states);
  /// Unnormalized log weights; -inf marks a zero-prior state.
  static Instance from_log_weights(std::vector<double> log_weights, std::vector<double> v,
                                   std::vector<double> u);

  std::size_t size() const noexcept { return v_.size(); }
  double lambda(std::size_t i) const { return lambda_.at(i); }
  double log_lambda(std::size_t i) const { return log_lambda_.at(i); }
  double v(std::size_t i) const { return v_.at(i); }
  double u(std::size_t i) const { return u_.at(i); }

  std::span<const double> lambdas() const noexcept { return lambda_; }
  std::span<const double> log_lambdas() const noexcept { return log_lambda_; }
  std::span<const double> values() const noexcept { return v_; }
  std::span<const double> utilities() const noexcept { return u_; }

  bool log_weight_mode() const noexcept { return raw_log_weights_.has_value(); }
  /// The log weights exactly as supplied (log-weight mode only).
  const std::vector<double>& raw_log_weights() const;

  /// All sender utilities equal.
  bool state_independent() const noexcept;
  /// Prior mean of v.
  double prior_mean() const;

 private:
  Instance() = default;
  void check_common() const;

  std::vector<double> lambda_;
  std::vector<double> log_lambda_;
  std::vector<double> v_;
  std::vector<double> u_;
  std::optional<std::vector<double>> raw_log_weights_;
};

/// Posterior mean of v over the given (state, emission probability) pairs.
/// Weights are taken relative to the largest log mass so the mean stays exact under
/// underflow. Returns nullopt when the pooled prior mass is zero.
std::optional<double> pooled_mean(const Instance& inst,
                                  std::span<const std::pair<std::size_t, double>> members);

struct Signal {
  double delta = 0.0;
  std::map<std::size_t, double> mass;
};

/// Finite set of signals, each identified by its induced posterior mean delta.
///
/// The default form keys signals by delta and merges those within 1e-12 of each other.
/// The split form keeps signals at a common delta apart when their supports differ,
/// which is how binary-support decompositions are represented.
class Scheme {
 public:
  Scheme() = default;
  explicit Scheme(std::vector<Signal> signals);
  static Scheme split(std::vector<Signal> signals);

  static Scheme full_reveal(const Instance& inst);
  static Scheme no_info(const Instance& inst);

  const std::vector<Signal>& signals() const noexcept { return signals_; }
  std::size_t size() const noexcept { return signals_.size(); }
  bool is_split() const noexcept { return split_; }
  /// Merged by delta alone.
  Scheme canonical() const;

  /// Sum of emission probabilities per state.
  std::vector<double> state_totals(std::size_t m) const;
  /// Largest number of signals any single state emits with positive probability.
  std::size_t max_signals_per_state() const;
  /// Largest support size over all signals.
  std::size_t max_support() const;

 private:
  std::vector<Signal> signals_;
  bool split_ = false;
};

bool same_delta(double a, double b) noexcept;

struct ValidationReport {
  std::vector<double> plausibility_residuals;  // one per signal
  std::vector<double> state_totals;            // one per state
  std::vector<std::string> violations;

  bool valid() const noexcept { return violations.empty(); }
  double max_plausibility_residual() const noexcept;
  double max_total_deviation() const noexcept;
};

inline constexpr double kPlausibilityTol = 1e-9;
inline constexpr double kTotalTol = 1e-12;

ValidationReport validate_scheme(const Instance& inst, const Scheme& scheme);
/// Throws ValidationError carrying the first violation.
void require_valid(const Instance& inst, const Scheme& scheme);

/// Sender payoff sum_i lambda_i u_i sum_delta pi_i(delta) W(delta). Validates first.
double evaluate_payoff(const Instance& inst, const RationalityLevel& level, const Scheme& scheme);
/// Natural log of the payoff, accumulated with log-sum-exp over exact log priors.
double log_payoff(const Instance& inst, const RationalityLevel& level, const Scheme& scheme);

/// Partition-based parameters shared by censorship and direct schemes.
/// high_states holds H; the low side L is every other state except the threshold.
struct CensorshipParams {
  std::size_t threshold_state = 0;
  double threshold_prob = 0.0;
  double pooling_signal = 0.0;  // NaN when the pooled mass is zero and no signal is pinned
  std::vector<std::size_t> high_states;
};

/// Builds parameters with the pooling signal computed from (H, threshold, p).
/// Throws ValidationError on an inconsistent partition or a zero pooled mass with p > 0.
CensorshipParams censorship_params(const Instance& inst, std::vector<std::size_t> high,
                                   std::size_t threshold, double p);

/// Pools H and a p fraction of the threshold state; reveals everything else.
Scheme make_censorship(const Instance& inst, const CensorshipParams& params);
/// Pools H and a p fraction of the threshold state; pools everything else at a second signal.
Scheme make_direct(const Instance& inst, const CensorshipParams& params);
/// Low-side pooling signal of the direct scheme, nullopt when that side has zero mass.
std::optional<double> direct_low_signal(const Instance& inst, const CensorshipParams& params);

/// Convex combination; weights must be nonnegative and sum to 1 within 1e-12.
Scheme mix(std::span<const Scheme> schemes, std::span<const double> weights);

}  // namespace persuasion
