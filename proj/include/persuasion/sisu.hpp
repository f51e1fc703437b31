#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "persuasion/model.hpp"

namespace persuasion::sisu {

/// Optimal censorship for a fully rational receiver. Works for any sender utilities:
/// states are ranked by v/u (u = 0 ranks as +inf for v > 0 and -inf otherwise, ties by index)
/// and the threshold is the last state whose lower-ranked prefix has nonpositive mass-weighted v.
/// The pooling signal is exactly 0 whenever the threshold constraint binds.
CensorshipParams rational_optimal(const Instance& inst);

/// Nonpositive tangency point: the unique k <= 0 whose tangent to W passes through (delta_dd, W(delta_dd)).
/// Requires a finite beta > 0 and delta_dd >= 0.
double kappa(const RationalityLevel& level, double delta_dd);

/// Inverse of kappa: the delta_dd >= 0 with kappa(delta_dd) = k, for k <= 0.
double kappa_inverse(const RationalityLevel& level, double k);

/// Tangency residual W'(k)(d - k) - (W(d) - W(k)).
double tangency_residual(const RationalityLevel& level, double k, double delta_dd);

/// Pooling probability of state i when the high-side signal sits at kappa(v_i):
/// -(sum_{j<i} lambda_j (v_j - kappa(v_i))) / (lambda_i (v_i - kappa(v_i))).
/// May be negative, exceed 1, or be infinite when lambda_i = 0. A negative value keeps its
/// sign when its magnitude underflows. Requires v_i >= 0.
double pool_probability(const Instance& inst, const RationalityLevel& level, std::size_t i);

/// Instance with zero-prior dummy states added so that some v is negative and some positive.
struct Normalized {
  Instance instance;
  /// Original index of each normalized state; nullopt marks a dummy.
  std::vector<std::optional<std::size_t>> origin;

  bool is_identity() const noexcept;
  /// Drops dummy states from a scheme on the normalized instance.
  Scheme restrict(const Scheme& scheme) const;
};

Normalized normalize_instance(const Instance& inst);

/// Solution of the optimality conditions, indexed on the normalized instance.
struct TangentSolution {
  double delta_dd = 0.0;  // low-side posterior, >= 0
  double delta_d = 0.0;   // pooling signal, <= 0
  std::size_t threshold_state = 0;
  double threshold_prob = 0.0;
};

/// Absolute residuals of the five optimality conditions.
struct SisuResiduals {
  double complementary_slackness = 0.0;  // (1 - p)(delta_dd - v_threshold)
  double tangency = 0.0;                 // delta_d is the tangency point of delta_dd
  double threshold_location = 0.0;       // max{v_j <= delta_dd} - v_threshold
  double sign = 0.0;                     // delta_d <= 0 <= delta_dd
  double probability = 0.0;              // 0 <= p <= 1
  double max() const noexcept;
};

SisuResiduals sisu_residuals(const Instance& normalized, const RationalityLevel& level,
                             const TangentSolution& sol);

struct QuantalOptimum {
  CensorshipParams params;  // on the caller's instance
  Scheme scheme;            // on the caller's instance
  double payoff = 0.0;
  double log_payoff = 0.0;
  std::optional<TangentSolution> tangent;  // present for finite beta > 0
  std::optional<Normalized> normalized;    // present for finite beta > 0
  std::string note;
};

/// Optimal censorship for a logit receiver with state-independent sender utility.
/// Dummy states are added internally and stripped from the result. A fully rational level
/// delegates to rational_optimal; beta = 0 returns no-info since every scheme ties.
/// Throws ValidationError for state-dependent utilities.
QuantalOptimum quantal_optimal(const Instance& inst, const RationalityLevel& level);

struct MonotonicityRow {
  RationalityLevel level;
  std::size_t threshold_state;
  double threshold_prob;
};

struct MonotonicityReport {
  bool monotone = true;
  std::vector<MonotonicityRow> rows;
  std::vector<std::string> violations;
};

/// Checks that (threshold, p) is nondecreasing along a sorted rationality grid.
MonotonicityReport threshold_monotonicity_check(const Instance& inst,
                                                std::span<const RationalityLevel> levels);

/// States v_i = i, u_i = 1, log weights log(e^{beta i} + 1) with beta = e^m. Full revelation
/// earns m/(m + sum_j e^{beta j}); no direct scheme earns more than a constant times 1/(m + sum_j e^{beta j}).
struct LevelledInstance {
  Instance instance;
  RationalityLevel level;
};
LevelledInstance direct_gap_instance(std::size_t m);

struct DirectSearchResult {
  CensorshipParams params;
  Scheme scheme;
  double payoff = 0.0;
  double log_payoff = 0.0;
};

/// Best direct scheme over every threshold and a grid of threshold probabilities with
/// golden-section refinement around the best grid point. H is the prefix below the threshold.
DirectSearchResult best_direct(const Instance& inst, const RationalityLevel& level,
                               std::size_t grid_points = 10001);

}  // namespace persuasion::sisu
