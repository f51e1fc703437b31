#pragma once

#include <optional>
#include <string>

namespace persuasion {

/// Receiver rationality: a finite logit precision beta >= 0, or the fully rational limit.
class RationalityLevel {
 public:
  static RationalityLevel finite(double beta);
  static RationalityLevel fully_rational() noexcept { return RationalityLevel{}; }

  bool is_fully_rational() const noexcept { return !beta_.has_value(); }
  bool is_finite() const noexcept { return beta_.has_value(); }
  /// Throws ValidationError when fully rational.
  double beta() const;
  /// "inf" or the shortest round-trip decimal of beta.
  std::string label() const;

  friend bool operator==(const RationalityLevel&, const RationalityLevel&) = default;

 private:
  RationalityLevel() = default;
  std::optional<double> beta_;
};

/// Parses "inf" or a nonnegative decimal.
RationalityLevel parse_level(const std::string& token);

/// Probability of action 1 at posterior utility difference delta.
double response(const RationalityLevel& level, double delta) noexcept;

/// log of response(level, delta); -inf where the response is exactly zero.
double log_response(const RationalityLevel& level, double delta) noexcept;

/// Derivative of the response in delta. Throws ValidationError when fully rational.
double response_derivative(const RationalityLevel& level, double delta);

namespace logistic {
/// 1 / (1 + e^t), evaluated with exp of a nonpositive argument only.
double sigma(double t) noexcept;
/// log(1 + e^t).
double softplus(double t) noexcept;
/// d sigma / dt = -e^{-|t|} / (1 + e^{-|t|})^2.
double sigma_prime(double t) noexcept;
}  // namespace logistic

}  // namespace persuasion
