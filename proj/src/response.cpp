#include "persuasion/response.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include "persuasion/error.hpp"

namespace persuasion {

RationalityLevel RationalityLevel::finite(double beta) {
  if (!std::isfinite(beta) || beta < 0.0) {
    throw ValidationError("rationality level must be a finite beta >= 0 or \"inf\"");
  }
  RationalityLevel out;
  out.beta_ = beta;
  return out;
}

double RationalityLevel::beta() const {
  if (!beta_) throw ValidationError("fully rational level has no finite beta");
  return *beta_;
}

std::string RationalityLevel::label() const {
  if (!beta_) return "inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, *beta_);
  return std::string(buf, res.ptr);
}

RationalityLevel parse_level(const std::string& token) {
  if (token == "inf" || token == "Inf" || token == "INF") return RationalityLevel::fully_rational();
  double beta = 0.0;
  const char* first = token.data();
  const char* last = first + token.size();
  auto res = std::from_chars(first, last, beta);
  if (res.ec != std::errc{} || res.ptr != last) {
    throw ValidationError("cannot parse rationality level '" + token + "'");
  }
  return RationalityLevel::finite(beta);
}

namespace logistic {

double sigma(double t) noexcept {
  if (t >= 0.0) {
    const double e = std::exp(-t);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(t));
}

double softplus(double t) noexcept {
  return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t)));
}

double sigma_prime(double t) noexcept {
  const double e = std::exp(-std::abs(t));
  const double d = 1.0 + e;
  return -e / (d * d);
}

}  // namespace logistic

double response(const RationalityLevel& level, double delta) noexcept {
  if (level.is_fully_rational()) return delta <= 0.0 ? 1.0 : 0.0;
  const double beta = level.beta();
  if (beta == 0.0) return 0.5;
  return logistic::sigma(beta * delta);
}

double log_response(const RationalityLevel& level, double delta) noexcept {
  if (level.is_fully_rational()) {
    return delta <= 0.0 ? 0.0 : -std::numeric_limits<double>::infinity();
  }
  const double beta = level.beta();
  if (beta == 0.0) return -std::log(2.0);
  return -logistic::softplus(beta * delta);
}

double response_derivative(const RationalityLevel& level, double delta) {
  if (level.is_fully_rational()) {
    throw ValidationError("response derivative is undefined for a fully rational receiver");
  }
  const double beta = level.beta();
  if (beta == 0.0) return 0.0;
  return beta * logistic::sigma_prime(beta * delta);
}

}  // namespace persuasion
