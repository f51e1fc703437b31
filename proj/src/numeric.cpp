#include "persuasion/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "persuasion/error.hpp"

namespace persuasion::numeric {

double log_sum_exp(std::span<const double> x) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double t : x) hi = std::max(hi, t);
  if (!std::isfinite(hi)) return hi;
  double s = 0.0;
  for (double t : x) s += std::exp(t - hi);
  return hi + std::log(s);
}

double log_expm1(double d) {
  if (d > 1.0) return d + std::log1p(-std::exp(-d));
  return std::log(std::expm1(d));
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> out;
  if (n == 0) return out;
  if (n == 1) return {a};
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    out.push_back(a + (b - a) * static_cast<double>(k) / static_cast<double>(n - 1));
  }
  out.back() = b;
  return out;
}

std::vector<double> logspace(double a, double b, std::size_t n) {
  if (!(a > 0.0) || !(b >= a)) throw ValidationError("logspace needs 0 < a <= b");
  auto out = linspace(std::log(a), std::log(b), n);
  for (double& t : out) t = std::exp(t);
  if (!out.empty()) {
    out.front() = a;
    out.back() = b;
  }
  return out;
}

double bisect(const std::function<double(double)>& f, double lo, double hi,
              const BisectOptions& opts) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) throw NumericError("bisect: root not bracketed");
  for (int it = 0; it < opts.max_iter; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0 || std::abs(fm) <= opts.residual_tol ||
        hi - lo <= opts.width_tol * std::max(1.0, std::abs(mid))) {
      return mid;
    }
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  throw NumericError("bisect: iteration cap reached");
}

double golden_section_max(const std::function<double(double)>& f, double a, double b,
                          double tol, int max_iter) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - r * (b - a);
  double d = a + r * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < max_iter && b - a > tol; ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  return fc >= fd ? c : d;
}

}  // namespace persuasion::numeric
