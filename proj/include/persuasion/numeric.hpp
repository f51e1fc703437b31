#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace persuasion::numeric {

/// log(sum(exp(x))) without overflow. Returns -inf for an empty or all -inf input.
double log_sum_exp(std::span<const double> x);

/// log(exp(d) - 1) for d > 0.
double log_expm1(double d);

/// n evenly spaced points on [a, b], endpoints included.
std::vector<double> linspace(double a, double b, std::size_t n);

/// n log-spaced points on [a, b], endpoints included. Requires 0 < a <= b.
std::vector<double> logspace(double a, double b, std::size_t n);

struct BisectOptions {
  double residual_tol = 1e-12;
  double width_tol = 1e-15;
  int max_iter = 200;
};

/// Root of f on [lo, hi] where f(lo) and f(hi) have opposite signs (or one is zero).
/// Stops once |f(mid)| <= residual_tol or the bracket is no wider than
/// width_tol * max(1, |mid|). Throws NumericError after max_iter halvings.
double bisect(const std::function<double(double)>& f, double lo, double hi,
              const BisectOptions& opts = {});

/// Maximizer of a unimodal f on [a, b] by golden-section search.
double golden_section_max(const std::function<double(double)>& f, double a, double b,
                          double tol = 1e-12, int max_iter = 200);

}  // namespace persuasion::numeric
