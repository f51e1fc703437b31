#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "persuasion/model.hpp"

namespace persuasion::testing {

inline std::vector<double> random_simplex(std::mt19937_64& rng, std::size_t m) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> w(m);
  double s = 0.0;
  for (double& x : w) s += (x = e(rng) + 1e-3);
  for (double& x : w) x /= s;
  return w;
}

inline std::vector<double> sorted_values(std::mt19937_64& rng, std::size_t m, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v;
  while (v.size() < m) {
    v.assign(m, 0.0);
    for (double& x : v) x = d(rng);
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end(), [](double a, double b) { return b - a < 0.05; }), v.end());
  }
  return v;
}

/// State-independent instance with both signs of v present and prior mean of either sign.
inline Instance random_sisu(std::mt19937_64& rng, std::size_t m) {
  for (;;) {
    auto v = sorted_values(rng, m, -3.0, 3.0);
    if (v.front() >= 0.0 || v.back() <= 0.0) continue;
    const auto lambda = random_simplex(rng, m);
    std::vector<State> states;
    for (std::size_t i = 0; i < m; ++i) states.push_back({lambda[i], v[i], 1.0});
    return Instance::from_states(std::move(states));
  }
}

/// Two states with sender utilities in [0, 2]; u_1 = 0 when zero_low is set.
inline Instance random_binary(std::mt19937_64& rng, bool zero_low) {
  std::uniform_real_distribution<double> ud(0.05, 2.0);
  auto v = sorted_values(rng, 2, -3.0, 3.0);
  const auto lambda = random_simplex(rng, 2);
  const double u1 = zero_low ? 0.0 : ud(rng);
  return Instance::from_states({{lambda[0], v[0], u1}, {lambda[1], v[1], ud(rng)}});
}

/// State-dependent instance with sender utilities in [0, 2].
inline Instance random_sdsu(std::mt19937_64& rng, std::size_t m) {
  std::uniform_real_distribution<double> ud(0.0, 2.0);
  auto v = sorted_values(rng, m, -3.0, 3.0);
  const auto lambda = random_simplex(rng, m);
  std::vector<State> states;
  for (std::size_t i = 0; i < m; ++i) states.push_back({lambda[i], v[i], ud(rng)});
  return Instance::from_states(std::move(states));
}

inline Instance figure_instance() {
  return Instance::from_states(
      {{0.2, -1.5, 1.0}, {0.2, 0.5, 1.0}, {0.2, 1.0, 1.0}, {0.2, 1.5, 1.0}, {0.2, 2.0, 1.0}});
}

}  // namespace persuasion::testing
