#include <cmath>
#include <random>
#include <vector>

#include "catch_amalgamated.hpp"
#include "persuasion/error.hpp"
#include "persuasion/numeric.hpp"
#include "persuasion/oracle.hpp"
#include "persuasion/sdsu.hpp"
#include "persuasion/sisu.hpp"
#include "support.hpp"

using namespace persuasion;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
const auto kBeta1 = RationalityLevel::finite(1.0);

Instance cross_level() { return Instance::from_states({{0.5, 1.0, 0.0}, {0.5, 2.0, 1.0}}); }

Scheme random_scheme(std::mt19937_64& rng, const Instance& inst, std::size_t signals) {
  std::vector<std::vector<double>> share(signals, std::vector<double>(inst.size()));
  for (std::size_t i = 0; i < inst.size(); ++i) {
    const auto w = testing::random_simplex(rng, signals);
    for (std::size_t s = 0; s < signals; ++s) share[s][i] = w[s];
  }
  std::vector<Signal> out;
  for (std::size_t s = 0; s < signals; ++s) {
    std::vector<std::pair<std::size_t, double>> mass;
    for (std::size_t i = 0; i < inst.size(); ++i) mass.emplace_back(i, share[s][i]);
    out.push_back(Signal{*pooled_mean(inst, mass), {mass.begin(), mass.end()}});
  }
  return Scheme::split(std::move(out));
}
}  // namespace

TEST_CASE("binary slope statistic", "[sdsu]") {
  const Instance inst = cross_level();
  // mpmath, 40 digits
  CHECK_THAT(sdsu::binary_gamma(inst, kBeta1, 1.5), WithinRel(0.69558446497741588, 1e-12));
  const Instance sym = Instance::from_states({{0.5, -2.0, 1.0}, {0.5, 2.0, 1.0}});
  CHECK_THAT(sdsu::binary_gamma(sym, kBeta1, 0.0), WithinRel(0.52318831191152978, 1e-12));
  double prev = INFINITY;
  for (double d : numeric::linspace(-2.0, 1.99, 200)) {
    const double g = sdsu::binary_gamma(sym, RationalityLevel::finite(2.0), d);
    CHECK(g < prev);
    prev = g;
  }
  CHECK_THROWS_AS(sdsu::binary_gamma(sym, kBeta1, 2.0), ValidationError);
}

TEST_CASE("binary optimum on the cross-level instance is no-info at beta 1", "[sdsu]") {
  const auto opt = sdsu::binary_optimal(cross_level(), kBeta1);
  CHECK(opt.regime == sdsu::Regime::NoInfo);
  CHECK_THAT(opt.payoff, WithinRel(0.09121276190317817, 1e-13));
}

TEST_CASE("binary optimum with zero low utility and nonpositive high value is no-info", "[sdsu]") {
  const Instance inst = Instance::from_states({{0.5, -2.0, 0.0}, {0.5, -0.5, 1.0}});
  for (double b : {0.5, 2.0, 8.0}) {
    CHECK(sdsu::binary_optimal(inst, RationalityLevel::finite(b)).regime == sdsu::Regime::NoInfo);
  }
}

TEST_CASE("binary optimum matches the grid LP", "[sdsu]") {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 25; ++t) {
    const Instance inst = testing::random_binary(rng, t % 3 == 0);
    const auto level = RationalityLevel::finite(0.25 * (1 + t % 10));
    const auto opt = sdsu::binary_optimal(inst, level);
    CHECK(opt.params.threshold_prob >= 0.0);
    CHECK(opt.params.threshold_prob <= 1.0);
    CHECK(validate_scheme(inst, opt.scheme).valid());
    oracle::GridOptions g;
    g.points = 4001;
    const auto lp = oracle::grid_lp_optimal(inst, level, g);
    CHECK(opt.payoff >= lp.value - 1e-7);
  }
}

TEST_CASE("binary-support decomposition", "[sdsu]") {
  const Instance two = cross_level();
  const Scheme fr = Scheme::full_reveal(two);
  CHECK(sdsu::decompose_binary_support(two, fr).size() == fr.size());

  const Instance three = Instance::from_states({{0.3, -1.0, 1.0}, {0.3, 0.5, 0.5}, {0.4, 2.0, 2.0}});
  const Scheme split = sdsu::decompose_binary_support(three, Scheme::no_info(three));
  CHECK(split.size() <= 2);
  for (const auto& s : split.signals()) {
    CHECK(s.mass.size() <= 2);
    CHECK_THAT(s.delta, WithinAbs(three.prior_mean(), 1e-12));
  }

  std::mt19937_64 rng(42);
  for (int t = 0; t < 100; ++t) {
    const Instance inst = testing::random_sdsu(rng, 3 + t % 3);
    const Scheme s = random_scheme(rng, inst, 2 + t % 3);
    const Scheme d = sdsu::decompose_binary_support(inst, s);
    CHECK(d.max_support() <= 2);
    CHECK(validate_scheme(inst, d).valid());
    const double a = evaluate_payoff(inst, kBeta1, s);
    CHECK_THAT(evaluate_payoff(inst, kBeta1, d), WithinAbs(a, 1e-12));
  }
}

TEST_CASE("pairwise re-optimization never lowers the payoff", "[sdsu]") {
  std::mt19937_64 rng(43);
  for (int t = 0; t < 20; ++t) {
    const Instance inst = testing::random_sdsu(rng, 3 + t % 2);
    const auto level = RationalityLevel::finite(0.5 + t % 4);
    const Scheme d = sdsu::decompose_binary_support(inst, random_scheme(rng, inst, 3));
    const Scheme r = sdsu::pairwise_reoptimize(inst, level, d);
    CHECK(evaluate_payoff(inst, level, r) >= evaluate_payoff(inst, level, d) - 1e-12);
    CHECK(validate_scheme(inst, r).valid());
  }
}

TEST_CASE("optimal pairwise scheme", "[sdsu]") {
  std::mt19937_64 rng(44);
  for (int t = 0; t < 10; ++t) {
    const Instance inst = testing::random_sdsu(rng, 4);
    const auto level = RationalityLevel::finite(1.0 + t % 3);
    const Scheme s = sdsu::optimal_pairwise(inst, level);
    CHECK(s.size() <= 4 * 5 / 2);
    CHECK(s.max_support() <= 2);
    CHECK(validate_scheme(inst, s).valid());
    CHECK(evaluate_payoff(inst, level, s) >= oracle::grid_lp_optimal(inst, level).value - 1e-9);
  }
  for (int t = 0; t < 10; ++t) {
    const Instance inst = testing::random_binary(rng, false);
    const auto level = RationalityLevel::finite(1.0 + t % 3);
    CHECK_THAT(evaluate_payoff(inst, level, sdsu::optimal_pairwise(inst, level)),
               WithinAbs(sdsu::binary_optimal(inst, level).payoff, 1e-7));
  }
  const Instance fig = testing::figure_instance();
  CHECK_THAT(evaluate_payoff(fig, RationalityLevel::fully_rational(),
                             sdsu::optimal_pairwise(fig, RationalityLevel::fully_rational())),
             WithinAbs(0.6, 1e-9));
}

TEST_CASE("assignment branch and bound matches brute force", "[sdsu]") {
  std::mt19937_64 rng(45);
  std::uniform_real_distribution<double> r(0.1, 1.0);
  for (int t = 0; t < 30; ++t) {
    sdsu::PairLP lp;
    lp.states = 3;
    lp.edges = {{0, 1, 0.0, r(rng), r(rng)}, {1, 2, 0.0, r(rng), r(rng)}, {2, 0, 0.0, r(rng), r(rng)}};
    const auto sol = sdsu::solve_gap_integral(lp);
    const auto frac = sdsu::solve_gap_fractional(lp);
    double best = 0.0;
    for (int mask = 0; mask < 8; ++mask) {
      std::vector<double> x(3);
      for (int e = 0; e < 3; ++e) x[e] = (mask >> e) & 1;
      std::vector<double> used(3, 0.0);
      std::vector<int> assigned(3, 0);
      bool ok = true;
      for (int e = 0; e < 3; ++e) {
        if (x[e] == 0.0) continue;
        if (++assigned[lp.edges[e].item] > 1) ok = false;
        used[lp.edges[e].bin] += lp.edges[e].cost;
      }
      for (double u : used) ok = ok && u <= 1.0 + 1e-12;
      if (!ok) continue;
      double v = 0.0;
      for (int e = 0; e < 3; ++e) v += x[e] * lp.edges[e].reward;
      best = std::max(best, v);
    }
    CHECK_THAT(sol.value, WithinAbs(best, 1e-9));
    CHECK(frac.value >= sol.value - 1e-9);
  }
}

TEST_CASE("four-approximation", "[sdsu]") {
  std::mt19937_64 rng(46);
  for (int t = 0; t < 10; ++t) {
    const std::size_t m = 3 + t % 3;
    const Instance inst = testing::random_sdsu(rng, m);
    const auto level = RationalityLevel::finite(1.0 + t % 4);
    const auto fa = sdsu::four_approx(inst, level);
    CHECK(fa.scheme.size() <= 2 * m);
    CHECK(validate_scheme(inst, fa.scheme).valid());
    const double opt = evaluate_payoff(inst, level, sdsu::optimal_pairwise(inst, level));
    CHECK(4.0 * evaluate_payoff(inst, level, fa.scheme) >= opt - 1e-9);
  }
}

TEST_CASE("censorship and direct approximations", "[sdsu]") {
  std::mt19937_64 rng(47);
  for (int t = 0; t < 10; ++t) {
    const std::size_t m = 3 + t % 2;
    const Instance inst = testing::random_sdsu(rng, m);
    const auto level = RationalityLevel::finite(1.0 + t % 3);
    const double opt = evaluate_payoff(inst, level, sdsu::optimal_pairwise(inst, level));
    const auto c = sdsu::censorship_m_approx(inst, level);
    CHECK(c.params.has_value());
    CHECK(validate_scheme(inst, c.scheme).valid());
    CHECK_THAT(evaluate_payoff(inst, level, c.scheme), WithinAbs(c.payoff, 1e-12));
    const auto d = sdsu::direct_m_approx(inst, level);
    CHECK(validate_scheme(inst, d.scheme).valid());
    CHECK(d.scheme.size() <= 2);
    CHECK(4.0 * static_cast<double>(m) * d.payoff >= opt - 1e-9);
  }
}

TEST_CASE("signal count instance", "[sdsu]") {
  // Root of beta / log(beta) = 2m, mpmath
  CHECK_THAT(sdsu::signal_count_instance(3).level.beta(), WithinRel(16.998887352296053, 1e-12));
  CHECK_THAT(sdsu::signal_count_instance(4).level.beta(), WithinRel(26.093485476611910, 1e-12));
  CHECK_THAT(sdsu::signal_count_instance(5).level.beta(), WithinRel(35.771520639572972, 1e-12));
  CHECK_THROWS_AS(sdsu::signal_count_instance(2), ValidationError);
  const auto sc = sdsu::signal_count_instance(4);
  const Scheme w = sdsu::signal_count_witness(sc.instance, sc.level);
  CHECK(validate_scheme(sc.instance, w).valid());
  CHECK(w.max_signals_per_state() >= 3);
}

TEST_CASE("pair pooling scheme boundary cases", "[sdsu]") {
  const Instance inst = Instance::from_states({{0.3, 1.0, 0.0}, {0.3, 2.0, 0.0}, {0.4, 3.0, 1.0}});
  const Scheme at_low = sdsu::pair_pool_scheme(inst, 0, 1.0);
  CHECK(validate_scheme(inst, at_low).valid());
  const Scheme at_top = sdsu::pair_pool_scheme(inst, 0, 3.0);
  CHECK(validate_scheme(inst, at_top).valid());
  const double mean = (0.3 * 1.0 + 0.4 * 3.0) / 0.7;
  const Scheme at_mean = sdsu::pair_pool_scheme(inst, 0, mean);
  CHECK(validate_scheme(inst, at_mean).valid());
  CHECK(at_mean.size() == 2);
  CHECK(validate_scheme(inst, sdsu::pair_pool_scheme(inst, 1, 2.5)).valid());
  CHECK_THROWS_AS(sdsu::pair_pool_scheme(inst, 2, 3.0), ValidationError);
  CHECK_THROWS_AS(sdsu::pair_pool_scheme(inst, 0, 0.5), ValidationError);
}

TEST_CASE("lower-bound family: censorship and direct fall short of the witness", "[sdsu]") {
  const auto sc = sdsu::signal_count_instance(4);
  const double w = log_payoff(sc.instance, sc.level, sdsu::signal_count_witness(sc.instance, sc.level));
  const double c = sdsu::best_censorship(sc.instance, sc.level).log_payoff;
  const double d = sdsu::best_censorship(sc.instance, sc.level, 201, true).log_payoff;
  CHECK(w > c);
  CHECK(w > d);
}
