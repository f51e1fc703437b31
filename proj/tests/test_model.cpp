#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "catch_amalgamated.hpp"
#include "persuasion/error.hpp"
#include "persuasion/model.hpp"
#include "persuasion/robust.hpp"
#include "support.hpp"

using namespace persuasion;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
const auto kBeta1 = RationalityLevel::finite(1.0);
}

TEST_CASE("instances reject malformed input", "[model]") {
  CHECK_THROWS_AS(Instance::from_states({}), ValidationError);
  CHECK_THROWS_AS(Instance::from_states({{0.5, 1.0, 1.0}, {0.5, 1.0, 1.0}}), ValidationError);
  CHECK_THROWS_AS(Instance::from_states({{0.5, 2.0, 1.0}, {0.5, 1.0, 1.0}}), ValidationError);
  CHECK_THROWS_AS(Instance::from_states({{0.6, 1.0, 1.0}, {0.6, 2.0, 1.0}}), ValidationError);
  CHECK_THROWS_AS(Instance::from_states({{-0.1, 1.0, 1.0}, {1.1, 2.0, 1.0}}), ValidationError);
  CHECK_THROWS_AS(Instance::from_states({{0.5, 1.0, -1.0}, {0.5, 2.0, 1.0}}), ValidationError);
  CHECK_THROWS_AS(Instance::from_states({{0.5, std::nan(""), 1.0}, {0.5, 2.0, 1.0}}), ValidationError);
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(Instance::from_log_weights({-inf, -inf}, {0.0, 1.0}, {1.0, 1.0}), ValidationError);
}

TEST_CASE("log-weight instances keep an exact normalized log prior", "[model]") {
  const Instance inst = Instance::from_log_weights({0.0, 800.0, 1600.0}, {-1.0, 1.0, 2.0}, {1.0, 1.0, 1.0});
  CHECK(inst.log_weight_mode());
  CHECK_THAT(inst.log_lambda(0), WithinRel(-1600.0, 1e-12));
  CHECK_THAT(inst.log_lambda(1), WithinRel(-800.0, 1e-12));
  CHECK(inst.lambda(2) == 1.0);
  CHECK(inst.raw_log_weights()[1] == 800.0);
  const Scheme reveal = Scheme::full_reveal(inst);
  CHECK_THAT(log_payoff(inst, kBeta1, reveal),
             WithinRel(std::log(response(kBeta1, 2.0)), 1e-12));
  CHECK(std::isfinite(log_payoff(inst, kBeta1, reveal)));
}

TEST_CASE("payoff of full revelation on the cross-level instance", "[model]") {
  const Instance inst = robust::cross_level_instance();
  // mpmath, 40 digits
  CHECK_THAT(evaluate_payoff(inst, kBeta1, Scheme::full_reveal(inst)), WithinRel(0.059601461011058778, 1e-14));
}

TEST_CASE("payoff is zero when no state pays the sender", "[model]") {
  const Instance inst = Instance::from_states({{0.3, -1.0, 0.0}, {0.7, 2.0, 0.0}});
  CHECK(evaluate_payoff(inst, kBeta1, Scheme::no_info(inst)) == 0.0);
  CHECK(log_payoff(inst, kBeta1, Scheme::full_reveal(inst)) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("quarter-pool scheme on the cross-level instance meets its lower bound", "[model]") {
  const Instance inst = robust::cross_level_instance();
  const double beta = 4.0;
  const double d = (beta + 2.0) / (beta + 1.0);
  const Scheme s({Signal{d, {{0, 1.0}, {1, 1.0 / beta}}}, Signal{2.0, {{1, 1.0 - 1.0 / beta}}}});
  REQUIRE(validate_scheme(inst, s).valid());
  const auto level = RationalityLevel::finite(beta);
  // mpmath, 40 digits
  CHECK_THAT(evaluate_payoff(inst, level, s), WithinRel(0.0011460776930699162, 1e-13));
  CHECK(evaluate_payoff(inst, level, s) >= 0.0010203213941449869);
}

TEST_CASE("full revelation and no information are valid", "[model]") {
  const Instance inst = testing::figure_instance();
  CHECK(validate_scheme(inst, Scheme::full_reveal(inst)).valid());
  const Scheme none = Scheme::no_info(inst);
  REQUIRE(none.size() == 1);
  CHECK_THAT(none.signals()[0].delta, WithinAbs(0.7, 1e-15));
  CHECK(validate_scheme(inst, none).valid());
}

TEST_CASE("a perturbed signal is flagged with a residual proportional to its mass", "[model]") {
  const Instance inst = testing::figure_instance();
  Signal s = Scheme::no_info(inst).signals()[0];
  s.delta += 1e-3;
  const auto report = validate_scheme(inst, Scheme({s}));
  CHECK_FALSE(report.valid());
  CHECK_THAT(report.plausibility_residuals[0], WithinRel(-1e-3, 1e-9));
  CHECK_THROWS_AS(require_valid(inst, Scheme({s})), ValidationError);
  CHECK_THROWS_AS(evaluate_payoff(inst, kBeta1, Scheme({s})), ValidationError);
}

TEST_CASE("per-state totals are enforced", "[model]") {
  const Instance inst = testing::figure_instance();
  std::vector<Signal> sig = Scheme::full_reveal(inst).signals();
  sig[0].mass[0] = 0.9;
  CHECK_FALSE(validate_scheme(inst, Scheme(sig)).valid());
  const Scheme unknown({Signal{0.0, {{7, 1.0}}}});
  CHECK_FALSE(validate_scheme(inst, unknown).valid());
}

TEST_CASE("signals at equal delta merge unless the scheme is split", "[model]") {
  const std::vector<Signal> sig{{1.0, {{0, 0.25}}}, {1.0 + 1e-14, {{0, 0.25}, {1, 0.5}}}, {2.0, {{1, 0.5}}}};
  const Scheme merged(sig);
  CHECK(merged.size() == 2);
  CHECK_THAT(merged.signals()[0].mass.at(0), WithinAbs(0.5, 1e-15));
  const Scheme split = Scheme::split(sig);
  CHECK(split.size() == 3);
  CHECK(split.canonical().size() == 2);
  CHECK(merged.max_signals_per_state() == 2);
  CHECK(merged.max_support() == 2);
}

TEST_CASE("censorship on the figure instance pools the first three states at zero", "[model]") {
  const Instance inst = testing::figure_instance();
  const auto p = censorship_params(inst, {0, 1, 2}, 3, 0.0);
  CHECK_THAT(p.pooling_signal, WithinAbs(0.0, 1e-15));
  const Scheme s = make_censorship(inst, p);
  CHECK(s.size() == 3);
  CHECK(validate_scheme(inst, s).valid());
  CHECK_THAT(evaluate_payoff(inst, RationalityLevel::fully_rational(), s), WithinAbs(0.6, 1e-15));
}

TEST_CASE("censorship edge cases", "[model]") {
  const Instance inst = testing::figure_instance();
  const Scheme reveal = make_censorship(inst, censorship_params(inst, {}, 0, 0.0));
  CHECK(reveal.size() == inst.size());
  const Scheme none = make_censorship(inst, censorship_params(inst, {0, 1, 2, 3}, 4, 1.0));
  REQUIRE(none.size() == 1);
  CHECK_THAT(none.signals()[0].delta, WithinAbs(0.7, 1e-15));
  CHECK_THROWS_AS(censorship_params(inst, {0, 3}, 3, 0.5), ValidationError);
  CHECK_THROWS_AS(censorship_params(inst, {}, 5, 0.0), ValidationError);
  CHECK_THROWS_AS(censorship_params(inst, {0}, 1, 1.5), ValidationError);
  auto p = censorship_params(inst, {0, 1, 2}, 3, 0.0);
  p.pooling_signal = 0.1;
  CHECK_THROWS_AS(make_censorship(inst, p), ValidationError);
}

TEST_CASE("direct schemes pool the low side at a second signal", "[model]") {
  const Instance inst = testing::figure_instance();
  const auto p = censorship_params(inst, {0, 1, 2}, 3, 0.0);
  const Scheme d = make_direct(inst, p);
  REQUIRE(d.size() == 2);
  CHECK_THAT(d.signals()[1].delta, WithinAbs(1.75, 1e-15));
  CHECK_THAT(*direct_low_signal(inst, p), WithinAbs(1.75, 1e-15));
  const Scheme single = make_direct(inst, censorship_params(inst, {}, 0, 0.0));
  REQUIRE(single.size() == 1);
  CHECK_THAT(single.signals()[0].delta, WithinAbs(0.7, 1e-15));
}

TEST_CASE("direct and censorship coincide on two states", "[model]") {
  const Instance inst = robust::cross_level_instance();
  for (double p : {0.0, 0.3, 1.0}) {
    const auto params = censorship_params(inst, {0}, 1, p);
    const Scheme c = make_censorship(inst, params);
    const Scheme d = make_direct(inst, params);
    CHECK_THAT(evaluate_payoff(inst, kBeta1, c), WithinAbs(evaluate_payoff(inst, kBeta1, d), 1e-15));
  }
}

TEST_CASE("mixtures are linear in the payoff", "[model]") {
  const Instance inst = robust::cross_level_instance();
  const Scheme reveal = Scheme::full_reveal(inst);
  const Scheme pooled = make_censorship(inst, censorship_params(inst, {0}, 1, 0.4));
  const Scheme id[1] = {pooled};
  const double one[1] = {1.0};
  CHECK(mix(id, one).size() == pooled.size());
  const Scheme twice[2] = {reveal, reveal};
  const double w[2] = {0.3, 0.7};
  const Scheme rr = mix(twice, w);
  CHECK(rr.size() == reveal.size());
  CHECK_THAT(rr.signals()[0].mass.at(0), WithinAbs(1.0, 1e-15));
  const Scheme halves[2] = {pooled, reveal};
  const double half[2] = {0.5, 0.5};
  const Scheme m = mix(halves, half);
  for (double b : {0.5, 1.0, 4.0, 16.0}) {
    const auto level = RationalityLevel::finite(b);
    CHECK_THAT(evaluate_payoff(inst, level, m),
               WithinRel(0.5 * (evaluate_payoff(inst, level, pooled) + evaluate_payoff(inst, level, reveal)), 1e-12));
  }
  const double bad[2] = {0.5, 0.6};
  CHECK_THROWS_AS(mix(halves, bad), ValidationError);
}

TEST_CASE("pooled mean is exact under extreme log weights", "[model]") {
  const Instance inst = Instance::from_log_weights({0.0, 1500.0}, {-1.0, 3.0}, {1.0, 1.0});
  const std::vector<std::pair<std::size_t, double>> both{{0, 1.0}, {1, 1.0}};
  CHECK_THAT(*pooled_mean(inst, both), WithinAbs(3.0, 1e-15));
  const std::vector<std::pair<std::size_t, double>> none{{0, 0.0}};
  CHECK_FALSE(pooled_mean(inst, none).has_value());
}
