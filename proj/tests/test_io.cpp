#include <cmath>
#include <limits>
#include <string>

#include "catch_amalgamated.hpp"
#include "persuasion/error.hpp"
#include "persuasion/io.hpp"
#include "support.hpp"

using namespace persuasion;

namespace {
std::string data(const std::string& name) { return std::string(PERSUASION_SOURCE_DIR) + "/tests/data/" + name; }
}  // namespace

TEST_CASE("numbers round-trip through their text form", "[io]") {
  for (double x : {0.1, -1.5, 1e-300, 0.3333333333333333, 6.2857151907120725}) {
    CHECK(std::stod(io::format_double(x)) == x);
    CHECK(io::read_number(io::number(x)) == x);
  }
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(io::format_double(inf) == "inf");
  CHECK(io::format_double(-inf) == "-inf");
  CHECK(io::read_number(io::number(-inf)) == -inf);
  CHECK(std::isnan(io::read_number(io::json("nan"))));
  CHECK_THROWS_AS(io::read_number(io::json("infinity")), ValidationError);
}

TEST_CASE("instance round-trip in both weight forms", "[io]") {
  const Instance fig = testing::figure_instance();
  const Instance back = io::instance_from_json(io::to_json(fig));
  REQUIRE(back.size() == fig.size());
  for (std::size_t i = 0; i < fig.size(); ++i) {
    CHECK(back.lambda(i) == fig.lambda(i));
    CHECK(back.v(i) == fig.v(i));
    CHECK(back.u(i) == fig.u(i));
  }
  const Instance lw = io::load_instance(data("log_weights.json"));
  CHECK(lw.log_weight_mode());
  const Instance lw2 = io::instance_from_json(io::to_json(lw));
  CHECK(lw2.log_weight_mode());
  for (std::size_t i = 0; i < lw.size(); ++i) CHECK(lw2.log_lambda(i) == lw.log_lambda(i));
  CHECK(io::load_instance(data("figure.json")).size() == 5);
}

TEST_CASE("scheme round-trip keeps the split flag", "[io]") {
  const Instance fig = testing::figure_instance();
  const Scheme fr = Scheme::full_reveal(fig);
  const Scheme back = io::scheme_from_json(io::to_json(fr));
  REQUIRE(back.size() == fr.size());
  CHECK_FALSE(back.is_split());
  for (std::size_t s = 0; s < fr.size(); ++s) CHECK(back.signals()[s].delta == fr.signals()[s].delta);
  const Scheme sp = Scheme::split({{0.0, {{0, 0.5}, {1, 0.5}}}, {0.0, {{0, 0.5}, {1, 0.5}}}});
  const auto j = io::to_json(sp);
  CHECK(j["signals"][0]["mass"].contains("1"));
  CHECK(io::scheme_from_json(j).is_split());
}

TEST_CASE("censorship parameters round-trip with one-based indices", "[io]") {
  const Instance fig = testing::figure_instance();
  const auto p = censorship_params(fig, {0, 1, 2}, 3, 0.0);
  const auto j = io::to_json(p);
  CHECK(j["i_dagger"] == 4);
  const auto back = io::params_from_json(j);
  CHECK(back.threshold_state == 3);
  CHECK(back.high_states == p.high_states);
  CHECK(back.pooling_signal == p.pooling_signal);
}

TEST_CASE("malformed input is a validation error", "[io]") {
  CHECK_THROWS_AS(io::load_instance(data("bad.json")), ValidationError);
  CHECK_THROWS_AS(io::load_instance(data("missing.json")), ValidationError);
  CHECK_THROWS_AS(io::instance_from_json(io::json::parse(R"({"states": 3})")), ValidationError);
  CHECK_THROWS_AS(io::instance_from_json(io::json::parse(R"({"states": [{"lambda": 1, "v": "x", "u": 1}]})")),
                  ValidationError);
  CHECK_THROWS_AS(io::scheme_from_json(io::json::parse(R"({"signals": [{"delta": 0}]})")), ValidationError);
}
