#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "catch_amalgamated.hpp"
#include "cli.hpp"
#include "persuasion/error.hpp"
#include "persuasion/io.hpp"
#include "persuasion/sdsu.hpp"

using namespace persuasion;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
std::string data(const std::string& name) { return std::string(PERSUASION_SOURCE_DIR) + "/tests/data/" + name; }

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}
}  // namespace

TEST_CASE("level spec parsing", "[cli]") {
  const auto a = cli::parse_level_spec("inf,0.5,1:3:3");
  REQUIRE(a.size() == 5);
  CHECK_FALSE(a[0].is_finite());
  CHECK(a[1].beta() == 0.5);
  CHECK(a[3].beta() == 2.0);
  const auto b = cli::parse_level_spec("1:100:3log");
  REQUIRE(b.size() == 3);
  CHECK_THAT(b[1].beta(), WithinRel(10.0, 1e-12));
  CHECK_THROWS_AS(cli::parse_level_spec("abc"), ValidationError);
  CHECK_THROWS_AS(cli::parse_level_spec("-1"), ValidationError);
  CHECK(cli::parse_m_range("2..5") == std::pair<std::size_t, std::size_t>{2, 5});
  CHECK(cli::parse_m_range("4") == std::pair<std::size_t, std::size_t>{4, 4});
  CHECK_THROWS_AS(cli::parse_m_range("0..3"), ValidationError);
}

TEST_CASE("solve in rational mode", "[cli]") {
  const auto r = run({"solve", "--instance", data("figure.json"), "--mode", "rational", "--beta", "inf"});
  REQUIRE(r.code == 0);
  const auto j = io::json::parse(r.out);
  const auto& res = j["results"][0];
  CHECK(res["params"]["i_dagger"] == 4);
  CHECK(res["params"]["p_dagger"] == 0.0);
  CHECK_THAT(res["payoff"].get<double>(), WithinAbs(0.6, 1e-12));
}

TEST_CASE("solve in quantal mode reports the beta 0 convention", "[cli]") {
  const auto r = run({"solve", "--instance", data("figure.json"), "--mode", "sisu", "--beta", "0"});
  REQUIRE(r.code == 0);
  const auto j = io::json::parse(r.out);
  CHECK_FALSE(j["results"][0]["note"].get<std::string>().empty());
}

TEST_CASE("solve in two-state mode matches the library", "[cli]") {
  const auto r = run({"solve", "--instance", data("cross_level.json"), "--mode", "sdsu-binary", "--beta", "1,4"});
  REQUIRE(r.code == 0);
  const auto j = io::json::parse(r.out);
  const Instance inst = io::load_instance(data("cross_level.json"));
  REQUIRE(j["results"].size() == 2);
  CHECK(j["results"][0]["payoff"].get<double>() ==
        sdsu::binary_optimal(inst, RationalityLevel::finite(1.0)).payoff);
  CHECK(j["results"][1]["payoff"].get<double>() ==
        sdsu::binary_optimal(inst, RationalityLevel::finite(4.0)).payoff);
}

TEST_CASE("input errors exit with code 2 and a JSON error", "[cli]") {
  const auto bad = run({"solve", "--instance", data("bad.json"), "--mode", "sisu", "--beta", "1"});
  CHECK(bad.code == 2);
  CHECK(io::json::parse(bad.err)["error"]["kind"] == "validation");
  CHECK(bad.out.empty());
  const auto n0 = run({"simulate", "--instance", data("figure.json"), "--beta", "1", "--n", "0"});
  CHECK(n0.code == 2);
  const auto usage = run({"solve", "--bogus"});
  CHECK(usage.code == 2);
  CHECK(io::json::parse(usage.err)["error"]["kind"] == "usage");
  CHECK(run({"bench", "--family", "sisu-direct", "--m", "2..9"}).code == 2);
}

TEST_CASE("oracle with analytic augmentation agrees with the exact solver", "[cli]") {
  const auto r = run({"oracle", "--instance", data("cross_level.json"), "--beta", "0.5,2,8", "--augment-analytic"});
  REQUIRE(r.code == 0);
  for (const auto& row : io::json::parse(r.out)["results"]) CHECK(std::abs(row["gap"].get<double>()) <= 1e-8);
}

TEST_CASE("robust CSV has one row per level", "[cli]") {
  const auto r = run({"robust", "--instance", data("cross_level.json"), "--scheme", "opt:2", "--beta", "1,16", "--csv"});
  REQUIRE(r.code == 0);
  CHECK(count_lines(r.out) == 3);
  CHECK(r.out.rfind("beta,", 0) == 0);
}

TEST_CASE("bench with an empty range prints only the header", "[cli]") {
  const auto r = run({"bench", "--family", "sisu-direct", "--m", "3..2"});
  REQUIRE(r.code == 0);
  CHECK(count_lines(r.out) == 1);
}

TEST_CASE("simulate and solve are deterministic", "[cli]") {
  const std::vector<std::string> sim{"simulate", "--instance", data("figure.json"), "--beta", "1", "--n", "2000",
                                     "--seed", "5"};
  CHECK(run(sim).out == run(sim).out);
  const std::vector<std::string> solve{"solve", "--instance", data("log_weights.json"), "--mode", "sisu", "--beta",
                                       "1,5"};
  const auto a = run(solve);
  REQUIRE(a.code == 0);
  CHECK(a.out == run(solve).out);
}
