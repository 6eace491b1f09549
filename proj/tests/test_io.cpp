#include <catch2/catch_amalgamated.hpp>

#include "hypercorr/io.hpp"
#include "oracles.hpp"

using namespace hypercorr;
using hypercorr::io::json;

TEST_CASE("rational json forms") {
  json dy = io::rational_json(Rational(17, 256));
  CHECK(dy.at("num") == "17");
  CHECK(dy.at("den_pow2") == 8);
  CHECK(io::rational_from_json(dy) == Rational(17, 256));

  json gen = io::rational_json(Rational(136, 189));
  CHECK(gen.at("num") == "136");
  CHECK(gen.at("den") == "189");
  CHECK(!gen.contains("den_pow2"));
  CHECK(io::rational_from_json(gen) == Rational(136, 189));

  json neg = io::rational_json(Rational(-1, 32));
  CHECK(io::rational_from_json(neg) == Rational(-1, 32));
}

TEST_CASE("family file encodings produce identical families") {
  json explicit_form = {{"n", 3}, {"family", {{1, 2}, {1, 3}, {2, 3}, {1, 2, 3}}}};
  json generator_form = {{"n", 3}, {"generators", {{1, 2}, {1, 3}, {2, 3}}}, {"closure", "up"}};
  json tt_form = {{"n", 3}, {"tt", tt_hex(families::majority(3))}};
  SetFamily a = io::family_from_json(explicit_form);
  SetFamily b = io::family_from_json(generator_form);
  SetFamily c = io::family_from_json(tt_form);
  CHECK(a == families::majority(3));
  CHECK(a == b);
  CHECK(a == c);
  CHECK(tt_hex(a) == tt_hex(b));  // identical digests across encodings

  json down_form = {{"n", 3}, {"generators", {{1}}}, {"closure", "down"}};
  SetFamily d = io::family_from_json(down_form);
  CHECK(is_decreasing(d));
  CHECK(d.size() == 2);
}

TEST_CASE("family json round trip") {
  std::mt19937_64 rng(51);
  for (int n = 0; n <= 6; ++n)
    for (int rep = 0; rep < 10; ++rep) {
      SetFamily f = oracle::random_family(n, rng);
      CHECK(io::family_from_json(io::family_to_json(f)) == f);
    }
}

TEST_CASE("malformed family files are input errors") {
  CHECK_THROWS_AS(io::family_from_json(json{{"n", 3}}), Error);
  CHECK_THROWS_AS(io::family_from_json(json{{"n", 3}, {"tt", "aa"}, {"family", json::array()}}),
                  Error);
  CHECK_THROWS_AS(io::family_from_json(json{{"n", 30}, {"tt", "aa"}}), Error);
  CHECK_THROWS_AS(io::family_from_json(json{{"n", 3}, {"family", {{0}}}}), Error);
  CHECK_THROWS_AS(io::family_from_json(json{{"n", 3}, {"family", {{4}}}}), Error);
  CHECK_THROWS_AS(io::family_from_json(json{{"n", 3}, {"generators", {{1}}}}), Error);
  CHECK_THROWS_AS(io::family_from_json(json{{"n", 3}, {"tt", "a"}}), Error);
}

TEST_CASE("ensembles parse from arrays or wrapped objects") {
  json arr = json::array({io::family_to_json(families::principal(3, 1)),
                          io::family_to_json(families::principal(3, 2))});
  CHECK(io::ensemble_from_json(arr).size() == 2);
  json wrapped = {{"families", arr}};
  CHECK(io::ensemble_from_json(wrapped).size() == 2);
  CHECK_THROWS_AS(io::ensemble_from_json(json::array()), Error);
}

TEST_CASE("report envelope and payload serialization") {
  ineq::InequalityReport rep =
      ineq::evaluate("chvatal_equiv", families::majority(3), families::principal(3, 1));
  json j = io::inequality_report_json(rep);
  CHECK(j.at("holds") == "holds");
  CHECK(j.at("margin").at("num") == "0");
  CHECK(io::rational_from_json(j.at("lhs")) == Rational(1, 8));

  json env = io::envelope("check --ineq chvatal_equiv", 7, j, 1.5);
  CHECK(env.at("version") == kVersion);
  CHECK(env.at("seed") == 7);
  CHECK(env.at("report").at("checker") == "chvatal_equiv");

  flow::KahnFlowCheck chk = flow::check_kahn_flow(families::majority(3), {});
  json fj = io::flow_result_json(chk.result);
  CHECK(fj.at("feasible") == true);
  CHECK(fj.at("flow").is_array());

  families::TribesStats ts = families::tribes_exact({2, 2});
  json tj = io::tribes_json(ts);
  CHECK(tj.at("cor_exact").at("num") == "17");
  CHECK(tj.at("ratio_balanced_exact").at("den") == "189");
  std::string csv = io::tribes_csv({ts});
  CHECK(csv.find("2,2,1,") != std::string::npos);
}
