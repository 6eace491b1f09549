#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "hypercorr/dyadic.hpp"

using namespace hypercorr;

static Dyadic dy(long num, unsigned exp) { return Dyadic(mpz_class(num), exp); }

TEST_CASE("dyadic normalization") {
  CHECK(dy(12, 2).numerator() == 3);
  CHECK(dy(12, 2).exponent() == 0);
  CHECK(dy(12, 0).numerator() == 12);  // integers keep exponent 0
  CHECK(dy(0, 7).exponent() == 0);
  CHECK(dy(-8, 3) == Dyadic(-1));
  CHECK(dy(6, 4).numerator() == 3);
  CHECK(dy(6, 4).exponent() == 3);
}

TEST_CASE("dyadic arithmetic and order") {
  Dyadic half = dy(1, 1), quarter = dy(1, 2);
  CHECK(half + half == Dyadic(1));
  CHECK(half - quarter == quarter);
  CHECK(half * half == quarter);
  CHECK(-half < quarter);
  CHECK(quarter < half);
  CHECK(half <= half);
  CHECK(dy(3, 2) > dy(5, 3));  // 3/4 vs 5/8
  CHECK(dy(1, 1).square() == quarter);
  CHECK(dy(-3, 1).to_double() == -1.5);
  CHECK(dy(1, 2).to_string() == "1/2^2");
}

TEST_CASE("dyadic sum matches fold") {
  std::vector<Dyadic> xs = {dy(1, 1), dy(-1, 3), dy(5, 0), dy(7, 4)};
  Dyadic folded = 0;
  for (const auto& x : xs) folded += x;
  CHECK(Dyadic::sum(xs) == folded);
  CHECK(Dyadic::sum(std::span<const Dyadic>{}) == Dyadic(0));
}

TEST_CASE("dyadic arithmetic agrees with mpq") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<long> num(-50, 50);
  std::uniform_int_distribution<unsigned> exp(0, 6);
  for (int rep = 0; rep < 1000; ++rep) {
    Dyadic a = dy(num(rng), exp(rng)), b = dy(num(rng), exp(rng));
    mpq_class qa = Rational(a).value(), qb = Rational(b).value();
    CHECK(Rational(a + b).value() == qa + qb);
    CHECK(Rational(a - b).value() == qa - qb);
    CHECK(Rational(a * b).value() == qa * qb);
    CHECK(Dyadic::cmp(a, b) == (qa < qb ? -1 : qa == qb ? 0 : 1));
  }
}

TEST_CASE("rational basics") {
  Rational third(1, 3);
  CHECK(!third.is_dyadic());
  CHECK(third + third + third == Rational(1));
  CHECK(Rational(dy(3, 2)).is_dyadic());
  CHECK(Rational(dy(3, 2)).den_pow2() == 2);
  CHECK(Rational(1, 2) / Rational(1, 8) == Rational(4));
  CHECK(Rational(-2, 4) == Rational(-1, 2));
  CHECK_THROWS_AS(Rational(1) / Rational(0), Error);
  CHECK(Rational(5, 10).num_string() == "1");
  CHECK(Rational(5, 10).den_string() == "2");
}
