#include <catch2/catch_amalgamated.hpp>

#include "hypercorr/families.hpp"
#include "oracles.hpp"

using namespace hypercorr;

static Dyadic dy(long num, unsigned exp) { return Dyadic(mpz_class(num), exp); }

static SetFamily family_of(int n, std::initializer_list<uint32_t> masks) {
  SetFamily f(n);
  for (uint32_t m : masks) f.insert(m);
  return f;
}

namespace {
const SetFamily maj3 = families::majority(3);
const SetFamily dict1 = families::principal(3, 1);
}  // namespace

TEST_CASE("wht examples") {
  SECTION("constant function") {
    CubeFunction one(3);
    for (auto& v : one.values) v = 1;
    Spectrum s = wht(one);
    CHECK(s.coeffs[0] == Dyadic(1));
    for (size_t m = 1; m < 8; ++m) CHECK(s.coeffs[m].is_zero());
  }
  SECTION("dictator indicator") {
    Spectrum s = wht(indicator(dict1));
    auto direct = oracle::wht_direct(indicator(dict1));
    for (uint32_t m = 0; m < 8; ++m) CHECK(Rational(s.coeffs[m]) == direct[m]);
    CHECK(s.coeffs[0] == dy(1, 1));
    CHECK(s.coeffs[1] == dy(-1, 1));
    for (uint32_t m : {2u, 3u, 4u, 5u, 6u, 7u}) CHECK(s.coeffs[m].is_zero());
  }
  SECTION("majority indicator") {
    Spectrum s = wht(indicator(maj3));
    auto direct = oracle::wht_direct(indicator(maj3));
    for (uint32_t m = 0; m < 8; ++m) CHECK(Rational(s.coeffs[m]) == direct[m]);
    CHECK(s.coeffs[0] == dy(1, 1));
    for (uint32_t m : {1u, 2u, 4u}) CHECK(s.coeffs[m] == dy(-1, 2));
    for (uint32_t m : {3u, 5u, 6u}) CHECK(s.coeffs[m].is_zero());
    CHECK(s.coeffs[7] == dy(1, 2));
  }
  SECTION("matches the direct sum on random functions") {
    std::mt19937_64 rng(11);
    for (int n = 0; n <= 4; ++n)
      for (int rep = 0; rep < 10; ++rep) {
        CubeFunction f = oracle::random_function(n, rng);
        Spectrum s = wht(f);
        auto direct = oracle::wht_direct(f);
        for (uint32_t m = 0; m < f.values.size(); ++m) CHECK(Rational(s.coeffs[m]) == direct[m]);
      }
  }
  SECTION("wide values take the arbitrary-precision path") {
    CubeFunction f(2);
    mpz_class big = 1;
    big <<= 80;
    f.values = {Dyadic(big, 0), Dyadic(-big, 3), Dyadic(1), Dyadic(0)};
    Spectrum s = wht(f);
    auto direct = oracle::wht_direct(f);
    for (uint32_t m = 0; m < 4; ++m) CHECK(Rational(s.coeffs[m]) == direct[m]);
    CHECK(inverse_wht(s).values == f.values);
  }
}

TEST_CASE("inverse_wht examples") {
  SECTION("round trip") {
    CubeFunction f = indicator(maj3);
    CHECK(inverse_wht(wht(f)).values == f.values);
  }
  SECTION("impulse spectrum synthesizes the constant") {
    Spectrum s(3);
    s.coeffs[0] = 1;
    CubeFunction f = inverse_wht(s);
    for (const auto& v : f.values) CHECK(v == Dyadic(1));
  }
  SECTION("dictator spectrum at n=2") {
    Spectrum s(2);
    s.coeffs[0] = dy(1, 1);
    s.coeffs[1] = dy(-1, 1);
    CubeFunction f = inverse_wht(s);
    CHECK(f.values == indicator(families::principal(2, 1)).values);
  }
  SECTION("random round trips") {
    std::mt19937_64 rng(12);
    for (int rep = 0; rep < 30; ++rep) {
      CubeFunction f = oracle::random_function(5, rng);
      CHECK(inverse_wht(wht(f)).values == f.values);
    }
  }
}

TEST_CASE("influence examples") {
  CHECK(influence(maj3, 1) == dy(1, 1));
  CHECK(influence(maj3, 1) == Dyadic::scaled(2 * oracle::influence_count(maj3, 1), 3));
  CHECK(influence(dict1, 1) == Dyadic(1));
  CHECK(influence(dict1, 2) == Dyadic(0));
  CHECK(influence(SetFamily::empty(4), 2) == Dyadic(0));
  CHECK_THROWS_AS(influence(maj3, 4), Error);

  std::mt19937_64 rng(13);
  for (int rep = 0; rep < 40; ++rep) {
    SetFamily f = oracle::random_family(5, rng);
    for (int k = 1; k <= 5; ++k)
      CHECK(influence(f, k) == Dyadic::scaled(2 * oracle::influence_count(f, k), 5));
  }
}

TEST_CASE("correlation examples") {
  CHECK(correlation(maj3, dict1) == dy(1, 3));
  CHECK(correlation(dict1, dict1) == dy(1, 2));
  CHECK(correlation(maj3, SetFamily::full(3)).is_zero());
  CHECK_THROWS_AS(correlation(maj3, SetFamily::full(4)), Error);

  std::mt19937_64 rng(14);
  for (int rep = 0; rep < 50; ++rep) {
    SetFamily a = oracle::random_family(4, rng), b = oracle::random_family(4, rng);
    CHECK(Rational(correlation(a, b)) == oracle::correlation_direct(a, b));
    // sign rules under set complement
    CHECK(correlation(family_complement(a), b) == -correlation(a, b));
    CHECK(correlation(family_complement(a), family_complement(b)) == correlation(a, b));
  }
}

TEST_CASE("predicates") {
  SECTION("dictator") {
    FamilyPredicates p = predicates(dict1);
    CHECK(p.increasing);
    CHECK(p.intersecting);
    CHECK(p.antipodal);
    CHECK(p.balanced);
    CHECK(!p.regular);
    CHECK(!p.decreasing);
  }
  SECTION("majority") {
    FamilyPredicates p = predicates(maj3);
    CHECK(p.increasing);
    CHECK(p.intersecting);
    CHECK(p.antipodal);
    CHECK(p.regular);
    CHECK(p.balanced);
  }
  SECTION("tribes 2x2") {
    auto [a, b] = families::tribes({2, 2});
    FamilyPredicates p = predicates(a);
    CHECK(p.increasing);
    CHECK(!p.antipodal);
    CHECK(p.regular);
    CHECK(!p.balanced);
    CHECK(a.measure() == dy(7, 4));
  }
  SECTION("agree with definition-literal scans") {
    std::mt19937_64 rng(15);
    for (int n = 0; n <= 4; ++n)
      for (int rep = 0; rep < 30; ++rep) {
        SetFamily f = oracle::random_family(n, rng);
        CHECK(is_increasing(f) == oracle::increasing_direct(f));
        CHECK(is_decreasing(f) == oracle::decreasing_direct(f));
        CHECK(is_intersecting(f) == oracle::intersecting_direct(f));
        CHECK(is_antipodal(f) == oracle::antipodal_direct(f));
        CHECK(up_closure(f) == oracle::up_closure_direct(f));
      }
  }
  SECTION("maximal intersecting iff increasing and antipodal") {
    // maximality checked literally: no proper intersecting superfamily
    for (uint32_t bits = 0; bits < (1u << 8); ++bits) {
      SetFamily f(3);
      for (uint32_t m = 0; m < 8; ++m)
        if (bits >> m & 1) f.insert(m);
      bool maximal = is_intersecting(f);
      if (maximal)
        for (uint32_t m = 0; m < 8 && maximal; ++m)
          if (!f.contains(m)) {
            SetFamily g = f;
            g.insert(m);
            if (is_intersecting(g)) maximal = false;
          }
      CHECK(maximal == is_maximal_intersecting(f));
    }
  }
}

TEST_CASE("dual") {
  CHECK(dual(dict1) == dict1);
  CHECK(dual(SetFamily::full(3)) == SetFamily::empty(3));
  auto [a, b] = families::tribes({2, 2});
  SetFamily expect(4);
  for (uint32_t m = 0; m < 16; ++m)
    if ((m & 3u) && (m & 12u)) expect.insert(m);
  CHECK(b == expect);
  CHECK(b == oracle::dual_direct(a));

  std::mt19937_64 rng(16);
  for (int rep = 0; rep < 40; ++rep) {
    SetFamily f = oracle::random_family(4, rng);
    CHECK(dual(dual(f)) == f);
    CHECK(dual(f) == oracle::dual_direct(f));
  }
  for (int rep = 0; rep < 20; ++rep) {
    SetFamily f = families::random_increasing(4, rep, families::RandomModel::UpClosure, 3);
    CHECK(is_increasing(dual(f)));
    CHECK((is_antipodal(f) == (dual(f) == f)));
  }
}

TEST_CASE("plus and minus parts") {
  SECTION("antipodal fixed point") {
    auto [p, m] = plus_minus_parts(maj3);
    CHECK(p == maj3);
    CHECK(m == maj3);
  }
  SECTION("full family") {
    auto [p, m] = plus_minus_parts(SetFamily::full(3));
    CHECK(p == SetFamily::empty(3));
    CHECK(m == SetFamily::full(3));
  }
  SECTION("tribes") {
    auto [a, b] = families::tribes({2, 2});
    auto [p, m] = plus_minus_parts(a);
    CHECK(p.size() == 5);
    CHECK(p == family_intersection(a, dual(a)));
  }
  SECTION("errors and identities") {
    SetFamily dec = family_complement(dict1);  // decreasing, not increasing
    CHECK_THROWS_AS(plus_minus_parts(dec), Error);
    for (int seed = 0; seed < 25; ++seed) {
      SetFamily f = families::random_increasing(4, seed, families::RandomModel::UpClosure, 2);
      auto [p, m] = plus_minus_parts(f);
      CHECK(is_increasing(p));
      CHECK(is_intersecting(p));
      CHECK(is_increasing(m));
      CHECK((is_intersecting(f) == (p == f)));
      // chi(F+) + chi(F-) == chi(F) + chi(F') pointwise
      SetFamily d = dual(f);
      for (uint32_t x = 0; x < f.point_count(); ++x)
        CHECK((int)p.contains(x) + (int)m.contains(x) ==
              (int)f.contains(x) + (int)d.contains(x));
    }
  }
}

TEST_CASE("directional difference") {
  SECTION("constant to zero") {
    CubeFunction c(3);
    for (auto& v : c.values) v = 5;
    for (auto conv : {DiffConvention::Full, DiffConvention::Half})
      for (const auto& v : directional_difference(c, 2, conv).values) CHECK(v.is_zero());
  }
  SECTION("dictator full difference") {
    CubeFunction d = directional_difference(indicator(dict1), 1, DiffConvention::Full);
    for (uint32_t m = 0; m < 8; ++m) CHECK(d.values[m] == ((m & 1) ? Dyadic(1) : Dyadic(-1)));
    Spectrum s = wht(d);
    CHECK(s.coeffs[1] == Dyadic(-1));
    for (uint32_t m : {0u, 2u, 3u, 4u, 5u, 6u, 7u}) CHECK(s.coeffs[m].is_zero());
  }
  SECTION("majority norms equal the influence") {
    CubeFunction d = directional_difference(indicator(maj3), 1, DiffConvention::Full);
    std::vector<Dyadic> sq(8), av(8);
    for (int i = 0; i < 8; ++i) {
      sq[i] = d.values[i].square();
      av[i] = d.values[i].sign() < 0 ? -d.values[i] : d.values[i];
    }
    Dyadic l2 = div_pow2(Dyadic::sum(sq), 3), l1 = div_pow2(Dyadic::sum(av), 3);
    CHECK(l2 == dy(1, 1));
    CHECK(l1 == dy(1, 1));
    CHECK(l2 == influence(maj3, 1));
  }
  SECTION("half-difference Fourier contract") {
    std::mt19937_64 rng(17);
    for (int rep = 0; rep < 15; ++rep) {
      CubeFunction f = oracle::random_function(4, rng);
      Spectrum base = wht(f);
      for (int i = 1; i <= 4; ++i) {
        Spectrum half = wht(directional_difference(f, i, DiffConvention::Half));
        Spectrum full = wht(directional_difference(f, i, DiffConvention::Full));
        for (uint32_t m = 0; m < 16; ++m) {
          Dyadic expect = (m >> (i - 1)) & 1 ? base.coeffs[m] : Dyadic(0);
          CHECK(half.coeffs[m] == expect);
          CHECK(full.coeffs[m] == expect + expect);
        }
      }
    }
  }
}

TEST_CASE("m_alpha") {
  SECTION("single characters") {
    Spectrum s1(3);
    s1.coeffs[1] = 1;  // u_{1}
    CubeFunction u1 = inverse_wht(s1);
    for (double a : {0.0, 0.3, 0.5, 1.0}) CHECK(m_alpha(u1, a) == 1.0);
    Spectrum s2(3);
    s2.coeffs[3] = 1;  // u_{1,2}
    CubeFunction u12 = inverse_wht(s2);
    CHECK_THAT(m_alpha(u12, 0.5), Catch::Matchers::WithinAbs(1.0 / std::sqrt(2.0), 1e-14));
  }
  SECTION("centered majority") {
    CubeFunction f = antipodal_lift(maj3).fn;
    CHECK_THAT(m_alpha(f, 1.0), Catch::Matchers::WithinAbs(5.0 / 6.0, 1e-12));
    CHECK(m_alpha(f, 0.0) == 1.0);  // exact-sum path
  }
  SECTION("errors") {
    CHECK_THROWS_AS(m_alpha(indicator(maj3), 0.5), Error);  // nonzero mean
    CHECK_THROWS_AS(m_alpha(antipodal_lift(maj3).fn, 1.5), Error);
  }
}

TEST_CASE("s_gamma") {
  CHECK(s_gamma(maj3, 1.0) == dy(1, 1));
  CHECK(s_gamma(dict1, 2.0) == Dyadic(0));
  CHECK(s_gamma(maj3, 1e-9) == dy(1, 1));  // floor guard forces q = 1, Imin
  CHECK_THROWS_AS(s_gamma(SetFamily::empty(3), 1.0), Error);
  CHECK_THROWS_AS(s_gamma(SetFamily::full(3), 1.0), Error);
  CHECK_THROWS_AS(s_gamma(maj3, 0.0), Error);
}

TEST_CASE("antipodal lift") {
  SECTION("dictator") {
    AntipodalLift l = antipodal_lift(dict1);
    CHECK(l.antipodal);
    Spectrum s = wht(l.fn);
    CHECK(s.coeffs[1] == Dyadic(-1));
    for (uint32_t m : {0u, 2u, 3u, 4u, 5u, 6u, 7u}) CHECK(s.coeffs[m].is_zero());
  }
  SECTION("majority") {
    Spectrum s = wht(antipodal_lift(maj3).fn);
    for (uint32_t m : {1u, 2u, 4u}) CHECK(s.coeffs[m] == dy(-1, 1));
    CHECK(s.coeffs[7] == dy(1, 1));
  }
  SECTION("full family is flagged") {
    AntipodalLift l = antipodal_lift(SetFamily::full(3));
    CHECK(!l.antipodal);
    for (const auto& v : l.fn.values) CHECK(v == Dyadic(1));
  }
  SECTION("even coefficients vanish for antipodal families") {
    families::for_each_family(4, families::FamilyClass::MaximalIntersecting,
                              [](const SetFamily& f) {
                                Spectrum s = wht(antipodal_lift(f).fn);
                                for (uint32_t m = 0; m < 16; ++m)
                                  if (std::popcount(m) % 2 == 0) CHECK(s.coeffs[m].is_zero());
                              });
  }
}

TEST_CASE("f_star") {
  SECTION("plus-minus-one valued") {
    CubeFunction f = antipodal_lift(maj3).fn;
    CHECK(f_star(f).values == indicator(maj3).values);
  }
  SECTION("negative constant") {
    CubeFunction f(2);
    for (auto& v : f.values) v = -1;
    for (const auto& v : f_star(f).values) CHECK(v.is_zero());
  }
  SECTION("zero-plus-minus-one antipodal form") {
    for (int seed = 0; seed < 20; ++seed) {
      SetFamily b = families::random_increasing(4, seed, families::RandomModel::UpClosure, 2);
      SetFamily bd = dual(b);
      CubeFunction f(4);
      for (uint32_t x = 0; x < 16; ++x)
        f.values[x] = Dyadic((long)b.contains(x) + (long)bd.contains(x) - 1);
      CubeFunction star = f_star(f);
      SetFamily bplus = plus_minus_parts(b).first;
      CHECK(star.values == indicator(bplus).values);
    }
  }
}

TEST_CASE("exact identity properties") {
  std::mt19937_64 rng(18);
  for (int n = 3; n <= 7; ++n) {
    for (int rep = 0; rep < 25; ++rep) {
      SetFamily f = oracle::random_family(n, rng);
      CubeFunction chi = indicator(f);
      Spectrum s = wht(chi);
      std::vector<Dyadic> sq(s.coeffs.size());
      for (size_t i = 0; i < sq.size(); ++i) sq[i] = s.coeffs[i].square();

      // Parseval
      std::vector<Dyadic> vals_sq(chi.values.size());
      for (size_t i = 0; i < vals_sq.size(); ++i) vals_sq[i] = chi.values[i].square();
      CHECK(Dyadic::sum(sq) == div_pow2(Dyadic::sum(vals_sq), (unsigned)n));

      // influence-spectrum identity
      for (int k = 1; k <= n; ++k) {
        std::vector<Dyadic> with_k;
        for (uint32_t m = 1; m < sq.size(); ++m)
          if ((m >> (k - 1)) & 1) with_k.push_back(sq[m]);
        CHECK(influence(f, k) == Dyadic(4) * Dyadic::sum(with_k));
      }

      // pointwise vs spectral correlation
      SetFamily g = oracle::random_family(n, rng);
      CHECK(correlation(f, g) == spectral_correlation(s, wht(indicator(g))));
      CHECK(correlation(indicator(f), indicator(g)) == correlation(f, g));
    }
    // monotone linear-coefficient identity
    for (int rep = 0; rep < 15; ++rep) {
      SetFamily f = families::random_increasing(n, 100 * n + rep,
                                                families::RandomModel::UpClosure, 3);
      Spectrum s = wht(indicator(f));
      for (int k = 1; k <= n; ++k)
        CHECK(influence(f, k) == Dyadic(-2) * s.coeffs[1u << (k - 1)]);
      SetFamily d = family_complement(f);  // decreasing
      Spectrum sd = wht(indicator(d));
      for (int k = 1; k <= n; ++k)
        CHECK(influence(d, k) == Dyadic(2) * sd.coeffs[1u << (k - 1)]);
    }
  }
}

TEST_CASE("tt hex round trip") {
  std::mt19937_64 rng(19);
  for (int n = 0; n <= 8; ++n)
    for (int rep = 0; rep < 10; ++rep) {
      SetFamily f = oracle::random_family(n, rng);
      CHECK(family_from_tt(n, tt_hex(f)) == f);
    }
  CHECK(tt_hex(families::principal(3, 1)) == "aa");
  CHECK_THROWS_AS(family_from_tt(3, "zz"), Error);
  CHECK_THROWS_AS(family_from_tt(3, "a"), Error);
}
