#include <doctest.h>

#include "dioph/poly.hpp"
#include "dioph/real.hpp"
#include "support/gen.hpp"

using namespace dioph;
using dioph::testing::Gen;
using dioph::testing::kCases;

TEST_CASE("parse_rational reads fractions and decimals exactly") {
    CHECK(parse_rational("3/6") == Rational(1, 2));
    CHECK(parse_rational("-0.125") == Rational(-1, 8));
    CHECK(parse_rational("25e-2") == Rational(1, 4));
    CHECK(parse_rational(" 7 ") == Rational(7));
    CHECK_THROWS(parse_rational(""));
    CHECK_THROWS(parse_rational("-"));
}

TEST_CASE("format_rational round-trips through parse_rational") {
    CHECK(format_rational(Rational(-3, 9)) == "-1/3");
    CHECK(format_rational(Rational(4)) == "4");
}

TEST_CASE("property: to_rational is exact and inverts to_real on dyadics") {
    Gen g(11);
    for (int k = 0; k < kCases; ++k) {
        Real x = g.real(-1e6, 1e6) * pow2(static_cast<int>(g.integer(-300, 300)));
        Rational q = to_rational(x);
        CHECK(to_real(q) == x);
        Integer den = mp::denominator(q);
        CHECK((den & (den - 1)) == 0);
    }
    CHECK(to_rational(Real(0)) == 0);
    CHECK(to_rational(Real(-6)) == -6);
}

TEST_CASE("property: round and floor agree with integer truth") {
    Gen g(12);
    for (int k = 0; k < kCases; ++k) {
        long n = g.integer(-100000, 100000);
        Real frac = g.real(0.01, 0.49);
        CHECK(round_to_integer(Real(n) + frac) == n);
        CHECK(round_to_integer(Real(n) - frac) == n);
        CHECK(floor_to_integer(Real(n) + frac) == n);
        CHECK(floor_to_integer(Real(n) - frac) == n - 1);
    }
}

TEST_CASE("format_real is deterministic and fixed width") {
    CHECK(format_real(Real(1) / 3, 5) == "3.3333e-01");
    CHECK(format_real(Real(0)) == "0");
}

TEST_CASE("property: determinant and inverse of random rational matrices") {
    Gen g(13);
    for (int k = 0; k < kCases; ++k) {
        const std::size_t n = static_cast<std::size_t>(g.integer(1, 4));
        Matrix<Rational> a(n, n);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c) a(r, c) = Rational(g.integer(-9, 9), g.integer(1, 5));
        Rational det = determinant(a);
        if (det == 0) continue;
        auto inv = inverse(a);
        auto prod = a * inv;
        CHECK(prod == Matrix<Rational>::identity(n));
        CHECK(determinant(inv) * det == 1);
    }
}

TEST_CASE("polynomial resultant and discriminant") {
    using poly::QPoly;
    QPoly f{Rational(-2), Rational(0), Rational(1)};
    CHECK(poly::discriminant(f) == 8);
    QPoly c{Rational(1), Rational(-3), Rational(0), Rational(1)};
    CHECK(poly::discriminant(c) == 81);
    // res(x^2 - 2, 3 + 2x) = 9 - 8.
    QPoly g{Rational(3), Rational(2)};
    CHECK(abs(poly::resultant(f, g)) == 1);
}

TEST_CASE("root isolation counts and refines real roots") {
    using poly::QPoly;
    QPoly c{Rational(1), Rational(-3), Rational(0), Rational(1)};
    CHECK(poly::count_real_roots(c) == 3);
    QPoly i{Rational(1), Rational(0), Rational(1)};
    CHECK(poly::count_real_roots(i) == 0);
    auto iso = poly::isolate_real_roots(QPoly{Rational(-2), Rational(0), Rational(1)});
    REQUIRE(iso.size() == 2);
    Real r = poly::refine_root(QPoly{Rational(-2), Rational(0), Rational(1)}, iso[1].first, iso[1].second);
    CHECK(abs(r - mp::sqrt(Real(2))) < pow2(-250));
}
