#include <doctest.h>

#include "dioph/interval.hpp"
#include "support/gen.hpp"

using namespace dioph;
using dioph::testing::Gen;
using dioph::testing::kCases;

TEST_CASE("interval endpoints are ordered on construction") {
    Interval a(Real(3), Real(-1));
    CHECK(a.lo() == -1);
    CHECK(a.hi() == 3);
    CHECK(a.mag() == 3);
    CHECK(a.contains(Real(0)));
}

TEST_CASE("property: interval operations enclose sampled point results") {
    Gen g(21);
    for (int k = 0; k < kCases; ++k) {
        Real a0 = g.real(-5, 5), a1 = a0 + g.real(0, 2);
        Real b0 = g.real(-5, 5), b1 = b0 + g.real(0, 2);
        Interval A(a0, a1), B(b0, b1);
        for (int s = 0; s < 5; ++s) {
            Real x = a0 + (a1 - a0) * Real(g.unit());
            Real y = b0 + (b1 - b0) * Real(g.unit());
            CHECK((A + B).contains(x + y));
            CHECK((A - B).contains(x - y));
            CHECK((A * B).contains(x * y));
            CHECK((-A).contains(-x));
            CHECK(A.pow(3).contains(x * x * x));
        }
    }
}

TEST_CASE("property: padding keeps a tiny width") {
    Gen g(22);
    for (int k = 0; k < kCases; ++k) {
        Real x = g.real(-100, 100);
        Interval f = Interval::fuzzy(x);
        CHECK(f.contains(x));
        CHECK(f.width() <= abs(x) * pow2(-238) + pow2(-1990));
    }
}
