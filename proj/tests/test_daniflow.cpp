#include <doctest.h>

#include "dioph/daniflow.hpp"

#include <boost/math/constants/constants.hpp>
#include "support/gen.hpp"
#include "support/oracles.hpp"

using namespace dioph;
using namespace dioph::testing;

namespace {

KSVector tau(const Field& K, const std::vector<FieldElement>& a) { return embed_point(K, a); }

WedgeVector random_wedge(Gen& g, const Field& K, int m, int j) {
    WedgeVector w;
    w.m = m;
    w.j = j;
    for (std::size_t k = 0; k < subsets(m + 1, j).size(); ++k) w.coords.push_back(g.integral(K, 6));
    return w;
}

}  // namespace

TEST_CASE("apply_flow examples") {
    Field K = field_sqrt2();
    KSVector x0(2, 1);
    auto y = apply_flow(K, Real(0), x0, {K.one(), K.zero()});
    for (int s = 0; s < 2; ++s) {
        CHECK(y(s, 0) == 1);
        CHECK(y(s, 1) == 0);
    }
    KSVector half = tau(K, {K.from_rational(Rational(1, 2))});
    for (Real t : {Real(0), Real(1), Real(7)}) {
        auto z = apply_flow(K, t, half, {K.from_integer(-1), K.from_integer(2)});
        CHECK(z(0, 0) == 0);
        CHECK(z(1, 0) == 0);
    }
    KSVector x(2, 1);
    x(0, 0) = Real("0.3");
    x(1, 0) = Real("0.7");
    auto w = apply_flow(K, Real(1), x, {K.one(), K.one()});
    const Real e = mp::exp(Real(1));
    CHECK(rel_err(w(0, 0), e * Real("1.3")) < pow2(-240));
    CHECK(rel_err(w(0, 1), 1 / e) < pow2(-240));
    CHECK(rel_err(w(1, 0), e * Real("1.7")) < pow2(-240));
    CHECK(rel_err(w(1, 1), 1 / e) < pow2(-240));
}

TEST_CASE("systole_trace at x = 0 over Q is e^{-t} with witness (0, 1)") {
    Field Q = field_q();
    KSVector x(1, 1);
    auto tr = systole_trace(Q, x, uniform_grid(Real(0), Real(4), Real("0.5")));
    for (std::size_t k = 0; k < tr.grid.size(); ++k) {
        CHECK(tr.certified[k]);
        const Real t = tr.grid[k];
        CHECK(rel_err(tr.values[k], mp::exp(-t)) < pow2(-200));
        if (t > 0) {
            CHECK(tr.witnesses[k][0].is_zero());
            CHECK(abs(tr.witnesses[k][1].coords[0]) == 1);
        }
        // brute force over |q0|, |q| <= 10
        CHECK(rel_err(oracle::brute_systole(Q, {flow_matrix(t, x, 0)}, 10), tr.values[k]) < pow2(-200));
    }
}

TEST_CASE("systole_trace for a point of K has tail slope -d") {
    Field K = field_sqrt2();
    KSVector x = tau(K, {K.div(K.from_integers({3, 1}), K.from_integer(5))});
    auto tr = systole_trace(K, x, uniform_grid(Real(6), Real(12), Real(1)));
    std::vector<Real> ls;
    for (const auto& v : tr.values) ls.push_back(mp::log(v));
    CHECK(abs(fit_slope(tr.grid, ls) + 2) < Real("1e-20"));
}

TEST_CASE("diagnostic examples") {
    Field K = field_sqrt2();
    auto alpha = K.add(K.from_rational(Rational(3, 7)), K.scale(K.theta(), Rational(2, 5)));
    auto v = singularity_diagnostic(K, tau(K, {alpha}));
    CHECK(v.kind == VerdictKind::DivergentEvidence);
    CHECK(abs(v.slope + 2) < Real("0.1"));

    KSVector pe(2, 1);
    pe(0, 0) = boost::math::constants::pi<Real>();
    pe(1, 0) = mp::exp(Real(1));
    auto n = singularity_diagnostic(K, pe);
    CHECK(n.kind == VerdictKind::NondivergentEvidence);
    CHECK(n.floor > Real("0.01"));

    Field Q = field_q();
    auto z = singularity_diagnostic(Q, KSVector(1, 1));
    CHECK(z.kind == VerdictKind::DivergentEvidence);
    CHECK(abs(z.onset - mp::log(Real(10))) < Real("1e-6"));
    CHECK(abs(z.slope + 1) < Real("1e-30"));
    CHECK(rel_err(z.c, Real("0.01")) < pow2(-240));
}

TEST_CASE("diagnostic rejects bad parameters") {
    DiagnosticOptions o;
    o.epsilon = 2;
    CHECK_THROWS_AS(singularity_diagnostic(field_q(), KSVector(1, 1), o), Error);
}

TEST_CASE("wedge_action examples") {
    Field K = field_sqrt2();
    Gen g(61);
    KSVector x = g.point(K, 2);
    // j = 1 is apply_flow.
    WedgeVector w = random_wedge(g, K, 2, 1);
    auto f = apply_flow(K, Real("0.7"), x, w.coords);
    for (int s = 0; s < 2; ++s) {
        auto a = wedge_action(K, Real("0.7"), x, w, s);
        for (int i = 0; i < 3; ++i) CHECK(rel_err(a[i], f(s, i)) < pow2(-230));
    }
    // t = 0, x = 0: unchanged.
    WedgeVector w2 = random_wedge(g, K, 2, 2);
    auto b = wedge_action(K, Real(0), KSVector(2, 2), w2, 1);
    for (std::size_t i = 0; i < b.size(); ++i) CHECK(b[i] == K.embed(w2.coords[i])[1]);
    WedgeVector bad = w2;
    bad.j = 3;
    try {
        wedge_action(K, Real(0), KSVector(2, 2), bad, 0);
        FAIL("no error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::GradeOutOfRange);
    }
}

TEST_CASE("covolume_lower_bound examples") {
    Field K = field_sqrt2();
    for (int j = 1; j <= 2; ++j) {
        WedgeVector w;
        w.m = 2;
        w.j = j;
        auto all = subsets(3, j);
        for (const auto& I : all) {
            bool top = true;
            for (int k = 0; k < j; ++k) top = top && I[k] == k + 1;
            w.coords.push_back(top ? K.one() : K.zero());
        }
        CHECK(rel_err(covolume_lower_bound(K, Real(0), KSVector(2, 2), w), Real(8)) < pow2(-240));
    }
    WedgeVector e0;
    e0.m = 1;
    e0.j = 1;
    e0.coords = {K.one(), K.zero()};
    const Real t("1.25");
    CHECK(rel_err(covolume_lower_bound(K, t, KSVector(2, 1), e0), mp::sqrt(Real(8)) * mp::exp(2 * t)) < pow2(-230));
}

TEST_CASE("property: det g_t = 1 and the pure-flow cocycle") {
    Gen g(62);
    for (int k = 0; k < kCases; ++k) {
        Field K = g.coin() ? field_sqrt2() : field_cubic();
        const int m = static_cast<int>(g.integer(1, 3));
        const Real s = g.real(-3, 3), t = g.real(-3, 3);
        KSVector zero(K.degree(), m);
        CHECK(abs(determinant(flow_matrix(t, zero, 0)) - 1) < pow2(-240));
        KSVector y = g.point(K, m + 1, -5, 5);
        auto a = apply_diagonal(s + t, y);
        auto b = apply_diagonal(s, apply_diagonal(t, y));
        for (std::size_t r = 0; r < y.rows(); ++r)
            for (std::size_t c = 0; c < y.cols(); ++c) CHECK(rel_err(a(r, c), b(r, c)) < pow2(-235));
    }
}

TEST_CASE("property: wedge_action equals the matrix exterior power") {
    Gen g(63);
    Field K = field_sqrt2();
    for (int k = 0; k < kCases; ++k) {
        const int j = static_cast<int>(g.integer(1, 2));
        const Real t = g.real(0, 3);
        KSVector x = g.point(K, 2, -2, 2);
        WedgeVector w = random_wedge(g, K, 2, j);
        const auto all = subsets(3, j);
        for (int s = 0; s < 2; ++s) {
            auto got = wedge_action(K, t, x, w, s);
            std::vector<Real> ws;
            for (const auto& c : w.coords) ws.push_back(oracle::conjugates(K, c)[s]);
            auto want = oracle::exterior_power_apply(oracle::flow_times_unipotent(t, {x(s, 0), x(s, 1)}), j, all, ws);
            Real scale = 0;
            for (const auto& v : want) scale = std::max(scale, Real(abs(v)));
            for (std::size_t i = 0; i < all.size(); ++i) CHECK(abs(got[i] - want[i]) <= scale * pow2(-256 + 30));
        }
    }
}

TEST_CASE("property: covolume bound is the content of the wedge image") {
    Gen g(64);
    Field K = field_sqrt2();
    for (int k = 0; k < kCases; ++k) {
        const int j = static_cast<int>(g.integer(1, 2));
        const Real t = g.real(0, 3);
        KSVector x = g.point(K, 2, -1, 1);
        WedgeVector w = random_wedge(g, K, 2, j);
        KSVector img(2, subsets(3, j).size());
        for (int s = 0; s < 2; ++s) {
            auto a = wedge_action(K, t, x, w, s);
            for (std::size_t i = 0; i < a.size(); ++i) img(s, i) = a[i];
        }
        CHECK(covolume_lower_bound(K, t, x, w) <= Real(8) * content(img) * (1 + pow2(-230)));
    }
}

TEST_CASE("property: points of K diverge (easy direction)") {
    Gen g(65);
    Field K = field_sqrt2();
    int tested = 0;
    while (tested < kCases) {
        auto a = g.integral(K, 6);
        auto b = g.nonzero_integral(K, 4);
        if (K.house(b) > 20) continue;
        auto alpha = K.div(a, b);
        if (K.house(alpha) > 3) continue;
        ++tested;
        DiagnosticOptions o;
        o.t_max = 12;
        auto v = singularity_diagnostic(K, tau(K, {alpha}), o);
        CHECK(v.kind == VerdictKind::DivergentEvidence);
    }
}

TEST_CASE("property: systole trace is invariant under integral translation of x") {
    Gen g(66);
    Field K = field_sqrt2();
    for (int k = 0; k < kCases; ++k) {
        KSVector x = g.point(K, 1);
        auto shift = K.embed(g.integral(K, 5));
        KSVector y = x;
        for (int s = 0; s < 2; ++s) y(s, 0) += shift[s];
        std::vector<Real> grid{g.real(0, 4)};
        auto a = systole_trace(K, x, grid), b = systole_trace(K, y, grid);
        CHECK(rel_err(a.values[0], b.values[0]) < pow2(-150));
    }
}
