#include <doctest.h>

#include "dioph/lll.hpp"
#include "support/gen.hpp"
#include "support/oracles.hpp"

#include <cmath>

using namespace dioph;
using namespace dioph::testing;

namespace {

Real column_norm2(const Matrix<Real>& b, std::size_t c) {
    Real s = 0;
    for (std::size_t r = 0; r < b.rows(); ++r) s += b(r, c) * b(r, c);
    return s;
}

/// Exact squared length of the shortest nonzero vector of the integer
/// lattice spanned by the columns of B, given an upper bound r2: every
/// vector Bz of squared length <= r2 has |z_i| <= sqrt(r2) |row_i(B^-1)|.
long shortest_norm2(const Matrix<long>& B, long r2) {
    const std::size_t n = B.cols();
    Matrix<Rational> Bq(n, n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) Bq(r, c) = B(r, c);
    auto inv = inverse(Bq);
    long R = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0;
        for (std::size_t k = 0; k < n; ++k) {
            double v = to_real(inv(i, k)).convert_to<double>();
            row += v * v;
        }
        R = std::max(R, static_cast<long>(std::ceil(std::sqrt(row * static_cast<double>(r2)))));
    }
    long best = r2;
    oracle::for_each_box(static_cast<int>(n), R, [&](const std::vector<long>& z) {
        long len = 0;
        bool zero = true;
        for (std::size_t r = 0; r < n; ++r) {
            long acc = 0;
            for (std::size_t c = 0; c < n; ++c) acc += B(r, c) * z[c];
            len += acc * acc;
        }
        for (long v : z) zero = zero && v == 0;
        if (!zero) best = std::min(best, len);
    });
    return best;
}

}  // namespace

TEST_CASE("lll: identity stays identity") {
    auto r = lll_reduce(Matrix<Real>::identity(4));
    CHECK(r.basis == Matrix<Real>::identity(4));
    CHECK(r.transform == Matrix<Real>::identity(4));
}

TEST_CASE("lll: nearly dependent 2D basis finds the short vector") {
    Matrix<Real> b{{Real(1), Real("0.999")}, {Real(0), Real("0.001")}};
    auto r = lll_reduce(b);
    // Brute force over the coefficient box [-2000, 2000]^2.
    double best = 1e9;
    for (long a = -2000; a <= 2000; ++a)
        for (long c = -2000; c <= 2000; ++c) {
            if (a == 0 && c == 0) continue;
            double x = a + 0.999 * c, y = 0.001 * c;
            best = std::min(best, std::sqrt(x * x + y * y));
        }
    CHECK(best == doctest::Approx(0.0014142135623730951).epsilon(1e-9));
    Real first = mp::sqrt(column_norm2(r.basis, 0));
    CHECK(first <= Real(best) * mp::sqrt(Real(2)) * (1 + 1e-9));
    CHECK(first < Real("0.0011") * mp::sqrt(Real(2)) * 2);
}

TEST_CASE("lll: dependent columns report NumericalBreakdown") {
    Matrix<Real> b{{Real(1), Real(2)}, {Real(2), Real(4)}};
    CHECK_THROWS_AS(lll_reduce(b), Error);
}

TEST_CASE("property: exact LLL on random integer bases") {
    Gen g(41);
    for (int k = 0; k < kCases; ++k) {
        const std::size_t n = static_cast<std::size_t>(g.integer(2, 5));
        Matrix<Rational> b(n, n);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c) b(r, c) = g.integer(-50, 50);
        if (determinant(b) == 0) continue;
        auto red = lll_reduce(b);
        CHECK(abs(determinant(red.basis)) == abs(determinant(b)));
        CHECK(abs(determinant(red.transform)) == 1);
        CHECK(b * red.transform == red.basis);
        Matrix<Integer> bi(n, n);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c) bi(r, c) = mp::numerator(red.basis(r, c));
        CHECK(oracle::exactly_lll_reduced(bi, Rational(99, 100)));
    }
}

TEST_CASE("property: real LLL first vector within 2^{(n-1)/2} of the shortest") {
    Gen g(42);
    for (int k = 0; k < kCases; ++k) {
        const std::size_t n = static_cast<std::size_t>(g.integer(2, 4));
        Matrix<long> b(n, n);
        Matrix<Real> br(n, n);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c) {
                b(r, c) = g.integer(-30, 30);
                br(r, c) = Real(b(r, c));
            }
        if (abs(determinant(br)) < Real("0.5")) continue;
        auto red = lll_reduce(br);
        CHECK(abs(abs(determinant(red.basis)) - abs(determinant(br))) < Real("1e-40") * abs(determinant(br)));
        Real first2 = column_norm2(red.basis, 0);
        long lam2 = shortest_norm2(b, round_to_integer(first2).convert_to<long>());
        CHECK(first2 <= Real(lam2) * mp::pow(Real(2), Real(n - 1)) * (1 + pow2(-100)));
        // transform is integral and unimodular
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c) CHECK(abs(red.transform(r, c) - mp::round(red.transform(r, c))) == 0);
        CHECK(abs(abs(determinant(red.transform)) - 1) < pow2(-100));
    }
}

TEST_CASE("property: enumerate_ball lists every short vector once per sign pair") {
    Gen g(43);
    for (int k = 0; k < kCases; ++k) {
        const std::size_t n = static_cast<std::size_t>(g.integer(1, 3));
        Matrix<Real> b(n, n);
        Matrix<long> bl(n, n);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c) {
                bl(r, c) = g.integer(-6, 6);
                b(r, c) = Real(bl(r, c));
            }
        if (abs(determinant(b)) < Real("0.5")) continue;
        const long r2 = g.integer(1, 60);
        long found = 0;
        auto st = enumerate_ball(
            b, Real(r2),
            [&](const std::vector<long>& z, Real&) {
                long len = 0;
                for (std::size_t r = 0; r < n; ++r) {
                    long acc = 0;
                    for (std::size_t c = 0; c < n; ++c) acc += bl(r, c) * z[c];
                    len += acc * acc;
                }
                CHECK(len <= r2);
                ++found;
            },
            10'000'000);
        CHECK(st.complete);
        // Brute force through the inverse-row box bound.
        long brute = 0;
        Matrix<Rational> bq(n, n);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c) bq(r, c) = bl(r, c);
        auto inv = inverse(bq);
        long R = 0;
        for (std::size_t i = 0; i < n; ++i) {
            double row = 0;
            for (std::size_t c = 0; c < n; ++c) row += std::pow(to_real(inv(i, c)).convert_to<double>(), 2);
            R = std::max(R, static_cast<long>(std::ceil(std::sqrt(row * r2))));
        }
        oracle::for_each_box(static_cast<int>(n), R, [&](const std::vector<long>& z) {
            long len = 0;
            bool zero = true;
            for (std::size_t r = 0; r < n; ++r) {
                long acc = 0;
                for (std::size_t c = 0; c < n; ++c) acc += bl(r, c) * z[c];
                len += acc * acc;
            }
            for (long v : z) zero = zero && v == 0;
            if (!zero && len <= r2) ++brute;
        });
        CHECK(found * 2 == brute);
    }
}
