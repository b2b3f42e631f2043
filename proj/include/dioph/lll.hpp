#pragma once

// LLL reduction of a column basis and Fincke-Pohst enumeration of lattice
// points in a Euclidean ball.

#include "dioph/error.hpp"
#include "dioph/real.hpp"

#include <cmath>
#include <functional>
#include <vector>

namespace dioph {

inline Real round_nearest(const Real& x) { return mp::round(x); }

inline Rational round_nearest(const Rational& q) {
    Integer n = mp::numerator(q), d = mp::denominator(q);
    Integer f = n / d;
    if (n < 0 && f * d != n) f -= 1;  // floor
    Rational frac = q - Rational(f);
    if (frac > Rational(1, 2) || (frac == Rational(1, 2) && q > 0)) f += 1;
    return Rational(f);
}

template <class T>
struct LllResult {
    Matrix<T> basis;      // reduced columns
    Matrix<T> transform;  // basis = input * transform, integral and unimodular
};

namespace detail {

template <class T>
T dot_columns(const Matrix<T>& b, std::size_t i, std::size_t j) {
    T s = 0;
    for (std::size_t r = 0; r < b.rows(); ++r) s += b(r, i) * b(r, j);
    return s;
}

template <class T>
struct GramSchmidt {
    std::vector<std::vector<T>> mu;
    std::vector<T> bstar;  // squared norms of the orthogonalized vectors
};

template <class T>
GramSchmidt<T> gram_schmidt(const Matrix<T>& b) {
    const std::size_t k = b.cols();
    GramSchmidt<T> gs;
    gs.mu.assign(k, std::vector<T>(k, T(0)));
    gs.bstar.assign(k, T(0));
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            T s = dot_columns(b, i, j);
            for (std::size_t l = 0; l < j; ++l) s -= gs.mu[j][l] * gs.mu[i][l] * gs.bstar[l];
            gs.mu[i][j] = s / gs.bstar[j];
        }
        T s = dot_columns(b, i, i);
        for (std::size_t j = 0; j < i; ++j) s -= gs.mu[i][j] * gs.mu[i][j] * gs.bstar[j];
        if (s <= 0) throw Error(ErrorKind::NumericalBreakdown, "Gram-Schmidt degenerate (dependent columns)");
        gs.bstar[i] = s;
    }
    return gs;
}

template <class T>
bool is_lll_reduced(const Matrix<T>& b, const T& delta, const T& slack) {
    auto gs = gram_schmidt(b);
    for (std::size_t i = 1; i < b.cols(); ++i) {
        for (std::size_t j = 0; j < i; ++j)
            if (abs(gs.mu[i][j]) > T(1) / 2 + slack) return false;
        if (gs.bstar[i] < (delta - gs.mu[i][i - 1] * gs.mu[i][i - 1]) * gs.bstar[i - 1] * (1 - slack)) return false;
    }
    return true;
}

template <class T>
void lll_pass(Matrix<T>& b, Matrix<T>& u, const T& delta) {
    const std::size_t n = b.cols();
    if (n <= 1) return;
    std::vector<std::vector<T>> mu(n, std::vector<T>(n, T(0)));
    std::vector<T> B(n, T(0));
    auto col_sub = [&](Matrix<T>& m, std::size_t k, std::size_t l, const T& q) {
        for (std::size_t r = 0; r < m.rows(); ++r) m(r, k) -= q * m(r, l);
    };
    auto red = [&](std::size_t k, std::size_t l) {
        if (abs(mu[k][l]) <= T(1) / 2) return;
        T q = round_nearest(mu[k][l]);
        col_sub(b, k, l, q);
        col_sub(u, k, l, q);
        mu[k][l] -= q;
        for (std::size_t i = 0; i < l; ++i) mu[k][i] -= q * mu[l][i];
    };
    B[0] = dot_columns(b, 0, 0);
    if (B[0] <= 0) throw Error(ErrorKind::NumericalBreakdown, "zero basis vector");
    std::size_t k = 1, kmax = 0;
    long guard = 0;
    while (k < n) {
        if (++guard > 1'000'000) throw Error(ErrorKind::NumericalBreakdown, "LLL did not terminate");
        if (k > kmax) {
            kmax = k;
            for (std::size_t j = 0; j < k; ++j) {
                T s = dot_columns(b, k, j);
                for (std::size_t i = 0; i < j; ++i) s -= mu[j][i] * mu[k][i] * B[i];
                mu[k][j] = s / B[j];
            }
            T s = dot_columns(b, k, k);
            for (std::size_t j = 0; j < k; ++j) s -= mu[k][j] * mu[k][j] * B[j];
            if (s <= 0) throw Error(ErrorKind::NumericalBreakdown, "Gram-Schmidt degenerate (dependent columns)");
            B[k] = s;
        }
        red(k, k - 1);
        if (B[k] < (delta - mu[k][k - 1] * mu[k][k - 1]) * B[k - 1]) {
            b.swap_columns(k, k - 1);
            u.swap_columns(k, k - 1);
            for (std::size_t j = 0; j + 1 < k; ++j) std::swap(mu[k][j], mu[k - 1][j]);
            T m = mu[k][k - 1];
            T Bn = B[k] + m * m * B[k - 1];
            if (Bn <= 0) throw Error(ErrorKind::NumericalBreakdown, "Gram-Schmidt degenerate in swap");
            mu[k][k - 1] = m * B[k - 1] / Bn;
            B[k] = B[k - 1] * B[k] / Bn;
            B[k - 1] = Bn;
            for (std::size_t i = k + 1; i <= kmax; ++i) {
                T t = mu[i][k];
                mu[i][k] = mu[i][k - 1] - m * t;
                mu[i][k - 1] = t + mu[k][k - 1] * mu[i][k];
            }
            if (k > 1) --k;
        } else {
            for (std::size_t l = k - 1; l-- > 0;) red(k, l);
            ++k;
        }
    }
}

}  // namespace detail

/// LLL with Lovasz parameter delta on the columns of `basis`.  The Real
/// version re-verifies the output from scratch and repeats the pass when
/// accumulated rounding has left the basis unreduced.
template <class T>
LllResult<T> lll_reduce(const Matrix<T>& basis, const T& delta = T(99) / 100) {
    LllResult<T> res{basis, Matrix<T>::identity(basis.cols())};
    if (basis.cols() > basis.rows()) throw Error(ErrorKind::InvalidInput, "more basis vectors than dimensions");
    const T slack = std::is_same_v<T, Rational> ? T(0) : T(pow2(-100));
    for (int pass = 0; pass < 8; ++pass) {
        detail::lll_pass(res.basis, res.transform, delta);
        if (detail::is_lll_reduced(res.basis, delta, slack)) return res;
    }
    throw Error(ErrorKind::NumericalBreakdown, "LLL output failed verification");
}

/// lll_reduce over the exact rationals of the mpfr entries, returned as Real.
inline LllResult<Real> lll_reduce_exact(const Matrix<Real>& B) {
    const std::size_t r = B.rows(), k = B.cols();
    Matrix<Rational> Bq(r, k);
    for (std::size_t a = 0; a < r; ++a)
        for (std::size_t b = 0; b < k; ++b) Bq(a, b) = to_rational(B(a, b));
    auto rq = lll_reduce(Bq);
    LllResult<Real> out{Matrix<Real>(r, k), Matrix<Real>(k, k)};
    for (std::size_t a = 0; a < r; ++a)
        for (std::size_t b = 0; b < k; ++b) out.basis(a, b) = to_real(rq.basis(a, b));
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b) out.transform(a, b) = to_real(rq.transform(a, b));
    return out;
}

/// Real reduction, falling back to the exact one when Gram-Schmidt runs out
/// of precision (bases whose vectors differ by more than ~2^90).
inline LllResult<Real> lll_reduce_robust(const Matrix<Real>& B) {
    try {
        return lll_reduce(B);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::NumericalBreakdown) throw;
        return lll_reduce_exact(B);
    }
}

struct EnumerationStats {
    bool complete = true;
    long nodes = 0;
};

/// Fincke-Pohst enumeration of the nonzero lattice vectors sum z_i b_i with
/// squared length <= radius2, one representative per +-pair (the last
/// nonzero z_i is positive).  Candidates at each level are visited in order
/// of distance from the projected center, so a visitor that lowers radius2
/// prunes the remaining search.  Stops with complete = false once
/// `node_budget` tree nodes have been expanded.
template <class Visitor>
EnumerationStats enumerate_ball(const Matrix<Real>& basis, Real radius2, Visitor&& visit, long node_budget) {
    EnumerationStats st;
    const std::size_t k = basis.cols();
    if (k == 0) return st;
    const auto gs = detail::gram_schmidt(basis);
    const Real slack = 1 + pow2(-200);
    std::vector<long> z(k, 0);
    bool aborted = false;

    auto fits = [&](const Real& total) { return total <= radius2 * slack; };

    std::function<void(std::size_t, const Real&, bool)> rec = [&](std::size_t i, const Real& partial, bool top_zero) {
        if (aborted) return;
        if (++st.nodes > node_budget) {
            st.complete = false;
            aborted = true;
            return;
        }
        Real c = 0;
        for (std::size_t j = i + 1; j < k; ++j) c -= gs.mu[j][i] * Real(z[j]);
        auto take = [&](long v, const Real& total) {
            z[i] = v;
            if (i == 0) {
                if (!(top_zero && v == 0)) visit(z, radius2);
            } else {
                rec(i - 1, total, top_zero && v == 0);
            }
        };
        if (top_zero) {
            // c = 0 here; nonnegative values only.
            for (long v = 0; !aborted; ++v) {
                Real total = partial + Real(v) * Real(v) * gs.bstar[i];
                if (!fits(total)) break;
                take(v, total);
            }
            z[i] = 0;
            return;
        }
        Real cu = mp::ceil(c);
        if (abs(cu) > Real(1e17)) {
            st.complete = false;
            aborted = true;
            return;
        }
        long up = cu.convert_to<long>();
        long down = up - 1;
        bool up_ok = true, down_ok = true;
        while (!aborted && (up_ok || down_ok)) {
            Real du = Real(up) - c, dd = c - Real(down);
            Real tu = partial + du * du * gs.bstar[i];
            Real td = partial + dd * dd * gs.bstar[i];
            if (up_ok && !fits(tu)) up_ok = false;
            if (down_ok && !fits(td)) down_ok = false;
            if (up_ok && (!down_ok || du <= dd)) {
                take(up, tu);
                ++up;
            } else if (down_ok) {
                take(down, td);
                --down;
            }
        }
        z[i] = 0;
    };
    rec(k - 1, Real(0), true);
    return st;
}

}  // namespace dioph
