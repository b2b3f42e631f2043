#pragma once

// Dense univariate polynomials over Q and over F_p.  Coefficients are stored
// lowest degree first; the zero polynomial is the empty vector.

#include "dioph/real.hpp"

#include <utility>
#include <vector>

namespace dioph::poly {

using QPoly = std::vector<Rational>;
using ZPoly = std::vector<Integer>;

template <class P>
void trim(P& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

template <class P>
int degree(const P& p) {
    return static_cast<int>(p.size()) - 1;
}

inline QPoly to_q(const ZPoly& p) {
    QPoly q(p.begin(), p.end());
    trim(q);
    return q;
}

inline QPoly add(const QPoly& a, const QPoly& b) {
    QPoly r(std::max(a.size(), b.size()), Rational(0));
    for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    trim(r);
    return r;
}

inline QPoly sub(const QPoly& a, const QPoly& b) {
    QPoly r(std::max(a.size(), b.size()), Rational(0));
    for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
    trim(r);
    return r;
}

inline QPoly mul(const QPoly& a, const QPoly& b) {
    if (a.empty() || b.empty()) return {};
    QPoly r(a.size() + b.size() - 1, Rational(0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    trim(r);
    return r;
}

inline QPoly scale(const QPoly& a, const Rational& c) {
    QPoly r = a;
    for (auto& x : r) x *= c;
    trim(r);
    return r;
}

/// Euclidean division a = q*b + r with deg r < deg b.
inline std::pair<QPoly, QPoly> divmod(QPoly a, const QPoly& b) {
    if (b.empty()) throw std::domain_error("polynomial division by zero");
    trim(a);
    const int db = degree(b);
    if (degree(a) < db) return {{}, a};
    QPoly q(a.size() - b.size() + 1, Rational(0));
    for (int k = degree(a); k >= db; --k) {
        Rational c = a[k] / b.back();
        q[k - db] = c;
        if (c == 0) continue;
        for (int j = 0; j <= db; ++j) a[k - db + j] -= c * b[j];
    }
    a.resize(db);
    trim(a);
    trim(q);
    return {q, a};
}

inline QPoly rem(const QPoly& a, const QPoly& b) { return divmod(a, b).second; }

inline QPoly monic(QPoly a) {
    trim(a);
    if (a.empty()) return a;
    Rational lc = a.back();
    for (auto& c : a) c /= lc;
    return a;
}

inline QPoly gcd(QPoly a, QPoly b) {
    trim(a);
    trim(b);
    while (!b.empty()) {
        QPoly r = rem(a, b);
        a = std::move(b);
        b = std::move(r);
    }
    return monic(a);
}

inline QPoly derivative(const QPoly& a) {
    if (a.size() <= 1) return {};
    QPoly d(a.size() - 1);
    for (std::size_t i = 1; i < a.size(); ++i) d[i - 1] = a[i] * Rational(static_cast<long>(i));
    trim(d);
    return d;
}

inline Rational eval(const QPoly& a, const Rational& x) {
    Rational r = 0;
    for (auto it = a.rbegin(); it != a.rend(); ++it) r = r * x + *it;
    return r;
}

template <class P>
Real eval_real(const P& a, const Real& x) {
    Real r = 0;
    for (auto it = a.rbegin(); it != a.rend(); ++it) r = r * x + to_real(*it);
    return r;
}

/// Resultant over Q by the Euclidean recurrence
/// res(f, g) = (-1)^(deg f deg g) lc(g)^(deg f - deg r) res(g, r).
inline Rational resultant(QPoly f, QPoly g) {
    trim(f);
    trim(g);
    if (f.empty() || g.empty()) return 0;
    Rational acc = 1;
    while (true) {
        const int n = degree(f);
        const int m = degree(g);
        if (m == 0) {
            Rational c = 1;
            for (int i = 0; i < n; ++i) c *= g[0];
            return acc * c;
        }
        QPoly r = rem(f, g);
        if (r.empty()) return 0;
        const int k = degree(r);
        if ((n * m) % 2 != 0) acc = -acc;
        for (int i = 0; i < n - k; ++i) acc *= g.back();
        f = std::move(g);
        g = std::move(r);
    }
}

/// Discriminant of a monic polynomial.
inline Rational discriminant(const QPoly& f) {
    const int n = degree(f);
    Rational res = resultant(f, derivative(f));
    if (((n * (n - 1)) / 2) % 2 != 0) res = -res;
    return res / f.back();
}

// Sturm sequences and exact sign-change root counting.

inline std::vector<QPoly> sturm_sequence(const QPoly& f) {
    std::vector<QPoly> seq{f, derivative(f)};
    while (!seq.back().empty() && degree(seq.back()) > 0) {
        QPoly r = rem(seq[seq.size() - 2], seq.back());
        if (r.empty()) break;
        seq.push_back(scale(r, Rational(-1)));
    }
    return seq;
}

inline int sign_changes(const std::vector<QPoly>& seq, const Rational& x) {
    int changes = 0;
    int last = 0;
    for (const auto& p : seq) {
        Rational v = eval(p, x);
        int s = v > 0 ? 1 : (v < 0 ? -1 : 0);
        if (s == 0) continue;
        if (last != 0 && s != last) ++changes;
        last = s;
    }
    return changes;
}

inline int sign_changes_at_infinity(const std::vector<QPoly>& seq, bool positive) {
    int changes = 0;
    int last = 0;
    for (const auto& p : seq) {
        if (p.empty()) continue;
        int s = p.back() > 0 ? 1 : -1;
        if (!positive && degree(p) % 2 != 0) s = -s;
        if (last != 0 && s != last) ++changes;
        last = s;
    }
    return changes;
}

/// Number of distinct real roots of a squarefree polynomial.
inline int count_real_roots(const QPoly& f) {
    auto seq = sturm_sequence(f);
    return sign_changes_at_infinity(seq, false) - sign_changes_at_infinity(seq, true);
}

/// Isolating intervals (lo, hi] for the real roots of squarefree f, ascending.
/// An exact rational root r is reported as the degenerate interval (r, r].
inline std::vector<std::pair<Rational, Rational>> isolate_real_roots(const QPoly& f) {
    auto seq = sturm_sequence(f);
    Rational bound = 1;
    for (std::size_t i = 0; i + 1 < f.size(); ++i) {
        Rational a = abs(f[i] / f.back());
        if (a + 1 > bound) bound = a + 1;
    }
    std::vector<std::pair<Rational, Rational>> out;
    std::vector<std::pair<Rational, Rational>> work{{-bound, bound}};
    while (!work.empty()) {
        auto [lo, hi] = work.back();
        work.pop_back();
        int n = sign_changes(seq, lo) - sign_changes(seq, hi);
        if (n == 0) continue;
        if (n == 1) {
            out.emplace_back(lo, hi);
            continue;
        }
        Rational mid = (lo + hi) / 2;
        if (eval(f, mid) == 0) {
            out.emplace_back(mid, mid);
            // Split around the exact root so neither half reports it again.
            Rational eps = (hi - lo) / 1024;
            while (sign_changes(seq, mid - eps) - sign_changes(seq, mid + eps) != 1) eps /= 2;
            work.emplace_back(lo, mid - eps);
            work.emplace_back(mid + eps, hi);
            continue;
        }
        work.emplace_back(mid, hi);
        work.emplace_back(lo, mid);
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.second < b.second; });
    return out;
}

/// Refines an isolating interval to a root at working precision: exact
/// bisection down to 2^-64, then Newton steps in Real, falling back to
/// bisection in Real whenever an iterate leaves the bracket.
inline Real refine_root(const QPoly& f, Rational lo, Rational hi) {
    if (lo == hi) return to_real(lo);
    if (eval(f, hi) == 0) return to_real(hi);
    const int sign_lo = eval(f, lo) > 0 ? 1 : -1;
    const Rational target = Rational(1, 1) / Rational(Integer(1) << 64);
    while (hi - lo > target) {
        Rational mid = (lo + hi) / 2;
        Rational v = eval(f, mid);
        if (v == 0) return to_real(mid);
        if ((v > 0 ? 1 : -1) == sign_lo) lo = mid;
        else hi = mid;
    }
    const QPoly df = derivative(f);
    Real a = to_real(lo), b = to_real(hi);
    Real x = (a + b) / 2;
    for (int it = 0; it < 64; ++it) {
        Real fx = eval_real(f, x);
        if (fx == 0) return x;
        Real dfx = eval_real(df, x);
        Real next = dfx != 0 ? x - fx / dfx : (a + b) / 2;
        if (abs(next - x) <= abs(x) * pow2(-kWorkingBits + 2)) return next;
        if (next <= a || next >= b) next = (a + b) / 2;
        Real fn = eval_real(f, next);
        if (fn == 0) return next;
        if ((fn > 0 ? 1 : -1) == sign_lo) a = next;
        else b = next;
        x = next;
    }
    return x;
}

// Arithmetic in F_p[x] with Integer coefficients reduced to [0, p).

struct ModP {
    Integer p;

    Integer norm(const Integer& a) const {
        Integer r = a % p;
        if (r < 0) r += p;
        return r;
    }

    Integer inv(const Integer& a) const {
        Integer r;
        mpz_invert(r.backend().data(), norm(a).backend().data(), p.backend().data());
        return r;
    }

    ZPoly reduce(const ZPoly& a) const {
        ZPoly r(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) r[i] = norm(a[i]);
        trim(r);
        return r;
    }

    ZPoly sub(const ZPoly& a, const ZPoly& b) const {
        ZPoly r(std::max(a.size(), b.size()), Integer(0));
        for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
        for (std::size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
        return reduce(r);
    }

    ZPoly mul(const ZPoly& a, const ZPoly& b) const {
        if (a.empty() || b.empty()) return {};
        ZPoly r(a.size() + b.size() - 1, Integer(0));
        for (std::size_t i = 0; i < a.size(); ++i)
            for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
        return reduce(r);
    }

    std::pair<ZPoly, ZPoly> divmod(ZPoly a, const ZPoly& b) const {
        a = reduce(a);
        if (b.empty()) throw std::domain_error("division by zero polynomial mod p");
        const int db = degree(b);
        if (degree(a) < db) return {{}, a};
        ZPoly q(a.size() - b.size() + 1, Integer(0));
        Integer lcinv = inv(b.back());
        for (int k = degree(a); k >= db; --k) {
            Integer c = norm(a[k] * lcinv);
            q[k - db] = c;
            if (c == 0) continue;
            for (int j = 0; j <= db; ++j) a[k - db + j] = norm(a[k - db + j] - c * b[j]);
        }
        a.resize(db);
        trim(a);
        trim(q);
        return {q, a};
    }

    ZPoly monic(ZPoly a) const {
        a = reduce(a);
        if (a.empty()) return a;
        Integer li = inv(a.back());
        for (auto& c : a) c = norm(c * li);
        return a;
    }

    ZPoly gcd(ZPoly a, ZPoly b) const {
        a = reduce(a);
        b = reduce(b);
        while (!b.empty()) {
            ZPoly r = divmod(a, b).second;
            a = std::move(b);
            b = std::move(r);
        }
        return monic(a);
    }

    ZPoly derivative(const ZPoly& a) const {
        if (a.size() <= 1) return {};
        ZPoly d(a.size() - 1);
        for (std::size_t i = 1; i < a.size(); ++i) d[i - 1] = a[i] * Integer(static_cast<long>(i));
        return reduce(d);
    }

    /// Product of the distinct monic irreducible factors of a (a != 0).
    ZPoly radical(const ZPoly& a0) const {
        ZPoly a = monic(a0);
        if (degree(a) <= 0) return {Integer(1)};
        ZPoly da = derivative(a);
        if (da.empty()) {
            // a(x) = b(x^p) = b(x)^p over F_p.
            const auto step = static_cast<std::size_t>(p.convert_to<unsigned long>());
            ZPoly b;
            for (std::size_t i = 0; i < a.size(); i += step) b.push_back(a[i]);
            return radical(b);
        }
        ZPoly c = gcd(a, da);
        ZPoly w = divmod(a, c).first;  // squarefree, contains every factor of multiplicity prime to p
        // Factors of c whose multiplicity is divisible by p are missing from w.
        ZPoly rest = c;
        while (true) {
            ZPoly y = gcd(rest, w);
            if (degree(y) <= 0) break;
            rest = divmod(rest, y).first;
            while (true) {
                auto [q, r] = divmod(rest, y);
                if (!r.empty()) break;
                rest = q;
                if (degree(rest) <= 0) break;
            }
        }
        if (degree(rest) > 0) return monic(mul(w, radical(rest)));
        return monic(w);
    }
};

}  // namespace dioph::poly
