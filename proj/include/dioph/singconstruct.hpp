#pragma once

// Explicit singular points on graph surfaces
//   phi(u) = (u1, u2, f_1(u), ..., f_{m-2}(u)),  u in a per-place box of K_S^2,
// built by nested boxes around hyperplanes x_k = a/b (k = 1, 2) with
// rational a/b in K.  Every inequality the construction relies on is
// re-checked by verify_certificate from the exact data alone.

#include "dioph/diophantine.hpp"
#include "dioph/error.hpp"
#include "dioph/interval.hpp"
#include "dioph/kslattice.hpp"
#include "dioph/numberfield.hpp"
#include "dioph/real.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace dioph {

// Surfaces.

/// Polynomial in u1, u2 with coefficients in K.
struct BiPoly {
    struct Term {
        int e1 = 0, e2 = 0;
        FieldElement c;
    };
    std::vector<Term> terms;
};

/// Parses sums of products such as "x1*x2", "3/2*x1^2 - [0,1]*x2 + 1".
/// Factors: x1, x2 (optionally ^k), theta, rationals, or [c1,...,cd]
/// coordinates on the integral basis.
inline BiPoly parse_bipoly(const Field& K, const std::string& text) {
    BiPoly P;
    std::size_t i = 0;
    auto skip = [&] {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    };
    auto fail = [&](const std::string& why) {
        throw Error(ErrorKind::InvalidInput, "surface '" + text + "': " + why);
    };
    auto read_int = [&] {
        std::size_t j = i;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
        if (i == j) fail("expected a number at position " + std::to_string(j));
        return text.substr(j, i - j);
    };
    skip();
    if (i == text.size()) fail("empty polynomial");
    bool first = true;
    while (true) {
        skip();
        if (i == text.size()) break;
        int sign = 1;
        if (text[i] == '+' || text[i] == '-') {
            sign = text[i] == '-' ? -1 : 1;
            ++i;
        } else if (!first) {
            fail("expected + or - at position " + std::to_string(i));
        }
        first = false;
        BiPoly::Term t{0, 0, K.from_integer(sign)};
        while (true) {
            skip();
            if (i == text.size()) fail("dangling operator");
            if (text.compare(i, 5, "theta") == 0) {
                t.c = K.mul(t.c, K.theta());
                i += 5;
            } else if (text[i] == 'x' && i + 1 < text.size() && (text[i + 1] == '1' || text[i + 1] == '2')) {
                int which = text[i + 1] - '0';
                i += 2;
                int e = 1;
                skip();
                if (i < text.size() && text[i] == '^') {
                    ++i;
                    skip();
                    e = std::stoi(read_int());
                }
                (which == 1 ? t.e1 : t.e2) += e;
            } else if (text[i] == '[') {
                std::size_t close = text.find(']', i);
                if (close == std::string::npos) fail("unclosed [");
                t.c = K.mul(t.c, K.parse(text.substr(i, close - i + 1)));
                i = close + 1;
            } else if (std::isdigit(static_cast<unsigned char>(text[i]))) {
                std::string num = read_int();
                if (i < text.size() && text[i] == '/') {
                    ++i;
                    num += "/" + read_int();
                }
                t.c = K.scale(t.c, parse_rational(num));
            } else {
                fail(std::string("unexpected '") + text[i] + "'");
            }
            skip();
            if (i < text.size() && text[i] == '*') {
                ++i;
                continue;
            }
            break;
        }
        P.terms.push_back(t);
    }
    return P;
}

/// Per-place box in K_S^2: {lo1, hi1, lo2, hi2}.
using PlaceBox = std::array<Rational, 4>;
using Box = std::vector<PlaceBox>;

inline const Rational& box_lo(const PlaceBox& b, int k) { return b[2 * k]; }
inline const Rational& box_hi(const PlaceBox& b, int k) { return b[2 * k + 1]; }

struct SurfaceSpec {
    std::string graph_text;  // ';'-separated f_1, ..., f_{m-2}; empty for m = 2
    std::string domain_text;
    std::vector<BiPoly> graph;
    Box domain;

    int m() const { return 2 + static_cast<int>(graph.size()); }

    /// `domain` is "lo1,hi1,lo2,hi2" for every place, or one such group per
    /// place separated by ';'.
    static SurfaceSpec parse(const Field& K, const std::string& graph, const std::string& domain = "0,1,0,1") {
        SurfaceSpec S;
        S.graph_text = graph;
        S.domain_text = domain;
        std::size_t start = 0;
        while (start <= graph.size()) {
            std::size_t end = graph.find(';', start);
            if (end == std::string::npos) end = graph.size();
            std::string piece = detail::trim_copy(graph.substr(start, end - start));
            if (!piece.empty()) S.graph.push_back(parse_bipoly(K, piece));
            start = end + 1;
        }
        std::vector<std::string> groups;
        start = 0;
        while (start <= domain.size()) {
            std::size_t end = domain.find(';', start);
            if (end == std::string::npos) end = domain.size();
            groups.push_back(domain.substr(start, end - start));
            start = end + 1;
        }
        const int d = K.degree();
        if (groups.size() != 1 && static_cast<int>(groups.size()) != d)
            throw Error(ErrorKind::InvalidInput, "box needs one group or one per place");
        for (int s = 0; s < d; ++s) {
            auto parts = detail::split_list(groups[groups.size() == 1 ? 0 : s]);
            if (parts.size() != 4) throw Error(ErrorKind::InvalidInput, "box group needs lo1,hi1,lo2,hi2");
            PlaceBox b;
            for (int c = 0; c < 4; ++c) b[c] = parse_rational(parts[c]);
            if (!(b[0] < b[1] && b[2] < b[3])) throw Error(ErrorKind::InvalidInput, "box has empty interior");
            S.domain.push_back(b);
        }
        return S;
    }

    /// True when 1, x1, x2, f_1, ... are linearly dependent over K, so the
    /// whole surface sits in a K-hyperplane and no point is totally
    /// irrational.  Gaussian elimination on the coefficient rows.
    bool in_rational_hyperplane(const Field& K) const {
        std::map<std::pair<int, int>, int> col{{{0, 0}, 0}, {{1, 0}, 1}, {{0, 1}, 2}};
        for (const auto& f : graph)
            for (const auto& t : f.terms) col.emplace(std::make_pair(t.e1, t.e2), static_cast<int>(col.size()));
        std::vector<std::vector<FieldElement>> rows(m() + 1, std::vector<FieldElement>(col.size(), K.zero()));
        for (int r = 0; r < 3; ++r) rows[r][r] = K.one();
        for (std::size_t j = 0; j < graph.size(); ++j)
            for (const auto& t : graph[j].terms) {
                auto& c = rows[3 + j][col.at({t.e1, t.e2})];
                c = K.add(c, t.c);
            }
        std::size_t rank = 0;
        for (std::size_t c = 0; c < col.size() && rank < rows.size(); ++c) {
            std::size_t piv = rank;
            while (piv < rows.size() && rows[piv][c].is_zero()) ++piv;
            if (piv == rows.size()) continue;
            std::swap(rows[rank], rows[piv]);
            const FieldElement inv = K.inv(rows[rank][c]);
            for (std::size_t r = rank + 1; r < rows.size(); ++r) {
                if (rows[r][c].is_zero()) continue;
                const FieldElement f = K.mul(rows[r][c], inv);
                for (std::size_t k = c; k < col.size(); ++k) rows[r][k] = K.sub(rows[r][k], K.mul(f, rows[rank][k]));
            }
            ++rank;
        }
        return rank < rows.size();
    }

    /// f_j(u) in K for rational u (the same pair at one place).
    FieldElement lift(const Field& K, int j, const Rational& u1, const Rational& u2) const {
        FieldElement acc = K.zero();
        for (const auto& t : graph[j].terms) {
            Rational mono = 1;
            for (int e = 0; e < t.e1; ++e) mono *= u1;
            for (int e = 0; e < t.e2; ++e) mono *= u2;
            acc = K.add(acc, K.scale(t.c, mono));
        }
        return acc;
    }
};

// Hyperplanes x_k = a/b.

struct Line {
    int family = 1;  // 1: x1 = a/b (normal e1), 2: x2 = a/b (normal e2)
    FieldElement a, b;

    int coordinate() const { return family - 1; }
    /// sigma(a/b) per place.
    std::vector<Real> values(const Field& K) const {
        auto ea = K.embed(a), eb = K.embed(b);
        std::vector<Real> v(ea.size());
        for (std::size_t s = 0; s < ea.size(); ++s) v[s] = ea[s] / eb[s];
        return v;
    }
    ModuleVector q(const Field& K, int m) const {
        ModuleVector v(m, K.zero());
        v[coordinate()] = b;
        return v;
    }
    FieldElement p(const Field& K) const { return K.neg(a); }
    bool same_as(const Field& K, const Line& o) const {
        return family == o.family && K.sub(K.mul(a, o.b), K.mul(o.a, b)).is_zero();
    }
};

inline Interval fuzzy_interval(const Rational& lo, const Rational& hi) {
    return Interval(Interval::fuzzy(to_real(lo)).lo(), Interval::fuzzy(to_real(hi)).hi());
}

/// Rigorous enclosure of sigma_s(q . phi(u) + p) over u in the box.
inline Interval hyperplane_interval(const Field& K, const SurfaceSpec& S, const ModuleVector& q, const FieldElement& p,
                                    const PlaceBox& box, int s) {
    const Interval X = fuzzy_interval(box[0], box[1]);
    const Interval Y = fuzzy_interval(box[2], box[3]);
    Interval acc = Interval::fuzzy(K.embed(p)[s]);
    for (int i = 0; i < S.m(); ++i) {
        if (q[i].is_zero()) continue;
        Interval f;
        if (i == 0) f = X;
        else if (i == 1) f = Y;
        else {
            f = Interval(Real(0));
            for (const auto& t : S.graph[i - 2].terms)
                f = f + Interval::fuzzy(K.embed(t.c)[s]) * X.pow(t.e1) * Y.pow(t.e2);
        }
        acc = acc + Interval::fuzzy(K.embed(q[i])[s]) * f;
    }
    return acc;
}

namespace detail {

struct RationalHit {
    FieldElement a, b;
    Real phi;
    Real dist;
};

inline Rational dyadic(const Real& x, int bits) {
    return Rational(round_to_integer(mp::ldexp(x, bits)), Integer(1) << bits);
}

/// Largest dyadic with `bits` fractional bits not exceeding q.
inline Rational dyadic_floor(const Rational& q, int bits) {
    Integer scaled = mp::numerator(q) << bits;
    Integer den = mp::denominator(q);
    Integer f = scaled / den;
    if (scaled < 0 && f * den != scaled) f -= 1;
    return Rational(f, Integer(1) << bits);
}

inline Rational dyadic_floor(const Real& x, int bits) {
    return Rational(floor_to_integer(mp::ldexp(x, bits)), Integer(1) << bits);
}

/// One hit per K-rational (least Phi, b sign-normalized), keeping those
/// with Phi above floor.
inline std::vector<RationalHit> distinct_above(const Field& K, std::vector<RationalHit> all, const Real& floor) {
    const Real tie = pow2(-200);
    auto canonical_sign = [&](RationalHit& h) {
        for (const auto& v : h.b.coords)
            if (v != 0) {
                if (v < 0) {
                    h.a = K.neg(h.a);
                    h.b = K.neg(h.b);
                }
                return;
            }
    };
    std::vector<RationalHit> hits;
    for (auto& h : all) {
        canonical_sign(h);
        bool merged = false;
        for (auto& g : hits)
            if (K.sub(K.mul(h.a, g.b), K.mul(g.a, h.b)).is_zero()) {
                if (h.phi < g.phi * (1 - tie) || (h.phi <= g.phi * (1 + tie) && h.b.coords < g.b.coords)) g = h;
                merged = true;
                break;
            }
        if (!merged) hits.push_back(std::move(h));
    }
    std::vector<RationalHit> out;
    for (auto& h : hits)
        if (h.phi > floor * (1 + tie)) out.push_back(std::move(h));
    return out;
}

/// Pairs (a, b) in O_K^2 with house(b) <= T, Phi(b) > floor and
/// sigma(a/b) in the open interval (lo_s, hi_s) at every place, one per
/// K-rational: the representative of least Phi (all representatives of a
/// hit with Phi(b) <= T also have house <= T, so the comparison is
/// complete).  dist is max_s |sigma(a/b) - center_s| / scale_s.
///
/// The search enumerates the parallelotope |sigma(b)| <= T,
/// |sigma(a) - c_s sigma(b)| <= r_s T (c_s, r_s the midpoint and radius of
/// the interval), which contains every solution.
inline std::vector<RationalHit> rationals_in_box(const Field& K, const Phi& phi, const std::vector<Real>& lo,
                                                 const std::vector<Real>& hi, const std::vector<Real>& center,
                                                 const std::vector<Real>& scale, const Real& floor, const Real& T,
                                                 long budget = 2'000'000) {
    const int d = K.degree();
    const int N = 2 * d;
    const auto& E = K.embed_matrix();
    Matrix<Real> B(N, N);
    for (int s = 0; s < d; ++s) {
        const Real c = (lo[s] + hi[s]) / 2, r = (hi[s] - lo[s]) / 2;
        for (int j = 0; j < d; ++j) {
            B(s, d + j) = E(s, j) / T;
            B(d + s, j) = E(s, j) / (r * T);
            B(d + s, d + j) = -c * E(s, j) / (r * T);
        }
    }
    const auto red = lll_reduce(B);
    const Real slack = 1 + pow2(-200);
    std::vector<RationalHit> all;
    auto st = enumerate_ball(
        red.basis, Real(N),
        [&](const std::vector<long>& zr, Real&) {
            std::vector<Real> zrr(zr.begin(), zr.end());
            for (const auto& y : red.basis * zrr)
                if (abs(y) > slack) return;
            std::vector<long> a(d), b(d);
            for (int i = 0; i < N; ++i) {
                Real acc = 0;
                for (int k = 0; k < N; ++k)
                    if (zr[k] != 0) acc += red.transform(i, k) * Real(zr[k]);
                long v = round_to_integer(acc).convert_to<long>();
                (i < d ? a[i] : b[i - d]) = v;
            }
            FieldElement be = K.from_integers(b);
            if (be.is_zero()) return;
            FieldElement ae = K.from_integers(a);
            auto eb = K.embed(be);
            std::vector<Real> ea(d, Real(0));
            for (int s = 0; s < d; ++s)
                for (int j = 0; j < d; ++j)
                    if (a[j] != 0) ea[s] += Real(a[j]) * E(s, j);
            Real dist = 0;
            for (int s = 0; s < d; ++s) {
                if (abs(eb[s]) > T * slack) return;
                Real q = ea[s] / eb[s];
                if (!(q > lo[s] && q < hi[s])) return;
                dist = std::max(dist, Real(abs(q - center[s]) / scale[s]));
            }
            Matrix<Real> qrow(d, 1);
            for (int s = 0; s < d; ++s) qrow(s, 0) = eb[s];
            all.push_back({ae, be, phi.value_rows(qrow), dist});
        },
        budget);
    if (!st.complete) throw Error(ErrorKind::BudgetExceeded, "rational search budget exhausted");
    return distinct_above(K, std::move(all), floor);
}

/// Lower-triangular column Hermite form H = G U (U unimodular, not kept).
inline Matrix<Integer> lower_hermite(Matrix<Integer> G) {
    const std::size_t n = G.rows(), c = G.cols();
    for (std::size_t r = 0; r < n && r < c; ++r) {
        while (true) {
            std::size_t piv = c;
            for (std::size_t j = r; j < c; ++j)
                if (G(r, j) != 0 && (piv == c || abs(G(r, j)) < abs(G(r, piv)))) piv = j;
            if (piv == c) break;
            bool done = true;
            for (std::size_t j = r; j < c; ++j) {
                if (j == piv || G(r, j) == 0) continue;
                Integer q = G(r, j) / G(r, piv);
                for (std::size_t k = 0; k < n; ++k) G(k, j) -= q * G(k, piv);
                if (G(r, j) != 0) done = false;
            }
            if (done) {
                G.swap_columns(piv, r);
                if (G(r, r) < 0)
                    for (std::size_t k = 0; k < n; ++k) G(k, r) = -G(k, r);
                break;
            }
        }
    }
    return G;
}

/// Same contract as rationals_in_box, for an interval that excludes the
/// anchor a'/b' at every place.  Writing c = a b' - a' b, the targets have
/// sigma(c) = sigma(a/b - a'/b') sigma(b) sigma(b'), which is O(1) near the
/// optimum, while the pairs (lambda a', lambda b') that crowd the plain
/// parallelotope all have c = 0.  So c is enumerated in its small box and b
/// runs over the coset {b : a' b + c in b' O_K} inside the window.
inline std::vector<RationalHit> anchored_rationals(const Field& K, const Phi& phi, const Line& anchor,
                                                   const std::vector<Real>& lo, const std::vector<Real>& hi,
                                                   const std::vector<Real>& center, const std::vector<Real>& scale,
                                                   const Real& floor, const Real& T, long budget = 20'000'000) {
    const int d = K.degree();
    const auto& E = K.embed_matrix();
    const auto ea = K.embed(anchor.a), eb = K.embed(anchor.b);
    std::vector<Real> e1(d), e2(d), C(d);
    for (int s = 0; s < d; ++s) {
        Real r = ea[s] / eb[s];
        e1[s] = lo[s] - r;
        e2[s] = hi[s] - r;
        if (!(e1[s] > 0 || e2[s] < 0)) throw Error(ErrorKind::InvalidInput, "anchor inside the search interval");
        C[s] = std::max(Real(abs(e1[s])), Real(abs(e2[s]))) * T * abs(eb[s]);
    }

    // Lattice of (c, b) over all (a, b) in O_K^2, in Hermite form: the first
    // d columns carry c, the last d span {b : (0, b) in the lattice}.
    auto to_int = [](const Matrix<Rational>& M) {
        Matrix<Integer> R(M.rows(), M.cols());
        for (std::size_t i = 0; i < M.rows(); ++i)
            for (std::size_t j = 0; j < M.cols(); ++j) R(i, j) = mp::numerator(M(i, j));
        return R;
    };
    const Matrix<Integer> Ma = to_int(K.mult_matrix(anchor.a)), Mb = to_int(K.mult_matrix(anchor.b));
    Matrix<Integer> G(2 * d, 2 * d);
    for (int j = 0; j < d; ++j)
        for (int r = 0; r < d; ++r) {
            G(r, j) = Mb(r, j);
            G(r, d + j) = -Ma(r, j);
            G(d + r, d + j) = r == j ? 1 : 0;
        }
    const Matrix<Integer> H = lower_hermite(G);
    Matrix<Real> Y0(d, d);  // embedded basis of the b-lattice
    for (int s = 0; s < d; ++s)
        for (int j = 0; j < d; ++j) {
            Real acc = 0;
            for (int r = 0; r < d; ++r) acc += E(s, r) * Real(H(d + r, d + j));
            Y0(s, j) = acc;
        }
    const auto red0 = lll_reduce(Y0);
    Matrix<Integer> B0(d, d);  // reduced b-lattice basis, integer coordinates
    for (int r = 0; r < d; ++r)
        for (int j = 0; j < d; ++j) {
            Integer acc = 0;
            for (int k = 0; k < d; ++k) acc += H(d + r, d + k) * round_to_integer(red0.transform(k, j));
            B0(r, j) = acc;
        }
    const Matrix<Real> Minv = inverse(red0.basis);
    std::vector<std::vector<double>> Md(d, std::vector<double>(d)), Ed(d, std::vector<double>(d));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            Md[i][j] = Minv(i, j).convert_to<double>();
            Ed[i][j] = E(i, j).convert_to<double>();
        }

    // Integer forms: b = b0 + B0 z in long arithmetic, a = adj(b') (c + a' b) / N(b').
    auto to_long = [](const Integer& v) {
        if (abs(v) > Integer(1) << 52) throw Error(ErrorKind::Overflow, "rational search coordinates too large");
        return v.convert_to<long>();
    };
    std::vector<std::vector<long>> B0l(d, std::vector<long>(d));
    for (int r = 0; r < d; ++r)
        for (int j = 0; j < d; ++j) B0l[r][j] = to_long(B0(r, j));

    struct Candidate {
        std::vector<long> c, b;
        double phi;
    };
    std::vector<Candidate> cands;
    long work = 0;
    auto phi_double = [&](const std::vector<double>& y) {
        double v = phi.kind == Phi::Kind::House ? 0.0 : 1.0;
        for (double x : y) v = phi.kind == Phi::Kind::House ? std::max(v, std::abs(x)) : v * std::max(1.0, std::abs(x));
        return v;
    };
    auto try_c = [&](const std::vector<Integer>& c) {
        // t = H_c^{-1} c by forward substitution.
        std::vector<Integer> t(d);
        for (int r = 0; r < d; ++r) {
            Integer acc = c[r];
            for (int j = 0; j < r; ++j) acc -= H(r, j) * t[j];
            if (acc % H(r, r) != 0) return;
            t[r] = acc / H(r, r);
        }
        std::vector<long> b0(d, 0), cl(d);
        for (int r = 0; r < d; ++r) {
            Integer acc = 0;
            for (int j = 0; j < d; ++j) acc += H(d + r, j) * t[j];
            b0[r] = to_long(acc);
            cl[r] = to_long(c[r]);
        }
        std::vector<double> sc(d, 0.0), ylo(d), yhi(d), y0(d, 0.0);
        for (int s = 0; s < d; ++s)
            for (int j = 0; j < d; ++j) sc[s] += Ed[s][j] * static_cast<double>(cl[j]);
        for (int s = 0; s < d; ++s) {
            // sigma(b) in sigma(c) / (sigma(b') (e1, e2)), clipped to [-T, T].
            Real u = Real(sc[s]) / (eb[s] * e1[s]), v = Real(sc[s]) / (eb[s] * e2[s]);
            Real l = std::max(std::min(u, v), Real(-T)), h = std::min(std::max(u, v), Real(T));
            if (l > h) return;
            double pad = 1e-9 * (std::abs(l.convert_to<double>()) + std::abs(h.convert_to<double>()) + 1);
            ylo[s] = l.convert_to<double>() - pad;
            yhi[s] = h.convert_to<double>() + pad;
            for (int j = 0; j < d; ++j) y0[s] += Ed[s][j] * static_cast<double>(b0[j]);
        }
        std::vector<long> zlo(d), zhi(d), z(d), b(d);
        for (int i = 0; i < d; ++i) {
            double l = 0, h = 0;
            for (int s = 0; s < d; ++s) {
                double p = Md[i][s] * (ylo[s] - y0[s]), q = Md[i][s] * (yhi[s] - y0[s]);
                l += std::min(p, q);
                h += std::max(p, q);
            }
            zlo[i] = static_cast<long>(std::ceil(l - 1e-6));
            zhi[i] = static_cast<long>(std::floor(h + 1e-6));
            if (zlo[i] > zhi[i]) return;
        }
        z = zlo;
        std::vector<double> y(d);
        while (true) {
            if (++work > budget) throw Error(ErrorKind::BudgetExceeded, "rational search budget exhausted");
            for (int r = 0; r < d; ++r) {
                b[r] = b0[r];
                for (int j = 0; j < d; ++j) b[r] += B0l[r][j] * z[j];
            }
            bool inside = true;
            for (int s = 0; s < d && inside; ++s) {
                y[s] = 0;
                for (int j = 0; j < d; ++j) y[s] += Ed[s][j] * static_cast<double>(b[j]);
                if (y[s] < ylo[s] || y[s] > yhi[s]) inside = false;
            }
            if (inside) cands.push_back({cl, b, phi_double(y)});
            int j = 0;
            while (j < d && z[j] == zhi[j]) z[j] = zlo[j], ++j;
            if (j == d) break;
            ++z[j];
        }
    };

    const Real slack = 1 + pow2(-200);
    Matrix<Real> Bc(d, d);
    for (int s = 0; s < d; ++s)
        for (int j = 0; j < d; ++j) Bc(s, j) = E(s, j) / C[s];
    const auto redc = lll_reduce(Bc);
    auto st = enumerate_ball(
        redc.basis, Real(d),
        [&](const std::vector<long>& zr, Real&) {
            std::vector<Real> zrr(zr.begin(), zr.end());
            for (const auto& y : redc.basis * zrr)
                if (abs(y) > slack) return;
            std::vector<Integer> c(d);
            for (int i = 0; i < d; ++i) {
                Real acc = 0;
                for (int k = 0; k < d; ++k)
                    if (zr[k] != 0) acc += redc.transform(i, k) * Real(zr[k]);
                c[i] = round_to_integer(acc);
            }
            try_c(c);
            for (auto& v : c) v = -v;
            try_c(c);
        },
        budget);
    if (!st.complete) throw Error(ErrorKind::BudgetExceeded, "rational search budget exhausted");

    // Exact pass in increasing Phi.  Every representative of a rational with
    // smaller Phi comes earlier, so the first time a rational is met is its
    // least-Phi representative; stop once the least admissible Phi (and its
    // ties) is settled.
    std::sort(cands.begin(), cands.end(), [](const Candidate& x, const Candidate& y) { return x.phi < y.phi; });
    const Real tie = pow2(-200);
    std::vector<RationalHit> seen, out;
    for (const auto& cd : cands) {
        if (!out.empty() && cd.phi > out.front().phi.convert_to<double>() * (1 + 1e-6)) break;
        FieldElement be = K.from_integers(cd.b), ce = K.from_integers(cd.c);
        if (be.is_zero()) continue;
        FieldElement ae = K.div(K.add(ce, K.mul(anchor.a, be)), anchor.b);
        if (!ae.is_integral()) throw Error(ErrorKind::NumericalBreakdown, "coset solution is not integral");
        auto sb = K.embed(be), sa = K.embed(ae);
        Real dist = 0;
        bool ok = true;
        for (int s = 0; s < d && ok; ++s) {
            Real q = sa[s] / sb[s];
            if (abs(sb[s]) > T * slack || !(q > lo[s] && q < hi[s])) ok = false;
            else dist = std::max(dist, Real(abs(q - center[s]) / scale[s]));
        }
        if (!ok) continue;
        Matrix<Real> qrow(d, 1);
        for (int s = 0; s < d; ++s) qrow(s, 0) = sb[s];
        RationalHit h{ae, be, phi.value_rows(qrow), dist};
        bool repeat = false;
        for (const auto& g : seen)
            if (K.sub(K.mul(h.a, g.b), K.mul(g.a, h.b)).is_zero()) repeat = true;
        if (repeat) continue;
        seen.push_back(h);
        if (h.phi > floor * (1 + tie)) out.push_back(h);
    }
    return distinct_above(K, std::move(out), floor);
}

inline bool hit_before(const RationalHit& x, const RationalHit& y) {
    const Real tie = pow2(-200);
    if (x.phi < y.phi * (1 - tie)) return true;
    if (y.phi < x.phi * (1 - tie)) return false;
    if (x.dist < y.dist * (1 - tie)) return true;
    if (y.dist < x.dist * (1 - tie)) return false;
    if (x.b.coords != y.b.coords) return x.b.coords < y.b.coords;
    return x.a.coords < y.a.coords;
}

/// Hits sorted by (Phi, distance, coordinates), from the first doubling
/// level T at which `need` hits have Phi <= T; empty once T passes `cap`.
inline std::vector<RationalHit> ranked_rationals(const Field& K, const Phi& phi, const std::vector<Real>& lo,
                                                 const std::vector<Real>& hi, const std::vector<Real>& center,
                                                 const std::vector<Real>& scale, const Real& floor, const Real& cap,
                                                 const std::function<bool(const RationalHit&)>& reject = {},
                                                 std::size_t need = 1, const std::optional<Line>& anchor = {}) {
    for (Real T = std::max(Real(2), floor * Real("1.5")); T <= cap; T *= 2) {
        auto hits = anchor ? anchored_rationals(K, phi, *anchor, lo, hi, center, scale, floor, T)
                           : rationals_in_box(K, phi, lo, hi, center, scale, floor, T);
        std::vector<RationalHit> keep;
        for (auto& h : hits)
            if (h.phi <= T * (1 + pow2(-200)) && !(reject && reject(h))) keep.push_back(std::move(h));
        if (keep.size() < need) continue;
        std::sort(keep.begin(), keep.end(), hit_before);
        return keep;
    }
    return {};
}

}  // namespace detail

/// A member of the given family whose coordinate lies within `tol` of
/// target_s at every place, with the least Phi(q) >= min_phi (searched up to
/// Phi <= cap).
inline std::optional<Line> nearest_line(const Field& K, int family, const std::vector<Real>& target, const Real& tol,
                                        const Phi& phi = {}, const Real& min_phi = 0, const Real& cap = 4096) {
    if (family != 1 && family != 2) throw Error(ErrorKind::InvalidInput, "family must be 1 or 2");
    const int d = K.degree();
    if (static_cast<int>(target.size()) != d) throw Error(ErrorKind::InvalidInput, "need one target per place");
    std::vector<Real> lo(d), hi(d), scale(d, tol);
    for (int s = 0; s < d; ++s) {
        lo[s] = target[s] - tol;
        hi[s] = target[s] + tol;
    }
    // floor is exclusive; nudge it below min_phi.
    Real floor = min_phi * (1 - pow2(-100));
    auto hits = detail::ranked_rationals(K, phi, lo, hi, target, scale, floor, cap);
    if (hits.empty()) return std::nullopt;
    return Line{family, hits[0].a, hits[0].b};
}

// The construction.

struct StageCertificate {
    int index = 0;
    Line line;
    Real phi;       // Phi(q_i)
    Real zeta_phi;  // zeta(Phi(q_i))
    Box box;        // U_i
    Real e_bound = 0;   // max over places of the enclosure of |q_{i-1}.phi(U_i) + p_{i-1}|
    Real e_margin = 0;  // zeta_phi / e_bound; 0 when the condition is vacuous
};

struct ConstructOptions {
    int stages = 5;
    Zeta zeta;
    Phi phi;
    unsigned long seed = 0;  // picks among the admissible stage-1 rationals
    int dyadic_bits = 224;
    Rational shrink = Rational(1, 4);  // max ratio of box widths between stages
    Real search_cap = 1e6;             // largest Phi(q_i) searched per stage
};

struct ConstructionOutput {
    Field field;
    SurfaceSpec surface;
    Zeta zeta;
    Phi phi;
    unsigned long seed = 0;
    int dyadic_bits = 224;
    std::vector<StageCertificate> stages;
    std::vector<std::array<Rational, 2>> base;  // (u1, u2) per place
    ExactPoint point;                           // phi(u) in K_S^m
    std::vector<std::string> warnings;
};

inline Box stage_box(const ConstructionOutput& out, int i) { return i == 0 ? out.surface.domain : out.stages[i - 1].box; }

inline ExactPoint lift_point(const Field& K, const SurfaceSpec& S, const std::vector<std::array<Rational, 2>>& base) {
    ExactPoint x;
    for (const auto& u : base) {
        std::vector<FieldElement> row{K.from_rational(u[0]), K.from_rational(u[1])};
        for (int j = 0; j + 2 < S.m(); ++j) row.push_back(S.lift(K, j, u[0], u[1]));
        x.rows.push_back(std::move(row));
    }
    return x;
}

/// Stage i uses the family normal to e2 when i is odd and e1 when even.
/// Line i is the admissible rational of least Phi above Phi(q_{i-1}) whose
/// coordinate lies inside U_{i-1} (away from the edges by 1/32 of the
/// width) at every place.  In that coordinate U_i is a dyadic interval
/// centered on line i.  In the other coordinate it sits at offsets
/// [w/16, w] from line i-1, where w is the largest dyadic keeping the
/// enclosure of |q_{i-1}.phi(u) + p_{i-1}| below zeta(Phi(q_i))/1.1.  Wide
/// offsets matter: line i+1 must fall in that window at every place, which
/// forces |N(b_{i+1})| >= 1 / (prod_s window_s * |N(b_{i-1})|).
inline ConstructionOutput construct_singular(const Field& K, const SurfaceSpec& S, const ConstructOptions& opt = {}) {
    if (opt.stages < 1) throw Error(ErrorKind::InvalidInput, "need at least one stage");
    if (opt.dyadic_bits < 64 || opt.dyadic_bits > kWorkingBits - 24)
        throw Error(ErrorKind::InvalidInput, "dyadic_bits out of range");
    if (!(opt.shrink > 0 && opt.shrink < Rational(1, 2))) throw Error(ErrorKind::InvalidInput, "shrink must lie in (0, 1/2)");
    if (S.in_rational_hyperplane(K))
        throw Error(ErrorKind::InvalidInput, "surface lies in a K-rational hyperplane; no point is totally irrational");
    const int d = K.degree();
    const int m = S.m();
    const int P = opt.dyadic_bits;
    if (static_cast<int>(S.domain.size()) != d) throw Error(ErrorKind::InvalidInput, "domain box has wrong place count");
    const Rational resolution(Integer(1), Integer(1) << (P - 8));
    auto stuck = [](int i, const std::string& why) {
        return Error(ErrorKind::PrecisionExhausted, "stage " + std::to_string(i) + ": " + why);
    };

    ConstructionOutput out{K, S, opt.zeta, opt.phi, opt.seed, P, {}, {}, {}, {}};
    for (int i = 1; i <= opt.stages; ++i) {
        const int family = (i % 2 == 1) ? 2 : 1;
        const int k = family - 1, kp = 1 - k;
        const Box prev = stage_box(out, i - 1);
        std::vector<Real> lo(d), hi(d), mid(d), scale(d);
        for (int s = 0; s < d; ++s) {
            Rational L = box_hi(prev[s], k) - box_lo(prev[s], k);
            if (L < resolution) throw stuck(i, "box narrower than the dyadic resolution");
            lo[s] = to_real(Rational(box_lo(prev[s], k) + L / 32));
            hi[s] = to_real(Rational(box_hi(prev[s], k) - L / 32));
            mid[s] = to_real(Rational((box_lo(prev[s], k) + box_hi(prev[s], k)) / 2));
            scale[s] = to_real(L);
        }
        const Real floor = i == 1 ? Real(0) : out.stages.back().phi;
        auto reject = [&](const detail::RationalHit& h) {
            Line cand{family, h.a, h.b};
            for (const auto& st : out.stages)
                if (st.line.same_as(K, cand)) return true;
            return false;
        };
        const std::size_t need = i == 1 ? static_cast<std::size_t>(opt.seed) + 1 : 1;
        // From stage 3 on, the window in this coordinate hugs line i-2.
        std::optional<Line> anchor;
        if (i >= 3) anchor = out.stages[i - 3].line;
        auto hits =
            detail::ranked_rationals(K, opt.phi, lo, hi, mid, scale, floor, opt.search_cap, reject, need, anchor);
        if (hits.empty())
            throw Error(ErrorKind::StageStuck, "stage " + std::to_string(i) + ": no admissible rational with Phi <= " +
                                                   format_real(opt.search_cap, 10));
        const auto& hit = hits[need - 1];

        StageCertificate st;
        st.index = i;
        st.line = Line{family, hit.a, hit.b};
        st.phi = opt.phi.value(K, st.line.q(K, m));
        st.zeta_phi = opt.zeta(st.phi);
        if (!(st.zeta_phi > 0)) throw stuck(i, "zeta underflows");
        const auto vals = st.line.values(K);
        st.box.resize(d);
        for (int s = 0; s < d; ++s) {
            const Rational& l0 = box_lo(prev[s], k);
            const Rational& l1 = box_hi(prev[s], k);
            Rational c = detail::dyadic(vals[s], P);
            Rational h = std::min(Rational(opt.shrink * (l1 - l0) / 2), Rational(std::min(c - l0, l1 - c) / 2));
            h = detail::dyadic_floor(h, P);
            if (h < resolution) throw stuck(i, "line too close to the box edge");
            st.box[s][2 * k] = c - h;
            st.box[s][2 * k + 1] = c + h;
            if (i == 1) {
                Rational Lp = box_hi(prev[s], kp) - box_lo(prev[s], kp);
                Rational cm = (box_lo(prev[s], kp) + box_hi(prev[s], kp)) / 2;
                st.box[s][2 * kp] = cm - Lp * 7 / 16;
                st.box[s][2 * kp + 1] = cm + Lp * 7 / 16;
            }
        }
        if (i >= 2) {
            const Line& pl = out.stages.back().line;
            const auto pvals = pl.values(K);
            const auto eb = K.embed(pl.b);
            const auto q_prev = pl.q(K, m);
            const auto p_prev = pl.p(K);
            for (int s = 0; s < d; ++s) {
                Rational cp = detail::dyadic(pvals[s], P);
                Rational hp = (box_hi(prev[s], kp) - box_lo(prev[s], kp)) / 2;
                Rational w = std::min(detail::dyadic_floor(Rational(2 * opt.shrink * hp), P),
                                      detail::dyadic_floor(st.zeta_phi / (Real("1.12") * abs(eb[s])), P));
                while (true) {
                    if (w / 16 < resolution) throw stuck(i, "offset below the dyadic resolution");
                    st.box[s][2 * kp] = cp + w / 16;
                    st.box[s][2 * kp + 1] = cp + w;
                    Real bound = hyperplane_interval(K, S, q_prev, p_prev, st.box[s], s).mag();
                    if (bound * Real("1.1") <= st.zeta_phi) {
                        st.e_bound = std::max(st.e_bound, bound);
                        break;
                    }
                    w /= 2;
                }
            }
            st.e_margin = st.zeta_phi / st.e_bound;
        }
        out.stages.push_back(std::move(st));
    }

    // The point: within 2^{-(P-32)} of the last line, near the middle of the
    // last box in the other coordinate.  The two offsets keep the coordinates
    // off rationals of small height and their ratio has height 2^120, so no
    // short relation ties the coordinates together (line value and midpoint
    // can both be 1/2).
    const auto& last = out.stages.back();
    const int k = last.line.coordinate(), kp = 1 - k;
    const auto vals = last.line.values(K);
    const Rational offset(Integer(1), Integer(1) << (P - 32));
    const Rational offset_kp = offset + Rational(Integer(1), Integer(1) << (P + 88));
    for (int s = 0; s < d; ++s) {
        std::array<Rational, 2> u;
        u[k] = detail::dyadic(vals[s], P) + offset;
        u[kp] = (box_lo(last.box[s], kp) + box_hi(last.box[s], kp)) / 2 + offset_kp;
        if (!(u[k] < box_hi(last.box[s], k))) throw stuck(opt.stages, "last box too small for the final offset");
        out.base.push_back(u);
    }
    out.point = lift_point(K, S, out.base);
    return out;
}

// Verification.

struct VerificationCheck {
    std::string name;  // "a".."e", or "point-..." for the final point
    int stage = 0;
    bool ok = true;
    std::string detail;
};

struct VerificationReport {
    std::vector<VerificationCheck> checks;
    std::vector<std::string> warnings;
    IrrationalityVerdict irrationality;
    bool ok() const {
        for (const auto& c : checks)
            if (!c.ok) return false;
        return true;
    }
    const VerificationCheck* first_failure() const {
        for (const auto& c : checks)
            if (!c.ok) return &c;
        return nullptr;
    }
    bool failed(const std::string& name) const {
        for (const auto& c : checks)
            if (!c.ok && c.name == name) return true;
        return false;
    }
};

struct VerifyOptions {
    int sample_density = 5;     // grid points per axis for the sampled (e) cross-check
    bool eta_cross_check = true;
    bool irrationality = true;
    long budget = 5'000'000;
};

/// Re-derives every stage inequality from the exact stage data.
inline VerificationReport verify_certificate(const ConstructionOutput& c, const VerifyOptions& opt = {}) {
    const Field& K = c.field;
    const SurfaceSpec& S = c.surface;
    const int d = K.degree();
    const int m = S.m();
    const int n = static_cast<int>(c.stages.size());
    VerificationReport rep;
    auto add = [&](const std::string& name, int stage, bool ok, const std::string& detail) {
        rep.checks.push_back({name, stage, ok, detail});
    };
    auto tag = [](int i) { return "stage " + std::to_string(i) + ": "; };

    std::vector<Line> lines;
    std::vector<Real> phis;
    for (int i = 1; i <= n; ++i) {
        Line ln = c.stages[i - 1].line;
        if (ln.b.is_zero()) throw Error(ErrorKind::InvalidInput, tag(i) + "b = 0");
        if (!ln.a.is_integral() || !ln.b.is_integral()) throw Error(ErrorKind::InvalidInput, tag(i) + "non-integral line");
        Integer g = 0;
        for (const auto& v : ln.a.coords) g = mp::gcd(g, Integer(abs(mp::numerator(v))));
        for (const auto& v : ln.b.coords) g = mp::gcd(g, Integer(abs(mp::numerator(v))));
        if (g > 1) {
            rep.warnings.push_back("NotPrimitive: " + tag(i) + "(p, q) divided by " + g.str());
            ln.a = K.scale(ln.a, Rational(1, g));
            ln.b = K.scale(ln.b, Rational(1, g));
        }
        lines.push_back(ln);
        phis.push_back(c.phi.value(K, ln.q(K, m)));
    }
    if (static_cast<int>(c.base.size()) != d || static_cast<int>(c.point.rows.size()) != d)
        throw Error(ErrorKind::InvalidInput, "point has wrong place count");

    for (int i = 1; i <= n; ++i) {
        const auto& st = c.stages[i - 1];
        const Box prev = stage_box(c, i - 1);
        const Box& U = st.box;
        if (static_cast<int>(U.size()) != d) throw Error(ErrorKind::InvalidInput, tag(i) + "box has wrong place count");

        // (b) Phi strictly increasing.
        if (i >= 2)
            add("b", i, phis[i - 1] > phis[i - 2],
                tag(i) + "Phi(q_i) = " + format_real(phis[i - 1], 12) + " vs Phi(q_{i-1}) = " + format_real(phis[i - 2], 12));

        // (e) |q_{i-1}.phi(u) + p_{i-1}| < zeta(Phi(q_i)) on U_i.
        if (i >= 2) {
            const Real z = c.zeta(phis[i - 1]);
            const auto q = lines[i - 2].q(K, m);
            const auto p = lines[i - 2].p(K);
            Real worst = 0;
            bool sampled_ok = true;
            for (int s = 0; s < d; ++s) {
                worst = std::max(worst, hyperplane_interval(K, S, q, p, U[s], s).mag());
                const int g = std::max(2, opt.sample_density);
                for (int a = 0; a < g; ++a)
                    for (int b = 0; b < g; ++b) {
                        PlaceBox pt;
                        pt[0] = pt[1] = box_lo(U[s], 0) + (box_hi(U[s], 0) - box_lo(U[s], 0)) * a / (g - 1);
                        pt[2] = pt[3] = box_lo(U[s], 1) + (box_hi(U[s], 1) - box_lo(U[s], 1)) * b / (g - 1);
                        if (!(hyperplane_interval(K, S, q, p, pt, s).mag() < z)) sampled_ok = false;
                    }
            }
            add("e", i, worst < z && sampled_ok,
                tag(i) + "enclosure " + format_real(worst, 12) + " vs zeta " + format_real(z, 12) +
                    (sampled_ok ? "" : " (sampled point violates)"));
        }

        // (a) closure(U_i) inside the interior of U_{i-1}.
        bool nested = true;
        for (int s = 0; s < d; ++s)
            for (int k = 0; k < 2; ++k)
                if (!(box_lo(prev[s], k) < box_lo(U[s], k) && box_hi(U[s], k) < box_hi(prev[s], k) &&
                      box_lo(U[s], k) < box_hi(U[s], k)))
                    nested = false;
        add("a", i, nested, tag(i) + (nested ? "nested" : "U_i not inside U_{i-1}"));

        // (c) U_i misses every earlier line; (d) U_i meets line i.
        bool misses = true;
        for (int r = 1; r < i; ++r) {
            const auto v = lines[r - 1].values(K);
            const int k = lines[r - 1].coordinate();
            bool some_place_clear = false;
            for (int s = 0; s < d; ++s) {
                Interval iv = Interval::fuzzy(v[s]);
                if (iv.hi() < to_real(box_lo(U[s], k)) || iv.lo() > to_real(box_hi(U[s], k))) some_place_clear = true;
            }
            if (!some_place_clear) misses = false;
        }
        add("c", i, misses, tag(i) + (misses ? "avoids earlier lines" : "meets an earlier line"));
        const auto v = lines[i - 1].values(K);
        const int k = lines[i - 1].coordinate();
        bool meets = true;
        for (int s = 0; s < d; ++s) {
            Interval iv = Interval::fuzzy(v[s]);
            if (!(iv.lo() > to_real(box_lo(U[s], k)) && iv.hi() < to_real(box_hi(U[s], k)))) meets = false;
        }
        add("d", i, meets, tag(i) + (meets ? "meets its line" : "misses its line"));
    }

    // The point.
    bool inside = true;
    for (int i = 1; i <= n; ++i)
        for (int s = 0; s < d; ++s)
            for (int k = 0; k < 2; ++k) {
                const auto& U = c.stages[i - 1].box[s];
                if (!(box_lo(U, k) < c.base[s][k] && c.base[s][k] < box_hi(U, k))) inside = false;
            }
    add("point-in-boxes", 0, inside, inside ? "in every U_i" : "outside some U_i");

    ExactPoint lifted = lift_point(K, S, c.base);
    bool same = lifted.rows.size() == c.point.rows.size();
    for (std::size_t s = 0; same && s < lifted.rows.size(); ++s) same = lifted.rows[s] == c.point.rows[s];
    add("point-on-surface", 0, same, same ? "lies on the surface" : "does not match the lifted base point");

    bool avoids = true;
    for (const auto& ln : lines)
        for (int s = 0; s < d; ++s) {
            const Rational& u = c.base[s][ln.coordinate()];
            if (K.sub(K.scale(ln.b, u), ln.a).is_zero()) avoids = false;
        }
    add("point-avoids-lines", 0, avoids, avoids ? "on none of the lines" : "lies on a line");

    const KSVector x = lifted.numeric(K);
    auto value_at = [&](const Line& ln) {
        Real v = 0;
        auto q = ln.q(K, m);
        auto eq = embed_vector(K, q);
        auto ep = K.embed(ln.p(K));
        for (int s = 0; s < d; ++s) {
            Real acc = ep[s];
            for (int i = 0; i < m; ++i) acc += eq(s, i) * x(s, i);
            v = std::max(v, Real(abs(acc)));
        }
        return v;
    };
    for (int r = 1; r < n; ++r) {
        Real val = value_at(lines[r - 1]);
        Real z = c.zeta(phis[r]);
        add("point-chain", r, val < z,
            tag(r) + "|q_r.x + p_r| = " + format_real(val, 12) + " vs zeta(Phi(q_{r+1})) = " + format_real(z, 12));
    }
    if (opt.eta_cross_check)
        for (int r = 1; r < n; ++r) {
            auto e = eta(K, x, phis[r - 1], c.phi, opt.budget);
            Real z = c.zeta(phis[r - 1]);
            add("point-eta", r, e.value < z,
                tag(r) + "eta(Phi(q_r)) = " + format_real(e.value, 12) + " vs zeta(Phi(q_r)) = " + format_real(z, 12));
        }
    if (opt.irrationality) {
        rep.irrationality = totally_irrational_certificate(K, c.point, phis.back(), c.phi, opt.budget);
        add("point-irrational", 0, !rep.irrationality.relation,
            rep.irrationality.relation ? "relation found below Phi(q_n)" : "no relation up to Phi(q_n)");
    }
    return rep;
}

/// Throws VerificationFailure naming the first violated check.
inline VerificationReport verify_or_throw(const ConstructionOutput& c, const VerifyOptions& opt = {}) {
    auto rep = verify_certificate(c, opt);
    if (const auto* f = rep.first_failure()) throw Error(ErrorKind::VerificationFailure, "(" + f->name + ") " + f->detail);
    return rep;
}

}  // namespace dioph
