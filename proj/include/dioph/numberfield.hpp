#pragma once

// Totally real number fields, exact element arithmetic on an integral basis,
// and the real embeddings at working precision.

#include "dioph/error.hpp"
#include "dioph/poly.hpp"
#include "dioph/real.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace dioph {

/// Coordinates with respect to the integral basis.  In O_K iff all integral.
struct FieldElement {
    std::vector<Rational> coords;

    bool is_integral() const {
        for (const auto& c : coords)
            if (mp::denominator(c) != 1) return false;
        return true;
    }
    bool is_zero() const {
        for (const auto& c : coords)
            if (c != 0) return false;
        return true;
    }
    friend bool operator==(const FieldElement& a, const FieldElement& b) { return a.coords == b.coords; }
    friend bool operator<(const FieldElement& a, const FieldElement& b) { return a.coords < b.coords; }
};

struct EmbeddingTable {
    std::vector<Real> roots;   // ascending
    Matrix<Real> embed;        // (i, j) = sigma_i(omega_j)
    Matrix<Real> embed_inv;
    int precision_bits = kDefaultPrecisionBits;
};

struct FieldOptions {
    int precision_bits = kDefaultPrecisionBits;
    std::optional<Matrix<Rational>> basis;  // row j = omega_j on the power basis
    long enumeration_cap = 20'000'000;
};

namespace detail {

inline std::vector<Integer> small_prime_square_divisors(Integer n, bool& complete) {
    // Primes p with p^2 | n.  `complete` is cleared when a cofactor cannot be
    // shown free of square factors.
    std::vector<Integer> out;
    complete = true;
    if (n < 0) n = -n;
    for (unsigned long p = 2; p <= 1'000'000; ++p) {
        if (Integer(p) * p > n) break;
        if (n % p != 0) continue;
        int e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        if (e >= 2) out.emplace_back(p);
    }
    if (n > 1) {
        Integer r = mp::sqrt(n);
        if (r * r == n) {
            if (mpz_probab_prime_p(r.backend().data(), 40)) out.push_back(r);
            else complete = false;
        } else if (!mpz_probab_prime_p(n.backend().data(), 40)) {
            // Composite cofactor with all prime factors above 10^6: it is
            // squarefree when it has at most two prime factors.
            if (n >= Integer(1'000'000'000'000'000'000ULL)) complete = false;
        }
    }
    return out;
}

/// Dedekind criterion: is Z[theta] maximal at p?
inline bool dedekind_maximal(const poly::ZPoly& f, const Integer& p) {
    poly::ModP F{p};
    poly::ZPoly fbar = F.reduce(f);
    poly::ZPoly g = F.radical(fbar);
    poly::ZPoly h = F.divmod(fbar, g).first;
    // (f - g h) / p over Z with g, h lifted as their canonical representatives.
    poly::ZPoly gh(g.size() + h.size() - 1, Integer(0));
    for (std::size_t i = 0; i < g.size(); ++i)
        for (std::size_t j = 0; j < h.size(); ++j) gh[i + j] += g[i] * h[j];
    poly::ZPoly big(std::max(f.size(), gh.size()), Integer(0));
    for (std::size_t i = 0; i < f.size(); ++i) big[i] += f[i];
    for (std::size_t i = 0; i < gh.size(); ++i) big[i] -= gh[i];
    for (auto& c : big) c /= p;
    poly::ZPoly d = F.gcd(F.gcd(F.reduce(big), g), h);
    return poly::degree(d) <= 0;
}

}  // namespace detail

class Field {
public:
    /// Builds K = Q[x]/(f).  Coefficients are lowest degree first.
    static Field create(const std::vector<Integer>& min_poly, const FieldOptions& opts = {}) {
        auto data = std::make_shared<Data>();
        build(*data, min_poly, opts);
        Field f;
        f.d_ = std::move(data);
        f.find_units();
        return f;
    }

    static Field create(std::initializer_list<long> min_poly, const FieldOptions& opts = {}) {
        std::vector<Integer> c;
        for (long v : min_poly) c.emplace_back(v);
        return create(c, opts);
    }

    int degree() const { return d_->degree; }
    const std::vector<Integer>& min_poly() const { return d_->min_poly; }
    const Matrix<Rational>& integral_basis() const { return d_->basis; }
    const Integer& discriminant() const { return d_->disc; }
    const EmbeddingTable& table() const { return d_->table; }
    const std::vector<Real>& roots() const { return d_->table.roots; }
    const Matrix<Real>& embed_matrix() const { return d_->table.embed; }
    const Matrix<Real>& embed_inverse() const { return d_->table.embed_inv; }
    int precision_bits() const { return d_->table.precision_bits; }
    long enumeration_cap() const { return d_->cap; }
    Real sqrt_disc() const { return mp::sqrt(Real(d_->disc)); }

    /// Relative tolerance at the requested precision.
    Real tolerance() const { return pow2(-precision_bits() / 2); }

    // Units used for unit balancing in systole searches: log-independent,
    // not necessarily fundamental.  `units_complete` is false when fewer
    // than d - 1 were found within the search cap.
    const std::vector<FieldElement>& units() const { return d_->units; }
    bool units_complete() const { return static_cast<int>(d_->units.size()) == degree() - 1; }
    /// Sup-norm covering radius of the unit log lattice spanned by units().
    const Real& unit_radius() const { return d_->unit_radius; }

    // Elements.

    FieldElement zero() const { return FieldElement{std::vector<Rational>(degree(), Rational(0))}; }
    FieldElement one() const { return d_->one; }
    FieldElement theta() const { return from_power_basis(power_monomial(1)); }

    FieldElement from_integer(const Integer& n) const {
        FieldElement e = one();
        for (auto& c : e.coords) c *= n;
        return e;
    }
    FieldElement from_rational(const Rational& q) const {
        FieldElement e = one();
        for (auto& c : e.coords) c *= q;
        return e;
    }
    FieldElement from_coords(const std::vector<Rational>& c) const {
        if (static_cast<int>(c.size()) != degree())
            throw Error(ErrorKind::InvalidInput, "element needs " + std::to_string(degree()) + " coordinates");
        return FieldElement{c};
    }
    FieldElement from_integers(const std::vector<long>& c) const {
        std::vector<Rational> r(c.begin(), c.end());
        return from_coords(r);
    }
    /// Element given by its power-basis coefficients c_0 + c_1 theta + ...
    FieldElement from_power_basis(const std::vector<Rational>& c) const {
        std::vector<Rational> v(degree(), Rational(0));
        for (std::size_t k = 0; k < c.size() && k < v.size(); ++k) v[k] = c[k];
        if (c.size() > v.size()) v = reduce_power(c);
        return FieldElement{row_times(v, d_->basis_inv)};
    }
    std::vector<Rational> to_power_basis(const FieldElement& a) const { return row_times(a.coords, d_->basis); }

    FieldElement add(const FieldElement& a, const FieldElement& b) const {
        FieldElement r = a;
        for (int i = 0; i < degree(); ++i) r.coords[i] += b.coords[i];
        return r;
    }
    FieldElement sub(const FieldElement& a, const FieldElement& b) const {
        FieldElement r = a;
        for (int i = 0; i < degree(); ++i) r.coords[i] -= b.coords[i];
        return r;
    }
    FieldElement neg(const FieldElement& a) const {
        FieldElement r = a;
        for (auto& c : r.coords) c = -c;
        return r;
    }
    FieldElement scale(const FieldElement& a, const Rational& s) const {
        FieldElement r = a;
        for (auto& c : r.coords) c *= s;
        return r;
    }
    FieldElement mul(const FieldElement& a, const FieldElement& b) const {
        const int d = degree();
        FieldElement r = zero();
        for (int i = 0; i < d; ++i) {
            if (a.coords[i] == 0) continue;
            for (int j = 0; j < d; ++j) {
                if (b.coords[j] == 0) continue;
                Rational ab = a.coords[i] * b.coords[j];
                const auto& s = d_->structure[i * d + j];
                for (int k = 0; k < d; ++k)
                    if (s[k] != 0) r.coords[k] += ab * s[k];
            }
        }
        return r;
    }
    /// Matrix of multiplication by a acting on basis coordinates (columns).
    Matrix<Rational> mult_matrix(const FieldElement& a) const {
        const int d = degree();
        Matrix<Rational> m(d, d);
        for (int j = 0; j < d; ++j) {
            FieldElement e = zero();
            e.coords[j] = 1;
            auto col = mul(a, e).coords;
            for (int k = 0; k < d; ++k) m(k, j) = col[k];
        }
        return m;
    }
    FieldElement inv(const FieldElement& a) const {
        if (a.is_zero()) throw Error(ErrorKind::InvalidInput, "inverse of zero");
        return FieldElement{inverse(mult_matrix(a)) * one().coords};
    }
    FieldElement div(const FieldElement& a, const FieldElement& b) const { return mul(a, inv(b)); }

    /// Exact norm N_{K/Q}(a) as the determinant of multiplication by a.
    Rational norm(const FieldElement& a) const { return determinant(mult_matrix(a)); }

    Rational trace(const FieldElement& a) const {
        Rational t = 0;
        for (int i = 0; i < degree(); ++i) t += a.coords[i] * d_->basis_trace[i];
        return t;
    }

    /// Exact norm through the resultant res(f, A) of the power-basis
    /// representative A.  Independent of the multiplication table.
    Rational norm_by_resultant(const FieldElement& a) const {
        poly::QPoly f(d_->min_poly.begin(), d_->min_poly.end());
        poly::QPoly A = to_power_basis(a);
        poly::trim(A);
        if (A.empty()) return 0;
        return poly::resultant(f, A);
    }

    /// Per-place values sigma_i(a).  Throws PrecisionExhausted when the
    /// evaluation loses more than half of the requested precision.
    std::vector<Real> embed(const FieldElement& a) const {
        const int d = degree();
        std::vector<Real> out(d, Real(0));
        for (int i = 0; i < d; ++i) {
            Real mag = 0;
            for (int j = 0; j < d; ++j) {
                if (a.coords[j] == 0) continue;
                Real term = to_real(a.coords[j]) * d_->table.embed(i, j);
                out[i] += term;
                mag += abs(term);
            }
            if (mag != 0 && out[i] != 0) {
                Real lost = mp::log2(mag / abs(out[i]));
                if (lost > kWorkingBits - precision_bits() / 2)
                    throw Error(ErrorKind::PrecisionExhausted, "cancellation in embedding");
            } else if (mag != 0 && out[i] == 0) {
                throw Error(ErrorKind::PrecisionExhausted, "embedding cancelled to zero");
            }
        }
        return out;
    }

    /// Embedding without the cancellation check, for hot loops over
    /// integral elements of bounded size.
    std::vector<Real> embed_fast(const std::vector<Real>& coords) const {
        return d_->table.embed * coords;
    }

    Real house(const FieldElement& a) const {
        Real h = 0;
        for (const auto& v : embed(a)) h = std::max(h, Real(abs(v)));
        return h;
    }

    /// All algebraic integers with house <= H, in lexicographic coordinate order.
    std::vector<FieldElement> enumerate_integers(const Real& H) const {
        if (H < 0) throw Error(ErrorKind::InvalidInput, "negative house bound");
        const int d = degree();
        std::vector<long> bound(d);
        Real count = 1;
        for (int j = 0; j < d; ++j) {
            Real s = 0;
            for (int i = 0; i < d; ++i) s += abs(d_->table.embed_inv(j, i));
            Real b = mp::floor(H * s * (1 + pow2(-200)));
            if (b > Real(1e12)) throw Error(ErrorKind::BoxTooLarge, "coordinate bound too large");
            bound[j] = b.convert_to<long>();
            count *= Real(2 * bound[j] + 1);
        }
        if (count > Real(d_->cap)) throw Error(ErrorKind::BoxTooLarge, "candidate count exceeds cap");
        std::vector<FieldElement> out;
        std::vector<long> a(d);
        for (int j = 0; j < d; ++j) a[j] = -bound[j];
        const Real lim = H * (1 + pow2(-200));
        std::vector<Real> ar(d);
        while (true) {
            for (int j = 0; j < d; ++j) ar[j] = Real(a[j]);
            auto y = embed_fast(ar);
            bool ok = true;
            for (const auto& v : y)
                if (abs(v) > lim) {
                    ok = false;
                    break;
                }
            if (ok) out.push_back(from_integers(a));
            int j = d - 1;
            while (j >= 0 && a[j] == bound[j]) {
                a[j] = -bound[j];
                --j;
            }
            if (j < 0) break;
            ++a[j];
        }
        return out;
    }

    /// Nearest algebraic integer to the per-place target y in the sup norm.
    /// Exact: rounding supplies an upper bound r, then every candidate whose
    /// coordinates are compatible with distance <= r is examined.
    FieldElement nearest_integer(const std::vector<Real>& y, Real* distance = nullptr) const {
        const int d = degree();
        std::vector<Real> c = d_->table.embed_inv * y;
        std::vector<long> a0(d);
        for (int j = 0; j < d; ++j) a0[j] = round_to_integer(c[j]).convert_to<long>();
        auto dist = [&](const std::vector<long>& a) {
            std::vector<Real> ar(a.begin(), a.end());
            auto v = embed_fast(ar);
            Real m = 0;
            for (int i = 0; i < d; ++i) m = std::max(m, Real(abs(v[i] - y[i])));
            return m;
        };
        std::vector<long> best = a0;
        Real r = dist(a0);
        // Coordinates of any candidate lie within r * sum |E_inv(j, .)| of c.
        std::vector<long> lo(d), hi(d);
        for (int j = 0; j < d; ++j) {
            Real s = 0;
            for (int i = 0; i < d; ++i) s += abs(d_->table.embed_inv(j, i));
            lo[j] = mp::ceil(c[j] - r * s - pow2(-100)).convert_to<long>();
            hi[j] = mp::floor(c[j] + r * s + pow2(-100)).convert_to<long>();
        }
        std::vector<long> a = lo;
        while (true) {
            Real v = dist(a);
            if (v < r || (v == r && a < best)) {
                r = v;
                best = a;
            }
            int j = d - 1;
            while (j >= 0 && a[j] == hi[j]) {
                a[j] = lo[j];
                --j;
            }
            if (j < 0) break;
            ++a[j];
        }
        if (distance) *distance = r;
        return from_integers(best);
    }

    std::string format(const FieldElement& a) const {
        std::string s = "[";
        for (int i = 0; i < degree(); ++i) {
            if (i) s += ",";
            s += format_rational(a.coords[i]);
        }
        return s + "]";
    }

    /// Parses "[c_1,...,c_d]" (basis coordinates) or a single rational.
    FieldElement parse(const std::string& text) const {
        std::string s;
        for (char c : text)
            if (!std::isspace(static_cast<unsigned char>(c))) s += c;
        if (s.empty()) throw Error(ErrorKind::InvalidInput, "empty field element");
        if (s.front() != '[') return from_rational(parse_rational(s));
        if (s.back() != ']') throw Error(ErrorKind::InvalidInput, "unterminated element: " + text);
        std::vector<Rational> c;
        std::string cur;
        for (std::size_t i = 1; i + 1 < s.size(); ++i) {
            if (s[i] == ',') {
                c.push_back(parse_rational(cur));
                cur.clear();
            } else {
                cur += s[i];
            }
        }
        if (!cur.empty()) c.push_back(parse_rational(cur));
        return from_coords(c);
    }

private:
    struct Data {
        int degree = 0;
        std::vector<Integer> min_poly;
        Matrix<Rational> basis, basis_inv;
        Integer disc;
        EmbeddingTable table;
        std::vector<std::vector<Rational>> structure;  // omega_i omega_j on the basis
        std::vector<Rational> basis_trace;
        FieldElement one;
        std::vector<FieldElement> units;
        Real unit_radius = 0;
        long cap = 20'000'000;
    };

    std::shared_ptr<Data> d_;

    std::vector<Rational> power_monomial(int k) const {
        std::vector<Rational> v(k + 1, Rational(0));
        v[k] = 1;
        return reduce_power(v);
    }

    std::vector<Rational> reduce_power(const std::vector<Rational>& c) const {
        poly::QPoly f(d_->min_poly.begin(), d_->min_poly.end());
        poly::QPoly r = poly::rem(c, f);
        r.resize(degree(), Rational(0));
        return r;
    }

    static std::vector<Rational> row_times(const std::vector<Rational>& v, const Matrix<Rational>& m) {
        std::vector<Rational> out(m.cols(), Rational(0));
        for (std::size_t i = 0; i < m.rows(); ++i) {
            if (v[i] == 0) continue;
            for (std::size_t j = 0; j < m.cols(); ++j) out[j] += v[i] * m(i, j);
        }
        return out;
    }

    static void build(Data& D, const std::vector<Integer>& f, const FieldOptions& opts) {
        if (f.empty() || f.back() != 1)
            throw Error(ErrorKind::InvalidInput, "minimal polynomial must be monic of degree >= 1");
        const int d = static_cast<int>(f.size()) - 1;
        if (d < 1) throw Error(ErrorKind::InvalidInput, "minimal polynomial must have degree >= 1");
        if (opts.precision_bits < 16 || opts.precision_bits > kDefaultPrecisionBits)
            throw Error(ErrorKind::InvalidInput,
                        "precision must be between 16 and " + std::to_string(kDefaultPrecisionBits) + " bits");
        D.degree = d;
        D.min_poly = f;
        D.cap = opts.enumeration_cap;
        D.table.precision_bits = opts.precision_bits;
        poly::QPoly fq(f.begin(), f.end());

        if (poly::degree(poly::gcd(fq, poly::derivative(fq))) > 0)
            throw Error(ErrorKind::Reducible, "polynomial has a repeated factor");
        if (poly::count_real_roots(fq) != d)
            throw Error(ErrorKind::NotTotallyReal, "polynomial has non-real roots");

        auto intervals = poly::isolate_real_roots(fq);
        for (const auto& [lo, hi] : intervals) D.table.roots.push_back(poly::refine_root(fq, lo, hi));
        check_irreducible(fq, D.table.roots);

        // Newton power sums s_k = Tr(theta^k).
        std::vector<Rational> s(2 * d, Rational(0));
        s[0] = d;
        for (int k = 1; k < 2 * d; ++k) {
            Rational acc = 0;
            for (int i = 1; i <= std::min(k, d); ++i) {
                // e-coefficients: f = x^d + a_{d-1} x^{d-1} + ..., a_{d-i} multiplies s_{k-i}
                Rational a = Rational(f[d - i]);
                if (i < k) acc -= a * s[k - i];
                else acc -= a * Rational(k);
            }
            s[k] = acc;
        }

        if (opts.basis) {
            D.basis = *opts.basis;
            if (static_cast<int>(D.basis.rows()) != d || static_cast<int>(D.basis.cols()) != d)
                throw Error(ErrorKind::InvalidBasis, "basis must be " + std::to_string(d) + "x" + std::to_string(d));
        } else {
            Rational pdisc = poly::discriminant(fq);
            bool complete = true;
            auto ps = detail::small_prime_square_divisors(mp::numerator(pdisc), complete);
            if (!complete)
                throw Error(ErrorKind::IntegralBasisRequired, "could not factor the polynomial discriminant");
            for (const auto& p : ps)
                if (!detail::dedekind_maximal(f, p))
                    throw Error(ErrorKind::IntegralBasisRequired,
                                "Z[theta] is not maximal at p = " + p.str() + "; supply an integral basis");
            D.basis = Matrix<Rational>::identity(d);
        }
        try {
            D.basis_inv = inverse(D.basis);
        } catch (const std::domain_error&) {
            throw Error(ErrorKind::InvalidBasis, "basis matrix is singular");
        }

        // Structure constants through reduced powers of theta.
        std::vector<std::vector<Rational>> powers(2 * d - 1);
        for (int k = 0; k < 2 * d - 1; ++k) {
            std::vector<Rational> mono(k + 1, Rational(0));
            mono[k] = 1;
            poly::QPoly r = poly::rem(mono, fq);
            r.resize(d, Rational(0));
            powers[k] = r;
        }
        D.structure.assign(d * d, std::vector<Rational>(d, Rational(0)));
        Matrix<Rational> trace_form(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                std::vector<Rational> prod(d, Rational(0));
                Rational tr = 0;
                for (int a = 0; a < d; ++a) {
                    if (D.basis(i, a) == 0) continue;
                    for (int b = 0; b < d; ++b) {
                        if (D.basis(j, b) == 0) continue;
                        Rational c = D.basis(i, a) * D.basis(j, b);
                        tr += c * s[a + b];
                        for (int k = 0; k < d; ++k) prod[k] += c * powers[a + b][k];
                    }
                }
                trace_form(i, j) = tr;
                D.structure[i * d + j] = row_times(prod, D.basis_inv);
                if (opts.basis)
                    for (const auto& c : D.structure[i * d + j])
                        if (mp::denominator(c) != 1)
                            throw Error(ErrorKind::InvalidBasis, "basis is not closed under multiplication");
            }
        std::vector<Rational> one_pow(d, Rational(0));
        one_pow[0] = 1;
        D.one = FieldElement{row_times(one_pow, D.basis_inv)};
        if (opts.basis) {
            std::vector<Rational> th(d, Rational(0));
            if (d > 1) th[1] = 1;
            else th[0] = -Rational(f[0]);
            for (const auto& v : {row_times(one_pow, D.basis_inv), row_times(th, D.basis_inv)})
                for (const auto& c : v)
                    if (mp::denominator(c) != 1)
                        throw Error(ErrorKind::InvalidBasis, "basis span must contain 1 and theta");
        }
        D.basis_trace.resize(d);
        for (int i = 0; i < d; ++i) {
            Rational t = 0;
            for (int a = 0; a < d; ++a) t += D.basis(i, a) * s[a];
            D.basis_trace[i] = t;
        }
        Rational disc = determinant(trace_form);
        if (mp::denominator(disc) != 1 || disc <= 0)
            throw Error(ErrorKind::InvalidBasis, "trace form discriminant is not a positive integer");
        D.disc = mp::numerator(disc);

        D.table.embed = Matrix<Real>(d, d);
        for (int i = 0; i < d; ++i) {
            Real pw = 1;
            std::vector<Real> powr(d);
            for (int a = 0; a < d; ++a) {
                powr[a] = pw;
                pw *= D.table.roots[i];
            }
            for (int j = 0; j < d; ++j) {
                Real v = 0;
                for (int a = 0; a < d; ++a)
                    if (D.basis(j, a) != 0) v += to_real(D.basis(j, a)) * powr[a];
                D.table.embed(i, j) = v;
            }
        }
        D.table.embed_inv = inverse(D.table.embed);
    }

    static void check_irreducible(const poly::QPoly& f, const std::vector<Real>& roots) {
        const int d = static_cast<int>(roots.size());
        for (int k = 1; k <= d / 2; ++k) {
            std::vector<int> idx(k);
            for (int i = 0; i < k; ++i) idx[i] = i;
            while (true) {
                std::vector<Real> c{Real(1)};
                for (int i : idx) {
                    std::vector<Real> n(c.size() + 1, Real(0));
                    for (std::size_t a = 0; a < c.size(); ++a) {
                        n[a + 1] += c[a];
                        n[a] -= c[a] * roots[i];
                    }
                    c = n;
                }
                bool near = true;
                poly::QPoly g;
                for (const auto& v : c) {
                    Real r = mp::round(v);
                    if (abs(v - r) > pow2(-64) * (1 + abs(v))) {
                        near = false;
                        break;
                    }
                    g.emplace_back(round_to_integer(v));
                }
                if (near && poly::rem(f, g).empty())
                    throw Error(ErrorKind::Reducible, "polynomial factors over Q");
                int i = k - 1;
                while (i >= 0 && idx[i] == d - k + i) --i;
                if (i < 0) break;
                ++idx[i];
                for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
            }
        }
    }

    std::vector<Real> log_vector(const FieldElement& u) const {
        std::vector<Real> l;
        for (const auto& v : embed(u)) l.push_back(mp::log(abs(v)));
        return l;
    }

    // Collects d - 1 multiplicatively independent units by enumerating
    // integers of growing house and keeping those of norm +-1 whose log
    // vectors raise the rank.
    void find_units() {
        Data& D = *d_;
        const int d = degree();
        if (d == 1) return;
        std::vector<std::vector<Real>> logs;
        for (Real H = 2; static_cast<int>(D.units.size()) < d - 1; H *= 2) {
            std::vector<FieldElement> cand;
            try {
                cand = enumerate_integers(H);
            } catch (const Error&) {
                break;
            }
            std::vector<std::pair<Real, FieldElement>> found;
            for (const auto& a : cand) {
                if (a.is_zero()) continue;
                auto y = embed_fast(std::vector<Real>(a.coords.begin(), a.coords.end()));
                Real p = 1;
                for (const auto& v : y) p *= v;
                if (abs(abs(p) - 1) > Real(1e-20)) continue;
                if (abs(norm(a)) != 1) continue;
                Real h = 0;
                for (const auto& v : y) h = std::max(h, Real(abs(v)));
                if (h <= 1 + Real(1e-30)) continue;  // roots of unity +-1
                found.emplace_back(h, a);
            }
            std::sort(found.begin(), found.end(), [](const auto& x, const auto& y) {
                if (x.first != y.first) return x.first < y.first;
                return x.second < y.second;
            });
            for (const auto& [h, u] : found) {
                auto l = log_vector(u);
                auto trial = logs;
                trial.push_back(l);
                if (log_rank(trial) == static_cast<int>(trial.size())) {
                    logs = trial;
                    D.units.push_back(u);
                    if (static_cast<int>(D.units.size()) == d - 1) break;
                }
            }
            if (H > Real(1 << 16)) break;
        }
        Real R = 0;
        for (const auto& l : logs) {
            Real m = 0;
            for (const auto& v : l) m = std::max(m, Real(abs(v)));
            R += m;
        }
        D.unit_radius = R / 2;
    }

    static int log_rank(std::vector<std::vector<Real>> rows) {
        // Rank of the rows restricted to the first d - 1 coordinates.
        if (rows.empty()) return 0;
        const std::size_t cols = rows[0].size() - 1;
        int rank = 0;
        for (std::size_t c = 0; c < cols && rank < static_cast<int>(rows.size()); ++c) {
            std::size_t piv = rank;
            for (std::size_t r = rank; r < rows.size(); ++r)
                if (abs(rows[r][c]) > abs(rows[piv][c])) piv = r;
            if (abs(rows[piv][c]) < Real(1e-40)) continue;
            std::swap(rows[piv], rows[rank]);
            for (std::size_t r = rank + 1; r < rows.size(); ++r) {
                Real f = rows[r][c] / rows[rank][c];
                for (std::size_t k = c; k < cols; ++k) rows[r][k] -= f * rows[rank][k];
            }
            ++rank;
        }
        return rank;
    }
};

/// Field description file: `minpoly = [c_0, ..., 1]`, optional
/// `basis = [[...],[...]]` (or a flat row-major list), `precision = bits`.
/// Blank lines and `#` comments are ignored.
struct FieldFile {
    std::vector<Integer> min_poly;
    FieldOptions options;
};

namespace detail {

inline std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (c == '[' || c == ']' || std::isspace(static_cast<unsigned char>(c))) continue;
        if (c == ',' || c == ';') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

inline std::string trim_copy(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace detail

inline FieldFile parse_field_text(const std::string& text) {
    FieldFile ff;
    std::istringstream in(text);
    std::string line;
    std::vector<std::string> basis_entries;
    bool have_poly = false;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim_copy(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw Error(ErrorKind::InvalidInput, "expected key = value: " + line);
        std::string key = detail::trim_copy(line.substr(0, eq));
        std::string val = detail::trim_copy(line.substr(eq + 1));
        try {
            if (key == "minpoly") {
                for (const auto& s : detail::split_list(val)) ff.min_poly.emplace_back(s);
                have_poly = true;
            } else if (key == "basis") {
                basis_entries = detail::split_list(val);
            } else if (key == "precision") {
                ff.options.precision_bits = std::stoi(val);
            } else {
                throw Error(ErrorKind::InvalidInput, "unknown field file key: " + key);
            }
        } catch (const std::invalid_argument&) {
            throw Error(ErrorKind::InvalidInput, "bad value for " + key + ": " + val);
        } catch (const std::runtime_error& e) {
            if (dynamic_cast<const Error*>(&e)) throw;
            throw Error(ErrorKind::InvalidInput, "bad value for " + key + ": " + val);
        }
    }
    if (!have_poly) throw Error(ErrorKind::InvalidInput, "field file lacks minpoly");
    if (!basis_entries.empty()) {
        const std::size_t d = ff.min_poly.size() - 1;
        if (basis_entries.size() != d * d)
            throw Error(ErrorKind::InvalidBasis, "basis needs " + std::to_string(d * d) + " entries");
        Matrix<Rational> B(d, d);
        for (std::size_t i = 0; i < d * d; ++i) B(i / d, i % d) = parse_rational(basis_entries[i]);
        ff.options.basis = B;
    }
    return ff;
}

inline Field load_field(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::InvalidInput, "cannot open field file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    auto ff = parse_field_text(ss.str());
    return Field::create(ff.min_poly, ff.options);
}

}  // namespace dioph
