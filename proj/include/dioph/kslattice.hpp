#pragma once

// O_K-module lattices g O_K^n in K_S^n and their real restriction of scalars.
//
// Layout conventions:
//   KSVector      d x n real matrix, row = place, column = K_S-coordinate.
//   ros_basis     (d n) x (d n); row sigma*n + r, column k*d + j is the
//                 image of omega_j e_k.
//   module coords z in Z^{dn} use the same column index k*d + j.

#include "dioph/error.hpp"
#include "dioph/lll.hpp"
#include "dioph/numberfield.hpp"
#include "dioph/real.hpp"

#include <string>
#include <vector>

namespace dioph {

using KSVector = Matrix<Real>;
using ModuleVector = std::vector<FieldElement>;

inline Real sup_norm(const KSVector& y) {
    Real m = 0;
    for (std::size_t i = 0; i < y.rows(); ++i)
        for (std::size_t j = 0; j < y.cols(); ++j) m = std::max(m, Real(abs(y(i, j))));
    return m;
}

inline Real place_norm(const KSVector& y, std::size_t place) {
    Real m = 0;
    for (std::size_t j = 0; j < y.cols(); ++j) m = std::max(m, Real(abs(y(place, j))));
    return m;
}

/// c(y) = prod over places of the row-wise sup norm.
inline Real content(const KSVector& y) {
    Real c = 1;
    for (std::size_t i = 0; i < y.rows(); ++i) c *= place_norm(y, i);
    return c;
}

/// Per-place embedding of a module vector: entry (sigma, k) = sigma(v_k).
inline KSVector embed_vector(const Field& K, const ModuleVector& v) {
    KSVector y(K.degree(), v.size());
    for (std::size_t k = 0; k < v.size(); ++k) {
        auto e = K.embed(v[k]);
        for (int i = 0; i < K.degree(); ++i) y(i, k) = e[i];
    }
    return y;
}

/// Embedding of tau(x) for x in K^m as a d x m KSVector.
inline KSVector embed_point(const Field& K, const std::vector<FieldElement>& x) { return embed_vector(K, x); }

struct ModuleLattice {
    Field field;
    std::vector<Matrix<Real>> g;  // one n x n block per place
    Matrix<Real> ros_basis;

    int n() const { return static_cast<int>(g.empty() ? 0 : g[0].rows()); }
    int rank() const { return field.degree() * n(); }

    /// g . v per place.
    KSVector image(const ModuleVector& v) const {
        KSVector y = embed_vector(field, v);
        KSVector out(y.rows(), y.cols());
        for (std::size_t s = 0; s < y.rows(); ++s)
            for (std::size_t r = 0; r < y.cols(); ++r) {
                Real acc = 0;
                for (std::size_t k = 0; k < y.cols(); ++k) acc += g[s](r, k) * y(s, k);
                out(s, r) = acc;
            }
        return out;
    }

    /// Real vector of the restriction of scalars for integer coords z.
    std::vector<Real> ros_image(const std::vector<Real>& z) const { return ros_basis * z; }

    KSVector to_ks(const std::vector<Real>& flat) const {
        KSVector y(field.degree(), n());
        for (int s = 0; s < field.degree(); ++s)
            for (int r = 0; r < n(); ++r) y(s, r) = flat[s * n() + r];
        return y;
    }

    ModuleVector to_module(const std::vector<Integer>& z) const {
        const int d = field.degree();
        ModuleVector v(n(), field.zero());
        for (int k = 0; k < n(); ++k)
            for (int j = 0; j < d; ++j) v[k].coords[j] = Rational(z[k * d + j]);
        return v;
    }

    /// |det ros_basis|.
    Real covolume() const { return abs(determinant(ros_basis)); }

    /// (sqrt D_K)^n prod_sigma |det g^sigma|.
    Real covolume_formula() const {
        Real c = mp::pow(field.sqrt_disc(), n());
        for (const auto& b : g) c *= abs(determinant(b));
        return c;
    }
};

inline ModuleLattice restriction_of_scalars(const std::vector<Matrix<Real>>& g, const Field& K) {
    const int d = K.degree();
    if (static_cast<int>(g.size()) != d)
        throw Error(ErrorKind::InvalidInput, "need one block per place (" + std::to_string(d) + ")");
    const std::size_t n = g[0].rows();
    for (const auto& b : g) {
        if (b.rows() != n || b.cols() != n) throw Error(ErrorKind::InvalidInput, "blocks must be square of equal size");
        if (determinant(b) == 0) throw Error(ErrorKind::SingularBlock, "singular block");
    }
    ModuleLattice L{K, g, Matrix<Real>(d * n, d * n)};
    const auto& E = K.embed_matrix();
    for (int s = 0; s < d; ++s)
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t k = 0; k < n; ++k)
                for (int j = 0; j < d; ++j) L.ros_basis(s * n + r, k * d + j) = g[s](r, k) * E(s, j);
    return L;
}

inline ModuleLattice identity_lattice(const Field& K, int n) {
    return restriction_of_scalars(std::vector<Matrix<Real>>(K.degree(), Matrix<Real>::identity(n)), K);
}

struct SystoleResult {
    Real delta;
    ModuleVector witness;
    std::vector<Integer> witness_coords;
    bool certified = true;
    long nodes = 0;
    std::string note;
};

namespace detail {

inline Real content_of_flat(const std::vector<Real>& y, int d, int n) {
    Real c = 1;
    for (int s = 0; s < d; ++s) {
        Real m = 0;
        for (int r = 0; r < n; ++r) m = std::max(m, Real(abs(y[s * n + r])));
        c *= m;
    }
    return c;
}

inline Real sup_of_flat(const std::vector<Real>& y) {
    Real m = 0;
    for (const auto& v : y) m = std::max(m, Real(abs(v)));
    return m;
}

inline void sign_normalize(std::vector<Integer>& z) {
    for (const auto& v : z) {
        if (v == 0) continue;
        if (v < 0)
            for (auto& w : z) w = -w;
        return;
    }
}

/// Deterministic witness order among equal contents: smaller max |z_i|,
/// then smaller sum |z_i|, then lexicographically greater.
inline bool witness_before(const std::vector<Integer>& a, const std::vector<Integer>& b) {
    Integer ma = 0, mb = 0, sa = 0, sb = 0;
    for (const auto& v : a) {
        ma = std::max(ma, Integer(abs(v)));
        sa += abs(v);
    }
    for (const auto& v : b) {
        mb = std::max(mb, Integer(abs(v)));
        sb += abs(v);
    }
    if (ma != mb) return ma < mb;
    if (sa != sb) return sa < sb;
    return a > b;
}

}  // namespace detail

/// Minimal content over nonzero module vectors.
///
/// Any vector can be multiplied by a unit so that every place norm is at
/// most c^{1/d} e^R, where c is its content and R the sup-norm covering
/// radius of the unit log lattice.  So once some vector of content c_best
/// is known, a minimizer exists with sup norm <= c_best^{1/d} e^R, and the
/// search enumerates that cube (through the Euclidean ball containing it)
/// on an LLL-reduced basis, shrinking the cube as c_best improves.
inline SystoleResult systole_content(const ModuleLattice& lat, long budget = 2'000'000) {
    const int d = lat.field.degree();
    const int n = lat.n();
    const int N = d * n;
    const Real tie = pow2(-200);

    LllResult<Real> red = lll_reduce(lat.ros_basis);
    SystoleResult res;
    std::vector<Integer> best;
    Real best_c = -1;

    auto consider = [&](std::vector<Integer> z, const Real& c) {
        detail::sign_normalize(z);
        if (best_c < 0 || c < best_c * (1 - tie)) {
            best_c = c;
            best = z;
        } else if (c <= best_c * (1 + tie) && detail::witness_before(z, best)) {
            best = z;
            best_c = std::min(best_c, c);
        }
    };
    auto coords_of = [&](const std::vector<long>& zr) {
        std::vector<Integer> z(N, Integer(0));
        for (int a = 0; a < N; ++a) {
            Real acc = 0;
            for (int b = 0; b < N; ++b)
                if (zr[b] != 0) acc += red.transform(a, b) * Real(zr[b]);
            z[a] = round_to_integer(acc);
        }
        return z;
    };

    // Seeds: original generators and reduced basis vectors.
    for (int c = 0; c < N; ++c) {
        std::vector<Integer> z(N, Integer(0));
        z[c] = 1;
        consider(z, detail::content_of_flat(lat.ros_basis.column(c), d, n));
        std::vector<long> e(N, 0);
        e[c] = 1;
        consider(coords_of(e), detail::content_of_flat(red.basis.column(c), d, n));
    }

    const Real growth = mp::exp(lat.field.unit_radius());
    auto sup_bound = [&]() { return mp::pow(best_c, Real(1) / d) * growth; };
    Real B = sup_bound();
    Real radius2 = B * B * N * (1 + tie);

    auto stats = enumerate_ball(
        red.basis, radius2,
        [&](const std::vector<long>& zr, Real& r2) {
            std::vector<Real> zr_real(zr.begin(), zr.end());
            std::vector<Real> y = red.basis * zr_real;
            if (detail::sup_of_flat(y) > B * (1 + tie)) return;
            Real c = detail::content_of_flat(y, d, n);
            if (c > best_c * (1 + tie)) return;
            Real before = best_c;
            consider(coords_of(zr), c);
            if (best_c < before) {
                B = sup_bound();
                r2 = B * B * N * (1 + tie);
            }
        },
        budget);

    res.nodes = stats.nodes;
    res.certified = stats.complete;
    if (!stats.complete) res.note = "BudgetExceeded";
    if (!lat.field.units_complete()) {
        res.certified = false;
        res.note = "unit group rank not reached; search radius is heuristic";
    }
    res.witness_coords = best;
    res.witness = lat.to_module(best);
    res.delta = content(lat.image(res.witness));
    return res;
}

/// Text dump: one line per generator with exact module coordinates and the
/// embedded real rows.
inline std::string dump_lattice(const ModuleLattice& lat, int digits = 30) {
    std::ostringstream os;
    const int N = lat.rank();
    for (int c = 0; c < N; ++c) {
        std::vector<Integer> z(N, Integer(0));
        z[c] = 1;
        auto v = lat.to_module(z);
        for (std::size_t k = 0; k < v.size(); ++k) os << (k ? ";" : "") << lat.field.format(v[k]);
        auto y = lat.image(v);
        for (std::size_t s = 0; s < y.rows(); ++s) {
            os << " |";
            for (std::size_t r = 0; r < y.cols(); ++r) os << " " << format_real(y(s, r), digits);
        }
        os << "\n";
    }
    return os.str();
}

inline std::string format_module_vector(const Field& K, const ModuleVector& v) {
    std::string s;
    for (std::size_t k = 0; k < v.size(); ++k) s += (k ? ";" : "") + K.format(v[k]);
    return s;
}

}  // namespace dioph
