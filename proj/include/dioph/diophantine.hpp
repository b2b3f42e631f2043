#pragma once

// Dirichlet solver, irrationality measure eta, uniform exponent estimate and
// total-irrationality certificates for x in K_S^m.

#include "dioph/daniflow.hpp"
#include "dioph/error.hpp"
#include "dioph/kslattice.hpp"
#include "dioph/lll.hpp"
#include "dioph/numberfield.hpp"
#include "dioph/real.hpp"

#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace dioph {

/// Proper functions on O_K^m \ {0}.  `house_bound(t)` bounds house(q_i)
/// for every q with value(q) <= t, which is what the box searches need.
struct Phi {
    enum class Kind { House, Content };
    Kind kind = Kind::House;

    static Phi parse(const std::string& s) {
        if (s == "house" || s.empty()) return Phi{Kind::House};
        if (s == "content") return Phi{Kind::Content};
        throw Error(ErrorKind::Unsupported, "unknown Phi '" + s + "' (use house or content)");
    }
    std::string name() const { return kind == Kind::House ? "house" : "content"; }

    /// From per-place values sigma(q_i): rows = places, columns = i.
    Real value_rows(const Matrix<Real>& q) const {
        if (kind == Kind::House) return sup_norm(q);
        Real p = 1;
        for (std::size_t s = 0; s < q.rows(); ++s) p *= std::max(Real(1), place_norm(q, s));
        return p;
    }
    Real value(const Field& K, const std::vector<FieldElement>& q) const { return value_rows(embed_vector(K, q)); }
    Real house_bound(const Real& t) const { return t; }
};

/// zeta descriptors: "inv_pow:a" is t^{-a}; "exp_over_pow:nu" is e^{-t} t^{-nu}.
struct Zeta {
    enum class Kind { InvPow, ExpOverPow };
    Kind kind = Kind::InvPow;
    Real param = 2;
    std::string text = "inv_pow:2";

    static Zeta parse(const std::string& s) {
        auto colon = s.find(':');
        if (colon == std::string::npos) throw Error(ErrorKind::InvalidInput, "zeta must look like name:param");
        std::string name = s.substr(0, colon);
        Zeta z;
        z.text = s;
        try {
            z.param = to_real(parse_rational(s.substr(colon + 1)));
        } catch (const std::exception&) {
            throw Error(ErrorKind::InvalidInput, "bad zeta parameter in " + s);
        }
        if (name == "inv_pow") z.kind = Kind::InvPow;
        else if (name == "exp_over_pow") z.kind = Kind::ExpOverPow;
        else throw Error(ErrorKind::Unsupported, "unknown zeta " + name);
        if (z.param < 0) throw Error(ErrorKind::InvalidInput, "zeta parameter must be nonnegative");
        if (z.kind == Kind::InvPow && z.param == 0)
            throw Error(ErrorKind::InvalidInput, "inv_pow:0 does not tend to zero");
        return z;
    }
    Real operator()(const Real& t) const {
        if (kind == Kind::InvPow) return mp::pow(t, -param);
        return mp::exp(-t) * mp::pow(t, -param);
    }
};

struct ApproxPoint {
    FieldElement q0;
    std::vector<FieldElement> q;
    std::vector<Integer> coords;  // module coordinates of (q0, q)
    Real value;                   // max_sigma |sigma(q0) + sum sigma(q_i) x_i^sigma|
    Matrix<Real> q_rows;          // sigma(q_i)
    bool q_zero() const {
        for (const auto& e : q)
            if (!e.is_zero()) return false;
        return true;
    }
};

struct BoxEnumeration {
    std::vector<ApproxPoint> points;
    bool complete = true;
    long nodes = 0;
};

namespace detail {

inline ApproxPoint make_approx(const Field& K, const KSVector& x, std::vector<Integer> z) {
    const int d = K.degree();
    const int m = static_cast<int>(x.cols());
    // Sign convention: the first nonzero coordinate of q is positive.
    std::vector<Integer> qpart(z.begin() + d, z.end());
    bool flip = false;
    bool q_nonzero = false;
    for (const auto& c : qpart)
        if (c != 0) {
            flip = c < 0;
            q_nonzero = true;
            break;
        }
    if (!q_nonzero)
        for (int j = 0; j < d; ++j)
            if (z[j] != 0) {
                flip = z[j] < 0;
                break;
            }
    if (flip)
        for (auto& c : z) c = -c;
    ApproxPoint p;
    p.coords = z;
    auto elem = [&](int k) {
        FieldElement e = K.zero();
        for (int j = 0; j < d; ++j) e.coords[j] = Rational(z[k * d + j]);
        return e;
    };
    p.q0 = elem(0);
    for (int i = 1; i <= m; ++i) p.q.push_back(elem(i));
    p.q_rows = embed_vector(K, p.q);
    auto y0 = K.embed(p.q0);
    p.value = 0;
    for (int s = 0; s < d; ++s) {
        Real v = y0[s];
        for (int i = 0; i < m; ++i) v += p.q_rows(s, i) * x(s, i);
        p.value = std::max(p.value, Real(abs(v)));
    }
    return p;
}

}  // namespace detail

/// All (q0, q) in O_K^{m+1}, up to sign, with house(q_i) <= H and value <= v.
/// The box is mapped to the unit cube by the lattice diag(1/v, 1/H, ...) u_x
/// and enumerated through the ball of radius sqrt(N).
inline BoxEnumeration enumerate_approximations(const Field& K, const KSVector& x, const Real& H, const Real& v,
                                               long budget = 5'000'000) {
    const int d = K.degree();
    const int m = static_cast<int>(x.cols());
    const int N = d * (m + 1);
    if (static_cast<int>(x.rows()) != d) throw Error(ErrorKind::InvalidInput, "x needs one row per place");
    if (!(H > 0) || !(v > 0)) throw Error(ErrorKind::InvalidInput, "box sides must be positive");
    std::vector<Matrix<Real>> g;
    for (int s = 0; s < d; ++s) {
        Matrix<Real> b(m + 1, m + 1);
        b(0, 0) = 1 / v;
        for (int i = 1; i <= m; ++i) {
            b(0, i) = x(s, i - 1) / v;
            b(i, i) = 1 / H;
        }
        g.push_back(b);
    }
    auto lat = restriction_of_scalars(g, K);
    auto red = lll_reduce_robust(lat.ros_basis);
    const Real slack = 1 + pow2(-200);
    BoxEnumeration out;
    auto st = enumerate_ball(
        red.basis, Real(N),
        [&](const std::vector<long>& zr, Real&) {
            std::vector<Real> zrr(zr.begin(), zr.end());
            auto y = red.basis * zrr;
            for (const auto& c : y)
                if (abs(c) > slack) return;
            std::vector<Integer> z(N);
            for (int a = 0; a < N; ++a) {
                Real acc = 0;
                for (int b = 0; b < N; ++b)
                    if (zr[b] != 0) acc += red.transform(a, b) * Real(zr[b]);
                z[a] = round_to_integer(acc);
            }
            auto p = detail::make_approx(K, x, z);
            if (p.value > v * slack || sup_norm(p.q_rows) > H * slack) return;
            out.points.push_back(std::move(p));
        },
        budget);
    out.complete = st.complete;
    out.nodes = st.nodes;
    return out;
}

namespace detail {

/// Deterministic order: smaller value, then smaller coordinates
/// (max |z|, sum |z|), then lexicographically greater normalized coords.
inline bool approx_before(const ApproxPoint& a, const ApproxPoint& b) {
    const Real tie = pow2(-200);
    const Real scale = std::max(Real(abs(a.value)), Real(abs(b.value)));
    if (abs(a.value - b.value) > tie * scale) return a.value < b.value;
    return witness_before(a.coords, b.coords);
}

struct LeastValue {
    std::optional<ApproxPoint> best;
    bool complete = true;
};

/// Least admissible point with value <= v_stop.  The value side starts at
/// v_ref 2^-48 and grows by 16: every box holds all points of smaller value,
/// so the first admissible hit is the minimum.  A box that a small probe
/// cannot finish is thinned first: near a singular x a whole sublattice of
/// near-relations with tiny values sits in every box above their scale.
template <class Accept>
LeastValue least_value_point(const Field& K, const KSVector& x, const Real& H, const Real& v_ref, const Real& v_stop,
                             long budget, Accept accept) {
    const long probe = std::min(budget, 50'000L);
    const Real floor = std::min(Real(v_ref * pow2(-(kWorkingBits - 64))), v_stop);
    LeastValue out;
    Real empty = 0;  // largest v seen with no admissible point
    Real v = std::min(Real(v_ref * pow2(-48)), v_stop);
    for (;;) {
        auto box = enumerate_approximations(K, x, H, v, probe);
        if (!box.complete) {
            const Real lower = empty > 0 ? empty : Real(v * pow2(-64));
            if (v > 2 * lower && v > floor) {
                v = std::max(Real(mp::sqrt(lower * v)), floor);
                continue;
            }
            box = enumerate_approximations(K, x, H, v, budget);
        }
        for (auto& p : box.points) {
            if (!accept(p)) continue;
            if (!out.best || approx_before(p, *out.best)) out.best = std::move(p);
        }
        out.complete = box.complete;
        if (out.best || !box.complete || v >= v_stop) return out;
        empty = v;
        v = std::min(Real(v * 16), v_stop);
    }
}

}  // namespace detail

struct DirichletSolution {
    FieldElement q0;
    std::vector<FieldElement> q;
    Real value;
    Real Q;
    Real house_bound;  // Q D_K^{1/(2d)}
    Real value_bound;  // D_K^{1/(2d)} / Q^m
    bool certified = true;
};

inline Real dirichlet_constant(const Field& K) { return mp::pow(Real(K.discriminant()), Real(1) / (2 * K.degree())); }

/// Best approximation inside the Minkowski box house(q_i) <= Q D^{1/2d},
/// value <= D^{1/2d} / Q^m.  The box has volume 2^{d(m+1)} covol, so a
/// nonzero lattice point exists; NoSolutionInBox reports the case where
/// every point in it has q = 0 (Q below the effective threshold).
inline DirichletSolution dirichlet_solve(const Field& K, const KSVector& x, const Real& Q, long budget = 5'000'000) {
    if (!(Q > 0)) throw Error(ErrorKind::InvalidInput, "Q must be positive");
    const int m = static_cast<int>(x.cols());
    DirichletSolution sol;
    const Real c = dirichlet_constant(K);
    sol.Q = Q;
    sol.house_bound = Q * c;
    sol.value_bound = c / mp::pow(Q, m);
    auto r = detail::least_value_point(K, x, sol.house_bound, sol.value_bound, sol.value_bound, budget,
                                       [](const ApproxPoint& p) { return !p.q_zero(); });
    if (!r.complete && !r.best) throw Error(ErrorKind::BudgetExceeded, "enumeration budget exhausted");
    if (!r.best) throw Error(ErrorKind::NoSolutionInBox, "no (q0, q) with q != 0 in the box for Q = " + format_real(Q, 8));
    sol.q0 = r.best->q0;
    sol.q = r.best->q;
    sol.value = r.best->value;
    sol.certified = r.complete;
    return sol;
}

struct EtaResult {
    Real value;
    FieldElement q0;
    std::vector<FieldElement> q;
    bool zero = false;  // value is at rounding level: an exact relation
    bool certified = true;
};

/// eta_{Phi,x}(t) = min over q != 0 with Phi(q) <= t of min_{q0} |q.x + q0|.
/// Found by least_value_point over house(q_i) <= H(t).
inline EtaResult eta(const Field& K, const KSVector& x, const Real& t, const Phi& phi = {}, long budget = 5'000'000) {
    const int d = K.degree();
    const int m = static_cast<int>(x.cols());
    if (!(t >= 1)) throw Error(ErrorKind::InvalidInput, "t must be at least the minimal Phi value 1");
    const Real H = phi.house_bound(t);
    // Minkowski guarantees a point at v0; past it only Phi != house or
    // q = 0 can leave the box empty.
    const Real v0 = mp::pow(Real(K.discriminant()), Real(m + 1) / (2 * d)) / mp::pow(H, m);
    const Real slack = 1 + pow2(-200);
    auto r = detail::least_value_point(K, x, H, v0, v0 * pow2(400), budget, [&](const ApproxPoint& p) {
        return !p.q_zero() && phi.value_rows(p.q_rows) <= t * slack;
    });
    if (!r.complete) throw Error(ErrorKind::BudgetExceeded, "eta enumeration budget exhausted");
    if (!r.best) throw Error(ErrorKind::BudgetExceeded, "eta: no admissible q found");
    EtaResult out;
    out.q0 = r.best->q0;
    out.q = r.best->q;
    out.value = r.best->value;
    // Rounding level of q.x + q0 at working precision.
    Real scale = 1 + sup_norm(r.best->q_rows) * (1 + sup_norm(x));
    if (out.value <= scale * pow2(-(kWorkingBits - 40))) {
        out.zero = true;
        out.value = 0;
    }
    return out;
}

struct ExponentEstimate {
    Real omega_hat = 0;
    Real t_min = 0, t_max = 0;
    Real residual = 0;
    bool unstable = false;
    bool infinite = false;  // eta vanished: exact relation, omega_hat = inf
    std::vector<Real> t, eta;
};

/// Slope of -log eta against log t over a geometric grid.
inline ExponentEstimate uniform_exponent_estimate(const Field& K, const KSVector& x, const std::vector<Real>& grid,
                                                  const Phi& phi = {}, long budget = 5'000'000) {
    if (grid.size() < 8) throw Error(ErrorKind::InvalidInput, "grid needs at least 8 points");
    const Real ratio = grid[1] / grid[0];
    for (std::size_t k = 1; k < grid.size(); ++k)
        if (!(grid[k] > grid[k - 1]) || abs(grid[k] / grid[k - 1] - ratio) > Real("1e-9") * ratio)
            throw Error(ErrorKind::InvalidInput, "grid must be geometric and increasing");
    ExponentEstimate est;
    est.t_min = grid.front();
    est.t_max = grid.back();
    std::vector<Real> lx, ly;
    for (const auto& t : grid) {
        auto r = eta(K, x, t, phi, budget);
        est.t.push_back(t);
        est.eta.push_back(r.value);
        if (r.zero) {
            est.infinite = true;
            continue;
        }
        lx.push_back(mp::log(t));
        ly.push_back(-mp::log(r.value));
    }
    if (est.infinite) {
        est.omega_hat = std::numeric_limits<Real>::infinity();
        return est;
    }
    est.omega_hat = fit_slope(lx, ly, &est.residual);
    est.unstable = est.residual > Real("0.2");
    return est;
}

// Total irrationality.

/// x given exactly.  Coordinate (sigma_s, i) is sigma_s(rows[s][i]) for an
/// element of K; x in K^m has equal rows, and per-place rational points (as
/// produced by the construction) have rational elements.
struct ExactPoint {
    std::vector<std::vector<FieldElement>> rows;  // d x m

    static ExactPoint in_field(const Field& K, const std::vector<FieldElement>& x) {
        return ExactPoint{std::vector<std::vector<FieldElement>>(K.degree(), x)};
    }
    static ExactPoint from_rationals(const Field& K, const std::vector<std::vector<Rational>>& r) {
        ExactPoint p;
        for (const auto& row : r) {
            p.rows.emplace_back();
            for (const auto& q : row) p.rows.back().push_back(K.from_rational(q));
        }
        return p;
    }

    std::size_t m() const { return rows.empty() ? 0 : rows[0].size(); }

    KSVector numeric(const Field& K) const {
        KSVector x(rows.size(), m());
        for (std::size_t s = 0; s < rows.size(); ++s)
            for (std::size_t i = 0; i < rows[s].size(); ++i) x(s, i) = K.embed(rows[s][i])[s];
        return x;
    }
};

struct IrrationalityVerdict {
    bool relation = false;
    Real bound;
    std::string mode;  // "exact" or "numeric"
    FieldElement q0;
    std::vector<FieldElement> q;
    Real relation_value = 0;
    int relation_rank = 0;  // rank of the full integer relation lattice (exact mode)
    std::vector<ApproxPoint> candidates;  // numeric integer-relation heuristic
};

/// Basis (columns) of {z in Z^n : A z = 0} by unimodular column reduction.
inline Matrix<Integer> integer_kernel(Matrix<Integer> A) {
    const std::size_t r = A.rows(), n = A.cols();
    Matrix<Integer> U = Matrix<Integer>::identity(n);
    std::size_t c0 = 0;
    for (std::size_t i = 0; i < r && c0 < n; ++i) {
        while (true) {
            std::size_t piv = n;
            for (std::size_t c = c0; c < n; ++c)
                if (A(i, c) != 0 && (piv == n || abs(A(i, c)) < abs(A(i, piv)))) piv = c;
            if (piv == n) break;
            bool done = true;
            for (std::size_t c = c0; c < n; ++c) {
                if (c == piv || A(i, c) == 0) continue;
                Integer q = A(i, c) / A(i, piv);
                for (std::size_t k = 0; k < r; ++k) A(k, c) -= q * A(k, piv);
                for (std::size_t k = 0; k < n; ++k) U(k, c) -= q * U(k, piv);
                if (A(i, c) != 0) done = false;
            }
            if (done) {
                A.swap_columns(piv, c0);
                U.swap_columns(piv, c0);
                ++c0;
                break;
            }
        }
    }
    Matrix<Integer> K(n, n - c0);
    for (std::size_t c = c0; c < n; ++c)
        for (std::size_t k = 0; k < n; ++k) K(k, c - c0) = U(k, c);
    return K;
}

/// Searches (q0, q) != 0 with Phi(q) <= H and q.x + q0 = 0 at every place.
/// Exact mode computes the full integer relation lattice and enumerates it
/// under the house bound, so a NoRelation verdict is a proof for that H.
/// The reported relation has least Phi; ties go to the smaller witness.
inline IrrationalityVerdict totally_irrational_certificate(const Field& K, const ExactPoint& x, const Real& H,
                                                           const Phi& phi = {}, long budget = 5'000'000) {
    const int d = K.degree();
    const int m = static_cast<int>(x.m());
    const int N = d * (m + 1);
    IrrationalityVerdict v;
    v.bound = H;
    v.mode = "exact";
    // Linear conditions on the module coordinates z of (q0, q).
    if (static_cast<int>(x.rows.size()) != d) throw Error(ErrorKind::InvalidInput, "need one row per place");
    // At place s the relation reads q0 + sum_i y_{s,i} q_i = 0 in K.
    std::vector<std::vector<Rational>> rows;
    for (int s = 0; s < d; ++s) {
        std::vector<Matrix<Rational>> M;
        for (const auto& y : x.rows[s]) M.push_back(K.mult_matrix(y));
        for (int j = 0; j < d; ++j) {
            std::vector<Rational> row(N, Rational(0));
            row[j] = 1;
            for (int i = 0; i < m; ++i)
                for (int c = 0; c < d; ++c) row[(i + 1) * d + c] = M[i](j, c);
            rows.push_back(row);
        }
    }
    Matrix<Integer> A(rows.size(), N);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        Integer l = 1;
        for (const auto& c : rows[r]) l = mp::lcm(l, Integer(mp::denominator(c)));
        for (int c = 0; c < N; ++c) A(r, c) = mp::numerator(rows[r][c]) * (l / mp::denominator(rows[r][c]));
    }
    Matrix<Integer> ker = integer_kernel(A);
    v.relation_rank = static_cast<int>(ker.cols());
    if (ker.cols() == 0) return v;
    {
        // Exact reduction first: kernel entries can run to hundreds of bits,
        // beyond what the Real Gram-Schmidt below can resolve.
        Matrix<Rational> kr(ker.rows(), ker.cols());
        for (std::size_t a = 0; a < ker.rows(); ++a)
            for (std::size_t b = 0; b < ker.cols(); ++b) kr(a, b) = Rational(ker(a, b));
        kr = lll_reduce(kr).basis;
        for (std::size_t a = 0; a < ker.rows(); ++a)
            for (std::size_t b = 0; b < ker.cols(); ++b) ker(a, b) = mp::numerator(kr(a, b));
    }

    // The q-part determines q0, so the kernel embeds into the q rows; scale
    // them by 1/h and enumerate the unit cube.  h doubles from 1 up to H and
    // the first nonempty pass holds the least-Phi relation.
    const std::size_t k = ker.cols();
    const auto& E = K.embed_matrix();
    const Real slack = 1 + pow2(-200);
    const KSVector xn = x.numeric(K);
    std::vector<ApproxPoint> found;
    auto search = [&](const Real& h) {
        const Real Hb = phi.house_bound(h);
        Matrix<Real> B(d * m, k);
        for (std::size_t c = 0; c < k; ++c)
            for (int s = 0; s < d; ++s)
                for (int i = 0; i < m; ++i) {
                    Real acc = 0;
                    for (int j = 0; j < d; ++j) acc += Real(ker((i + 1) * d + j, c)) * E(s, j);
                    B(s * m + i, c) = acc / Hb;
                }
        // Reduce exactly: the kernel mixes vectors whose sizes differ by
        // hundreds of bits, where Real Gram-Schmidt loses the small ones.
        const auto red = lll_reduce_exact(B);
        auto st = enumerate_ball(
            red.basis, Real(d * m),
            [&](const std::vector<long>& zr, Real&) {
                std::vector<Real> zrr(zr.begin(), zr.end());
                auto y = red.basis * zrr;
                for (const auto& c : y)
                    if (abs(c) > slack) return;
                std::vector<Integer> zk(k);
                for (std::size_t a = 0; a < k; ++a) {
                    Real acc = 0;
                    for (std::size_t b = 0; b < k; ++b)
                        if (zr[b] != 0) acc += red.transform(a, b) * Real(zr[b]);
                    zk[a] = round_to_integer(acc);
                }
                std::vector<Integer> z(N, Integer(0));
                for (int a = 0; a < N; ++a)
                    for (std::size_t b = 0; b < k; ++b) z[a] += ker(a, b) * zk[b];
                auto p = detail::make_approx(K, xn, z);
                if (phi.value_rows(p.q_rows) > h * slack) return;
                found.push_back(std::move(p));
            },
            budget);
        if (!st.complete) throw Error(ErrorKind::BudgetExceeded, "relation search budget exhausted");
    };
    for (Real h = std::min(Real(1), H);; h = std::min(2 * h, H)) {
        search(h);
        if (!found.empty() || h >= H) break;
    }
    if (found.empty()) return v;
    const Real tie = pow2(-200);
    const ApproxPoint* best = &found[0];
    for (const auto& p : found) {
        const Real a = phi.value_rows(p.q_rows), b = phi.value_rows(best->q_rows);
        if (abs(a - b) > tie * b ? a < b : detail::witness_before(p.coords, best->coords)) best = &p;
    }
    v.relation = true;
    v.q0 = best->q0;
    v.q = best->q;
    v.relation_value = 0;
    return v;
}

/// Numeric mode: a relation is a (q0, q) with Phi(q) <= H and value below
/// 2^{-p/2}.  The box search is exhaustive; the LLL step on the stacked
/// embedding rows only proposes further candidates.
inline IrrationalityVerdict totally_irrational_certificate(const Field& K, const KSVector& x, const Real& H,
                                                           const Phi& phi = {}, long budget = 5'000'000) {
    const int d = K.degree();
    const int m = static_cast<int>(x.cols());
    const int N = d * (m + 1);
    IrrationalityVerdict v;
    v.bound = H;
    v.mode = "numeric";
    const Real thresh = pow2(-K.precision_bits() / 2);
    // Searching a box this thin directly would exceed the dynamic range of
    // Gram-Schmidt; the Minkowski-size box contains it and is well scaled.
    const Real Hb = phi.house_bound(H);
    const Real v0 = mp::pow(Real(K.discriminant()), Real(m + 1) / (2 * d)) / mp::pow(Hb, m);
    auto box = enumerate_approximations(K, x, Hb, std::max(thresh, v0), budget);
    if (!box.complete) throw Error(ErrorKind::BudgetExceeded, "relation search budget exhausted");
    const ApproxPoint* best = nullptr;
    for (const auto& p : box.points) {
        if (p.q_zero() || p.value > thresh || phi.value_rows(p.q_rows) > H * (1 + pow2(-200))) continue;
        if (!best || detail::approx_before(p, *best)) best = &p;
    }
    if (best) {
        v.relation = true;
        v.q0 = best->q0;
        v.q = best->q;
        v.relation_value = best->value;
    }
    // Integer-relation heuristic: columns (e_c, C * value contribution).
    Matrix<Real> B(N + d, N);
    const Real C = pow2(K.precision_bits() / 4);
    const auto& E = K.embed_matrix();
    for (int k = 0; k <= m; ++k)
        for (int j = 0; j < d; ++j) {
            const int col = k * d + j;
            B(col, col) = 1;
            for (int s = 0; s < d; ++s) B(N + s, col) = C * E(s, j) * (k == 0 ? Real(1) : x(s, k - 1));
        }
    try {
        auto red = lll_reduce(B);
        for (int c = 0; c < std::min(N, 3); ++c) {
            std::vector<Integer> z(N);
            for (int a = 0; a < N; ++a) z[a] = round_to_integer(red.transform(a, c));
            auto p = detail::make_approx(K, x, z);
            if (!p.q_zero()) v.candidates.push_back(std::move(p));
        }
    } catch (const Error&) {
        // The heuristic is advisory only.
    }
    return v;
}

}  // namespace dioph
