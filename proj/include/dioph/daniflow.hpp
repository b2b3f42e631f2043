#pragma once

// The diagonal flow g_t = diag(e^{mt}, e^{-t}, ..., e^{-t}) and the unipotent
// u_x on K_S^{m+1}, systole traces along g_t u_x O_K^{m+1}, the divergence
// diagnostic, and the action on exterior powers.

#include "dioph/error.hpp"
#include "dioph/kslattice.hpp"
#include "dioph/numberfield.hpp"
#include "dioph/real.hpp"

#include <string>
#include <vector>

namespace dioph {

inline Real checked_exp(const Real& a) {
    Real e = mp::exp(a);
    if (!mp::isfinite(e) || e == 0) throw Error(ErrorKind::Overflow, "exp(" + format_real(a, 6) + ") out of range");
    return e;
}

/// g_t u_x at place sigma as an (m+1) x (m+1) matrix; x is d x m.
inline Matrix<Real> flow_matrix(const Real& t, const KSVector& x, std::size_t place) {
    const std::size_t m = x.cols();
    Matrix<Real> M(m + 1, m + 1);
    const Real up = checked_exp(Real(m) * t);
    const Real down = checked_exp(-t);
    M(0, 0) = up;
    for (std::size_t i = 1; i <= m; ++i) {
        M(0, i) = up * x(place, i - 1);
        M(i, i) = down;
    }
    return M;
}

/// g_t u_x v per place.  Coordinate 0 is e^{mt}(q_0 + q . x), the rest e^{-t} q_i.
inline KSVector apply_flow(const Field& K, const Real& t, const KSVector& x, const ModuleVector& v) {
    const std::size_t m = x.cols();
    if (v.size() != m + 1) throw Error(ErrorKind::InvalidInput, "vector must have m + 1 coordinates");
    if (static_cast<int>(x.rows()) != K.degree()) throw Error(ErrorKind::InvalidInput, "x needs one row per place");
    KSVector y = embed_vector(K, v);
    const Real up = checked_exp(Real(m) * t);
    const Real down = checked_exp(-t);
    KSVector out(y.rows(), m + 1);
    for (std::size_t s = 0; s < y.rows(); ++s) {
        Real lin = y(s, 0);
        for (std::size_t i = 1; i <= m; ++i) lin += y(s, i) * x(s, i - 1);
        out(s, 0) = up * lin;
        for (std::size_t i = 1; i <= m; ++i) out(s, i) = down * y(s, i);
    }
    return out;
}

/// Pure diagonal flow g_t applied to an arbitrary KSVector (d x (m+1)).
inline KSVector apply_diagonal(const Real& t, const KSVector& y) {
    const std::size_t m = y.cols() - 1;
    const Real up = checked_exp(Real(m) * t);
    const Real down = checked_exp(-t);
    KSVector out = y;
    for (std::size_t s = 0; s < y.rows(); ++s) {
        out(s, 0) *= up;
        for (std::size_t i = 1; i <= m; ++i) out(s, i) *= down;
    }
    return out;
}

inline ModuleLattice flow_lattice(const Field& K, const Real& t, const KSVector& x) {
    if (static_cast<int>(x.rows()) != K.degree()) throw Error(ErrorKind::InvalidInput, "x needs one row per place");
    std::vector<Matrix<Real>> g;
    for (int s = 0; s < K.degree(); ++s) g.push_back(flow_matrix(t, x, s));
    return restriction_of_scalars(g, K);
}

struct SystoleTrace {
    std::vector<Real> grid;
    std::vector<Real> values;
    std::vector<ModuleVector> witnesses;
    std::vector<bool> certified;
    bool all_certified() const {
        for (bool c : certified)
            if (!c) return false;
        return true;
    }
};

inline std::vector<Real> uniform_grid(const Real& t0, const Real& t1, const Real& step) {
    std::vector<Real> g;
    const long n = mp::floor((t1 - t0) / step + Real("1e-9")).convert_to<long>();
    for (long k = 0; k <= n; ++k) g.push_back(t0 + step * k);
    return g;
}

inline SystoleTrace systole_trace(const Field& K, const KSVector& x, const std::vector<Real>& grid,
                                  long budget = 2'000'000) {
    for (std::size_t k = 1; k < grid.size(); ++k)
        if (!(grid[k] > grid[k - 1])) throw Error(ErrorKind::InvalidInput, "grid must be increasing");
    SystoleTrace tr;
    tr.grid = grid;
    for (const auto& t : grid) {
        auto r = systole_content(flow_lattice(K, t, x), budget);
        tr.values.push_back(r.delta);
        tr.witnesses.push_back(r.witness);
        tr.certified.push_back(r.certified);
    }
    return tr;
}

enum class VerdictKind { DivergentEvidence, NondivergentEvidence, Inconclusive };

inline const char* to_string(VerdictKind k) {
    switch (k) {
        case VerdictKind::DivergentEvidence: return "DivergentEvidence";
        case VerdictKind::NondivergentEvidence: return "NondivergentEvidence";
        case VerdictKind::Inconclusive: return "Inconclusive";
    }
    return "Unknown";
}

struct DiagnosticOptions {
    Real t_max = 15;
    Real epsilon = Real(1) / 10;
    Real step = Real(1) / 4;
    long budget = 2'000'000;
};

struct Verdict {
    VerdictKind kind = VerdictKind::Inconclusive;
    Real slope = 0;   // least-squares slope of log delta on the tail
    Real onset = 0;   // interpolated time at which delta drops below epsilon for good
    Real floor = 0;   // min delta over the grid
    Real epsilon = 0;
    Real c = 0;       // epsilon^{m+1}, the matching Dirichlet constant
    SystoleTrace trace;
};

/// Least-squares slope of ys against xs.
inline Real fit_slope(const std::vector<Real>& xs, const std::vector<Real>& ys, Real* residual = nullptr) {
    const std::size_t n = xs.size();
    if (n < 2) return 0;
    Real mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    Real sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    Real slope = sxx == 0 ? Real(0) : sxy / sxx;
    if (residual) {
        Real r = 0;
        for (std::size_t i = 0; i < n; ++i) {
            Real e = ys[i] - (my + slope * (xs[i] - mx));
            r += e * e;
        }
        *residual = mp::sqrt(r / n);
    }
    return slope;
}

/// Divergence evidence for the trajectory g_t u_x O_K^{m+1} on [0, t_max].
/// Divergent when delta drops below epsilon and stays there through t_max.
/// Uncertified grid values are upper bounds for delta, so they only make
/// the verdict inconclusive where they sit at or above epsilon in the
/// deciding stretch of the trace.
inline Verdict singularity_diagnostic(const Field& K, const KSVector& x, const DiagnosticOptions& opt = {}) {
    if (!(opt.epsilon > 0 && opt.epsilon < 1)) throw Error(ErrorKind::InvalidInput, "epsilon must lie in (0, 1)");
    if (!(opt.t_max > 0)) throw Error(ErrorKind::InvalidInput, "t_max must be positive");
    Verdict v;
    v.epsilon = opt.epsilon;
    v.c = mp::pow(opt.epsilon, Real(x.cols() + 1));
    v.trace = systole_trace(K, x, uniform_grid(Real(0), opt.t_max, opt.step), opt.budget);
    const auto& vals = v.trace.values;
    const std::size_t n = vals.size();
    v.floor = *std::min_element(vals.begin(), vals.end());

    std::size_t first = n;  // start of the final run below epsilon
    while (first > 0 && vals[first - 1] < opt.epsilon) --first;
    if (first == n) {
        v.kind = v.trace.certified[n - 1] ? VerdictKind::NondivergentEvidence : VerdictKind::Inconclusive;
        return v;
    }
    if (first == 0) {
        v.onset = v.trace.grid[0];
    } else {
        // Interpolate log delta across the crossing.
        Real l0 = mp::log(vals[first - 1]), l1 = mp::log(vals[first]);
        Real le = mp::log(opt.epsilon);
        Real frac = (l0 - le) / (l0 - l1);
        v.onset = v.trace.grid[first - 1] + frac * (v.trace.grid[first] - v.trace.grid[first - 1]);
        if (!v.trace.certified[first - 1]) {
            v.kind = VerdictKind::Inconclusive;
            return v;
        }
    }
    std::vector<Real> ts, ls;
    for (std::size_t k = first; k < n; ++k) {
        ts.push_back(v.trace.grid[k]);
        ls.push_back(mp::log(vals[k]));
    }
    v.slope = fit_slope(ts, ls);
    v.kind = VerdictKind::DivergentEvidence;
    return v;
}

// Exterior powers.

/// j-subsets of {0, ..., n-1} in lexicographic order.
inline std::vector<std::vector<int>> subsets(int n, int j) {
    std::vector<std::vector<int>> out;
    if (j < 0 || j > n) return out;
    std::vector<int> idx(j);
    for (int i = 0; i < j; ++i) idx[i] = i;
    while (true) {
        out.push_back(idx);
        int i = j - 1;
        while (i >= 0 && idx[i] == n - j + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int k = i + 1; k < j; ++k) idx[k] = idx[k - 1] + 1;
    }
    return out;
}

inline std::size_t subset_index(const std::vector<std::vector<int>>& all, const std::vector<int>& s) {
    auto it = std::lower_bound(all.begin(), all.end(), s);
    return static_cast<std::size_t>(it - all.begin());
}

struct WedgeVector {
    int m = 1;  // ambient K_S^{m+1}
    int j = 1;
    std::vector<FieldElement> coords;  // indexed by subsets(m + 1, j)
};

inline Real wedge_norm(const Field& K, const WedgeVector& w) {
    Real h = 0;
    for (const auto& c : w.coords) h = std::max(h, K.house(c));
    return h;
}

/// Coordinates of g_t u_x w at place sigma, closed form.  For I not
/// containing 0 the coefficient is e^{-jt} w_I.  For I containing 0 it is
/// e^{(m-j+1)t}(w_I + sum_{i not in I} s_i w_{I - {0} + {i}} x_i), where
/// s_i = (-1)^{#{k in I - {0} : k < i}} comes from u e_i = e_i + x_i e_0.
inline std::vector<Real> wedge_action(const Field& K, const Real& t, const KSVector& x, const WedgeVector& w,
                                      std::size_t place) {
    const int m = static_cast<int>(x.cols());
    if (w.m != m) throw Error(ErrorKind::InvalidInput, "wedge vector dimension does not match x");
    if (w.j < 1 || w.j > m) throw Error(ErrorKind::GradeOutOfRange, "grade must satisfy 1 <= j <= m");
    const int j = w.j;
    const auto all = subsets(m + 1, j);
    if (w.coords.size() != all.size()) throw Error(ErrorKind::InvalidInput, "wrong number of wedge coordinates");
    std::vector<Real> sw(all.size());
    for (std::size_t a = 0; a < all.size(); ++a) sw[a] = K.embed(w.coords[a])[place];
    const Real up = checked_exp(Real(m - j + 1) * t);
    const Real down = checked_exp(-Real(j) * t);
    std::vector<Real> out(all.size());
    for (std::size_t a = 0; a < all.size(); ++a) {
        const auto& I = all[a];
        if (I[0] != 0) {
            out[a] = down * sw[a];
            continue;
        }
        Real acc = sw[a];
        for (int i = 1; i <= m; ++i) {
            if (std::find(I.begin(), I.end(), i) != I.end()) continue;
            std::vector<int> J(I.begin() + 1, I.end());
            int below = 0;
            for (int k : J)
                if (k < i) ++below;
            J.push_back(i);
            std::sort(J.begin(), J.end());
            Real term = sw[subset_index(all, J)] * x(place, i - 1);
            acc += (below % 2 == 0) ? term : Real(-term);
        }
        out[a] = up * acc;
    }
    return out;
}

/// (sqrt D_K)^m prod_sigma max(e^{(m-j+1)t} |x~ . c(w)|, e^{-jt} |pi_sigma(w)|),
/// i.e. (sqrt D_K)^m times the content of g_t u_x w in the sup norm on the
/// standard basis of the exterior power.
inline Real covolume_lower_bound(const Field& K, const Real& t, const KSVector& x, const WedgeVector& w) {
    const auto all = subsets(w.m + 1, w.j);
    Real prod = 1;
    for (int s = 0; s < K.degree(); ++s) {
        auto img = wedge_action(K, t, x, w, s);
        Real top = 0, rest = 0;
        for (std::size_t a = 0; a < all.size(); ++a) {
            if (all[a][0] == 0) top = std::max(top, Real(abs(img[a])));
            else rest = std::max(rest, Real(abs(img[a])));
        }
        prod *= std::max(top, rest);
    }
    return mp::pow(K.sqrt_disc(), w.m) * prod;
}

}  // namespace dioph
