#pragma once

// Scalar types and a small dense matrix used throughout the library.
//
// Real is a 257-bit MPFR float (77 decimal digits); all field embeddings,
// flows and lattice searches run at this working precision.  Exact
// quantities (field element coordinates, module coordinates) use GMP
// integers and rationals.

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <algorithm>
#include <cctype>
#include <iomanip>
#include <limits>
#include <stdexcept>
#include <cstddef>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

namespace dioph {

namespace mp = boost::multiprecision;

using Real = mp::number<mp::mpfr_float_backend<77, mp::allocate_stack>, mp::et_off>;
using Integer = mp::mpz_int;
using Rational = mp::mpq_rational;

/// Working precision of Real in bits.
inline constexpr int kWorkingBits = std::numeric_limits<Real>::digits;

/// Default precision requested by callers, per the library conventions.
inline constexpr int kDefaultPrecisionBits = 256;

inline Real to_real(const Rational& q) {
    return Real(mp::numerator(q)) / Real(mp::denominator(q));
}

inline Real to_real(const Integer& z) { return Real(z); }

inline Real to_real(const Real& x) { return x; }

inline Real pow2(int e) { return mp::ldexp(Real(1), e); }

/// Nearest integer, ties away from zero.
inline Integer round_to_integer(const Real& x) {
    Real r = mp::round(x);
    Integer z;
    mpfr_get_z(z.backend().data(), r.backend().data(), MPFR_RNDN);
    return z;
}

/// Exact value of a Real (every finite Real is a dyadic rational).
inline Rational to_rational(const Real& x) {
    if (x == 0) return Rational(0);
    mpz_t m;
    mpz_init(m);
    const mpfr_exp_t e = mpfr_get_z_2exp(m, x.backend().data());
    Integer z;
    mpz_set(z.backend().data(), m);
    mpz_clear(m);
    if (e >= 0) return Rational(z << static_cast<unsigned>(e));
    return Rational(z, Integer(1) << static_cast<unsigned>(-e));
}

inline Integer floor_to_integer(const Real& x) {
    Integer z;
    mpfr_get_z(z.backend().data(), x.backend().data(), MPFR_RNDD);
    return z;
}

/// Fixed-format decimal with `digits` significant digits.  Used by every
/// text output so that identical inputs give byte-identical files.
inline std::string format_real(const Real& x, int digits = 30) {
    if (x == 0) return "0";
    std::ostringstream os;
    os << std::scientific << std::setprecision(digits - 1) << x;
    return os.str();
}

inline std::string format_rational(const Rational& q) {
    if (mp::denominator(q) == 1) return mp::numerator(q).str();
    return mp::numerator(q).str() + "/" + mp::denominator(q).str();
}

/// Parses "p", "p/q" or a decimal literal ("0.125", "-3e-2") exactly.
inline Rational parse_rational(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    if (s.empty()) throw std::invalid_argument("empty rational literal");
    auto slash = s.find('/');
    if (slash != std::string::npos)
        return Rational(Integer(s.substr(0, slash)), Integer(s.substr(slash + 1)));
    auto epos = s.find_first_of("eE");
    int exp10 = 0;
    std::string mant = s;
    if (epos != std::string::npos) {
        exp10 = std::stoi(s.substr(epos + 1));
        mant = s.substr(0, epos);
    }
    auto dot = mant.find('.');
    if (dot != std::string::npos) {
        exp10 -= static_cast<int>(mant.size() - dot - 1);
        mant.erase(dot, 1);
    }
    if (mant.empty() || mant == "-" || mant == "+")
        throw std::invalid_argument("bad rational literal: " + text);
    Rational r{Integer(mant)};
    Integer ten = 10;
    if (exp10 > 0) r *= Rational(mp::pow(ten, static_cast<unsigned>(exp10)));
    if (exp10 < 0) r /= Rational(mp::pow(ten, static_cast<unsigned>(-exp10)));
    return r;
}

/// Row-major dense matrix.  Deliberately minimal: the dimensions in this
/// library never exceed a few dozen.
template <class T>
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, const T& fill = T(0))
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::initializer_list<std::initializer_list<T>> init) {
        rows_ = init.size();
        cols_ = rows_ ? init.begin()->size() : 0;
        data_.reserve(rows_ * cols_);
        for (const auto& row : init) {
            if (row.size() != cols_) throw std::invalid_argument("ragged matrix literal");
            data_.insert(data_.end(), row.begin(), row.end());
        }
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::vector<T> column(std::size_t c) const {
        std::vector<T> v(rows_);
        for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
        return v;
    }
    void set_column(std::size_t c, const std::vector<T>& v) {
        for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = v[r];
    }
    void swap_columns(std::size_t a, std::size_t b) {
        for (std::size_t r = 0; r < rows_; ++r) std::swap((*this)(r, a), (*this)(r, b));
    }

    Matrix transpose() const {
        Matrix t(cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
        return t;
    }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.cols_ != b.rows_) throw std::invalid_argument("matrix product shape mismatch");
        Matrix out(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                if (a(i, k) == 0) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) out(i, j) += a(i, k) * b(k, j);
            }
        return out;
    }

    friend std::vector<T> operator*(const Matrix& a, const std::vector<T>& v) {
        if (a.cols_ != v.size()) throw std::invalid_argument("matrix-vector shape mismatch");
        std::vector<T> out(a.rows_, T(0));
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) out[i] += a(i, k) * v[k];
        return out;
    }

    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

/// Determinant by Gaussian elimination with partial pivoting (exact for
/// Rational, at working precision for Real).
template <class T>
T determinant(Matrix<T> a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("determinant of non-square matrix");
    const std::size_t n = a.rows();
    T det = 1;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (abs(a(r, c)) > abs(a(piv, c))) piv = r;
        if (a(piv, c) == 0) return T(0);
        if (piv != c) {
            for (std::size_t k = 0; k < n; ++k) std::swap(a(piv, k), a(c, k));
            det = -det;
        }
        det *= a(c, c);
        for (std::size_t r = c + 1; r < n; ++r) {
            if (a(r, c) == 0) continue;
            T f = a(r, c) / a(c, c);
            for (std::size_t k = c; k < n; ++k) a(r, k) -= f * a(c, k);
        }
    }
    return det;
}

/// Inverse by Gauss-Jordan.  Throws std::domain_error when singular.
template <class T>
Matrix<T> inverse(Matrix<T> a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("inverse of non-square matrix");
    const std::size_t n = a.rows();
    Matrix<T> inv = Matrix<T>::identity(n);
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (abs(a(r, c)) > abs(a(piv, c))) piv = r;
        if (a(piv, c) == 0) throw std::domain_error("singular matrix");
        if (piv != c)
            for (std::size_t k = 0; k < n; ++k) {
                std::swap(a(piv, k), a(c, k));
                std::swap(inv(piv, k), inv(c, k));
            }
        T p = a(c, c);
        for (std::size_t k = 0; k < n; ++k) {
            a(c, k) /= p;
            inv(c, k) /= p;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c || a(r, c) == 0) continue;
            T f = a(r, c);
            for (std::size_t k = 0; k < n; ++k) {
                a(r, k) -= f * a(c, k);
                inv(r, k) -= f * inv(c, k);
            }
        }
    }
    return inv;
}

template <class T>
Matrix<Real> to_real(const Matrix<T>& m) {
    Matrix<Real> out(m.rows(), m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) out(r, c) = to_real(m(r, c));
    return out;
}

}  // namespace dioph
