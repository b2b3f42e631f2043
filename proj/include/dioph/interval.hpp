#pragma once

// Closed real intervals with outward padding after every operation.  Real
// arithmetic rounds to nearest, so each endpoint is pushed out by a relative
// 2^-240 plus a tiny absolute term; this dominates the rounding error of
// a single operation at the working precision.

#include "dioph/real.hpp"

#include <algorithm>

namespace dioph {

class Interval {
public:
    Interval() = default;
    explicit Interval(const Real& x) : lo_(x), hi_(x) {}
    Interval(const Real& lo, const Real& hi) : lo_(lo), hi_(hi) {
        if (lo_ > hi_) std::swap(lo_, hi_);
    }

    /// Point interval for a value that is itself only accurate to rounding.
    static Interval fuzzy(const Real& x) { return Interval(x).padded(); }

    const Real& lo() const { return lo_; }
    const Real& hi() const { return hi_; }
    Real width() const { return hi_ - lo_; }
    Real mag() const { return std::max(Real(abs(lo_)), Real(abs(hi_))); }
    bool contains(const Real& x) const { return lo_ <= x && x <= hi_; }

    friend Interval operator+(const Interval& a, const Interval& b) {
        return Interval(a.lo_ + b.lo_, a.hi_ + b.hi_).padded();
    }
    friend Interval operator-(const Interval& a, const Interval& b) {
        return Interval(a.lo_ - b.hi_, a.hi_ - b.lo_).padded();
    }
    friend Interval operator-(const Interval& a) { return Interval(-a.hi_, -a.lo_); }
    friend Interval operator*(const Interval& a, const Interval& b) {
        Real p[4] = {a.lo_ * b.lo_, a.lo_ * b.hi_, a.hi_ * b.lo_, a.hi_ * b.hi_};
        return Interval(*std::min_element(p, p + 4), *std::max_element(p, p + 4)).padded();
    }

    Interval pow(int k) const {
        Interval r(Real(1));
        for (int i = 0; i < k; ++i) r = r * *this;
        return r;
    }

private:
    Interval padded() const {
        static const Real rel = pow2(-240);
        static const Real tiny = pow2(-2000);
        return Interval(lo_ - abs(lo_) * rel - tiny, hi_ + abs(hi_) * rel + tiny);
    }

    Real lo_ = 0, hi_ = 0;
};

}  // namespace dioph
