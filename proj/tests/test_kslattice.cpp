#include <doctest.h>

#include "dioph/kslattice.hpp"
#include "support/gen.hpp"
#include "support/oracles.hpp"

using namespace dioph;
using namespace dioph::testing;

namespace {

Real gram_covolume(const Matrix<Real>& b) {
    Matrix<Real> G(b.cols(), b.cols());
    for (std::size_t i = 0; i < b.cols(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            Real s = 0;
            for (std::size_t r = 0; r < b.rows(); ++r) s += b(r, i) * b(r, j);
            G(i, j) = s;
        }
    return mp::sqrt(determinant(G));
}

std::vector<Matrix<Real>> blocks(const Field& K, const Matrix<Real>& g) {
    return std::vector<Matrix<Real>>(K.degree(), g);
}

}  // namespace

TEST_CASE("restriction_of_scalars covolume examples") {
    Field K = field_sqrt2();
    auto L1 = identity_lattice(K, 1);
    CHECK(rel_err(L1.covolume(), mp::sqrt(Real(8))) < Real("1e-70"));
    CHECK(rel_err(gram_covolume(L1.ros_basis), mp::sqrt(Real(8))) < Real("1e-70"));
    CHECK(rel_err(identity_lattice(field_q(), 2).covolume(), Real(1)) < Real("1e-70"));
    auto L2 = identity_lattice(K, 2);
    CHECK(rel_err(L2.covolume(), Real(8)) < Real("1e-70"));
    CHECK(rel_err(gram_covolume(L2.ros_basis), Real(8)) < Real("1e-70"));
}

TEST_CASE("restriction_of_scalars rejects singular blocks") {
    Field K = field_sqrt2();
    Matrix<Real> s{{Real(1), Real(2)}, {Real(2), Real(4)}};
    try {
        restriction_of_scalars({Matrix<Real>::identity(2), s}, K);
        FAIL("no error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::SingularBlock);
    }
}

TEST_CASE("content examples") {
    Field K = field_sqrt2();
    KSVector e0(2, 2);
    e0(0, 0) = e0(1, 0) = 1;
    CHECK(content(e0) == 1);
    auto y = embed_vector(K, {K.theta(), K.zero()});
    CHECK(rel_err(content(y), Real(2)) < pow2(-240));
}

TEST_CASE("systole examples") {
    Field K = field_sqrt2();
    auto r = systole_content(identity_lattice(K, 2));
    CHECK(r.certified);
    CHECK(rel_err(r.delta, Real(1)) < pow2(-200));
    CHECK(r.witness[0] == K.one());
    CHECK(r.witness[1].is_zero());

    Field Q = field_q();
    Matrix<Real> g{{mp::exp(Real(1)), Real(0)}, {Real(0), mp::exp(Real(-1))}};
    auto s = systole_content(restriction_of_scalars({g}, Q));
    CHECK(rel_err(s.delta, mp::exp(Real(-1))) < pow2(-200));
    CHECK(s.witness[0].is_zero());
    CHECK(s.witness[1] == Q.one());
    // brute force over |a|, |b| <= 5 agrees
    CHECK(rel_err(oracle::brute_systole(Q, {g}, 5), s.delta) < pow2(-200));
}

TEST_CASE("systole is unchanged by a diagonal unit") {
    Field K = field_sqrt2();
    auto u = K.embed(K.from_integers({1, 1}));  // 1 + sqrt2 has norm -1
    Gen gen(51);
    for (int k = 0; k < 10; ++k) {
        Matrix<Real> g = gen.matrix(2, -2, 2);
        std::vector<Matrix<Real>> a = blocks(K, g), b = a;
        for (int s = 0; s < 2; ++s)
            for (int r = 0; r < 2; ++r)
                for (int c = 0; c < 2; ++c) b[s](r, c) *= u[s];
        auto sa = systole_content(restriction_of_scalars(a, K));
        auto sb = systole_content(restriction_of_scalars(b, K));
        CHECK(rel_err(sa.delta, sb.delta) < pow2(-180));
    }
}

TEST_CASE("property: covolume multiplicativity") {
    Gen g(52);
    for (Field K : {field_q(), field_sqrt2(), field_cubic()}) {
        for (int k = 0; k < kCases / 3 + 1; ++k) {
            const int n = static_cast<int>(g.integer(1, 3));
            std::vector<Matrix<Real>> blk;
            for (int s = 0; s < K.degree(); ++s) blk.push_back(g.matrix(n, -3, 3));
            auto L = restriction_of_scalars(blk, K);
            CHECK(rel_err(L.covolume(), L.covolume_formula()) < pow2(-200));
            CHECK(rel_err(gram_covolume(L.ros_basis), L.covolume_formula()) < pow2(-150));
        }
    }
}

TEST_CASE("property: content homogeneity and the sup-norm bound") {
    Gen g(53);
    for (Field K : {field_sqrt2(), field_cubic()}) {
        for (int k = 0; k < kCases; ++k) {
            const int n = static_cast<int>(g.integer(1, 3));
            KSVector y = g.point(K, n, -5, 5);
            Real lam = g.real(-4, 4);
            KSVector ly = y;
            for (std::size_t s = 0; s < y.rows(); ++s)
                for (std::size_t i = 0; i < y.cols(); ++i) ly(s, i) *= lam;
            CHECK(rel_err(content(ly), mp::pow(abs(lam), K.degree()) * content(y)) < pow2(-240));
            CHECK(content(y) <= mp::pow(sup_norm(y), K.degree()) * (1 + pow2(-240)));
            auto a = g.nonzero_integral(K, 5);
            ModuleVector v;
            for (int i = 0; i < n; ++i) v.push_back(g.integral(K, 5));
            ModuleVector av;
            for (const auto& e : v) av.push_back(K.mul(a, e));
            CHECK(rel_err(content(embed_vector(K, av)), abs(to_real(K.norm(a))) * content(embed_vector(K, v))) <
                  pow2(-200));
        }
    }
}

TEST_CASE("property: systole equals exhaustive enumeration over [-20, 20]^{dn}") {
    Gen g(54);
    int done = 0;
    for (int k = 0; done < kCases; ++k) {
        Field K = g.coin() ? field_q() : field_sqrt2();
        const int n = static_cast<int>(g.integer(1, 2));
        std::vector<Matrix<Real>> blk;
        bool singular = false;
        for (int s = 0; s < K.degree(); ++s) {
            Matrix<Real> b(n, n);
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c) b(r, c) = Real(g.integer(-3, 3));
            if (determinant(b) == 0) singular = true;
            blk.push_back(b);
        }
        if (singular) continue;
        ++done;
        auto sys = systole_content(restriction_of_scalars(blk, K));
        CHECK(sys.certified);
        Real brute = oracle::brute_systole(K, blk, 20);
        CHECK(rel_err(sys.delta, brute) < pow2(-180));
    }
}

TEST_CASE("property: systole of O_K^n is exactly 1") {
    for (Field K : {field_q(), field_sqrt2(), field_sqrt5()})
        for (int n = 1; n <= 3; ++n) {
            auto r = systole_content(identity_lattice(K, n));
            CHECK(r.certified);
            CHECK(rel_err(r.delta, Real(1)) < pow2(-200));
        }
}

TEST_CASE("dump_lattice writes one line per generator") {
    auto text = dump_lattice(identity_lattice(field_sqrt2(), 1), 6);
    CHECK(text == "[1,0] | 1.00000e+00 | 1.00000e+00\n[0,1] | -1.41421e+00 | 1.41421e+00\n");
}
