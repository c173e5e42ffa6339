#include "fixtures.hpp"

#include <catch_amalgamated.hpp>

#include <random>

using namespace tsdae;
using R = Rational;
using Grid = TimeScaleGrid<double>;

namespace {

Mat<double> e(Eigen::Index n, std::initializer_list<Eigen::Index> idx) {
    Mat<double> M = Mat<double>::Zero(n, static_cast<Eigen::Index>(idx.size()));
    Eigen::Index c = 0;
    for (auto i : idx) M(i, c++) = 1.0;
    return M;
}

// Columns of `K` span the same space as `want`.
template <class T>
bool same_span(const Mat<T>& K, const Mat<T>& want) {
    if (K.cols() != want.cols()) return false;
    return linalg::rank(linalg::hcat<T>(K, want)) == static_cast<std::size_t>(want.cols());
}

} // namespace

TEST_CASE("kernel bases", "[subspaces]") {
    auto G0 = fx::Printed<R>::G0();
    auto k0 = kernel_basis<R>(G0);
    CHECK(k0.dim() == 2);
    CHECK(same_span<R>(k0.basis, fx::rows<R>({{0, 0}, {0, 0}, {0, 0}, {1, 0}, {0, 1}})));
    CHECK(same_span<double>(kernel_basis<double>(fx::Printed<double>::G0()).basis, e(5, {3, 4})));

    CHECK(kernel_basis<double>(Mat<double>::Identity(5, 5)).dim() == 0);
    CHECK(kernel_basis<R>(Mat<R>::Identity(5, 5)).dim() == 0);

    auto k1 = kernel_basis<R>(fx::Printed<R>::G1(R(1)));
    REQUIRE(k1.dim() == 1);
    CHECK(same_span<R>(k1.basis, fx::rows<R>({{1}, {-1}, {0}, {1}, {0}})));
    auto k1d = kernel_basis<double>(fx::Printed<double>::G1(1.0));
    CHECK(same_span<double>(k1d.basis, fx::rows<double>({{1}, {-1}, {0}, {1}, {0}})));
}

TEST_CASE("rank plus nullity equals column count", "[subspaces]") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int trial = 0; trial < 40; ++trial) {
        Eigen::Index r = 1 + trial % 4, rows = 5, cols = 6;
        Mat<double> M = Mat<double>::NullaryExpr(rows, r, [&] { return u(rng); }) *
                        Mat<double>::NullaryExpr(r, cols, [&] { return u(rng); });
        auto k = kernel_basis<double>(M);
        CHECK(linalg::rank(M) + static_cast<std::size_t>(k.dim()) == static_cast<std::size_t>(cols));
        CHECK((M * k.basis).norm() <= 1e-12);
    }
    Mat<R> M = fx::rows<R>({{1, 2, 3}, {2, 4, 6}});
    CHECK(linalg::rank(M) + static_cast<std::size_t>(kernel_basis<R>(M).dim()) == 3);
}

TEST_CASE("transversality", "[subspaces]") {
    auto L = fx::paper<R>();
    const auto& s = L.system;
    for (std::size_t k = 0; k < s.grid->last(); ++k) {
        auto rep = check_transversality<R>(s.A.at(k + 1), s.B.at(k));
        CHECK(rep.ok);
        CHECK(rep.dim_ker_A == 0);
        CHECK(rep.rank_B == 3);
    }
    CHECK(check_transversality<double>(Mat<double>::Identity(3, 3), Mat<double>::Identity(3, 3)).ok);
    // A = B = 0: ker A is everything and im B is zero, so the sum is direct
    CHECK(check_transversality<double>(Mat<double>::Zero(2, 2), Mat<double>::Zero(2, 2)).ok);
    // ker A and im B overlap: dimensions add up, the sum does not
    Mat<double> A{{1, 0}, {0, 0}};
    Mat<double> B{{0, 0}, {1, 0}};
    auto bad = check_transversality<double>(A, B);
    CHECK_FALSE(bad.ok);
    CHECK(bad.rank_concat == 1);
}

TEST_CASE("projector onto one subspace along another", "[subspaces]") {
    auto Q0 = projector_onto_along<R>(SubspaceBasis<R>::span(fx::rows<R>({{0, 0}, {0, 0}, {0, 0}, {1, 0}, {0, 1}})),
                                      SubspaceBasis<R>::span(fx::rows<R>({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0, 0, 0}, {0, 0, 0}})));
    CHECK(Q0 == fx::Printed<R>::Q0());

    CHECK(projector_onto_along<double>(SubspaceBasis<double>::span(Mat<double>::Identity(4, 4)),
                                       SubspaceBasis<double>::empty(4)) == Mat<double>::Identity(4, 4));

    auto P = projector_onto_along<R>(SubspaceBasis<R>::span(fx::rows<R>({{1}, {1}})),
                                     SubspaceBasis<R>::span(fx::rows<R>({{1}, {-1}})));
    CHECK(P == fx::rows<R>({{R(1, 2), R(1, 2)}, {R(1, 2), R(1, 2)}}));

    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int trial = 0; trial < 20; ++trial) {
        Mat<double> im = Mat<double>::NullaryExpr(5, 2, [&] { return u(rng); });
        Mat<double> ker = Mat<double>::NullaryExpr(5, 3, [&] { return u(rng); });
        auto Pr = projector_onto_along<double>(SubspaceBasis<double>::span(im), SubspaceBasis<double>::span(ker));
        CHECK((Pr * Pr - Pr).norm() <= 1e-10);
        CHECK((Pr * im - im).norm() <= 1e-10);
        CHECK((Pr * ker).norm() <= 1e-10);
    }
    CHECK_THROWS_AS(projector_onto_along<double>(SubspaceBasis<double>::span(e(3, {0})),
                                                 SubspaceBasis<double>::span(e(3, {1}))),
                    Error);
}

TEST_CASE("projector onto a target avoiding a subspace", "[subspaces]") {
    auto P = projector_onto_avoiding<double>(SubspaceBasis<double>::span(e(3, {0})), SubspaceBasis<double>::span(e(3, {1})));
    Mat<double> want = Mat<double>::Zero(3, 3);
    want(0, 0) = 1;
    CHECK((P - want).norm() <= 1e-14);

    // A valid Q_1 for the example: idempotent, onto the target, Q_1 Q_0 = 0
    Mat<R> target = fx::rows<R>({{1}, {-1}, {0}, {1}, {0}});
    auto Q1 = projector_onto_avoiding<R>(SubspaceBasis<R>::span(target),
                                         SubspaceBasis<R>::span(fx::rows<R>({{0, 0}, {0, 0}, {0, 0}, {1, 0}, {0, 1}})));
    CHECK(Q1 * Q1 == Q1);
    CHECK(Q1 * target == target);
    CHECK(linalg::rank(Q1) == 1);
    CHECK((Q1 * fx::Printed<R>::Q0()).isZero());

    auto line = SubspaceBasis<double>::span(e(3, {2}));
    CHECK_THROWS_AS(projector_onto_avoiding<double>(line, line), Error);
}

TEST_CASE("reflexive inverse", "[subspaces]") {
    auto L = fx::paper<R>();
    std::optional<MatrixFunction<R>> pi0 = MatrixFunction<R>::constant(L.system.grid, fx::Printed<R>::P0());
    auto pf = reflexive_inverse(L.system, pi0);
    for (std::size_t k = 0; k < pf.domain; ++k) {
        const R& t = L.system.grid->t(k);
        const Mat<R>& B = L.system.B.at(k);
        const Mat<R>& Bi = pf.Binv.at(k);
        CHECK(Bi == fx::Printed<R>::Binv(t));
        CHECK(pf.R.at(k) == Mat<R>::Identity(3, 3));
        CHECK(B * Bi * B == B);
        CHECK(Bi * B * Bi == Bi);
        CHECK(Bi * B == pf.Pi0.at(k));
        CHECK(B * Bi == pf.R.at(k));
        // A^sigma = G_0 B^-
        CHECK(L.system.A.at(k + 1) == L.system.A.at(k + 1) * B * Bi);
    }
    // Also the default (orthogonal) Pi0 reproduces the printed B^- here.
    auto pfd = reflexive_inverse(L.system);
    CHECK(pfd.Binv.at(3) == fx::Printed<R>::Binv(L.system.grid->t(3)));

    auto I = fx::constant_system(Mat<double>::Identity(2, 2), Mat<double>::Identity(2, 2), Mat<double>::Zero(2, 2),
                                 Vec<double>::Zero(2));
    auto pfi = reflexive_inverse(I);
    CHECK(pfi.Binv.at(0) == Mat<double>::Identity(2, 2));
    CHECK(pfi.R.at(0) == Mat<double>::Identity(2, 2));
    CHECK(pfi.Pi0.at(0) == Mat<double>::Identity(2, 2));

    // B = [1 0], Pi0 = diag(1, 0)
    Mat<double> A{{1}, {0}};
    Mat<double> B{{1, 0}};
    auto s = fx::constant_system(A, B, Mat<double>::Identity(2, 2), Vec<double>::Zero(2));
    auto pfb = reflexive_inverse(s);
    CHECK((pfb.Binv.at(0) - Mat<double>{{1}, {0}}).norm() <= 1e-15);
    CHECK(std::abs(pfb.R.at(0)(0, 0) - 1.0) <= 1e-15);
    CHECK((pfb.Pi0.at(0) - Mat<double>{{1, 0}, {0, 0}}).norm() <= 1e-15);

    // B = 0: everything vanishes
    auto z = fx::constant_system(Mat<double>::Zero(2, 2), Mat<double>::Zero(2, 2), Mat<double>::Identity(2, 2),
                                 Vec<double>::Zero(2));
    auto pfz = reflexive_inverse(z);
    CHECK(pfz.Binv.at(0).isZero());
    CHECK(pfz.R.at(0).isZero());
    CHECK(pfz.Pi0.at(0).isZero());
}

TEST_CASE("reflexive inverse identities on random data", "[subspaces]") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int trial = 0; trial < 10; ++trial) {
        Mat<double> B = Mat<double>::NullaryExpr(3, 2, [&] { return u(rng); }) *
                        Mat<double>::NullaryExpr(2, 5, [&] { return u(rng); });
        // ker A complementary to im B
        Mat<double> F(3, 3);
        F.leftCols(2) = linalg::range(B);
        F.col(2) = Mat<double>::NullaryExpr(3, 1, [&] { return u(rng); });
        Mat<double> A = Mat<double>::NullaryExpr(5, 2, [&] { return u(rng); }) * F.inverse().topRows(2);
        auto s = fx::constant_system(A, B, Mat<double>::Identity(5, 5), Vec<double>::Zero(5), 4);
        auto pf = reflexive_inverse(s);
        const Mat<double>& Bi = pf.Binv.at(1);
        const Mat<double>& Rm = pf.R.at(1);
        CHECK((Rm * Rm - Rm).norm() <= 1e-10);
        CHECK((B * Bi * B - B).norm() <= 1e-10);
        CHECK((Bi * B * Bi - Bi).norm() <= 1e-10);
        CHECK((Bi * B - pf.Pi0.at(1)).norm() <= 1e-10);
        CHECK((B * Bi - Rm).norm() <= 1e-10);
        CHECK((A - A * B * Bi).norm() <= 1e-10);
    }
}

TEST_CASE("supplied Pi0 must be a projector along ker B", "[subspaces]") {
    auto L = fx::paper<R>();
    Mat<R> bad = fx::Printed<R>::P0();
    bad(3, 3) = 1;
    std::optional<MatrixFunction<R>> pi0 = MatrixFunction<R>::constant(L.system.grid, bad);
    CHECK_THROWS_AS(reflexive_inverse(L.system, pi0), Error);
}

TEST_CASE("direct sums", "[subspaces]") {
    auto a = SubspaceBasis<double>::span(e(5, {3, 4}));
    auto b = SubspaceBasis<double>::span(fx::rows<double>({{1}, {-1}, {0}, {1}, {0}}));
    auto r = direct_sum_rank<double>({a, b});
    CHECK(r.rank == 3);
    CHECK(r.direct);
    auto l = SubspaceBasis<double>::span(e(3, {0}));
    auto r2 = direct_sum_rank<double>({l, l});
    CHECK(r2.rank == 1);
    CHECK_FALSE(r2.direct);
    auto r3 = direct_sum_rank<double>({});
    CHECK(r3.rank == 0);
    CHECK(r3.direct);
}
