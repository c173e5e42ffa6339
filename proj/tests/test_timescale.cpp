#include "fixtures.hpp"

#include <catch_amalgamated.hpp>

#include <random>

using namespace tsdae;
using Catch::Matchers::WithinAbs;
using Grid = TimeScaleGrid<double>;

TEST_CASE("jump operators on the three grid kinds", "[timescale]") {
    auto geo = Grid::geometric(2.0, 1.0, 6); // 1 2 4 8 16 32
    auto uni = Grid::uniform(1.0, 0.0, 6);
    auto pts = Grid::explicit_points({1.0, 1.5, 4.0});

    CHECK(geo.sigma(2) == 8.0);
    CHECK(uni.sigma(3) == 4.0);
    CHECK(pts.sigma(1) == 4.0);

    CHECK(geo.mu(2) == 4.0);
    CHECK(Grid::uniform(0.5, 0.0, 5).mu(3) == 0.5);
    CHECK(pts.mu(1) == 2.5);

    CHECK(geo.rho(3) == 4.0);
    CHECK(uni.rho(4) == 3.0);
    CHECK(pts.rho(2) == 1.5);
}

TEST_CASE("rho and sigma invert each other", "[timescale]") {
    auto g = Grid::geometric(3.0, 0.5, 12);
    for (std::size_t k = 0; k < g.last(); ++k) {
        CHECK(g.mu(k) > 0);
        CHECK(g.rho(k + 1) == g.t(k));
        CHECK(g.sigma(k) == g.t(k + 1));
        CHECK(g.nu(k + 1) == g.mu(k));
    }
}

TEST_CASE("invalid grids are rejected", "[timescale]") {
    CHECK_THROWS_AS(Grid::geometric(1.0, 1.0, 5), Error);
    CHECK_THROWS_AS(Grid::geometric(2.0, 0.0, 5), Error);
    CHECK_THROWS_AS(Grid::uniform(0.0, 0.0, 5), Error);
    CHECK_THROWS_AS(Grid::explicit_points({1.0, 1.0, 2.0}), Error);
    CHECK_THROWS_AS(Grid::explicit_points({1.0, 2.0}), Error);
    auto g = Grid::uniform(1.0, 0.0, 4);
    CHECK_THROWS_AS(g.sigma(3), Error);
    CHECK_THROWS_AS(g.rho(0), Error);
}

TEST_CASE("delta of scalar samples", "[timescale]") {
    auto g = Grid::geometric(2.0, 1.0, 8);
    std::vector<double> sq, one, id;
    for (double t : g.points()) {
        sq.push_back(t * t);
        one.push_back(7.0);
        id.push_back(t);
    }
    CHECK(delta_scalar<double>(g, sq, 1) == 6.0);
    for (std::size_t k = 0; k < g.last(); ++k) {
        CHECK(delta_scalar<double>(g, one, k) == 0.0);
        CHECK(delta_scalar<double>(g, id, k) == 1.0);
        CHECK(delta_scalar<double>(g, sq, k) == 3.0 * g.t(k));
    }
    CHECK_THROWS_AS(delta_scalar<double>(g, sq, g.last()), Error);
}

TEST_CASE("delta is linear, exactly in rational mode", "[timescale]") {
    using R = Rational;
    auto g = TimeScaleGrid<R>::geometric(R(2), R(1), 9);
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> d(-50, 50);
    std::vector<R> f, h, comb;
    R alpha(3, 7);
    for (std::size_t k = 0; k < g.size(); ++k) {
        f.emplace_back(d(rng), 1 + std::abs(d(rng)));
        h.emplace_back(d(rng), 1 + std::abs(d(rng)));
        comb.push_back(alpha * f.back() + h.back());
    }
    for (std::size_t k = 0; k < g.last(); ++k)
        CHECK(delta_scalar<R>(g, comb, k) == alpha * delta_scalar<R>(g, f, k) + delta_scalar<R>(g, h, k));

    auto gd = Grid::uniform(0.3, 1.0, 9);
    std::uniform_real_distribution<double> u(-1, 1);
    std::vector<double> fd, hd, cd;
    for (std::size_t k = 0; k < gd.size(); ++k) {
        fd.push_back(u(rng));
        hd.push_back(u(rng));
        cd.push_back(-2.5 * fd.back() + hd.back());
    }
    for (std::size_t k = 0; k < gd.last(); ++k) {
        double lhs = delta_scalar<double>(gd, cd, k);
        double rhs = -2.5 * delta_scalar<double>(gd, fd, k) + delta_scalar<double>(gd, hd, k);
        CHECK(std::abs(lhs - rhs) <= 1e-14 * (1 + std::abs(rhs)));
    }
}

TEST_CASE("simple useful formula", "[timescale]") {
    auto g = Grid::geometric(2.0, 1.0, 10);
    std::vector<double> sq;
    for (double t : g.points()) sq.push_back(t * t);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-3, 3);
    std::vector<double> rnd(g.size());
    for (auto& v : rnd) v = u(rng);
    for (std::size_t k = 0; k < g.last(); ++k) {
        CHECK(check_simple_useful_formula<double>(g, sq, k));
        CHECK(check_simple_useful_formula<double>(g, rnd, k));
    }
    auto tampered = rnd;
    tampered[4] += 1e-3;
    CHECK_FALSE(check_simple_useful_formula<double>(g, rnd, tampered, 3));
    CHECK_FALSE(check_simple_useful_formula<double>(g, rnd, tampered, 4));
    CHECK(check_simple_useful_formula<double>(g, rnd, tampered, 6));
}

TEST_CASE("sigma shift and delta of matrix functions", "[matrix_function]") {
    auto L = fx::paper<double>();
    const auto& B = L.system.B;
    auto Bs = sigma_shift(B);
    auto dB = delta(B);
    CHECK(B.at(0)(1, 1) == 2.0);
    CHECK(Bs.at(0)(1, 1) == 4.0);
    CHECK(Bs.rows() == B.rows());
    CHECK(dB.cols() == B.cols());
    for (std::size_t k = 0; k < dB.domain(); ++k) {
        Mat<double> want = Mat<double>::Zero(3, 5);
        want(1, 1) = 2.0;
        CHECK(dB.at(k) == want);
        CHECK((Bs.at(k) - (B.at(k) + L.system.grid->mu(k) * dB.at(k))).isZero());
    }

    auto grid = std::make_shared<const Grid>(Grid::uniform(1.0, 0.0, 6));
    auto tI = MatrixFunction<double>::from_closure(grid, 2, 2, [grid](std::size_t k) {
        return Mat<double>(grid->t(k) * Mat<double>::Identity(2, 2));
    });
    auto tIs = sigma_shift(tI);
    for (std::size_t k = 0; k < tIs.domain(); ++k)
        CHECK(tIs.at(k) == Mat<double>((grid->t(k) + 1) * Mat<double>::Identity(2, 2)));

    Mat<double> c{{1, 2}, {3, 4}};
    auto cf = MatrixFunction<double>::constant(grid, c);
    for (std::size_t k = 0; k + 1 < grid->size(); ++k) {
        CHECK(sigma_shift(cf).at(k) == c);
        CHECK(delta(cf).at(k).isZero());
    }
}

TEST_CASE("example products: G_0 and the projected identities", "[matrix_function]") {
    auto L = fx::paper<Rational>();
    const auto& s = L.system;
    auto As = sigma_shift(s.A);
    auto G0 = As * s.B;
    for (std::size_t k = 0; k < G0.domain(); ++k) CHECK(G0.at(k) == fx::Printed<Rational>::G0());

    auto I5 = MatrixFunction<Rational>::constant(s.grid, Mat<Rational>::Identity(5, 5));
    auto Z = MatrixFunction<Rational>::constant(s.grid, Mat<Rational>::Zero(5, 5));
    for (std::size_t k = 0; k < s.grid->size(); ++k) {
        CHECK((s.C * I5).at(k) == s.C.at(k));
        CHECK((s.C + Z).at(k) == s.C.at(k));
    }
    CHECK_THROWS_AS(s.A * s.A, Error);

    // B Pi_0 B^- = I with the printed Pi_0 and B^-
    auto S0 = MatrixFunction<Rational>::from_closure(s.grid, 3, 3, [&s](std::size_t k) {
        return Mat<Rational>(s.B.at(k) * fx::Printed<Rational>::P0() * fx::Printed<Rational>::Binv(s.grid->t(k)));
    });
    for (std::size_t k = 0; k < s.grid->last(); ++k) {
        CHECK(S0.at(k) == fx::Printed<Rational>::BPi0Binv());
        CHECK(delta(S0).at(k).isZero());
    }
}

TEST_CASE("product rule in both orderings", "[matrix_function]") {
    auto grid = std::make_shared<const Grid>(Grid::uniform(1.0, 0.0, 8));
    auto tI = MatrixFunction<double>::from_closure(grid, 3, 3, [grid](std::size_t k) {
        return Mat<double>(grid->t(k) * Mat<double>::Identity(3, 3));
    });
    for (std::size_t k = 0; k < grid->last(); ++k) {
        CHECK(check_product_rule(tI, tI, k));
        CHECK(check_product_rule_alt(tI, tI, k));
        // (t^2)^Delta = 2t + 1 on hZ with h = 1
        CHECK(delta(tI * tI).at(k)(0, 0) == 2 * grid->t(k) + 1);
    }

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1, 1);
    auto geo = std::make_shared<const Grid>(Grid::geometric(1.5, 1.0, 10));
    std::vector<Mat<double>> ft, gt;
    for (std::size_t k = 0; k < geo->size(); ++k) {
        ft.push_back(Mat<double>::NullaryExpr(3, 3, [&] { return u(rng); }));
        gt.push_back(Mat<double>::NullaryExpr(3, 3, [&] { return u(rng); }));
    }
    auto F = MatrixFunction<double>::from_table(geo, ft);
    auto G = MatrixFunction<double>::from_table(geo, gt);
    std::vector<Mat<double>> fg;
    for (std::size_t k = 0; k < geo->size(); ++k) fg.push_back(ft[k] * gt[k]);
    fg[5](1, 2) += 1e-4;
    auto FGbad = MatrixFunction<double>::from_table(geo, fg);
    for (std::size_t k = 0; k < geo->last(); ++k) {
        CHECK(check_product_rule(F, G, k));
        CHECK(check_product_rule_alt(F, G, k));
    }
    CHECK_FALSE(check_product_rule(F, G, FGbad, 4));
    CHECK_FALSE(check_product_rule(F, G, FGbad, 5));
}

TEST_CASE("evaluation is checked and cached", "[matrix_function]") {
    auto grid = std::make_shared<const Grid>(Grid::uniform(1.0, 0.0, 4));
    int calls = 0;
    auto F = MatrixFunction<double>::from_closure(grid, 2, 1, [&calls](std::size_t) {
        ++calls;
        return Mat<double>(Mat<double>::Ones(2, 1));
    });
    F.at(1);
    F.at(1);
    CHECK(calls == 1);
    CHECK_THROWS_AS(F.at(4), Error);
    auto bad = MatrixFunction<double>::from_closure(grid, 2, 2, [](std::size_t) { return Mat<double>(3, 3); });
    CHECK_THROWS_AS(bad.at(0), Error);
}
