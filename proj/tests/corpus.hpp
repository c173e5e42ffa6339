#pragma once
// Randomized regular systems with time-varying coefficients.
//
// Constant templates A_c (n x m), B_c (m x n, rank r), C_c are moved along the
// grid by invertible L(t) (n x n) and T(t) (m x m):
//     B(t_k) = T_k B_c,  A(t_{k+1}) = L_k A_c T_k^-1,  C(t_{k+1}) = L_k (C_c + E_k P_0).
// Then G_0 = L_k A_c B_c and ker A^sigma = T_k ker A_c stays complementary to
// im B. For target index 2, C_c is bent so that G_0 + C_c Q_0 is singular.

#include "tsdae/tsdae.hpp"

#include <random>

namespace corpus {

using tsdae::Mat;
using tsdae::Vec;

struct Generated {
    tsdae::DAESystem<double> sys;
    int target_nu = 1;
    std::uint64_t seed = 0;
    bool geometric = false;
};

inline Mat<double> random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    Mat<double> M(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j) M(i, j) = u(rng);
    return M;
}

// X(t) = 2 I + X_c + X_1 t/(1+t) + X_2/(1+t), diagonally dominant for small perturbations.
struct SmoothInvertible {
    Mat<double> c, a, b;
    SmoothInvertible(std::mt19937_64& rng, Eigen::Index n) {
        double s = 0.45 / static_cast<double>(n);
        c = 2.0 * Mat<double>::Identity(n, n) + random_matrix(rng, n, n, s);
        a = random_matrix(rng, n, n, s);
        b = random_matrix(rng, n, n, s);
    }
    Mat<double> operator()(double t) const { return c + a * (t / (1.0 + t)) + b * (1.0 / (1.0 + t)); }
};

inline std::shared_ptr<const tsdae::TimeScaleGrid<double>> corpus_grid(bool geometric, std::size_t count) {
    using G = tsdae::TimeScaleGrid<double>;
    return std::make_shared<const G>(geometric ? G::geometric(2.0, 1.0, count) : G::uniform(1.0, 0.0, count));
}

inline Generated make_system(std::uint64_t seed, int target_nu, bool geometric, std::size_t count = 50) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick_n(3, 5), pick_m(2, 3);
    const Eigen::Index n = pick_n(rng), m = pick_m(rng);
    std::uniform_int_distribution<Eigen::Index> pick_r(1, std::min(n, m) - 1);
    const Eigen::Index r = pick_r(rng);

    Mat<double> Bc = random_matrix(rng, m, r) * random_matrix(rng, r, n);
    // A_c kills a random complement K of im B_c and is injective on im B_c.
    Mat<double> F(m, m);
    F.leftCols(r) = tsdae::linalg::range(Bc);
    F.rightCols(m - r) = random_matrix(rng, m, m - r);
    Mat<double> Finv = F.inverse();
    Mat<double> Ac = random_matrix(rng, n, r) * Finv.topRows(r);

    Mat<double> kerB = tsdae::linalg::kernel(Bc);
    Mat<double> Q0 = kerB * kerB.transpose();
    Mat<double> P0 = Mat<double>::Identity(n, n) - Q0;
    Mat<double> G0 = Ac * Bc;
    Mat<double> Cc = random_matrix(rng, n, n);
    if (target_nu == 2) {
        Vec<double> q = kerB * random_matrix(rng, kerB.cols(), 1);
        Vec<double> p = P0 * random_matrix(rng, n, 1);
        Vec<double> fix = -G0 * p - Cc * q;
        Cc += fix * q.transpose() / q.squaredNorm();
    }
    Mat<double> E1 = random_matrix(rng, n, n, 0.5), E2 = random_matrix(rng, n, n, 0.5);
    SmoothInvertible L(rng, n), T(rng, m);
    Mat<double> fa = random_matrix(rng, n, 1), fb = random_matrix(rng, n, 1), fc = random_matrix(rng, n, 1);

    auto grid = corpus_grid(geometric, count);
    std::vector<Mat<double>> A, B, C, f;
    for (std::size_t k = 0; k < grid->size(); ++k) {
        double tk = grid->t(k);
        double tp = k > 0 ? grid->t(k - 1) : tk; // A and C at t_k are tied to the previous step
        Mat<double> Tp = T(tp);
        Mat<double> E = E1 * (tp / (1.0 + tp)) + E2 / (1.0 + tp);
        B.push_back(T(tk) * Bc);
        A.push_back(L(tp) * Ac * Tp.inverse());
        C.push_back(L(tp) * (Cc + E * P0));
        f.push_back(fa + fb * (tk / (1.0 + tk)) + fc / (1.0 + tk));
    }
    Generated g;
    g.seed = seed;
    g.target_nu = target_nu;
    g.geometric = geometric;
    g.sys = tsdae::make_system(grid, tsdae::MatrixFunction<double>::from_table(grid, std::move(A)),
                               tsdae::MatrixFunction<double>::from_table(grid, std::move(B)),
                               tsdae::MatrixFunction<double>::from_table(grid, std::move(C)),
                               tsdae::MatrixFunction<double>::from_table(grid, std::move(f)));
    return g;
}

inline tsdae::ChainOptions<double> corpus_options() {
    tsdae::ChainOptions<double> o;
    o.tol_rank = 1e-10;
    o.alignment = tsdae::ChainAlignment::step;
    return o;
}

struct Entry {
    Generated gen;
    tsdae::ChainResult<double> chain; // step alignment
};

// First `count` systems whose step chain is regular with index 1 or 2,
// alternating target indices and grid kinds.
inline std::vector<Entry> regular_corpus(std::size_t count, std::uint64_t base_seed = 20261015) {
    std::vector<Entry> out;
    for (std::uint64_t s = 0; out.size() < count && s < 20 * count; ++s) {
        int target = 1 + static_cast<int>(s % 2);
        bool geometric = (s / 2) % 2 == 1;
        auto g = make_system(base_seed + s, target, geometric);
        try {
            auto ch = tsdae::build_chain(g.sys, corpus_options());
            if (ch.regular && (ch.nu == 1 || ch.nu == 2)) out.push_back({std::move(g), std::move(ch)});
        } catch (const tsdae::Error&) {
        }
    }
    return out;
}

} // namespace corpus
