#pragma once
// Subspace bases, projectors, transversality and the {1,2}-inverse of B.

#include "tsdae/linalg.hpp"
#include "tsdae/system.hpp"

#include <optional>
#include <vector>

namespace tsdae {

// Max-norm distance scaled by 1 + |reference|; exact comparison for Rational.
template <class T>
double scaled_gap(const Mat<T>& a, const Mat<T>& ref) {
    Mat<T> d = a - ref;
    if constexpr (is_exact_v<T>) {
        if (d.isZero()) return 0.0;
    }
    return max_abs<T>(d) / (1.0 + max_abs<T>(ref));
}

template <class T>
bool nearly_equal(const Mat<T>& a, const Mat<T>& ref, double tol) {
    if constexpr (is_exact_v<T>) {
        return a == ref;
    } else {
        return scaled_gap(a, ref) <= tol;
    }
}

template <class T>
struct SubspaceBasis {
    Eigen::Index ambient = 0;
    Mat<T> basis; // ambient x dim, columns independent
    double tol_rank = 0.0;

    Eigen::Index dim() const { return basis.cols(); }

    static SubspaceBasis empty(Eigen::Index n) { return {n, Mat<T>(n, 0), 0.0}; }
    static SubspaceBasis span(Mat<T> cols, double tol = 0.0) {
        Eigen::Index n = cols.rows();
        return {n, std::move(cols), tol};
    }
};

template <class T>
SubspaceBasis<T> kernel_basis(const Mat<T>& M, double tol_rank = 0.0) {
    Mat<T> K = linalg::kernel(M, tol_rank);
    if (K.rows() != M.cols()) K = Mat<T>(M.cols(), 0);
    return {M.cols(), std::move(K), tol_rank};
}

template <class T>
SubspaceBasis<T> image_basis(const Mat<T>& M, double tol_rank = 0.0) {
    return {M.rows(), linalg::range(M, tol_rank), tol_rank};
}

template <class T>
Mat<T> concat(const std::vector<SubspaceBasis<T>>& bases, Eigen::Index ambient) {
    Eigen::Index total = 0;
    for (const auto& b : bases) total += b.dim();
    Mat<T> out(ambient, total);
    Eigen::Index c = 0;
    for (const auto& b : bases) {
        if (b.dim() == 0) continue;
        if (b.ambient != ambient) fail(ErrorCode::shape_mismatch, "bases live in different spaces");
        out.middleCols(c, b.dim()) = b.basis;
        c += b.dim();
    }
    return out;
}

struct DirectSumReport {
    std::size_t rank = 0;
    bool direct = true;
};

template <class T>
DirectSumReport direct_sum_rank(const std::vector<SubspaceBasis<T>>& bases, double tol_rank = 0.0) {
    if (bases.empty()) return {};
    Eigen::Index n = bases.front().ambient;
    Mat<T> all = concat(bases, n);
    DirectSumReport r;
    r.rank = all.cols() == 0 ? 0 : linalg::rank(all, tol_rank);
    r.direct = r.rank == static_cast<std::size_t>(all.cols());
    return r;
}

struct TransversalityReport {
    bool ok = false;
    Eigen::Index m = 0;
    std::size_t dim_ker_A = 0;
    std::size_t rank_B = 0;
    std::size_t rank_concat = 0;
};

// ker A^sigma (+) im B = R^m.
template <class T>
TransversalityReport check_transversality(const Mat<T>& A_sigma, const Mat<T>& B, double tol_rank = 0.0) {
    TransversalityReport r;
    r.m = B.rows();
    auto kerA = kernel_basis<T>(A_sigma, tol_rank);
    auto imB = image_basis<T>(B, tol_rank);
    r.dim_ker_A = static_cast<std::size_t>(kerA.dim());
    r.rank_B = static_cast<std::size_t>(imB.dim());
    r.rank_concat = direct_sum_rank<T>({kerA, imB}, tol_rank).rank;
    r.ok = r.dim_ker_A + r.rank_B == static_cast<std::size_t>(r.m) && r.rank_concat == static_cast<std::size_t>(r.m);
    return r;
}

template <class T>
Mat<T> projector_onto_along(const SubspaceBasis<T>& image, const SubspaceBasis<T>& kernel, double tol_rank = 0.0) {
    Eigen::Index n = image.ambient;
    if (kernel.ambient != n) fail(ErrorCode::shape_mismatch, "image and kernel live in different spaces");
    if (image.dim() + kernel.dim() != n)
        fail(ErrorCode::not_a_direct_sum, "dimensions " + std::to_string(image.dim()) + " + " +
                                              std::to_string(kernel.dim()) + " do not add up to " + std::to_string(n));
    if (image.dim() == 0) return Mat<T>::Zero(n, n);
    if (kernel.dim() == 0) return Mat<T>::Identity(n, n);
    Mat<T> Tm = linalg::hcat<T>(image.basis, kernel.basis);
    auto Ti = linalg::inverse(Tm, tol_rank);
    if (!Ti) fail(ErrorCode::not_a_direct_sum, "image and kernel bases are linearly dependent");
    Mat<T> D = Mat<T>::Zero(n, n);
    for (Eigen::Index i = 0; i < image.dim(); ++i) D(i, i) = 1;
    return Tm * D * (*Ti);
}

// Orthogonal projector onto the span of `b`.
template <class T>
Mat<T> orthogonal_projector(const SubspaceBasis<T>& b) {
    Eigen::Index n = b.ambient;
    if (b.dim() == 0) return Mat<T>::Zero(n, n);
    Mat<T> gram = b.basis.transpose() * b.basis;
    auto gi = linalg::inverse(gram);
    if (!gi) fail(ErrorCode::not_a_direct_sum, "dependent basis vectors");
    return b.basis * (*gi) * b.basis.transpose();
}

// Projector onto `target` whose kernel is must_kill plus the orthogonal
// complement of target (+) must_kill.
template <class T>
Mat<T> projector_onto_avoiding(const SubspaceBasis<T>& target, const SubspaceBasis<T>& must_kill,
                               double tol_rank = 0.0) {
    Eigen::Index n = target.ambient;
    auto ds = direct_sum_rank<T>({target, must_kill}, tol_rank);
    if (!ds.direct) fail(ErrorCode::intersection_nontrivial, "target subspace meets the subspace that must be killed");
    Mat<T> both = concat<T>({target, must_kill}, n);
    SubspaceBasis<T> comp = both.cols() == 0 ? SubspaceBasis<T>{n, Mat<T>::Identity(n, n), tol_rank}
                                             : kernel_basis<T>(Mat<T>(both.transpose()), tol_rank);
    SubspaceBasis<T> ker{n, concat<T>({must_kill, comp}, n), tol_rank};
    return projector_onto_along(target, ker, tol_rank);
}

template <class T>
struct ProperFactorization {
    MatrixFunction<T> R;    // m x m, onto im B along ker A^sigma
    MatrixFunction<T> Binv; // n x m
    MatrixFunction<T> Pi0;  // n x n, B^- B
    std::size_t domain = 0;
};

struct FactorizationOptions {
    double tol_rank = 0.0;
    double tol_proj = 1e-10;
};

// Builds R, B^- and Pi0 on every index where A^sigma exists.  The default Pi0
// is the orthogonal projector along ker B.
template <class T>
ProperFactorization<T> reflexive_inverse(const DAESystem<T>& sys,
                                         const std::optional<MatrixFunction<T>>& Pi0_choice = std::nullopt,
                                         FactorizationOptions opt = {}) {
    const std::size_t N = sys.grid->last();
    std::vector<Mat<T>> R(N), Bi(N), P0(N);
    const Eigen::Index n = sys.n;
    for (std::size_t k = 0; k < N; ++k) {
        const Mat<T>& As = sys.A.at(k + 1);
        const Mat<T>& B = sys.B.at(k);
        auto tr = check_transversality<T>(As, B, opt.tol_rank);
        if (!tr.ok)
            fail(ErrorCode::transversality_failure,
                 "transversality fails at index " + std::to_string(k) + ": dim ker A^sigma = " +
                     std::to_string(tr.dim_ker_A) + ", rank B = " + std::to_string(tr.rank_B) + ", m = " +
                     std::to_string(tr.m) + ", rank of joined bases = " + std::to_string(tr.rank_concat));
        auto kerB = kernel_basis<T>(B, opt.tol_rank);
        Mat<T> pi0;
        if (Pi0_choice) {
            pi0 = Pi0_choice->at(k);
            if (pi0.rows() != n || pi0.cols() != n) fail(ErrorCode::supplied_pi0_invalid, "Pi0 has the wrong shape");
            bool idem = nearly_equal<T>(Mat<T>(pi0 * pi0), pi0, opt.tol_proj);
            bool kills = kerB.dim() == 0 || nearly_equal<T>(Mat<T>(pi0 * kerB.basis), Mat<T>::Zero(n, kerB.dim()), opt.tol_proj);
            bool rk = linalg::projector_rank(pi0, opt.tol_rank) == static_cast<std::size_t>(n - kerB.dim());
            if (!idem || !kills || !rk)
                fail(ErrorCode::supplied_pi0_invalid,
                     "supplied Pi0 at index " + std::to_string(k) + " is not a projector along ker B");
        } else {
            pi0 = Mat<T>::Identity(n, n) - orthogonal_projector(kerB);
        }
        Mat<T> r = projector_onto_along(image_basis<T>(B, opt.tol_rank), kernel_basis<T>(As, opt.tol_rank), opt.tol_rank);
        Bi[k] = pi0 * linalg::pinv(B, opt.tol_rank) * r;
        R[k] = std::move(r);
        P0[k] = std::move(pi0);
    }
    ProperFactorization<T> out;
    out.R = MatrixFunction<T>::from_table(sys.grid, std::move(R));
    out.Binv = MatrixFunction<T>::from_table(sys.grid, std::move(Bi));
    out.Pi0 = MatrixFunction<T>::from_table(sys.grid, std::move(P0));
    out.domain = N;
    return out;
}

} // namespace tsdae
