#pragma once
// Rank decisions, kernels and inverses for double (SVD based) and
// Rational (exact elimination) matrices.

#include "tsdae/scalar.hpp"

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

namespace tsdae::linalg {

// tol_rank <= 0 selects the default factor max(rows, cols) * eps.
// Singular values below factor * sigma_max count as zero.
inline double rank_threshold(const Eigen::VectorXd& sv, Eigen::Index rows, Eigen::Index cols, double tol_rank) {
    if (sv.size() == 0) return 0.0;
    double factor = tol_rank > 0 ? tol_rank
                                 : static_cast<double>(std::max(rows, cols)) * std::numeric_limits<double>::epsilon();
    return factor * sv(0);
}

namespace detail {

struct Rref {
    Mat<Rational> R;
    std::vector<Eigen::Index> pivots;
};

inline Rref rref(Mat<Rational> A) {
    Rref out;
    Eigen::Index row = 0;
    for (Eigen::Index c = 0; c < A.cols() && row < A.rows(); ++c) {
        Eigen::Index p = -1;
        for (Eigen::Index r = row; r < A.rows(); ++r)
            if (A(r, c) != 0) {
                p = r;
                break;
            }
        if (p < 0) continue;
        if (p != row) A.row(p).swap(A.row(row));
        Rational piv = A(row, c);
        for (Eigen::Index j = c; j < A.cols(); ++j) A(row, j) /= piv;
        for (Eigen::Index r = 0; r < A.rows(); ++r) {
            if (r == row || A(r, c) == 0) continue;
            Rational f = A(r, c);
            for (Eigen::Index j = c; j < A.cols(); ++j) A(r, j) -= f * A(row, j);
        }
        out.pivots.push_back(c);
        ++row;
    }
    out.R = std::move(A);
    return out;
}

inline Eigen::JacobiSVD<Mat<double>> svd(const Mat<double>& M) {
    return Eigen::JacobiSVD<Mat<double>>(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
}

} // namespace detail

inline std::size_t rank(const Mat<double>& M, double tol_rank = 0) {
    if (M.size() == 0) return 0;
    auto s = detail::svd(M);
    const auto& sv = s.singularValues();
    double thr = rank_threshold(sv, M.rows(), M.cols(), tol_rank);
    std::size_t r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > thr) ++r;
    return r;
}

inline std::size_t rank(const Mat<Rational>& M, double = 0) {
    if (M.size() == 0) return 0;
    return detail::rref(M).pivots.size();
}

// Rank of a projector: its nonzero singular values are at least 1, so the
// threshold never drops below tol_rank. A rounded zero projector has rank 0.
inline std::size_t projector_rank(const Mat<double>& M, double tol_rank = 0) {
    if (M.size() == 0) return 0;
    auto s = detail::svd(M);
    const auto& sv = s.singularValues();
    Eigen::VectorXd floor_sv = sv;
    floor_sv(0) = std::max(sv(0), 1.0);
    double thr = rank_threshold(floor_sv, M.rows(), M.cols(), tol_rank);
    std::size_t r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > thr) ++r;
    return r;
}

inline std::size_t projector_rank(const Mat<Rational>& M, double = 0) { return rank(M); }

// Orthonormal null-space basis (double) or elimination basis (Rational).
inline Mat<double> kernel(const Mat<double>& M, double tol_rank = 0) {
    if (M.cols() == 0) return Mat<double>(0, 0);
    if (M.rows() == 0) return Mat<double>::Identity(M.cols(), M.cols());
    auto s = detail::svd(M);
    const auto& sv = s.singularValues();
    double thr = rank_threshold(sv, M.rows(), M.cols(), tol_rank);
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > thr) ++r;
    return s.matrixV().rightCols(M.cols() - r);
}

inline Mat<Rational> kernel(const Mat<Rational>& M, double = 0) {
    const Eigen::Index n = M.cols();
    if (n == 0) return Mat<Rational>(0, 0);
    if (M.rows() == 0) return Mat<Rational>::Identity(n, n);
    auto rr = detail::rref(M);
    std::vector<bool> is_pivot(static_cast<std::size_t>(n), false);
    for (auto p : rr.pivots) is_pivot[static_cast<std::size_t>(p)] = true;
    Mat<Rational> K = Mat<Rational>::Zero(n, n - static_cast<Eigen::Index>(rr.pivots.size()));
    Eigen::Index col = 0;
    for (Eigen::Index f = 0; f < n; ++f) {
        if (is_pivot[static_cast<std::size_t>(f)]) continue;
        K(f, col) = 1;
        for (std::size_t i = 0; i < rr.pivots.size(); ++i)
            K(rr.pivots[i], col) = -rr.R(static_cast<Eigen::Index>(i), f);
        ++col;
    }
    return K;
}

// Basis of the column space.
inline Mat<double> range(const Mat<double>& M, double tol_rank = 0) {
    if (M.size() == 0) return Mat<double>(M.rows(), 0);
    auto s = detail::svd(M);
    const auto& sv = s.singularValues();
    double thr = rank_threshold(sv, M.rows(), M.cols(), tol_rank);
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > thr) ++r;
    return s.matrixU().leftCols(r);
}

inline Mat<Rational> range(const Mat<Rational>& M, double = 0) {
    if (M.size() == 0) return Mat<Rational>(M.rows(), 0);
    auto rr = detail::rref(M);
    Mat<Rational> out(M.rows(), static_cast<Eigen::Index>(rr.pivots.size()));
    for (std::size_t i = 0; i < rr.pivots.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = M.col(rr.pivots[i]);
    return out;
}

inline std::optional<Mat<double>> inverse(const Mat<double>& M, double tol_rank = 0) {
    if (M.rows() != M.cols()) return std::nullopt;
    if (M.size() == 0) return Mat<double>(0, 0);
    if (rank(M, tol_rank) < static_cast<std::size_t>(M.rows())) return std::nullopt;
    return Mat<double>(M.fullPivLu().inverse());
}

inline std::optional<Mat<Rational>> inverse(const Mat<Rational>& M, double = 0) {
    const Eigen::Index n = M.rows();
    if (n != M.cols()) return std::nullopt;
    if (n == 0) return Mat<Rational>(0, 0);
    Mat<Rational> aug(n, 2 * n);
    aug.leftCols(n) = M;
    aug.rightCols(n) = Mat<Rational>::Identity(n, n);
    auto rr = detail::rref(aug);
    if (static_cast<Eigen::Index>(rr.pivots.size()) < n || rr.pivots[static_cast<std::size_t>(n - 1)] != n - 1)
        return std::nullopt;
    return Mat<Rational>(rr.R.rightCols(n));
}

// Moore-Penrose inverse.
inline Mat<double> pinv(const Mat<double>& M, double tol_rank = 0) {
    if (M.size() == 0) return Mat<double>::Zero(M.cols(), M.rows());
    auto s = detail::svd(M);
    const auto& sv = s.singularValues();
    double thr = rank_threshold(sv, M.rows(), M.cols(), tol_rank);
    Mat<double> out = Mat<double>::Zero(M.cols(), M.rows());
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > thr) out += s.matrixV().col(i) * (1.0 / sv(i)) * s.matrixU().col(i).transpose();
    return out;
}

// Exact Moore-Penrose inverse from a full-rank factorization M = F G.
inline Mat<Rational> pinv(const Mat<Rational>& M, double = 0) {
    if (M.size() == 0) return Mat<Rational>::Zero(M.cols(), M.rows());
    auto rr = detail::rref(M);
    const auto r = static_cast<Eigen::Index>(rr.pivots.size());
    if (r == 0) return Mat<Rational>::Zero(M.cols(), M.rows());
    Mat<Rational> F(M.rows(), r);
    for (Eigen::Index i = 0; i < r; ++i) F.col(i) = M.col(rr.pivots[static_cast<std::size_t>(i)]);
    Mat<Rational> G = rr.R.topRows(r);
    Mat<Rational> FtF = F.transpose() * F;
    Mat<Rational> GGt = G * G.transpose();
    return G.transpose() * (*inverse(GGt)) * (*inverse(FtF)) * F.transpose();
}

template <class T>
struct LeastSquares {
    Vec<T> x;
    double defect = 0.0; // max-norm of A x - b
};

// Minimum-norm least-squares solution.
template <class T>
LeastSquares<T> solve_min_norm(const Mat<T>& A, const Vec<T>& b, double tol_rank = 0) {
    LeastSquares<T> out;
    out.x = pinv(A, tol_rank) * b;
    Vec<T> r = A * out.x - b;
    out.defect = max_abs<T>(r);
    return out;
}

// 2-norm condition number; +inf for singular or empty-rank input.
template <class T>
double cond(const Mat<T>& M) {
    if (M.size() == 0) return 1.0;
    Mat<double> D = to_double_matrix(M);
    Eigen::JacobiSVD<Mat<double>> s(D);
    const auto& sv = s.singularValues();
    double lo = sv(sv.size() - 1);
    if (lo == 0.0) return std::numeric_limits<double>::infinity();
    return sv(0) / lo;
}

// 2-norm of the inverse, 1 / sigma_min; +inf for singular input.
template <class T>
double inverse_norm(const Mat<T>& M) {
    if (M.size() == 0) return 0.0;
    Eigen::JacobiSVD<Mat<double>> s(to_double_matrix(M));
    double lo = s.singularValues()(s.singularValues().size() - 1);
    return lo == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / lo;
}

inline double det(const Mat<double>& M) { return M.size() == 0 ? 1.0 : M.partialPivLu().determinant(); }

inline Rational det(Mat<Rational> A) {
    const Eigen::Index n = A.rows();
    Rational d = 1;
    for (Eigen::Index c = 0; c < n; ++c) {
        Eigen::Index p = c;
        while (p < n && A(p, c) == 0) ++p;
        if (p == n) return Rational(0);
        if (p != c) {
            A.row(p).swap(A.row(c));
            d = -d;
        }
        d *= A(c, c);
        for (Eigen::Index r = c + 1; r < n; ++r) {
            if (A(r, c) == 0) continue;
            Rational f = A(r, c) / A(c, c);
            for (Eigen::Index j = c; j < n; ++j) A(r, j) -= f * A(c, j);
        }
    }
    return d;
}

template <class T>
Mat<T> hcat(const Mat<T>& a, const Mat<T>& b) {
    Mat<T> out(a.rows(), a.cols() + b.cols());
    out.leftCols(a.cols()) = a;
    out.rightCols(b.cols()) = b;
    return out;
}

} // namespace tsdae::linalg
