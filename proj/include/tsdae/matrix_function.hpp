#pragma once
// Matrix-valued functions on a grid: sampled tables or lazily evaluated
// closures, with sigma shift, delta derivative and pointwise algebra.

#include "tsdae/error.hpp"
#include "tsdae/scalar.hpp"
#include "tsdae/timescale.hpp"

#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace tsdae {

template <class T>
class MatrixFunction {
public:
    using Grid = TimeScaleGrid<T>;
    using Matrix = Mat<T>;
    using Closure = std::function<Matrix(std::size_t)>;

    MatrixFunction() = default;

    // `domain` is the number of leading grid indices where the function is defined.
    static MatrixFunction from_closure(std::shared_ptr<const Grid> grid, Eigen::Index rows, Eigen::Index cols,
                                       std::size_t domain, Closure fn) {
        MatrixFunction F;
        F.impl_ = std::make_shared<Impl>(std::move(grid), rows, cols, domain, std::move(fn));
        return F;
    }

    static MatrixFunction from_closure(std::shared_ptr<const Grid> grid, Eigen::Index rows, Eigen::Index cols,
                                       Closure fn) {
        std::size_t dom = grid->size();
        return from_closure(std::move(grid), rows, cols, dom, std::move(fn));
    }

    static MatrixFunction from_table(std::shared_ptr<const Grid> grid, std::vector<Matrix> table) {
        if (table.empty()) fail(ErrorCode::shape_mismatch, "empty matrix table");
        if (table.size() > grid->size()) fail(ErrorCode::shape_mismatch, "table longer than the grid");
        Eigen::Index r = table[0].rows(), c = table[0].cols();
        for (std::size_t k = 0; k < table.size(); ++k)
            if (table[k].rows() != r || table[k].cols() != c)
                fail(ErrorCode::shape_mismatch, "table entry " + std::to_string(k) + " has the wrong shape");
        auto data = std::make_shared<std::vector<Matrix>>(std::move(table));
        std::size_t dom = data->size();
        return from_closure(std::move(grid), r, c, dom, [data](std::size_t k) { return (*data)[k]; });
    }

    static MatrixFunction constant(std::shared_ptr<const Grid> grid, Matrix value) {
        Eigen::Index r = value.rows(), c = value.cols();
        return from_closure(std::move(grid), r, c, [value](std::size_t) { return value; });
    }

    bool valid() const { return static_cast<bool>(impl_); }
    Eigen::Index rows() const { return impl_->rows; }
    Eigen::Index cols() const { return impl_->cols; }
    std::size_t domain() const { return impl_->domain; }
    const Grid& grid() const { return *impl_->grid; }
    const std::shared_ptr<const Grid>& grid_ptr() const { return impl_->grid; }

    // Evaluates once per index; concurrent callers see the same cached value.
    const Matrix& at(std::size_t k) const {
        if (k >= impl_->domain)
            fail(ErrorCode::index_out_of_range, "matrix function evaluated at index " + std::to_string(k) +
                                                    " outside its domain of " + std::to_string(impl_->domain));
        Impl& d = *impl_;
        std::call_once(d.once[k], [&] {
            Matrix v = d.fn(k);
            if (v.rows() != d.rows || v.cols() != d.cols)
                fail(ErrorCode::shape_mismatch, "evaluated matrix at index " + std::to_string(k) + " is " +
                                                    std::to_string(v.rows()) + "x" + std::to_string(v.cols()) +
                                                    ", expected " + std::to_string(d.rows) + "x" +
                                                    std::to_string(d.cols));
            d.cache[k] = std::move(v);
        });
        return d.cache[k];
    }

    const Matrix& operator()(std::size_t k) const { return at(k); }

private:
    struct Impl {
        Impl(std::shared_ptr<const Grid> g, Eigen::Index r, Eigen::Index c, std::size_t dom, Closure f)
            : grid(std::move(g)), rows(r), cols(c), domain(dom), fn(std::move(f)),
              once(std::make_unique<std::once_flag[]>(dom)), cache(dom) {
            if (domain > grid->size()) fail(ErrorCode::shape_mismatch, "domain exceeds the grid");
        }
        std::shared_ptr<const Grid> grid;
        Eigen::Index rows, cols;
        std::size_t domain;
        Closure fn;
        std::unique_ptr<std::once_flag[]> once;
        std::vector<Matrix> cache;
    };
    std::shared_ptr<Impl> impl_;
};

template <class T>
MatrixFunction<T> sigma_shift(const MatrixFunction<T>& F) {
    if (F.domain() < 2) fail(ErrorCode::index_out_of_range, "sigma shift of a function defined at one point");
    return MatrixFunction<T>::from_closure(F.grid_ptr(), F.rows(), F.cols(), F.domain() - 1,
                                           [F](std::size_t k) { return F.at(k + 1); });
}

template <class T>
MatrixFunction<T> delta(const MatrixFunction<T>& F) {
    if (F.domain() < 2) fail(ErrorCode::index_out_of_range, "delta of a function defined at one point");
    std::size_t dom = std::min(F.domain() - 1, F.grid().last());
    return MatrixFunction<T>::from_closure(F.grid_ptr(), F.rows(), F.cols(), dom, [F](std::size_t k) {
        Mat<T> d = (F.at(k + 1) - F.at(k)) / F.grid().mu(k);
        return d;
    });
}

template <class T>
MatrixFunction<T> pointwise_product(const MatrixFunction<T>& F, const MatrixFunction<T>& G) {
    if (F.cols() != G.rows())
        fail(ErrorCode::shape_mismatch, "product of " + std::to_string(F.rows()) + "x" + std::to_string(F.cols()) +
                                            " and " + std::to_string(G.rows()) + "x" + std::to_string(G.cols()));
    return MatrixFunction<T>::from_closure(F.grid_ptr(), F.rows(), G.cols(), std::min(F.domain(), G.domain()),
                                           [F, G](std::size_t k) { return Mat<T>(F.at(k) * G.at(k)); });
}

template <class T>
MatrixFunction<T> pointwise_sum(const MatrixFunction<T>& F, const MatrixFunction<T>& G) {
    if (F.rows() != G.rows() || F.cols() != G.cols()) fail(ErrorCode::shape_mismatch, "sum of differently shaped functions");
    return MatrixFunction<T>::from_closure(F.grid_ptr(), F.rows(), F.cols(), std::min(F.domain(), G.domain()),
                                           [F, G](std::size_t k) { return Mat<T>(F.at(k) + G.at(k)); });
}

template <class T>
MatrixFunction<T> operator*(const MatrixFunction<T>& F, const MatrixFunction<T>& G) {
    return pointwise_product(F, G);
}

template <class T>
MatrixFunction<T> operator+(const MatrixFunction<T>& F, const MatrixFunction<T>& G) {
    return pointwise_sum(F, G);
}

// Relative check of (FG)^Delta = F^Delta G + F^sigma G^Delta at index k.
// `FG` is passed separately so a tampered product can be detected.
template <class T>
bool check_product_rule(const MatrixFunction<T>& F, const MatrixFunction<T>& G, const MatrixFunction<T>& FG,
                        std::size_t k, double tol_rel = 1e-12) {
    const auto& grid = F.grid();
    Mat<T> lhs = (FG.at(k + 1) - FG.at(k)) / grid.mu(k);
    Mat<T> dF = (F.at(k + 1) - F.at(k)) / grid.mu(k);
    Mat<T> dG = (G.at(k + 1) - G.at(k)) / grid.mu(k);
    Mat<T> rhs = dF * G.at(k) + F.at(k + 1) * dG;
    Mat<T> gap = lhs - rhs;
    if constexpr (is_exact_v<T>) {
        if (tol_rel == 0) return gap.isZero();
    }
    double scale = 1.0 + std::max(max_abs<T>(lhs), max_abs<T>(rhs));
    return max_abs<T>(gap) <= tol_rel * scale;
}

template <class T>
bool check_product_rule(const MatrixFunction<T>& F, const MatrixFunction<T>& G, std::size_t k, double tol_rel = 1e-12) {
    return check_product_rule(F, G, pointwise_product(F, G), k, tol_rel);
}

// The other ordering: (FG)^Delta = F G^Delta + F^Delta G^sigma.
template <class T>
bool check_product_rule_alt(const MatrixFunction<T>& F, const MatrixFunction<T>& G, std::size_t k,
                            double tol_rel = 1e-12) {
    const auto& grid = F.grid();
    auto FG = pointwise_product(F, G);
    Mat<T> lhs = (FG.at(k + 1) - FG.at(k)) / grid.mu(k);
    Mat<T> dF = (F.at(k + 1) - F.at(k)) / grid.mu(k);
    Mat<T> dG = (G.at(k + 1) - G.at(k)) / grid.mu(k);
    Mat<T> rhs = F.at(k) * dG + dF * G.at(k + 1);
    double scale = 1.0 + std::max(max_abs<T>(lhs), max_abs<T>(rhs));
    return max_abs<T>(Mat<T>(lhs - rhs)) <= tol_rel * scale;
}

} // namespace tsdae
