#pragma once
// The linear dynamic-algebraic system  A^sigma (B x)^Delta = C^sigma x^sigma + f.

#include "tsdae/matrix_function.hpp"

#include <string>

namespace tsdae {

template <class T>
struct DAESystem {
    std::shared_ptr<const TimeScaleGrid<T>> grid;
    Eigen::Index n = 0; // unknowns
    Eigen::Index m = 0; // rows of B
    MatrixFunction<T> A; // n x m
    MatrixFunction<T> B; // m x n
    MatrixFunction<T> C; // n x n
    MatrixFunction<T> f; // n x 1

    void validate() const {
        auto check = [](const MatrixFunction<T>& F, const char* name, Eigen::Index r, Eigen::Index c) {
            if (!F.valid()) fail(ErrorCode::input_error, std::string("missing ") + name);
            if (F.rows() != r || F.cols() != c)
                fail(ErrorCode::shape_mismatch, std::string(name) + " is " + std::to_string(F.rows()) + "x" +
                                                    std::to_string(F.cols()) + ", expected " + std::to_string(r) +
                                                    "x" + std::to_string(c));
        };
        if (!grid) fail(ErrorCode::input_error, "system without grid");
        if (n <= 0 || m < 0) fail(ErrorCode::input_error, "dimensions must satisfy n >= 1, m >= 0");
        check(A, "A", n, m);
        check(B, "B", m, n);
        check(C, "C", n, n);
        check(f, "f", n, 1);
    }
};

template <class T>
DAESystem<T> make_system(std::shared_ptr<const TimeScaleGrid<T>> grid, MatrixFunction<T> A, MatrixFunction<T> B,
                         MatrixFunction<T> C, MatrixFunction<T> f) {
    DAESystem<T> s;
    s.grid = std::move(grid);
    s.n = C.rows();
    s.m = B.rows();
    s.A = std::move(A);
    s.B = std::move(B);
    s.C = std::move(C);
    s.f = std::move(f);
    s.validate();
    return s;
}

} // namespace tsdae
