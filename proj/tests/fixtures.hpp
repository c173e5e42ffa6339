#pragma once
// Shared fixtures: the bundled example systems and the printed matrices of the
// worked example on T = 2^N0, written out by hand as functions of t.

#include "tsdae/tsdae.hpp"

#include <initializer_list>

namespace fx {

using tsdae::Mat;
using tsdae::Rational;
using tsdae::Vec;

template <class T>
tsdae::LoadedSystem<T> bundled(const std::string& name) {
    return tsdae::system_from_json<T>(tsdae::json::parse(tsdae::bundled_examples().at(name)));
}

template <class T>
tsdae::LoadedSystem<T> paper() {
    return bundled<T>("paper_example");
}

template <class T>
tsdae::ChainOptions<T> injected(const tsdae::LoadedSystem<T>& L,
                                tsdae::ChainAlignment a = tsdae::ChainAlignment::as_printed) {
    tsdae::ChainOptions<T> o;
    o.strategy = tsdae::ProjectorStrategy::injected;
    o.injected = L.projectors;
    o.alignment = a;
    return o;
}

template <class T>
tsdae::ChainOptions<T> canonical(tsdae::ChainAlignment a = tsdae::ChainAlignment::as_printed) {
    tsdae::ChainOptions<T> o;
    o.alignment = a;
    return o;
}

template <class T>
Mat<T> rows(std::initializer_list<std::initializer_list<T>> r) {
    Mat<T> M(static_cast<Eigen::Index>(r.size()), static_cast<Eigen::Index>(r.begin()->size()));
    Eigen::Index i = 0;
    for (const auto& row : r) {
        Eigen::Index j = 0;
        for (const auto& v : row) M(i, j++) = v;
        ++i;
    }
    return M;
}

template <class T>
Vec<T> vec(std::initializer_list<T> v) {
    Vec<T> out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (const auto& x : v) out(i++) = x;
    return out;
}

// Printed matrices of the example.
template <class T>
struct Printed {
    static Mat<T> G0() { return diag5(1, 1, 1, 0, 0); }
    static Mat<T> Q0() { return diag5(0, 0, 0, 1, 1); }
    static Mat<T> P0() { return diag5(1, 1, 1, 0, 0); }
    static Mat<T> G1(const T& t) {
        return rows<T>({{1, 0, 0, -1, 1}, {0, 1, 0, 1, 0}, {0, 0, 1, 0, 0}, {0, 0, 0, 0, 0}, {0, 0, 0, 0, t * t}});
    }
    static Mat<T> Q1() {
        return rows<T>({{1, 0, 0, 0, 0}, {-1, 0, 0, 0, 0}, {0, 0, 0, 0, 0}, {1, 0, 0, 0, 0}, {0, 0, 0, 0, 0}});
    }
    static Mat<T> P1() {
        return rows<T>({{0, 0, 0, 0, 0}, {1, 1, 0, 0, 0}, {0, 0, 1, 0, 0}, {-1, 0, 0, 1, 0}, {0, 0, 0, 0, 1}});
    }
    static Mat<T> Pi1() {
        return rows<T>({{0, 0, 0, 0, 0}, {1, 1, 0, 0, 0}, {0, 0, 1, 0, 0}, {0, 0, 0, 0, 0}, {0, 0, 0, 0, 0}});
    }
    static Mat<T> Binv(const T& t) {
        return rows<T>({{1, 0, 0}, {0, T(1) / (T(2) * t), 0}, {0, 0, 1}, {0, 0, 0}, {0, 0, 0}});
    }
    static Mat<T> BPi0Binv() { return Mat<T>::Identity(3, 3); }
    static Mat<T> M1() {
        return rows<T>({{1, 0, 0, 0, 0}, {-1, 0, 0, 0, 0}, {0, 0, 0, 0, 0}, {0, 0, 0, 0, 0}, {0, 0, 0, 0, 0}});
    }
    static Mat<T> BPi1Binv() { return rows<T>({{0, 0, 0}, {1, 1, 0}, {0, 0, 1}}); }
    static Mat<T> C1() {
        return rows<T>({{0, 0, 0, 0, 0}, {0, 0, 1, 0, 0}, {-2, -1, 0, 0, 0}, {3, 1, 0, 0, 0}, {-1, 0, 0, 0, 0}});
    }
    static Mat<T> C1M1() {
        return rows<T>({{0, 0, 0, 0, 0}, {0, 0, 0, 0, 0}, {-1, 0, 0, 0, 0}, {2, 0, 0, 0, 0}, {-1, 0, 0, 0, 0}});
    }
    static Mat<T> G2(const T& t) {
        return rows<T>({{1, 0, 0, -1, 1}, {0, 1, 0, 1, 0}, {-1, 0, 1, 0, 0}, {2, 0, 0, 0, 0}, {-1, 0, 0, 0, t * t}});
    }

private:
    static Mat<T> diag5(int a, int b, int c, int d, int e) {
        Mat<T> M = Mat<T>::Zero(5, 5);
        M(0, 0) = a;
        M(1, 1) = b;
        M(2, 2) = c;
        M(3, 3) = d;
        M(4, 4) = e;
        return M;
    }
};

// Same system with f(t) = (t, t^2, 1, t, 1).
template <class T>
tsdae::DAESystem<T> paper_forced() {
    auto s = paper<T>().system;
    s.f = tsdae::MatrixFunction<T>::from_closure(s.grid, 5, 1, [g = s.grid](std::size_t k) {
        const T& t = g->t(k);
        return Mat<T>(vec<T>({t, t * t, T(1), t, T(1)}));
    });
    return s;
}

// Same coefficients on another grid (uniform h or geometric q).
template <class T>
tsdae::DAESystem<T> paper_on(std::shared_ptr<const tsdae::TimeScaleGrid<T>> grid, bool forced = false) {
    using MF = tsdae::MatrixFunction<T>;
    auto A = MF::from_closure(grid, 5, 3, [grid](std::size_t k) {
        const T& t = grid->t(k);
        return rows<T>({{1, 0, 0}, {0, T(1) / t, 0}, {0, 0, 1}, {0, 0, 0}, {0, 0, 0}});
    });
    auto B = MF::from_closure(grid, 3, 5, [grid](std::size_t k) {
        const T& t = grid->t(k);
        return rows<T>({{1, 0, 0, 0, 0}, {0, 2 * t, 0, 0, 0}, {0, 0, 1, 0, 0}});
    });
    auto C = MF::from_closure(grid, 5, 5, [grid](std::size_t k) {
        const T& t = grid->t(k);
        return rows<T>({{0, 0, 0, -1, 1},
                        {0, 0, 1, 1, 0},
                        {0, -1, 0, 0, 0},
                        {-1, 1, 0, 0, 0},
                        {1, 0, 0, 0, t * t}});
    });
    auto f = MF::from_closure(grid, 5, 1, [grid, forced](std::size_t k) {
        const T& t = grid->t(k);
        return forced ? Mat<T>(vec<T>({t, t * t, 1, t, 1})) : Mat<T>(Mat<T>::Zero(5, 1));
    });
    return tsdae::make_system(grid, A, B, C, f);
}

// Constant-coefficient system on a uniform grid.
inline tsdae::DAESystem<double> constant_system(const Mat<double>& A, const Mat<double>& B, const Mat<double>& C,
                                                const Vec<double>& f, std::size_t count = 10, double h = 1.0) {
    using G = tsdae::TimeScaleGrid<double>;
    using MF = tsdae::MatrixFunction<double>;
    auto grid = std::make_shared<const G>(G::uniform(h, 0.0, count));
    return tsdae::make_system(grid, MF::constant(grid, A), MF::constant(grid, B), MF::constant(grid, C),
                              MF::constant(grid, Mat<double>(f)));
}

} // namespace fx
