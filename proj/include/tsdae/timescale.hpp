#pragma once
// Finite time scales made of isolated points.

#include "tsdae/error.hpp"
#include "tsdae/scalar.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace tsdae {

template <class T>
class TimeScaleGrid {
public:
    enum class Kind { uniform, geometric, explicit_points };

    static TimeScaleGrid uniform(const T& h, const T& t0, std::size_t count) {
        if (!(h > 0)) fail(ErrorCode::invalid_grid, "uniform grid needs h > 0");
        std::vector<T> p;
        p.reserve(count);
        for (std::size_t k = 0; k < count; ++k) p.push_back(t0 + h * T(static_cast<long>(k)));
        TimeScaleGrid g(std::move(p), Kind::uniform);
        g.h_or_q_ = h;
        return g;
    }

    static TimeScaleGrid geometric(const T& q, const T& t0, std::size_t count) {
        if (!(q > 1)) fail(ErrorCode::invalid_grid, "geometric grid needs q > 1");
        if (!(t0 > 0)) fail(ErrorCode::invalid_grid, "geometric grid needs t0 > 0");
        std::vector<T> p;
        p.reserve(count);
        T t = t0;
        for (std::size_t k = 0; k < count; ++k) {
            p.push_back(t);
            t = t * q;
        }
        TimeScaleGrid g(std::move(p), Kind::geometric);
        g.h_or_q_ = q;
        return g;
    }

    static TimeScaleGrid explicit_points(std::vector<T> points) {
        return TimeScaleGrid(std::move(points), Kind::explicit_points);
    }

    Kind kind() const { return kind_; }
    // Step for uniform grids, ratio for geometric ones.
    const T& parameter() const { return h_or_q_; }

    std::size_t size() const { return points_.size(); }
    // Index of the last point; derivatives exist on 0..last()-1.
    std::size_t last() const { return points_.size() - 1; }
    const std::vector<T>& points() const { return points_; }

    const T& t(std::size_t k) const {
        if (k >= points_.size()) out_of_range("t", k);
        return points_[k];
    }

    const T& sigma(std::size_t k) const {
        if (k >= last()) out_of_range("sigma", k);
        return points_[k + 1];
    }

    const T& rho(std::size_t k) const {
        if (k == 0 || k > last()) out_of_range("rho", k);
        return points_[k - 1];
    }

    T mu(std::size_t k) const {
        if (k >= last()) out_of_range("mu", k);
        return points_[k + 1] - points_[k];
    }

    // Left graininess t - rho(t); kept for completeness.
    T nu(std::size_t k) const {
        if (k == 0 || k > last()) out_of_range("nu", k);
        return points_[k] - points_[k - 1];
    }

private:
    TimeScaleGrid(std::vector<T> p, Kind kind) : points_(std::move(p)), kind_(kind) {
        if (points_.size() < 3) fail(ErrorCode::invalid_grid, "a grid needs at least 3 points");
        for (std::size_t k = 0; k + 1 < points_.size(); ++k)
            if (!(points_[k] < points_[k + 1]))
                fail(ErrorCode::invalid_grid, "grid points must be strictly increasing (index " +
                                                  std::to_string(k + 1) + ")");
    }

    [[noreturn]] void out_of_range(const char* what, std::size_t k) const {
        fail(ErrorCode::index_out_of_range,
             std::string(what) + " undefined at index " + std::to_string(k) + " of a grid with " +
                 std::to_string(points_.size()) + " points");
    }

    std::vector<T> points_;
    Kind kind_;
    T h_or_q_ = T(0);
};

template <class T>
T delta_scalar(const TimeScaleGrid<T>& grid, std::span<const T> samples, std::size_t k) {
    if (k >= grid.last()) fail(ErrorCode::index_out_of_range, "delta undefined at the last point");
    if (samples.size() <= k + 1) fail(ErrorCode::index_out_of_range, "samples missing at index " + std::to_string(k + 1));
    return (samples[k + 1] - samples[k]) / grid.mu(k);
}

// f(sigma(t)) = f(t) + mu(t) f^Delta(t).  The derivative is recomputed from
// `deriv_samples` so a tampered copy of the data shows up as a violation.
template <class T>
bool check_simple_useful_formula(const TimeScaleGrid<T>& grid, std::span<const T> samples,
                                 std::span<const T> deriv_samples, std::size_t k, double tol_abs = 1e-12) {
    T d = delta_scalar(grid, deriv_samples, k);
    T gap = samples[k + 1] - samples[k] - grid.mu(k) * d;
    if constexpr (is_exact_v<T>) {
        return abs_value(gap) <= from_double<T>(tol_abs);
    } else {
        return std::abs(gap) <= tol_abs;
    }
}

template <class T>
bool check_simple_useful_formula(const TimeScaleGrid<T>& grid, std::span<const T> samples, std::size_t k,
                                 double tol_abs = 1e-12) {
    return check_simple_useful_formula(grid, samples, samples, k, tol_abs);
}

} // namespace tsdae
