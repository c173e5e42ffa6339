#pragma once
// Brute-force stepping of A^sigma (Bx)^Delta = C^sigma x^sigma + f on an
// isolated grid. At every right-scattered point the equation is the linear system
//     (A^sigma B^sigma / mu - C^sigma) x^sigma = f + A^sigma B x / mu.

#include "tsdae/decoupler.hpp"

#include <optional>
#include <vector>

namespace tsdae {

template <class T>
struct OracleStepReport {
    std::size_t index = 0;
    Mat<T> W;
    double cond = 0.0;
    double defect = 0.0; // least-squares residual, 0 when W is nonsingular
    bool singular = false;
    Vec<T> x_sigma;
};

template <class T>
OracleStepReport<T> direct_step(const DAESystem<T>& sys, const Vec<T>& x, std::size_t k, double tol = 1e-10,
                                double cond_max = 1e12, double tol_rank = 0.0) {
    if (k >= sys.grid->last()) fail(ErrorCode::index_out_of_range, "no step from index " + std::to_string(k));
    const T mu = sys.grid->mu(k);
    OracleStepReport<T> rep;
    rep.index = k;
    const Mat<T> As = sys.A.at(k + 1);
    rep.W = As * sys.B.at(k + 1) / mu - sys.C.at(k + 1);
    Vec<T> rhs = sys.f.at(k) + As * sys.B.at(k) * x / mu;
    rep.cond = linalg::cond(rep.W);
    auto inv = rep.cond <= cond_max ? linalg::inverse(rep.W, tol_rank) : std::nullopt;
    if (inv) {
        rep.x_sigma = *inv * rhs;
        return rep;
    }
    rep.singular = true;
    auto ls = linalg::solve_min_norm(rep.W, rhs, tol_rank);
    rep.x_sigma = std::move(ls.x);
    rep.defect = ls.defect / (1.0 + max_abs<T>(rhs));
    if (rep.defect > tol)
        fail(ErrorCode::inconsistent_state, "direct step at index " + std::to_string(k) +
                                                ": inconsistent state, least-squares defect " + std::to_string(rep.defect));
    return rep;
}

template <class T>
struct OracleTrajectory {
    std::vector<std::optional<Vec<T>>> x;
    std::vector<OracleStepReport<T>> steps;
};

template <class T>
OracleTrajectory<T> direct_solve(const DAESystem<T>& sys, const Vec<T>& x_start, std::size_t start, std::size_t stop,
                                 double tol = 1e-10, double cond_max = 1e12) {
    OracleTrajectory<T> out;
    out.x.assign(sys.grid->size(), std::nullopt);
    out.x[start] = x_start;
    for (std::size_t k = start; k < stop && k < sys.grid->last(); ++k) {
        out.steps.push_back(direct_step(sys, *out.x[k], k, tol, cond_max));
        out.x[k + 1] = out.steps.back().x_sigma;
    }
    return out;
}

struct CrossValidationReport {
    std::size_t first = 0, last = 0;
    double max_deviation = 0.0;       // relative, max-norm
    std::size_t worst_index = 0;
    double max_oracle_residual = 0.0; // over steps with nonsingular W
    double max_defect = 0.0;
    bool all_nonsingular = true;
    bool inconsistent = false;
    std::string message;

    bool agrees(double tol) const { return !inconsistent && max_deviation <= tol; }
};

// Seeds the oracle with the decoupled x at the first defined index and
// compares both trajectories over the decoupled window. A step with singular W
// does not determine x^sigma, so the oracle is reseeded from the decoupled
// value after it and that step is not compared.
template <class T>
CrossValidationReport cross_validate(const DAESystem<T>& sys, const std::vector<std::optional<Vec<T>>>& x,
                                     double tol = 1e-10, double cond_max = 1e12) {
    CrossValidationReport rep;
    std::size_t first = x.size(), last = 0;
    for (std::size_t k = 0; k < x.size(); ++k)
        if (x[k]) {
            first = std::min(first, k);
            last = k;
        }
    if (first == x.size()) {
        rep.inconsistent = true;
        rep.message = "no decoupled values to compare";
        return rep;
    }
    rep.first = first;
    rep.last = last;
    Vec<T> cur = *x[first];
    for (std::size_t k = first; k < last; ++k) {
        OracleStepReport<T> st;
        try {
            st = direct_step(sys, cur, k, tol, cond_max);
        } catch (const Error& e) {
            rep.inconsistent = true;
            rep.message = e.what();
            return rep;
        }
        rep.max_defect = std::max(rep.max_defect, st.defect);
        if (st.singular) {
            rep.all_nonsingular = false;
            cur = x[k + 1] ? *x[k + 1] : st.x_sigma;
            continue;
        }
        rep.max_oracle_residual = std::max(rep.max_oracle_residual, residual(sys, cur, st.x_sigma, k));
        cur = st.x_sigma;
        if (x[k + 1]) {
            double scale = 1.0 + std::max(max_abs<T>(cur), max_abs<T>(*x[k + 1]));
            double dev = max_abs<T>(Vec<T>(cur - *x[k + 1])) / scale;
            if (dev > rep.max_deviation) {
                rep.max_deviation = dev;
                rep.worst_index = k + 1;
            }
        }
    }
    return rep;
}

} // namespace tsdae
