#pragma once
// Matrix chain G_0, G_1, ... with admissible projectors and the
// tractability index.

#include "tsdae/subspaces.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace tsdae {

enum class ProjectorStrategy { canonical, injected };

// as_printed: C_0 = C and C_i = (C_{i-1}^sigma + D_i)(Pi_i^sigma - M_i^sigma).
// step:       C_i = -W M_i^sigma with the step matrix W = A^sigma B^sigma / mu - C^sigma.
//             Then Pi_{nu-1} G_nu^-1 W (I - Pi_{nu-1}^sigma) = 0, which is what makes
//             the inherent equation and the component equations exact on the grid.
//             Each level needs M_i one index ahead, so G_i lives on N - i indices.
enum class ChainAlignment { as_printed, step };

template <class T>
struct ChainOptions {
    int max_index = 6;
    double tol_rank = 0.0; // 0 selects max(rows, cols) * eps
    double tol_proj = 1e-10;
    double cond_max = 1e12;
    ProjectorStrategy strategy = ProjectorStrategy::canonical;
    // Q_0, Q_1, ... for the injected strategy; deeper levels fall back to canonical.
    std::vector<MatrixFunction<T>> injected;
    ChainAlignment alignment = ChainAlignment::as_printed;
};

template <class T>
struct ChainStage {
    int level = 0;
    std::vector<Mat<T>> G;
    std::vector<SubspaceBasis<T>> N;
    std::size_t r = 0;
    // Empty on the final, nonsingular stage.
    std::vector<Mat<T>> Q, P, Pi, M;
    std::vector<Mat<T>> C;
    std::vector<Mat<T>> D; // level >= 1

    std::size_t domain() const { return G.size(); }
};

template <class T>
struct ChainResult {
    std::vector<ChainStage<T>> stages;
    int nu = -1;
    ProperFactorization<T> factorization;
    bool regular = false;
    ErrorCode reason_code = ErrorCode::input_error;
    std::string reason;
    int irregular_level = -1;
    std::vector<Mat<T>> Ginv_nu;
    std::vector<double> cond_nu;
    ChainAlignment alignment = ChainAlignment::as_printed;
    ProjectorStrategy strategy = ProjectorStrategy::canonical;
    double tol_proj = 1e-10;
    double tol_rank = 0.0;

    std::vector<std::size_t> ranks() const {
        std::vector<std::size_t> r;
        for (const auto& s : stages) r.push_back(s.r);
        return r;
    }
};

namespace detail {

inline std::string index_list(const std::vector<std::size_t>& v) {
    std::ostringstream os;
    for (std::size_t i = 0; i < v.size() && i < 8; ++i) os << (i ? ", " : "") << v[i];
    if (v.size() > 8) os << ", ...";
    return os.str();
}

} // namespace detail

template <class T>
ChainResult<T> build_chain(const DAESystem<T>& sys, const ChainOptions<T>& opt = {}) {
    sys.validate();
    ChainResult<T> res;
    res.alignment = opt.alignment;
    res.strategy = opt.strategy;
    res.tol_proj = opt.tol_proj;
    res.tol_rank = opt.tol_rank;

    const std::size_t N = sys.grid->last();
    const Eigen::Index n = sys.n;
    const Mat<T> I = Mat<T>::Identity(n, n);
    const bool injected = opt.strategy == ProjectorStrategy::injected;
    auto injected_at = [&](int level) -> const MatrixFunction<T>* {
        if (!injected || level >= static_cast<int>(opt.injected.size())) return nullptr;
        return &opt.injected[static_cast<std::size_t>(level)];
    };

    std::optional<MatrixFunction<T>> pi0_choice;
    if (const auto* q0 = injected_at(0)) {
        MatrixFunction<T> Q0 = *q0;
        if (Q0.rows() != n || Q0.cols() != n) fail(ErrorCode::shape_mismatch, "injected Q0 must be n x n");
        pi0_choice = MatrixFunction<T>::from_closure(sys.grid, n, n, Q0.domain(),
                                                     [Q0, I](std::size_t k) { return Mat<T>(I - Q0.at(k)); });
    }
    res.factorization = reflexive_inverse(sys, pi0_choice, FactorizationOptions{opt.tol_rank, opt.tol_proj});
    const auto& Binv = res.factorization.Binv;

    ChainStage<T> cur;
    cur.level = 0;
    cur.G.resize(N);
    for (std::size_t k = 0; k < N; ++k) cur.G[k] = sys.A.at(k + 1) * sys.B.at(k);

    // Printed alignment: C_0 = C on every grid point.
    std::vector<Mat<T>> Cprev;
    if (opt.alignment == ChainAlignment::as_printed)
        for (std::size_t k = 0; k <= N; ++k) Cprev.push_back(sys.C.at(k));

    auto irregular = [&](ErrorCode code, int level, const std::string& why) {
        res.regular = false;
        res.reason_code = code;
        res.irregular_level = level;
        res.reason = why;
    };

    for (int i = 0;; ++i) {
        const std::size_t dom = cur.domain();
        if (dom == 0) fail(ErrorCode::grid_too_short, "grid too short to reach chain level " + std::to_string(i));

        // (A1) constant rank
        std::vector<std::size_t> rk(dom);
        for (std::size_t k = 0; k < dom; ++k) rk[k] = linalg::rank(cur.G[k], opt.tol_rank);
        std::map<std::size_t, std::size_t> seen;
        for (auto v : rk) ++seen[v];
        if (seen.size() > 1) {
            auto mode = std::max_element(seen.begin(), seen.end(),
                                         [](const auto& a, const auto& b) { return a.second < b.second; })->first;
            std::vector<std::size_t> where;
            std::string others;
            for (std::size_t k = 0; k < dom; ++k)
                if (rk[k] != mode) where.push_back(k);
            for (const auto& [v, c] : seen)
                if (v != mode) others += (others.empty() ? "" : "/") + std::to_string(v);
            cur.r = mode;
            res.stages.push_back(std::move(cur));
            irregular(ErrorCode::rank_not_constant, i,
                      "(A1) rank of G_" + std::to_string(i) + " is not constant: " + std::to_string(mode) +
                          " at most indices, " + others + " at indices " + detail::index_list(where));
            return res;
        }
        cur.r = rk.front();

        if (cur.r == static_cast<std::size_t>(n)) {
            res.nu = i;
            res.Ginv_nu.resize(dom);
            res.cond_nu.resize(dom);
            std::vector<std::size_t> bad;
            for (std::size_t k = 0; k < dom; ++k) {
                auto inv = linalg::inverse(cur.G[k], opt.tol_rank);
                res.cond_nu[k] = linalg::cond(cur.G[k]);
                if (!inv || res.cond_nu[k] > opt.cond_max) {
                    bad.push_back(k);
                    res.Ginv_nu[k] = Mat<T>::Zero(n, n);
                } else {
                    res.Ginv_nu[k] = std::move(*inv);
                }
            }
            res.stages.push_back(std::move(cur));
            if (!bad.empty()) {
                irregular(ErrorCode::ill_conditioned, i,
                          "G_" + std::to_string(i) + " has condition number above " + std::to_string(opt.cond_max) +
                              " at indices " + detail::index_list(bad));
                return res;
            }
            res.regular = true;
            return res;
        }
        if (i >= opt.max_index) {
            res.stages.push_back(std::move(cur));
            irregular(ErrorCode::max_index_exceeded, i,
                      "G_" + std::to_string(i) + " still singular at the maximal level " + std::to_string(opt.max_index));
            return res;
        }

        // Kernels and (A2)
        cur.N.resize(dom);
        for (std::size_t k = 0; k < dom; ++k) cur.N[k] = kernel_basis<T>(cur.G[k], opt.tol_rank);
        if (i >= 1) {
            for (std::size_t k = 0; k < dom; ++k) {
                std::vector<SubspaceBasis<T>> all;
                for (int j = 0; j < i; ++j) all.push_back(res.stages[static_cast<std::size_t>(j)].N[k]);
                all.push_back(cur.N[k]);
                if (!direct_sum_rank<T>(all, opt.tol_rank).direct) {
                    res.stages.push_back(std::move(cur));
                    irregular(ErrorCode::intersection_nontrivial, i,
                              "(A2) intersection nontrivial: N_" + std::to_string(i) + " meets " +
                                  (i == 1 ? std::string("N_0") : "N_0 + ... + N_" + std::to_string(i - 1)) +
                                  " at index " + std::to_string(k));
                    return res;
                }
            }
        }

        // Projectors
        cur.Q.resize(dom);
        cur.P.resize(dom);
        cur.Pi.resize(dom);
        cur.M.resize(dom);
        const MatrixFunction<T>* inj = injected_at(i);
        for (std::size_t k = 0; k < dom; ++k) {
            Mat<T> q;
            if (inj) {
                if (inj->rows() != n || inj->cols() != n)
                    fail(ErrorCode::shape_mismatch, "injected Q" + std::to_string(i) + " must be n x n");
                q = inj->at(k);
                const auto& Nb = cur.N[k];
                bool idem = nearly_equal<T>(Mat<T>(q * q), q, opt.tol_proj);
                bool onto = (Nb.dim() == 0 || nearly_equal<T>(Mat<T>(q * Nb.basis), Nb.basis, opt.tol_proj)) &&
                            linalg::projector_rank(q, opt.tol_rank) == static_cast<std::size_t>(Nb.dim());
                if (!idem || !onto)
                    fail(ErrorCode::input_error, "injected Q" + std::to_string(i) + " at index " + std::to_string(k) +
                                                     " is not a projector onto ker G_" + std::to_string(i));
                for (int j = 0; j < i; ++j) {
                    const Mat<T>& qj = res.stages[static_cast<std::size_t>(j)].Q[k];
                    if (!nearly_equal<T>(Mat<T>(q * qj), Mat<T>::Zero(n, n), opt.tol_proj))
                        fail(ErrorCode::anticommutation_failure,
                             "(A3) Q" + std::to_string(i) + " Q" + std::to_string(j) + " != 0 at index " +
                                 std::to_string(k));
                }
            } else if (i == 0) {
                q = I - res.factorization.Pi0.at(k);
            } else {
                std::vector<SubspaceBasis<T>> prev;
                for (int j = 0; j < i; ++j) prev.push_back(res.stages[static_cast<std::size_t>(j)].N[k]);
                SubspaceBasis<T> kill{n, concat<T>(prev, n), opt.tol_rank};
                q = projector_onto_avoiding<T>(cur.N[k], kill, opt.tol_rank);
            }
            cur.P[k] = I - q;
            if (i == 0) {
                cur.Pi[k] = cur.P[k];
                cur.M[k] = q;
            } else {
                const Mat<T>& pip = res.stages.back().Pi[k];
                cur.Pi[k] = pip * cur.P[k];
                cur.M[k] = pip - cur.Pi[k];
            }
            cur.Q[k] = std::move(q);
        }

        // C_i and the next G
        ChainStage<T> next;
        next.level = i + 1;
        if (opt.alignment == ChainAlignment::step) {
            const std::size_t cdom = dom - 1;
            cur.C.resize(cdom);
            next.G.resize(cdom);
            for (std::size_t k = 0; k < cdom; ++k) {
                const Mat<T> W = sys.A.at(k + 1) * sys.B.at(k + 1) / sys.grid->mu(k) - sys.C.at(k + 1);
                cur.C[k] = -(W * cur.M[k + 1]);
                next.G[k] = cur.G[k] + cur.C[k] * cur.M[k];
            }
        } else if (i == 0) {
            cur.C.assign(Cprev.begin(), Cprev.end());
            next.G.resize(dom);
            for (std::size_t k = 0; k < dom; ++k) next.G[k] = cur.G[k] + cur.C[k] * cur.M[k];
        } else {
            std::size_t cdom = std::min(dom - 1, Cprev.size() - 1);
            cur.D.resize(cdom);
            cur.C.resize(cdom);
            next.G.resize(cdom);
            for (std::size_t k = 0; k < cdom; ++k) {
                const Mat<T> S0 = sys.B.at(k) * cur.Pi[k] * Binv.at(k);
                const Mat<T> S1 = sys.B.at(k + 1) * cur.Pi[k + 1] * Binv.at(k + 1);
                Mat<T> dS = (S1 - S0) / sys.grid->mu(k);
                cur.D[k] = cur.G[k] * Binv.at(k) * dS * sys.B.at(k + 1);
                cur.C[k] = (Cprev[k + 1] + cur.D[k]) * (cur.Pi[k + 1] - cur.M[k + 1]);
                next.G[k] = cur.G[k] + cur.C[k] * cur.M[k];
            }
        }
        Cprev = cur.C;
        res.stages.push_back(std::move(cur));
        cur = std::move(next);
    }
}

// Smallest level with G nonsingular; throws on an irregular chain.
template <class T>
int tractability_index(const ChainResult<T>& r) {
    if (!r.regular)
        fail(r.reason_code, "irregular at level " + std::to_string(r.irregular_level) + ": " + r.reason);
    return r.nu;
}

// Convenience: S_i(k) = B Pi_i B^- at index k.
template <class T>
Mat<T> b_pi_binv(const DAESystem<T>& sys, const ChainResult<T>& r, std::size_t level, std::size_t k) {
    return sys.B.at(k) * r.stages[level].Pi[k] * r.factorization.Binv.at(k);
}

} // namespace tsdae
