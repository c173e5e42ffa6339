#pragma once
// Inherent equation, algebraic components v_k and reassembly of x.
//
// The scaled equation  G_nu^-1 A^sigma (Bx)^Delta = G_nu^-1 C^sigma x^sigma + G_nu^-1 f
// is split with the projectors U_k = M_k P_{k+1}...P_{nu-1} and B Pi_{nu-1}.
// Projecting with U_k gives, for every k,
//     L_k (Bx)^Delta = U_k Z x^sigma + F_k f,      Z = G_nu^-1 C^sigma,
// which is solved for v_k^sigma once u and the higher components are known.

#include "tsdae/chain.hpp"

#include <limits>
#include <optional>
#include <vector>

namespace tsdae {

template <class T>
struct InherentEquation {
    std::vector<Mat<T>> K; // m x m, per step index
    std::vector<Vec<T>> g; // m, per step index
    std::vector<Mat<T>> S; // B Pi_{nu-1} B^-, per index

    // Optional split K = (S^sigma - S) / mu + Phi Y, g = Phi gamma, with Phi a
    // basis of im B Pi_{nu-1}. When present the step avoids forming mu K.
    std::vector<Mat<T>> Phi, Y;
    std::vector<Vec<T>> gamma;

    std::size_t steps() const { return K.size(); }
};

template <class T>
struct DecoupleCoefficients {
    int nu = 0;
    // Indexed [k][grid index]; N is [k][j][grid index] with only j > k filled.
    std::vector<std::vector<Mat<T>>> U, V, L, H, F, Y;
    std::vector<std::vector<std::vector<Mat<T>>>> N;
    // Coefficient of v_k^sigma on im M_k^sigma: (U_k Z - L_k B^sigma / mu) M_k^sigma.
    std::vector<std::vector<Mat<T>>> self;
    // Largest coupling of v_k^sigma to lower components, which the splitting
    // assumes to vanish.
    double lower_coupling = 0.0;
    // max |Pi_{nu-1} G_nu^-1 W (I - Pi_{nu-1}^sigma)|, zero for a step-aligned chain
    double decoupling_defect = 0.0;
    std::size_t domain = 0;
};

template <class T>
struct DecoupledSolution {
    std::shared_ptr<const TimeScaleGrid<T>> grid;
    int nu = 0;
    std::vector<std::optional<Vec<T>>> u;
    std::vector<std::vector<std::optional<Vec<T>>>> v; // v[k][index]
    std::vector<std::optional<Vec<T>>> x;
    std::vector<std::optional<double>> residual;
    std::size_t first = 0, last = 0; // window of indices with x defined
    bool experimental = false;        // nu >= 3
    double lower_coupling = 0.0;
    double decoupling_defect = 0.0;

    double max_residual() const {
        double m = 0.0;
        for (const auto& r : residual)
            if (r) m = std::max(m, *r);
        return m;
    }
};

struct DecouplerOptions {
    double cond_max = 1e12;
    double tol_rank = 0.0;
};

namespace detail {

template <class T>
Mat<T> prod_P(const ChainResult<T>& ch, int from, int to, std::size_t k, Eigen::Index n) {
    Mat<T> p = Mat<T>::Identity(n, n);
    for (int l = from; l <= to; ++l) p = p * ch.stages[static_cast<std::size_t>(l)].P[k];
    return p;
}

} // namespace detail

// Chain options for decoupling: same tolerances and projectors, step alignment.
template <class T>
ChainResult<T> decoupling_chain(const DAESystem<T>& sys, ChainOptions<T> opt) {
    opt.alignment = ChainAlignment::step;
    return build_chain(sys, opt);
}

// Builds the inherent equation and the component coefficients on every
// step index t_k -> t_{k+1} where all ingredients exist.
template <class T>
std::pair<InherentEquation<T>, DecoupleCoefficients<T>> assemble(const DAESystem<T>& sys, const ChainResult<T>& ch) {
    if (!ch.regular) fail(ch.reason_code, "cannot decouple an irregular chain: " + ch.reason);
    if (ch.nu < 1) fail(ErrorCode::unsupported_index, "index 0: use an ODE solver");
    if (ch.alignment != ChainAlignment::step)
        fail(ErrorCode::input_error, "decoupling needs a chain built with the step alignment");
    const int nu = ch.nu;
    const Eigen::Index n = sys.n;
    const Mat<T> I = Mat<T>::Identity(n, n);
    const auto& last = ch.stages[static_cast<std::size_t>(nu - 1)];
    const auto& Binv = ch.factorization.Binv;

    // Projector data of level nu-1 lives on last.Pi.size() indices; a step at k
    // also reads index k+1.
    const std::size_t sdom = last.Pi.size();
    const std::size_t dom = std::min({ch.Ginv_nu.size(), sdom - 1, Binv.domain() - 1});

    InherentEquation<T> eq;
    DecoupleCoefficients<T> co;
    co.nu = nu;
    co.domain = dom;
    for (std::size_t k = 0; k < sdom; ++k) eq.S.push_back(sys.B.at(k) * last.Pi[k] * Binv.at(k));
    // rank of B Pi_{nu-1}, exact from the chain ranks
    Eigen::Index d = n;
    for (int i = 0; i < nu; ++i) d -= n - static_cast<Eigen::Index>(ch.stages[static_cast<std::size_t>(i)].r);
    for (std::size_t k = 0; k < dom; ++k) {
        const T mu = sys.grid->mu(k);
        const Mat<T> Z = ch.Ginv_nu[k] * sys.C.at(k + 1);
        const Mat<T> BPi = sys.B.at(k) * last.Pi[k];
        Mat<T> K;
        Vec<T> g;
        if constexpr (is_exact_v<T>) {
            K = (eq.S[k + 1] - eq.S[k]) / mu + BPi * Z * Binv.at(k + 1);
            g = BPi * ch.Ginv_nu[k] * sys.f.at(k);
        } else {
            // Rounding in B Pi outside its range would be scaled by mu in the
            // step, so B Pi is replaced by its rank d truncation Phi Phi^T B Pi.
            Eigen::JacobiSVD<Mat<T>> svd(BPi, Eigen::ComputeFullU);
            Mat<T> Phi = svd.matrixU().leftCols(std::max<Eigen::Index>(d, 0));
            Mat<T> Psi_t = Phi.transpose() * BPi;
            Mat<T> Y = Psi_t * Z * Binv.at(k + 1);
            Vec<T> gamma = Psi_t * ch.Ginv_nu[k] * sys.f.at(k);
            K = (eq.S[k + 1] - eq.S[k]) / mu + Phi * Y;
            g = Phi * gamma;
            eq.Phi.push_back(std::move(Phi));
            eq.Y.push_back(std::move(Y));
            eq.gamma.push_back(std::move(gamma));
        }
        const Mat<T> W = sys.A.at(k + 1) * sys.B.at(k + 1) / mu - sys.C.at(k + 1);
        co.decoupling_defect =
            std::max(co.decoupling_defect, max_abs<T>(Mat<T>(last.Pi[k] * ch.Ginv_nu[k] * W * (I - last.Pi[k + 1]))));
        eq.K.push_back(std::move(K));
        eq.g.push_back(std::move(g));
    }

    co.U.resize(nu);
    co.V.resize(nu);
    co.L.resize(nu);
    co.H.resize(nu);
    co.F.resize(nu);
    co.Y.resize(nu);
    co.self.resize(nu);
    co.N.assign(nu, std::vector<std::vector<Mat<T>>>(nu));
    for (int kk = 0; kk < nu; ++kk) {
        const auto& sk = ch.stages[static_cast<std::size_t>(kk)];
        for (std::size_t k = 0; k < dom; ++k) {
            const T mu = sys.grid->mu(k);
            const Mat<T> Z = ch.Ginv_nu[k] * sys.C.at(k + 1);
            Mat<T> tail = detail::prod_P(ch, kk + 1, nu - 1, k, n);
            Mat<T> U = sk.M[k] * tail;
            Mat<T> V = sk.Q[k] * tail;
            Mat<T> L = sk.M[k] * (tail - I) * Binv.at(k);
            Mat<T> H = U * Z * Binv.at(k + 1);
            Mat<T> F = U * ch.Ginv_nu[k];
            Mat<T> Y = U * Z;
            Mat<T> self = (Y - L * sys.B.at(k + 1) / mu) * ch.stages[static_cast<std::size_t>(kk)].M[k + 1];
            for (int j = 0; j < kk; ++j) {
                Mat<T> low = (Y - L * sys.B.at(k + 1) / mu) * ch.stages[static_cast<std::size_t>(j)].M[k + 1];
                co.lower_coupling = std::max(co.lower_coupling, max_abs<T>(low));
            }
            for (int j = kk + 1; j < nu; ++j) {
                Mat<T> Nkj = -sk.M[k] * detail::prod_P(ch, kk + 1, j - 1, k, n) *
                             ch.stages[static_cast<std::size_t>(j)].Q[k] * Binv.at(k);
                co.N[kk][j].push_back(std::move(Nkj));
            }
            co.U[kk].push_back(std::move(U));
            co.V[kk].push_back(std::move(V));
            co.L[kk].push_back(std::move(L));
            co.H[kk].push_back(std::move(H));
            co.F[kk].push_back(std::move(F));
            co.Y[kk].push_back(std::move(Y));
            co.self[kk].push_back(std::move(self));
        }
    }
    return {std::move(eq), std::move(co)};
}

namespace detail {

// The step through the split coefficients. With z = Y u^sigma + gamma it reads
// E u^sigma - mu Phi z = u, z - Y u^sigma = gamma, E = I - (S^sigma - S).
// For mu > 1 the unknown is mu z, which keeps every block O(1). The Schur
// complement of the z block is I - mu K, so the top left block of the inverse
// is (I - mu K)^-1.
template <class T>
struct SplitStep {
    Eigen::FullPivLU<Mat<T>> lu;
    Eigen::Index m = 0;

    SplitStep(const InherentEquation<T>& eq, const T& mu, std::size_t k) {
        m = eq.S[k].rows();
        const Eigen::Index d = eq.Phi[k].cols();
        const bool large = mu > T(1);
        Mat<T> A(m + d, m + d);
        A.topLeftCorner(m, m) = Mat<T>::Identity(m, m) - (eq.S[k + 1] - eq.S[k]);
        A.topRightCorner(m, d) = large ? Mat<T>(-eq.Phi[k]) : Mat<T>(-mu * eq.Phi[k]);
        A.bottomLeftCorner(d, m) = -eq.Y[k];
        A.bottomRightCorner(d, d) = large ? Mat<T>(Mat<T>::Identity(d, d) / mu) : Mat<T>(Mat<T>::Identity(d, d));
        lu.compute(A);
    }
    Mat<T> inverse_block() const {
        Mat<T> e = Mat<T>::Zero(lu.rows(), m);
        e.topRows(m).setIdentity();
        return lu.solve(e).topRows(m);
    }
    Vec<T> solve(const Vec<T>& u, const Vec<T>& gamma) const {
        Vec<T> rhs(lu.rows());
        rhs << u, gamma;
        return lu.solve(rhs).head(m);
    }
};

} // namespace detail

// |(I - mu K)^-1| at step k, +inf when singular. The identity part fixes the
// scale, so this rather than the condition number decides regressivity: the
// latter grows like mu |K| on coarse grids with no loss of invertibility.
template <class T>
double regressivity_norm(const InherentEquation<T>& eq, const T& mu, std::size_t k) {
    const Eigen::Index m = eq.K[k].rows();
    if constexpr (!is_exact_v<T>) {
        if (k < eq.Phi.size()) {
            detail::SplitStep<T> st(eq, mu, k);
            if (!st.lu.isInvertible()) return std::numeric_limits<double>::infinity();
            return Eigen::JacobiSVD<Mat<T>>(st.inverse_block()).singularValues()(0);
        }
    }
    return linalg::inverse_norm(Mat<T>(Mat<T>::Identity(m, m) - mu * eq.K[k]));
}

// (I - mu K) u^sigma = u + mu g
template <class T>
Vec<T> step_inherent(const InherentEquation<T>& eq, const TimeScaleGrid<T>& grid, const Vec<T>& u, std::size_t k,
                     double cond_max = 1e12) {
    if (k >= eq.steps()) fail(ErrorCode::index_out_of_range, "no inherent step at index " + std::to_string(k));
    const T mu = grid.mu(k);
    if (!(regressivity_norm(eq, mu, k) <= cond_max))
        fail(ErrorCode::non_regressive_step,
             "I - mu K is not invertible at index " + std::to_string(k) + " (t = " + std::to_string(to_double(grid.t(k))) + ")");
    if constexpr (!is_exact_v<T>)
        if (k < eq.Phi.size()) return detail::SplitStep<T>(eq, mu, k).solve(u, eq.gamma[k]);
    const Eigen::Index m = eq.K[k].rows();
    return *linalg::inverse(Mat<T>(Mat<T>::Identity(m, m) - mu * eq.K[k])) * (u + mu * eq.g[k]);
}

template <class T>
Vec<T> project_initial(const InherentEquation<T>& eq, const Vec<T>& u0_raw) {
    if (u0_raw.size() != eq.S.front().rows())
        fail(ErrorCode::input_error, "u0 has " + std::to_string(u0_raw.size()) + " entries, expected " +
                                         std::to_string(eq.S.front().rows()));
    return eq.S.front() * u0_raw;
}

namespace detail {

// Solves self v = rhs for v in im Ms. self = X Ms is rank deficient by
// construction, so the solve runs on a basis of im Ms where it has full
// column rank.
template <class T>
Vec<T> solve_in_range(const Mat<T>& self, const Mat<T>& Ms, const Vec<T>& rhs, double tol_rank) {
    Mat<T> basis = linalg::range(Ms, tol_rank);
    if (basis.cols() == 0) return Vec<T>::Zero(Ms.rows());
    Mat<T> reduced = self * basis;
    return basis * (linalg::pinv(reduced, tol_rank) * rhs);
}

} // namespace detail

// v_{nu-1}(t_{k+1}) from u(t_{k+1}).
template <class T>
Vec<T> component_last(const DAESystem<T>& sys, const ChainResult<T>& ch, const DecoupleCoefficients<T>& co,
                      const Vec<T>& u_sigma, std::size_t k, double tol_rank = 0.0) {
    const int kk = co.nu - 1;
    Vec<T> rhs = -(co.H[kk][k] * u_sigma) - co.F[kk][k] * sys.f.at(k);
    return detail::solve_in_range(co.self[kk][k], ch.stages[static_cast<std::size_t>(kk)].M[k + 1], rhs, tol_rank);
}

// v_k(t_{k+1}) for k < nu-1; higher components are read at `index` and index+1.
template <class T>
Vec<T> components_backward(const DAESystem<T>& sys, const ChainResult<T>& ch, const DecoupleCoefficients<T>& co,
                           const std::vector<std::optional<Vec<T>>>& u,
                           const std::vector<std::vector<std::optional<Vec<T>>>>& v, int kk, std::size_t index,
                           double tol_rank = 0.0) {
    const std::size_t k = index;
    const T mu = sys.grid->mu(k);
    if (!u[k] || !u[k + 1])
        fail(ErrorCode::insufficient_lookahead, "u missing at index " + std::to_string(k) + " or " + std::to_string(k + 1));
    Vec<T> du = (*u[k + 1] - *u[k]) / mu;
    Vec<T> rhs = co.L[kk][k] * du - co.H[kk][k] * *u[k + 1] - co.F[kk][k] * sys.f.at(k);
    for (int j = kk + 1; j < co.nu; ++j) {
        const auto& vj = v[static_cast<std::size_t>(j)];
        if (!vj[k] || !vj[k + 1])
            fail(ErrorCode::insufficient_lookahead,
                 "v_" + std::to_string(j) + " missing at index " + std::to_string(k) + " or " + std::to_string(k + 1));
        Vec<T> dBv = (sys.B.at(k + 1) * *vj[k + 1] - sys.B.at(k) * *vj[k]) / mu;
        rhs += co.L[kk][k] * dBv - co.Y[kk][k] * *vj[k + 1];
    }
    return detail::solve_in_range(co.self[kk][k], ch.stages[static_cast<std::size_t>(kk)].M[k + 1], rhs, tol_rank);
}

// Normalized residual of the original equation on the step k -> k+1.
template <class T>
double residual(const DAESystem<T>& sys, const Vec<T>& x, const Vec<T>& x_sigma, std::size_t k) {
    const T mu = sys.grid->mu(k);
    Vec<T> r = sys.A.at(k + 1) * (sys.B.at(k + 1) * x_sigma - sys.B.at(k) * x) / mu - sys.C.at(k + 1) * x_sigma -
               sys.f.at(k);
    Vec<T> fk = sys.f.at(k);
    double scale = 1.0 + max_abs<T>(fk) + std::max(max_abs<T>(x), max_abs<T>(x_sigma));
    return max_abs<T>(r) / scale;
}

template <class T>
std::vector<std::optional<double>> residual(const DAESystem<T>& sys, const std::vector<std::optional<Vec<T>>>& x) {
    std::vector<std::optional<double>> out(x.size());
    for (std::size_t k = 0; k + 1 < x.size() && k < sys.grid->last(); ++k)
        if (x[k] && x[k + 1]) out[k] = residual(sys, *x[k], *x[k + 1], k);
    return out;
}

// x = B^- u + v_{nu-1} + ... + v_0 wherever every part is known.
template <class T>
void reassemble(const DAESystem<T>& sys, const ChainResult<T>& ch, DecoupledSolution<T>& sol) {
    const std::size_t count = sys.grid->size();
    sol.x.assign(count, std::nullopt);
    bool any = false;
    for (std::size_t k = 0; k < count; ++k) {
        if (!sol.u[k] || k >= ch.factorization.Binv.domain()) continue;
        bool all = true;
        for (const auto& vk : sol.v)
            if (!vk[k]) all = false;
        if (!all) continue;
        Vec<T> x = ch.factorization.Binv.at(k) * *sol.u[k];
        for (const auto& vk : sol.v) x += *vk[k];
        sol.x[k] = std::move(x);
        if (!any) sol.first = k;
        sol.last = k;
        any = true;
    }
    if (!any) fail(ErrorCode::grid_too_short, "no grid index carries every component of x");
    sol.residual = residual(sys, sol.x);
}

// Full pipeline: step u from S(t_0) u0, recover the components, reassemble.
// With x0 the components at t_0 come from M_k x0 and the window starts at 0.
template <class T>
DecoupledSolution<T> solve_decoupled(const DAESystem<T>& sys, const ChainResult<T>& ch, const Vec<T>& u0_raw,
                                     const std::optional<Vec<T>>& x0 = std::nullopt, DecouplerOptions opt = {}) {
    auto [eq, co] = assemble(sys, ch);
    const std::size_t count = sys.grid->size();
    const int nu = ch.nu;
    DecoupledSolution<T> sol;
    sol.grid = sys.grid;
    sol.nu = nu;
    sol.experimental = nu >= 3;
    sol.lower_coupling = co.lower_coupling;
    sol.decoupling_defect = co.decoupling_defect;
    sol.u.assign(count, std::nullopt);
    sol.v.assign(static_cast<std::size_t>(nu), std::vector<std::optional<Vec<T>>>(count, std::nullopt));

    if (x0) {
        if (x0->size() != sys.n)
            fail(ErrorCode::input_error, "x0 has " + std::to_string(x0->size()) + " entries, expected " + std::to_string(sys.n));
        sol.u[0] = sys.B.at(0) * ch.stages[static_cast<std::size_t>(nu - 1)].Pi[0] * *x0;
        for (int kk = 0; kk < nu; ++kk) sol.v[static_cast<std::size_t>(kk)][0] = ch.stages[static_cast<std::size_t>(kk)].M[0] * *x0;
    } else {
        sol.u[0] = project_initial(eq, u0_raw);
    }
    for (std::size_t k = 0; k < co.domain; ++k) {
        sol.u[k + 1] = step_inherent(eq, *sys.grid, *sol.u[k], k, opt.cond_max);
        sol.v[static_cast<std::size_t>(nu - 1)][k + 1] = component_last(sys, ch, co, *sol.u[k + 1], k, opt.tol_rank);
        for (int kk = nu - 2; kk >= 0; --kk) {
            bool ready = true;
            for (int j = kk + 1; j < nu; ++j)
                if (!sol.v[static_cast<std::size_t>(j)][k]) ready = false;
            if (ready) sol.v[static_cast<std::size_t>(kk)][k + 1] = components_backward(sys, ch, co, sol.u, sol.v, kk, k, opt.tol_rank);
        }
    }
    reassemble(sys, ch, sol);
    return sol;
}

// Hidden constraint  M_{nu-1} G_nu^-1 (C^sigma x^sigma + f) = 0, max-norm per step.
template <class T>
std::vector<std::optional<double>> hidden_constraint_defect(const DAESystem<T>& sys, const ChainResult<T>& ch,
                                                            const std::vector<std::optional<Vec<T>>>& x) {
    std::vector<std::optional<double>> out(x.size());
    if (!ch.regular || ch.nu < 1) return out;
    const auto& M = ch.stages[static_cast<std::size_t>(ch.nu - 1)].M;
    for (std::size_t k = 0; k + 1 < x.size() && k < ch.Ginv_nu.size() && k < M.size(); ++k) {
        if (!x[k + 1]) continue;
        Vec<T> d = M[k] * ch.Ginv_nu[k] * (sys.C.at(k + 1) * *x[k + 1] + sys.f.at(k));
        Vec<T> fk = sys.f.at(k);
        out[k] = max_abs<T>(d) / (1.0 + max_abs<T>(fk) + max_abs<T>(*x[k + 1]));
    }
    return out;
}

} // namespace tsdae
