#pragma once
// Pointwise evaluation of the algebraic identities every admissible chain obeys.

#include "tsdae/chain.hpp"

#include <map>
#include <string>
#include <vector>

namespace tsdae {

struct IdentityCheck {
    std::string name;
    double max_violation = 0.0;
    std::size_t evaluations = 0;
    bool ok = true;
    bool trivial = false; // holds by construction on isolated grids
};

struct IdentityReport {
    std::vector<IdentityCheck> checks;
    bool all_ok() const {
        for (const auto& c : checks)
            if (!c.ok) return false;
        return true;
    }
    const IdentityCheck* find(const std::string& name) const {
        for (const auto& c : checks)
            if (c.name == name) return &c;
        return nullptr;
    }
    double worst() const {
        double w = 0.0;
        for (const auto& c : checks) w = std::max(w, c.max_violation);
        return w;
    }
};

namespace detail {

class IdentityCollector {
public:
    explicit IdentityCollector(double tol) : tol_(tol) {}

    template <class T>
    void expect(const std::string& name, const Mat<T>& got, const Mat<T>& want) {
        record(name, scaled_gap<T>(got, want));
    }

    void record(const std::string& name, double v) {
        auto it = index_.find(name);
        if (it == index_.end()) {
            index_[name] = report_.checks.size();
            report_.checks.push_back({name, 0.0, 0, true, false});
            it = index_.find(name);
        }
        auto& c = report_.checks[it->second];
        c.max_violation = std::max(c.max_violation, v);
        ++c.evaluations;
        c.ok = c.max_violation <= tol_;
    }

    void trivial(const std::string& name) {
        report_.checks.push_back({name, 0.0, 0, true, true});
    }

    IdentityReport take() { return std::move(report_); }

private:
    double tol_;
    IdentityReport report_;
    std::map<std::string, std::size_t> index_;
};

} // namespace detail

template <class T>
IdentityReport verify_chain_identities(const DAESystem<T>& sys, const ChainResult<T>& r, double tol = 1e-10) {
    detail::IdentityCollector out(tol);
    if (!r.regular || r.nu < 0) {
        out.record("chain is regular", 1.0);
        return out.take();
    }
    const int nu = r.nu;
    const Eigen::Index n = sys.n;
    const Mat<T> I = Mat<T>::Identity(n, n);
    const Mat<T> Z = Mat<T>::Zero(n, n);
    const auto& st = r.stages;
    const std::size_t dom = st[static_cast<std::size_t>(nu)].domain();

    auto Qs = [&](int i, std::size_t k) -> const Mat<T>& { return st[static_cast<std::size_t>(i)].Q[k]; };
    auto Ps = [&](int i, std::size_t k) -> const Mat<T>& { return st[static_cast<std::size_t>(i)].P[k]; };
    auto Pis = [&](int i, std::size_t k) -> const Mat<T>& { return st[static_cast<std::size_t>(i)].Pi[k]; };
    auto Ms = [&](int i, std::size_t k) -> const Mat<T>& { return st[static_cast<std::size_t>(i)].M[k]; };
    auto Gs = [&](int i, std::size_t k) -> const Mat<T>& { return st[static_cast<std::size_t>(i)].G[k]; };

    for (std::size_t k = 0; k < dom; ++k) {
        for (int i = 0; i < nu; ++i) {
            out.expect<T>("Q_i^2 = Q_i", Mat<T>(Qs(i, k) * Qs(i, k)), Qs(i, k));
            const auto& Nb = st[static_cast<std::size_t>(i)].N[k];
            if (Nb.dim() > 0) out.expect<T>("im Q_i = N_i", Mat<T>(Qs(i, k) * Nb.basis), Nb.basis);
            out.record("im Q_i = N_i",
                       std::abs(static_cast<double>(linalg::projector_rank(Qs(i, k), r.tol_rank)) - static_cast<double>(Nb.dim())));
            out.record("rank G_i constant (A1)",
                       std::abs(static_cast<double>(linalg::rank(Gs(i, k), r.tol_rank)) -
                                static_cast<double>(st[static_cast<std::size_t>(i)].r)));
            out.expect<T>("M_i Q_i = M_i", Mat<T>(Ms(i, k) * Qs(i, k)), Ms(i, k));
            out.expect<T>("M_i P_i = 0", Mat<T>(Ms(i, k) * Ps(i, k)), Z);
            out.expect<T>("Q_i M_i = Q_i", Mat<T>(Qs(i, k) * Ms(i, k)), Qs(i, k));
            for (int j = 0; j < nu; ++j) {
                out.expect<T>("M_i M_j = delta_ij M_i", Mat<T>(Ms(i, k) * Ms(j, k)), i == j ? Ms(i, k) : Z);
                out.expect<T>("Pi_i Pi_j = Pi_max(i,j)", Mat<T>(Pis(i, k) * Pis(j, k)), Pis(std::max(i, j), k));
                out.expect<T>("Pi_i M_j = 0 (i>=j), M_j (i<j)", Mat<T>(Pis(i, k) * Ms(j, k)), i >= j ? Z : Ms(j, k));
                out.expect<T>("M_i Pi_j = M_i (i>j), 0 (i<=j)", Mat<T>(Ms(i, k) * Pis(j, k)), i > j ? Ms(i, k) : Z);
                if (i > j) {
                    out.expect<T>("M_i Q_j = 0 (i>j)", Mat<T>(Ms(i, k) * Qs(j, k)), Z);
                    out.expect<T>("Q_i Q_j = 0 (j<i) (A3)", Mat<T>(Qs(i, k) * Qs(j, k)), Z);
                }
            }
            // Q_j P_i ... P_l = Q_j for j > i >= l
            for (int j = i + 1; j < nu; ++j) {
                Mat<T> prod = Qs(j, k);
                for (int l = i; l >= 0; --l) {
                    prod = prod * Ps(l, k);
                    out.expect<T>("Q_j P_i...P_l = Q_j (j>i>=l)", prod, Qs(j, k));
                }
            }
            // P_kk ... P_i = I - Q_i - ... - Q_kk
            for (int kk = i; kk < nu; ++kk) {
                Mat<T> prod = I;
                Mat<T> sum = I;
                for (int l = kk; l >= i; --l) prod = prod * Ps(l, k);
                for (int l = i; l <= kk; ++l) sum -= Qs(l, k);
                out.expect<T>("P_k...P_i = I - Q_i - ... - Q_k", prod, sum);
            }
            // rank Pi_i = n - sum dim N_j
            Eigen::Index dims = 0;
            for (int j = 0; j <= i; ++j) dims += st[static_cast<std::size_t>(j)].N[k].dim();
            out.record("rank Pi_i = n - dim(N_0 + ... + N_i)",
                       std::abs(static_cast<double>(linalg::projector_rank(Pis(i, k), r.tol_rank)) - static_cast<double>(n - dims)));
        }
        for (int i = 1; i <= nu; ++i) {
            out.expect<T>("G_i P_{i-1} = G_{i-1}", Mat<T>(Gs(i, k) * Ps(i - 1, k)), Gs(i - 1, k));
            Mat<T> prod = Gs(i, k);
            for (int l = i - 1; l >= 0; --l) prod = prod * Ps(l, k);
            out.expect<T>("G_0 = G_i P_{i-1}...P_0", prod, Gs(0, k));
        }
        for (int i = 0; i < nu; ++i) {
            Mat<T> prod = Gs(nu, k);
            for (int l = nu - 1; l >= i; --l) prod = prod * Ps(l, k);
            out.expect<T>("G_i = G_nu P_{nu-1}...P_i", prod, Gs(i, k));
        }
        for (int i = 0; i <= nu; ++i) {
            Mat<T> rhs = I;
            for (int l = i; l < nu; ++l) rhs -= Qs(l, k);
            out.expect<T>("G_nu^-1 G_i = I - Q_i - ... - Q_{nu-1}", Mat<T>(r.Ginv_nu[k] * Gs(i, k)), rhs);
        }
        if (nu >= 1) {
            Mat<T> sum = Pis(nu - 1, k);
            for (int j = 0; j < nu; ++j) sum += Ms(j, k);
            out.expect<T>("M_0 + ... + M_{nu-1} + Pi_{nu-1} = I", sum, I);
        }
    }

    if (r.alignment == ChainAlignment::as_printed) {
        // C_i Pi_i^sigma = (C_{i-1}^sigma + C_i M_i^sigma + D_i) Pi_{i-1}^sigma
        for (int i = 1; i < nu; ++i) {
            const auto& s = st[static_cast<std::size_t>(i)];
            const auto& sp = st[static_cast<std::size_t>(i - 1)];
            for (std::size_t k = 0; k < s.C.size(); ++k) {
                Mat<T> lhs = s.C[k] * s.Pi[k + 1];
                Mat<T> rhs = (sp.C[k + 1] + s.C[k] * s.M[k + 1] + s.D[k]) * sp.Pi[k + 1];
                out.expect<T>("C_i relation", lhs, rhs);
            }
        }
    } else if (nu >= 1) {
        const auto& Pi = st[static_cast<std::size_t>(nu - 1)].Pi;
        for (std::size_t k = 0; k < r.Ginv_nu.size() && k + 1 < Pi.size(); ++k) {
            const Mat<T> W = sys.A.at(k + 1) * sys.B.at(k + 1) / sys.grid->mu(k) - sys.C.at(k + 1);
            out.expect<T>("Pi_{nu-1} G_nu^-1 W (I - Pi_{nu-1}^sigma) = 0",
                          Mat<T>(Pi[k] * r.Ginv_nu[k] * W * (I - Pi[k + 1])), Z);
        }
    }
    out.trivial("B Pi_i B^- continuously differentiable (A4)");
    return out.take();
}

} // namespace tsdae
