#pragma once
// analyze / solve / verify drivers behind the command line tool.
// Exit codes: 0 ok, 1 verification failure, 2 input error, 3 irregular or non-regressive.

#include "tsdae/chain_identities.hpp"
#include "tsdae/direct_oracle.hpp"
#include "tsdae/examples.hpp"
#include "tsdae/system_file.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace tsdae {

enum ExitCode { exit_ok = 0, exit_verification = 1, exit_input = 2, exit_irregular = 3 };

struct RunOptions {
    std::optional<double> tol_rank, tol_proj, cond_max;
    std::optional<int> max_index;
    bool rational = false;
    bool canonical = false;
    std::string format = "csv";
    std::optional<std::string> u0, x0, out;
    double tol = 1e-8;
};

inline int exit_code_for(ErrorCode c) {
    switch (c) {
    case ErrorCode::transversality_failure:
    case ErrorCode::rank_not_constant:
    case ErrorCode::intersection_nontrivial:
    case ErrorCode::max_index_exceeded:
    case ErrorCode::ill_conditioned:
    case ErrorCode::non_regressive_step:
    case ErrorCode::unsupported_index: return exit_irregular;
    case ErrorCode::inconsistent_state: return exit_verification;
    default: return exit_input;
    }
}

// Shortest text that reads back to the same double.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

template <class T>
std::string format_scalar(const T& v) {
    if constexpr (is_exact_v<T>) {
        if (denominator(v) == 1) return numerator(v).str();
        return numerator(v).str() + "/" + denominator(v).str();
    } else {
        return format_double(v);
    }
}

// "paper_example" style names resolve to bundled files when no such path exists.
template <class T>
LoadedSystem<T> load_system(const std::string& path) {
    std::string name = path.rfind("example:", 0) == 0 ? path.substr(8) : path;
    if (!std::filesystem::exists(path)) {
        const auto& ex = bundled_examples();
        if (auto it = ex.find(name); it != ex.end()) {
            try {
                return system_from_json<T>(json::parse(it->second));
            } catch (const json::exception& e) {
                fail(ErrorCode::input_error, name + ": " + e.what());
            }
        }
    }
    return load_system_file<T>(path);
}

template <class T>
ChainOptions<T> chain_options(const LoadedSystem<T>& L, const RunOptions& ro) {
    ChainOptions<T> o;
    if (auto v = ro.tol_rank ? ro.tol_rank : L.options.tol_rank) o.tol_rank = *v;
    if (auto v = ro.tol_proj ? ro.tol_proj : L.options.tol_proj) o.tol_proj = *v;
    if (auto v = ro.cond_max ? ro.cond_max : L.options.cond_max) o.cond_max = *v;
    if (auto v = ro.max_index ? ro.max_index : L.options.max_index) o.max_index = *v;
    if (!L.projectors.empty() && !ro.canonical) {
        o.strategy = ProjectorStrategy::injected;
        o.injected = L.projectors;
    }
    return o;
}

template <class T>
Vec<T> parse_vector_arg(const std::string& s, Eigen::Index expect, const std::string& what) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');) parts.push_back(item);
    if (static_cast<Eigen::Index>(parts.size()) != expect)
        fail(ErrorCode::input_error,
             what + " has " + std::to_string(parts.size()) + " entries, expected " + std::to_string(expect));
    Vec<T> v(expect);
    for (Eigen::Index i = 0; i < expect; ++i) {
        try {
            v(i) = parse_expression(parts[static_cast<std::size_t>(i)]).template evaluate<T>(T(0));
        } catch (const Error& e) {
            fail(ErrorCode::input_error, what + "[" + std::to_string(i) + "]: " + e.what());
        }
    }
    return v;
}

namespace detail {

struct MonomialFit {
    bool ok = false;
    std::string text;
};

// Looks for det(t_k) = c t_k^p with integer p, exactly in rational mode.
template <class T>
MonomialFit fit_monomial(const std::vector<T>& t, const std::vector<T>& d, int max_power) {
    for (int p = 0; p <= max_power; ++p) {
        std::optional<T> c;
        bool ok = true;
        for (std::size_t k = 0; k < t.size() && ok; ++k) {
            if (t[k] == T(0)) {
                ok = p == 0 || d[k] == T(0);
                continue;
            }
            T tp = T(1);
            for (int i = 0; i < p; ++i) tp *= t[k];
            T ck = d[k] / tp;
            if (!c) c = ck;
            else if constexpr (is_exact_v<T>) ok = ck == *c;
            else ok = std::abs(ck - *c) <= 1e-9 * std::max(1.0, std::abs(*c));
        }
        if (!ok || !c) continue;
        T cv = *c;
        if constexpr (!is_exact_v<T>) cv = std::round(cv * 1e9) / 1e9;
        std::string cs = format_scalar<T>(cv);
        std::string s;
        if (p == 0) s = cs;
        else {
            std::string tp = p == 1 ? "t" : "t^" + std::to_string(p);
            if (cs == "1") s = tp;
            else if (cs == "-1") s = "-" + tp;
            else s = cs + "·" + tp;
        }
        return {true, s};
    }
    return {};
}

} // namespace detail

template <class T>
int run_analyze(const LoadedSystem<T>& L, const RunOptions& ro, std::ostream& out, std::ostream& err) {
    const auto& sys = L.system;
    const auto& g = *sys.grid;
    const std::size_t N = g.last();
    auto copt = chain_options(L, ro);
    json rep;
    std::ostringstream txt;
    int code = exit_ok;

    txt << "system: " << L.name << "\n";
    txt << "grid: " << g.size() << " points, t in [" << format_scalar<T>(g.t(0)) << ", " << format_scalar<T>(g.t(N))
        << "]\n";
    txt << "mode: " << (is_exact_v<T> ? "rational" : "double") << ", projectors: "
        << (copt.strategy == ProjectorStrategy::injected ? "injected" : "canonical") << "\n";
    rep["system"] = L.name;
    rep["mode"] = is_exact_v<T> ? "rational" : "double";

    std::vector<std::size_t> bad_tr;
    json tr = json::array();
    for (std::size_t k = 0; k < N; ++k) {
        auto r = check_transversality<T>(sys.A.at(k + 1), sys.B.at(k), copt.tol_rank);
        tr.push_back(r.ok);
        if (!r.ok) bad_tr.push_back(k);
    }
    rep["transversality"] = tr;
    if (!bad_tr.empty()) {
        txt << "transversality: fails at indices " << detail::index_list(bad_tr) << "\n";
        txt << "irregular: ker A^sigma and im B are not complementary\n";
        rep["regular"] = false;
        rep["reason"] = "transversality failure";
        (ro.format == "json" ? out << rep.dump(2) << "\n" : out << txt.str());
        return exit_irregular;
    }
    txt << "transversality: ok at all " << N << " step indices\n";

    ChainResult<T> ch = build_chain(sys, copt);
    auto ranks = ch.ranks();
    std::vector<std::size_t> shown(ranks.begin(), ch.regular ? ranks.end() - 1 : ranks.end());
    std::ostringstream rs;
    rs << "[";
    for (std::size_t i = 0; i < shown.size(); ++i) rs << (i ? ", " : "") << shown[i];
    rs << "]";
    rep["r"] = shown;
    rep["regular"] = ch.regular;
    if (!ch.regular) {
        txt << "r: " << rs.str() << "\n";
        txt << "irregular at level " << ch.irregular_level << ": " << ch.reason << "\n";
        rep["irregular_level"] = ch.irregular_level;
        rep["reason"] = ch.reason;
        rep["reason_code"] = to_string(ch.reason_code);
        (ro.format == "json" ? out << rep.dump(2) << "\n" : out << txt.str());
        return exit_irregular;
    }
    rep["index"] = ch.nu;
    txt << "index: " << ch.nu << (ch.nu == 0 ? " (implicit ODE)" : "") << "\n";
    txt << "r: " << rs.str() << "\n";

    // det G_nu on the sampled grid points
    const auto& Gnu = ch.stages.back().G;
    std::vector<T> ts, ds;
    for (std::size_t k = 0; k < Gnu.size(); ++k) {
        ts.push_back(g.t(k));
        ds.push_back(linalg::det(Gnu[k]));
    }
    auto fit = detail::fit_monomial<T>(ts, ds, 4 * static_cast<int>(sys.n));
    std::string gname = "G_" + std::to_string(ch.nu);
    if (fit.ok) {
        txt << "det " << gname << " = " << fit.text << " (symbolic check at sampled points)\n";
        rep["det"] = fit.text;
    } else {
        double lo = std::numeric_limits<double>::infinity(), hi = 0;
        for (const auto& d : ds) {
            lo = std::min(lo, std::abs(to_double(d)));
            hi = std::max(hi, std::abs(to_double(d)));
        }
        txt << "det " << gname << ": no monomial c·t^p fits, |det| in [" << format_double(lo) << ", "
            << format_double(hi) << "]\n";
    }
    double max_cond = 0;
    for (double c : ch.cond_nu) max_cond = std::max(max_cond, c);
    txt << "cond " << gname << ": max " << format_double(max_cond) << "\n";

    auto ids = verify_chain_identities(sys, ch, 1e-10);
    std::size_t failing = 0;
    json idj = json::array();
    for (const auto& c : ids.checks) {
        if (!c.ok) ++failing;
        idj.push_back({{"name", c.name}, {"max_violation", c.max_violation}, {"ok", c.ok}, {"trivial", c.trivial}});
    }
    rep["identities"] = idj;
    txt << "chain identities: " << ids.checks.size() << " checks, "
        << (failing ? std::to_string(failing) + " failing" : std::string("all ok")) << " (worst "
        << format_double(ids.worst()) << ")\n";
    for (const auto& c : ids.checks)
        if (!c.ok) txt << "  FAIL " << c.name << ": " << format_double(c.max_violation) << "\n";
    if (failing) code = exit_verification;

    if (ch.nu == 0) {
        txt << "regressivity: not applicable at index 0\n";
    } else {
        try {
            auto dch = decoupling_chain(sys, copt);
            if (!dch.regular) {
                txt << "decoupling chain: irregular at level " << dch.irregular_level << ": " << dch.reason << "\n";
                code = exit_irregular;
            } else {
                auto [eq, co] = assemble(sys, dch);
                txt << "decoupling chain: index " << dch.nu << ", decoupling defect "
                    << format_double(co.decoupling_defect) << "\n";
                std::vector<std::size_t> bad;
                double worst = 0;
                for (std::size_t k = 0; k < eq.steps(); ++k) {
                    double c = regressivity_norm(eq, g.mu(k), k);
                    worst = std::max(worst, c);
                    if (!(c <= copt.cond_max)) bad.push_back(k);
                }
                rep["regressive"] = bad.empty();
                if (bad.empty())
                    txt << "regressivity: I - mu K invertible at all " << eq.steps() << " steps (max |(I - mu K)^-1| "
                        << format_double(worst) << ")\n";
                else {
                    txt << "regressivity: I - mu K singular at indices " << detail::index_list(bad) << "\n";
                    code = exit_irregular;
                }
                if (dch.nu >= 3) txt << "note: index >= 3 is processed experimentally\n";
            }
        } catch (const Error& e) {
            txt << "decoupling chain: " << e.what() << "\n";
            code = std::max(code, exit_code_for(e.code()));
        }
    }
    if (ro.format == "json") out << rep.dump(2) << "\n";
    else out << txt.str();
    (void)err;
    return code;
}

template <class T>
int run_solve(const LoadedSystem<T>& L, const RunOptions& ro, std::ostream& out, std::ostream& err) {
    const auto& sys = L.system;
    auto copt = chain_options(L, ro);
    auto ch = decoupling_chain(sys, copt);
    if (!ch.regular) {
        err << "irregular at level " << ch.irregular_level << ": " << ch.reason << "\n";
        return exit_irregular;
    }
    if (ch.nu == 0) {
        err << "index 0: use an ODE solver\n";
        return exit_irregular;
    }
    std::optional<Vec<T>> x0;
    Vec<T> u0 = Vec<T>::Zero(sys.m);
    if (ro.x0) x0 = parse_vector_arg<T>(*ro.x0, sys.n, "x0");
    else if (ro.u0) u0 = parse_vector_arg<T>(*ro.u0, sys.m, "u0");
    else if (L.x0) x0 = L.x0;
    else if (L.u0) u0 = *L.u0;
    else fail(ErrorCode::input_error, "no initial value: pass --u0 or --x0, or set options.u0 in the file");

    auto sol = solve_decoupled(sys, ch, u0, x0, DecouplerOptions{copt.cond_max, copt.tol_rank});
    if (sol.experimental) err << "note: index " << sol.nu << " is processed experimentally\n";

    std::ostringstream body;
    std::vector<std::string> cols{"t"};
    for (Eigen::Index i = 1; i <= sys.n; ++i) cols.push_back("x_" + std::to_string(i));
    for (Eigen::Index i = 1; i <= sys.m; ++i) cols.push_back("u_" + std::to_string(i));
    cols.push_back("residual");
    if (ro.format == "json") {
        json j;
        j["columns"] = cols;
        j["index"] = sol.nu;
        j["window"] = {sol.first, sol.last};
        j["max_residual"] = sol.max_residual();
        json rows = json::array();
        for (std::size_t k = sol.first; k <= sol.last; ++k) {
            json row = json::array();
            row.push_back(to_double(sys.grid->t(k)));
            for (Eigen::Index i = 0; i < sys.n; ++i) row.push_back(to_double((*sol.x[k])(i)));
            for (Eigen::Index i = 0; i < sys.m; ++i) row.push_back(to_double((*sol.u[k])(i)));
            row.push_back(sol.residual[k] ? json(*sol.residual[k]) : json(nullptr));
            rows.push_back(row);
        }
        j["rows"] = rows;
        body << j.dump(2) << "\n";
    } else {
        for (std::size_t i = 0; i < cols.size(); ++i) body << (i ? "," : "") << cols[i];
        body << "\n";
        for (std::size_t k = sol.first; k <= sol.last; ++k) {
            body << format_double(to_double(sys.grid->t(k)));
            for (Eigen::Index i = 0; i < sys.n; ++i) body << "," << format_double(to_double((*sol.x[k])(i)));
            for (Eigen::Index i = 0; i < sys.m; ++i) body << "," << format_double(to_double((*sol.u[k])(i)));
            body << "," << (sol.residual[k] ? format_double(*sol.residual[k]) : std::string());
            body << "\n";
        }
    }
    std::ostringstream summary;
    summary << "index " << sol.nu << ", rows " << (sol.last - sol.first + 1) << " (indices " << sol.first << ".."
            << sol.last << "), max residual " << format_double(sol.max_residual()) << "\n";
    if (ro.out) {
        std::ofstream f(*ro.out);
        if (!f) fail(ErrorCode::input_error, "cannot write '" + *ro.out + "'");
        f << body.str();
        out << summary.str();
    } else {
        out << body.str();
        err << summary.str();
    }
    if (sol.max_residual() > ro.tol) {
        err << "residual above tolerance " << format_double(ro.tol) << "\n";
        return exit_verification;
    }
    return exit_ok;
}

template <class T>
struct SolutionRows {
    std::vector<std::size_t> index; // grid index per row
    std::vector<Vec<T>> x;
};

namespace detail {

inline std::size_t grid_index_of(const std::vector<double>& pts, double t, std::size_t row) {
    auto it = std::lower_bound(pts.begin(), pts.end(), t);
    std::size_t best = pts.size();
    double gap = std::numeric_limits<double>::infinity();
    for (auto c : {it, it == pts.begin() ? it : it - 1}) {
        if (c == pts.end()) continue;
        double d = std::abs(*c - t);
        if (d < gap) {
            gap = d;
            best = static_cast<std::size_t>(c - pts.begin());
        }
    }
    if (best == pts.size() || gap > 1e-12 * (1.0 + std::abs(t)))
        fail(ErrorCode::input_error, "row " + std::to_string(row) + ": t = " + format_double(t) + " is not a grid point");
    return best;
}

} // namespace detail

template <class T>
SolutionRows<T> read_solution(const std::string& path, const DAESystem<T>& sys) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::input_error, "cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();
    std::vector<double> pts;
    for (std::size_t k = 0; k < sys.grid->size(); ++k) pts.push_back(to_double(sys.grid->t(k)));
    const std::size_t ncols = 1 + static_cast<std::size_t>(sys.n + sys.m) + 1;
    SolutionRows<T> out;

    auto add_row = [&](const std::vector<std::string>& f, std::size_t row) {
        if (f.size() != ncols)
            fail(ErrorCode::input_error, "row " + std::to_string(row) + ": expected " + std::to_string(ncols) +
                                             " columns, found " + std::to_string(f.size()));
        double t;
        try {
            t = std::stod(f[0]);
        } catch (const std::exception&) {
            fail(ErrorCode::input_error, "row " + std::to_string(row) + ": bad t '" + f[0] + "'");
        }
        Vec<T> x(sys.n);
        for (Eigen::Index i = 0; i < sys.n; ++i) {
            try {
                x(i) = parse_decimal<T>(f[static_cast<std::size_t>(1 + i)]);
            } catch (const std::exception&) {
                fail(ErrorCode::input_error, "row " + std::to_string(row) + ": bad value '" +
                                                 f[static_cast<std::size_t>(1 + i)] + "'");
            }
        }
        out.index.push_back(detail::grid_index_of(pts, t, row));
        out.x.push_back(std::move(x));
    };

    auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        json j;
        try {
            j = json::parse(text);
        } catch (const json::exception& e) {
            fail(ErrorCode::input_error, path + ": " + e.what());
        }
        if (!j.contains("rows") || !j["rows"].is_array()) fail(ErrorCode::input_error, path + ": no rows");
        std::size_t row = 0;
        for (const auto& r : j["rows"]) {
            ++row;
            std::vector<std::string> f;
            for (const auto& e : r) f.push_back(e.is_null() ? std::string() : e.dump());
            add_row(f, row);
        }
    } else {
        std::stringstream ss(text);
        std::string line;
        bool header = false;
        std::size_t row = 0;
        while (std::getline(ss, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            std::vector<std::string> f;
            std::stringstream ls(line);
            for (std::string item; std::getline(ls, item, ',');) f.push_back(item);
            if (!line.empty() && line.back() == ',') f.push_back("");
            if (!header) {
                header = true;
                if (f.empty() || f[0] != "t") fail(ErrorCode::input_error, path + ": header must start with 't'");
                if (f.size() != ncols)
                    fail(ErrorCode::input_error, path + ": header has " + std::to_string(f.size()) + " columns, expected " +
                                                     std::to_string(ncols));
                continue;
            }
            add_row(f, ++row);
        }
    }
    if (out.x.empty()) fail(ErrorCode::input_error, path + ": no rows");
    for (std::size_t i = 1; i < out.index.size(); ++i)
        if (out.index[i] <= out.index[i - 1])
            fail(ErrorCode::input_error, "row " + std::to_string(i + 1) + ": t is not increasing");
    return out;
}

template <class T>
int run_verify(const LoadedSystem<T>& L, const std::string& solution, const RunOptions& ro, std::ostream& out,
               std::ostream& err) {
    const auto& sys = L.system;
    auto rows = read_solution<T>(solution, sys);
    auto ch = decoupling_chain(sys, chain_options(L, ro));
    std::vector<std::optional<Vec<T>>> x(sys.grid->size());
    std::vector<std::size_t> row_of(sys.grid->size(), 0);
    for (std::size_t i = 0; i < rows.x.size(); ++i) {
        x[rows.index[i]] = rows.x[i];
        row_of[rows.index[i]] = i + 1;
    }
    auto res = residual(sys, x);
    std::vector<std::optional<double>> hid;
    if (ch.regular && ch.nu >= 1) hid = hidden_constraint_defect(sys, ch, x);

    std::vector<std::string> problems;
    double worst_res = 0, worst_hid = 0, worst_dev = 0;
    std::size_t steps = 0, compared = 0;
    const double cmax = ro.cond_max.value_or(L.options.cond_max.value_or(1e12));
    for (std::size_t k = 0; k + 1 < x.size(); ++k) {
        if (!x[k] || !x[k + 1]) continue;
        ++steps;
        std::string where = "row " + std::to_string(row_of[k + 1]) + " (t = " + format_double(to_double(sys.grid->t(k + 1))) + ")";
        worst_res = std::max(worst_res, *res[k]);
        if (*res[k] > ro.tol) problems.push_back(where + ": residual " + format_double(*res[k]));
        if (k < hid.size() && hid[k]) {
            worst_hid = std::max(worst_hid, *hid[k]);
            if (*hid[k] > ro.tol) problems.push_back(where + ": hidden constraint defect " + format_double(*hid[k]));
        }
        try {
            auto st = direct_step(sys, *x[k], k, ro.tol, cmax);
            if (!st.singular) {
                ++compared;
                double dev = max_abs<T>(Vec<T>(st.x_sigma - *x[k + 1])) /
                             (1.0 + std::max(max_abs<T>(st.x_sigma), max_abs<T>(*x[k + 1])));
                worst_dev = std::max(worst_dev, dev);
                if (dev > ro.tol) problems.push_back(where + ": direct step deviates by " + format_double(dev));
            }
        } catch (const Error& e) {
            problems.push_back(where + ": " + e.what());
        }
    }
    if (steps == 0) problems.push_back("no consecutive rows to check");
    out << "rows: " << rows.x.size() << ", steps checked: " << steps << "\n";
    out << "max residual: " << format_double(worst_res) << "\n";
    out << "max hidden constraint defect: " << format_double(worst_hid) << "\n";
    out << "direct oracle: " << compared << " nonsingular steps, max deviation " << format_double(worst_dev) << "\n";
    for (const auto& p : problems) err << "FAIL " << p << "\n";
    out << (problems.empty() ? "verify: ok" : "verify: failed") << "\n";
    return problems.empty() ? exit_ok : exit_verification;
}

// Runs one subcommand with the scalar type picked by --rational and maps
// library errors to exit codes. Defined in the tsdae library.
int dispatch(const std::string& cmd, const std::string& file, const std::string& solution, const RunOptions& ro,
             std::ostream& out, std::ostream& err);

} // namespace tsdae
