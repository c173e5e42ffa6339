#pragma once
// JSON system descriptions: grid, dimensions, coefficient matrices given as
// entry expressions or per-index numeric tables, optional projectors and options.

#include "tsdae/expression.hpp"
#include "tsdae/system.hpp"

#include <json.hpp>

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace tsdae {

using json = nlohmann::json;

struct SystemOptions {
    std::optional<double> tol_rank;
    std::optional<double> tol_proj;
    std::optional<int> max_index;
    std::optional<double> cond_max;
};

template <class T>
struct LoadedSystem {
    std::string name;
    DAESystem<T> system;
    std::vector<MatrixFunction<T>> projectors; // Q0, Q1, ... when given
    SystemOptions options;
    std::optional<Vec<T>> u0;
    std::optional<Vec<T>> x0;
};

namespace detail {

[[noreturn]] inline void bad_input(const std::string& where, const std::string& what) {
    fail(ErrorCode::input_error, where + ": " + what);
}

inline Expression entry_expression(const json& e, const std::string& where) {
    try {
        if (e.is_string()) return parse_expression(e.get<std::string>());
        if (e.is_number()) return parse_expression(e.dump());
    } catch (const Error& err) {
        bad_input(where, err.what());
    }
    bad_input(where, "entries must be numbers or expression strings");
}

template <class T>
T constant_value(const json& e, const std::string& where) {
    Expression x = entry_expression(e, where);
    try {
        return x.evaluate<T>(T(0));
    } catch (const Error& err) {
        bad_input(where, err.what());
    }
}

inline std::vector<std::vector<Expression>> expression_matrix(const json& j, Eigen::Index rows, Eigen::Index cols,
                                                              const std::string& where) {
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows)
        bad_input(where, "expected " + std::to_string(rows) + " rows");
    std::vector<std::vector<Expression>> out;
    for (Eigen::Index i = 0; i < rows; ++i) {
        const json& row = j[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
            bad_input(where + "[" + std::to_string(i) + "]", "expected " + std::to_string(cols) + " columns");
        std::vector<Expression> r;
        for (Eigen::Index c = 0; c < cols; ++c)
            r.push_back(entry_expression(row[static_cast<std::size_t>(c)],
                                         where + "[" + std::to_string(i) + "][" + std::to_string(c) + "]"));
        out.push_back(std::move(r));
    }
    return out;
}

template <class T>
MatrixFunction<T> matrix_from_json(const json& j, std::shared_ptr<const TimeScaleGrid<T>> grid, Eigen::Index rows,
                                   Eigen::Index cols, bool is_vector, const std::string& where) {
    if (j.is_object()) {
        if (!j.contains("table")) bad_input(where, "object form needs a \"table\" member");
        const json& tab = j["table"];
        if (!tab.is_array() || tab.size() != grid->size())
            bad_input(where, "table must have one entry per grid point (" + std::to_string(grid->size()) + ")");
        std::vector<Mat<T>> data;
        for (std::size_t k = 0; k < tab.size(); ++k) {
            std::string w = where + ".table[" + std::to_string(k) + "]";
            json m = is_vector ? json::array() : tab[k];
            if (is_vector) {
                if (!tab[k].is_array()) bad_input(w, "expected an array");
                for (const auto& e : tab[k]) m.push_back(json::array({e}));
            }
            auto ex = expression_matrix(m, rows, cols, w);
            Mat<T> M(rows, cols);
            for (Eigen::Index r = 0; r < rows; ++r)
                for (Eigen::Index c = 0; c < cols; ++c) {
                    try {
                        M(r, c) = ex[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].template evaluate<T>(grid->t(k));
                    } catch (const Error& err) {
                        bad_input(w, err.what());
                    }
                }
            data.push_back(std::move(M));
        }
        return MatrixFunction<T>::from_table(grid, std::move(data));
    }
    json m = j;
    if (is_vector) {
        if (!j.is_array()) bad_input(where, "expected an array");
        m = json::array();
        for (const auto& e : j) m.push_back(json::array({e}));
    }
    auto ex = expression_matrix(m, rows, cols, where);
    return MatrixFunction<T>::from_closure(grid, rows, cols, [ex, grid, rows, cols, where](std::size_t k) {
        Mat<T> M(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r)
            for (Eigen::Index c = 0; c < cols; ++c) {
                try {
                    M(r, c) = ex[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].template evaluate<T>(grid->t(k));
                } catch (const Error& err) {
                    bad_input(where + "[" + std::to_string(r) + "][" + std::to_string(c) + "]", err.what());
                }
            }
        return M;
    });
}

template <class T>
Vec<T> vector_from_json(const json& j, Eigen::Index size, const std::string& where) {
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != size)
        bad_input(where, "expected " + std::to_string(size) + " entries");
    Vec<T> v(size);
    for (Eigen::Index i = 0; i < size; ++i)
        v(i) = constant_value<T>(j[static_cast<std::size_t>(i)], where + "[" + std::to_string(i) + "]");
    return v;
}

} // namespace detail

template <class T>
std::shared_ptr<const TimeScaleGrid<T>> grid_from_json(const json& g) {
    using detail::bad_input;
    if (!g.is_object() || !g.contains("kind")) bad_input("grid", "expected an object with \"kind\"");
    std::string kind = g["kind"].get<std::string>();
    auto count = [&]() -> std::size_t {
        if (!g.contains("count") || !g["count"].is_number_integer() || g["count"].get<long>() < 3)
            bad_input("grid.count", "expected an integer >= 3");
        return static_cast<std::size_t>(g["count"].get<long>());
    };
    auto num = [&](const char* key) -> T {
        if (!g.contains(key)) bad_input(std::string("grid.") + key, "missing");
        return detail::constant_value<T>(g[key], std::string("grid.") + key);
    };
    try {
        if (kind == "uniform")
            return std::make_shared<const TimeScaleGrid<T>>(TimeScaleGrid<T>::uniform(num("h"), num("t0"), count()));
        if (kind == "geometric")
            return std::make_shared<const TimeScaleGrid<T>>(TimeScaleGrid<T>::geometric(num("q"), num("t0"), count()));
        if (kind == "explicit") {
            if (!g.contains("points") || !g["points"].is_array()) bad_input("grid.points", "expected an array");
            std::vector<T> p;
            for (std::size_t i = 0; i < g["points"].size(); ++i)
                p.push_back(detail::constant_value<T>(g["points"][i], "grid.points[" + std::to_string(i) + "]"));
            return std::make_shared<const TimeScaleGrid<T>>(TimeScaleGrid<T>::explicit_points(std::move(p)));
        }
    } catch (const Error& e) {
        if (e.code() == ErrorCode::invalid_grid) bad_input("grid", e.what());
        throw;
    }
    bad_input("grid.kind", "unknown kind '" + kind + "'");
}

template <class T>
LoadedSystem<T> system_from_json(const json& j) {
    using detail::bad_input;
    if (!j.is_object()) bad_input("system", "expected a JSON object");
    LoadedSystem<T> out;
    out.name = j.value("name", std::string("system"));
    for (const char* key : {"grid", "n", "m", "A", "B", "C"})
        if (!j.contains(key)) bad_input(key, "missing");
    if (!j["n"].is_number_integer() || j["n"].get<long>() < 1) bad_input("n", "expected a positive integer");
    if (!j["m"].is_number_integer() || j["m"].get<long>() < 1) bad_input("m", "expected a positive integer");
    const Eigen::Index n = j["n"].get<long>(), m = j["m"].get<long>();
    auto grid = grid_from_json<T>(j["grid"]);
    auto& s = out.system;
    s.grid = grid;
    s.n = n;
    s.m = m;
    s.A = detail::matrix_from_json<T>(j["A"], grid, n, m, false, "A");
    s.B = detail::matrix_from_json<T>(j["B"], grid, m, n, false, "B");
    s.C = detail::matrix_from_json<T>(j["C"], grid, n, n, false, "C");
    if (j.contains("f"))
        s.f = detail::matrix_from_json<T>(j["f"], grid, n, 1, true, "f");
    else
        s.f = MatrixFunction<T>::constant(grid, Mat<T>::Zero(n, 1));
    s.validate();
    if (j.contains("projectors")) {
        const json& p = j["projectors"];
        if (!p.is_object()) bad_input("projectors", "expected an object");
        for (int i = 0;; ++i) {
            std::string key = "Q" + std::to_string(i);
            if (!p.contains(key)) break;
            out.projectors.push_back(detail::matrix_from_json<T>(p[key], grid, n, n, false, "projectors." + key));
        }
        if (out.projectors.size() != p.size())
            bad_input("projectors", "keys must be Q0, Q1, ... without gaps");
    }
    if (j.contains("options")) {
        const json& o = j["options"];
        if (!o.is_object()) bad_input("options", "expected an object");
        if (o.contains("tol_rank")) out.options.tol_rank = o["tol_rank"].get<double>();
        if (o.contains("tol_proj")) out.options.tol_proj = o["tol_proj"].get<double>();
        if (o.contains("max_index")) out.options.max_index = o["max_index"].get<int>();
        if (o.contains("cond_max")) out.options.cond_max = o["cond_max"].get<double>();
        if (o.contains("u0")) out.u0 = detail::vector_from_json<T>(o["u0"], m, "options.u0");
        if (o.contains("x0")) out.x0 = detail::vector_from_json<T>(o["x0"], n, "options.x0");
    }
    return out;
}

template <class T>
LoadedSystem<T> load_system_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::input_error, "cannot open '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        fail(ErrorCode::input_error, path + ": " + e.what());
    }
    try {
        return system_from_json<T>(j);
    } catch (const json::exception& e) {
        fail(ErrorCode::input_error, path + ": " + e.what());
    }
}

} // namespace tsdae
