// Command line front end: tsdae analyze|solve|verify|example.

#include "tsdae/tsdae.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Index analysis and decoupled solution of linear dynamic-algebraic equations on isolated time scales"};
    app.require_subcommand(1);
    tsdae::RunOptions ro;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--tol-rank", ro.tol_rank, "relative singular value threshold (0: max(r,c)*eps)");
        sub->add_option("--tol-proj", ro.tol_proj, "tolerance for projector checks");
        sub->add_option("--max-index", ro.max_index, "largest chain level to try");
        sub->add_option("--cond-max", ro.cond_max, "condition limit for G_nu and I - mu K");
        sub->add_flag("--rational", ro.rational, "exact rational arithmetic");
        sub->add_flag("--canonical", ro.canonical, "ignore projectors given in the file");
    };

    std::string file, solution, example;
    auto* analyze = app.add_subcommand("analyze", "chain, index and identity report");
    analyze->add_option("file", file, "system file or bundled example name")->required();
    analyze->add_option("--format", ro.format, "text or json")->check(CLI::IsMember({"text", "json"}));
    add_common(analyze);

    auto* solve = app.add_subcommand("solve", "decoupled solution trajectory");
    solve->add_option("file", file, "system file or bundled example name")->required();
    solve->add_option("--u0", ro.u0, "initial u, comma separated (projected onto the invariant subspace)");
    solve->add_option("--x0", ro.x0, "consistent initial x, comma separated");
    solve->add_option("--out", ro.out, "write the trajectory here instead of stdout");
    solve->add_option("--format", ro.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    solve->add_option("--tol", ro.tol, "largest accepted normalized residual");
    add_common(solve);

    auto* verify = app.add_subcommand("verify", "recheck a trajectory against the equation");
    verify->add_option("file", file, "system file or bundled example name")->required();
    verify->add_option("solution", solution, "trajectory from solve (csv or json)")->required();
    verify->add_option("--tol", ro.tol, "largest accepted residual, constraint defect and oracle deviation");
    add_common(verify);

    bool list = false;
    auto* ex = app.add_subcommand("example", "print a bundled system file");
    ex->add_option("name", example, "example name");
    ex->add_flag("--list", list, "list bundled examples");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : tsdae::exit_input;
    }

    if (ex->parsed()) {
        const auto& all = tsdae::bundled_examples();
        if (list || example.empty()) {
            for (const auto& [name, _] : all) std::cout << name << "\n";
            return 0;
        }
        auto it = all.find(example);
        if (it == all.end()) {
            std::cerr << "unknown example '" << example << "'\n";
            return tsdae::exit_input;
        }
        std::cout << it->second;
        return 0;
    }
    if (analyze->parsed() && ro.format == "csv") ro.format = "text";
    std::string cmd = analyze->parsed() ? "analyze" : solve->parsed() ? "solve" : "verify";
    return tsdae::dispatch(cmd, file, solution, ro, std::cout, std::cerr);
}
