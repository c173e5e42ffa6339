// Explicit instantiations for double and Rational; the headers declare them extern.

#define TSDAE_INSTANTIATE
#include "tsdae/pipeline.hpp"

namespace tsdae {

#define TSDAE_FOR(T)                                                                                               \
    template ProperFactorization<T> reflexive_inverse(const DAESystem<T>&, const std::optional<MatrixFunction<T>>&, \
                                                      FactorizationOptions);                                        \
    template ChainResult<T> build_chain(const DAESystem<T>&, const ChainOptions<T>&);                              \
    template IdentityReport verify_chain_identities(const DAESystem<T>&, const ChainResult<T>&, double);           \
    template std::pair<InherentEquation<T>, DecoupleCoefficients<T>> assemble(const DAESystem<T>&,                 \
                                                                              const ChainResult<T>&);              \
    template DecoupledSolution<T> solve_decoupled(const DAESystem<T>&, const ChainResult<T>&, const Vec<T>&,       \
                                                  const std::optional<Vec<T>>&, DecouplerOptions);                 \
    template CrossValidationReport cross_validate(const DAESystem<T>&, const std::vector<std::optional<Vec<T>>>&,  \
                                                  double, double);                                                 \
    template LoadedSystem<T> system_from_json(const json&);                                                        \
    template int run_analyze(const LoadedSystem<T>&, const RunOptions&, std::ostream&, std::ostream&);             \
    template int run_solve(const LoadedSystem<T>&, const RunOptions&, std::ostream&, std::ostream&);               \
    template int run_verify(const LoadedSystem<T>&, const std::string&, const RunOptions&, std::ostream&,          \
                            std::ostream&);

TSDAE_FOR(double)
TSDAE_FOR(Rational)

// Runs one subcommand with the scalar type picked by --rational and maps
// library errors to exit codes.
int dispatch(const std::string& cmd, const std::string& file, const std::string& solution, const RunOptions& ro,
                    std::ostream& out, std::ostream& err) {
    auto go = [&](auto tag) -> int {
        using T = decltype(tag);
        auto L = load_system<T>(file);
        if (cmd == "analyze") return run_analyze(L, ro, out, err);
        if (cmd == "solve") return run_solve(L, ro, out, err);
        return run_verify(L, solution, ro, out, err);
    };
    try {
        return ro.rational ? go(Rational{}) : go(0.0);
    } catch (const Error& e) {
        err << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const json::exception& e) {
        err << "error (input-error): " << e.what() << "\n";
        return exit_input;
    }
}


} // namespace tsdae
