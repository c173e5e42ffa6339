#pragma once
// Instantiated once in the tsdae library.

#include "tsdae/pipeline.hpp"

#ifndef TSDAE_INSTANTIATE
namespace tsdae {

#define TSDAE_EXTERN_FOR(T)                                                                                        \
    extern template ProperFactorization<T> reflexive_inverse(const DAESystem<T>&,                                   \
                                                             const std::optional<MatrixFunction<T>>&,               \
                                                             FactorizationOptions);                                 \
    extern template ChainResult<T> build_chain(const DAESystem<T>&, const ChainOptions<T>&);                       \
    extern template IdentityReport verify_chain_identities(const DAESystem<T>&, const ChainResult<T>&, double);    \
    extern template std::pair<InherentEquation<T>, DecoupleCoefficients<T>> assemble(const DAESystem<T>&,          \
                                                                                     const ChainResult<T>&);       \
    extern template DecoupledSolution<T> solve_decoupled(const DAESystem<T>&, const ChainResult<T>&,               \
                                                         const Vec<T>&, const std::optional<Vec<T>>&,              \
                                                         DecouplerOptions);                                         \
    extern template CrossValidationReport cross_validate(const DAESystem<T>&,                                       \
                                                         const std::vector<std::optional<Vec<T>>>&, double,         \
                                                         double);                                                   \
    extern template LoadedSystem<T> system_from_json(const json&);                                                 \
    extern template int run_analyze(const LoadedSystem<T>&, const RunOptions&, std::ostream&, std::ostream&);      \
    extern template int run_solve(const LoadedSystem<T>&, const RunOptions&, std::ostream&, std::ostream&);        \
    extern template int run_verify(const LoadedSystem<T>&, const std::string&, const RunOptions&, std::ostream&,   \
                                   std::ostream&);

TSDAE_EXTERN_FOR(double)
TSDAE_EXTERN_FOR(Rational)

#undef TSDAE_EXTERN_FOR

} // namespace tsdae
#endif
