#pragma once

#include <stdexcept>
#include <string>

namespace tsdae {

enum class ErrorCode {
    index_out_of_range,
    shape_mismatch,
    invalid_grid,
    not_a_direct_sum,
    intersection_nontrivial,
    transversality_failure,
    supplied_pi0_invalid,
    rank_not_constant,
    anticommutation_failure,
    max_index_exceeded,
    ill_conditioned,
    grid_too_short,
    non_regressive_step,
    inconsistent_state,
    insufficient_lookahead,
    unsupported_index,
    syntax_error,
    input_error
};

inline const char* to_string(ErrorCode c) {
    switch (c) {
    case ErrorCode::index_out_of_range: return "index-out-of-range";
    case ErrorCode::shape_mismatch: return "shape-mismatch";
    case ErrorCode::invalid_grid: return "invalid-grid";
    case ErrorCode::not_a_direct_sum: return "not-a-direct-sum";
    case ErrorCode::intersection_nontrivial: return "intersection-nontrivial";
    case ErrorCode::transversality_failure: return "transversality-failure";
    case ErrorCode::supplied_pi0_invalid: return "supplied-Pi0-invalid";
    case ErrorCode::rank_not_constant: return "rank-not-constant";
    case ErrorCode::anticommutation_failure: return "anticommutation-failure";
    case ErrorCode::max_index_exceeded: return "max-index-exceeded";
    case ErrorCode::ill_conditioned: return "ill-conditioned-G_nu";
    case ErrorCode::grid_too_short: return "grid-too-short";
    case ErrorCode::non_regressive_step: return "non-regressive-step";
    case ErrorCode::inconsistent_state: return "inconsistent-state";
    case ErrorCode::insufficient_lookahead: return "insufficient-lookahead";
    case ErrorCode::unsupported_index: return "unsupported-index";
    case ErrorCode::syntax_error: return "syntax-error";
    case ErrorCode::input_error: return "input-error";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

} // namespace tsdae
