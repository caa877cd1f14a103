#include "nlfront/error.hpp"

namespace nlfront {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::parameter_out_of_range: return "parameter-out-of-range";
        case ErrorCode::divergent_tail_integral: return "divergent-tail-integral";
        case ErrorCode::invalid_size: return "invalid-size";
        case ErrorCode::grid_mismatch: return "grid-mismatch";
        case ErrorCode::too_large: return "too-large";
        case ErrorCode::out_of_tube: return "out-of-tube";
        case ErrorCode::step_too_large: return "step-too-large";
        case ErrorCode::tube_violation: return "tube-violation";
        case ErrorCode::truncation_bound_exceeded: return "truncation-bound-exceeds-tolerance";
        case ErrorCode::max_domain_exceeded: return "max-domain-exceeded";
        case ErrorCode::level_above_range: return "level-above-range";
        case ErrorCode::out_of_branch_domain: return "out-of-branch-domain";
        case ErrorCode::below_threshold: return "below-threshold";
        case ErrorCode::no_root: return "no-root";
        case ErrorCode::insufficient_data: return "insufficient-data";
        case ErrorCode::config_invalid: return "config-invalid";
    }
    return "unknown";
}

}  // namespace nlfront
