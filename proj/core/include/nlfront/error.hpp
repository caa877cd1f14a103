#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nlfront {

enum class ErrorCode {
    parameter_out_of_range,
    divergent_tail_integral,
    invalid_size,
    grid_mismatch,
    too_large,
    out_of_tube,
    step_too_large,
    tube_violation,
    truncation_bound_exceeded,
    max_domain_exceeded,
    level_above_range,
    out_of_branch_domain,
    below_threshold,
    no_root,
    insufficient_data,
    config_invalid,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Error raised by every library operation; `code()` identifies the failure class.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, ErrorCode code, const std::string& what) {
    if (!cond) fail(code, what);
}

}  // namespace nlfront
