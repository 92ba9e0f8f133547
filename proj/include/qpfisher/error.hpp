#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qpf {

enum class ErrorKind {
    invalid_extent,
    too_coarse,
    grid_too_small,
    grid_misaligned,
    length_mismatch,
    boundary_leakage,
    all_masked,
    node_dominated,
    invalid_state,
    not_normalized,
    precondition,
    asymmetric_density,
    unstable_step,
    node_encounter,
    too_few_trajectories,
    config_parse,
    missing_data,
    io,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Every failure raised by the library carries a kind so callers (and the CLI
// exit-code mapping) can branch on it without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string &what);
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] void raise(ErrorKind kind, const std::string &what);

} // namespace qpf
