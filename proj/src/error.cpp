#include "qpfisher/error.hpp"

namespace qpf {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::invalid_extent: return "invalid-extent";
    case ErrorKind::too_coarse: return "too-coarse";
    case ErrorKind::grid_too_small: return "grid-too-small";
    case ErrorKind::grid_misaligned: return "grid-misaligned";
    case ErrorKind::length_mismatch: return "length-mismatch";
    case ErrorKind::boundary_leakage: return "boundary-leakage";
    case ErrorKind::all_masked: return "all-masked";
    case ErrorKind::node_dominated: return "node-dominated";
    case ErrorKind::invalid_state: return "invalid-state";
    case ErrorKind::not_normalized: return "not-normalized";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::asymmetric_density: return "asymmetric-density";
    case ErrorKind::unstable_step: return "unstable-step";
    case ErrorKind::node_encounter: return "node-encounter";
    case ErrorKind::too_few_trajectories: return "too-few-trajectories";
    case ErrorKind::config_parse: return "config-parse";
    case ErrorKind::missing_data: return "missing-data";
    case ErrorKind::io: return "io";
    }
    return "unknown";
}

Error::Error(ErrorKind kind, const std::string &what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

void raise(ErrorKind kind, const std::string &what) { throw Error(kind, what); }

} // namespace qpf
