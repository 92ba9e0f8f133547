#pragma once

#include "qpfisher/bohmian.hpp"
#include "qpfisher/dynamics.hpp"
#include "qpfisher/states.hpp"
#include "qpfisher/wavefunction.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace qpf {

// Grid shared by every state. Without x_min/x_max each state gets its own
// suggested grid with n_points nodes.
struct GridSpec {
    std::optional<double> x_min;
    std::optional<double> x_max;
    std::size_t n_points = 4096;

    Grid1D for_state(const AnalyticState &state, const Physics &physics) const;
};

struct RandomStates {
    std::size_t count = 0;
    std::uint64_t seed = 0;
};

struct TrajectorySpec {
    std::size_t n_particles = 10000;
    std::uint64_t seed = 0;
};

enum class PlotKind { fields, bounds_vs_param, time_series };

std::string_view to_string(PlotKind kind) noexcept;

struct OutputSpec {
    std::filesystem::path directory = "qpfisher-out";
    bool json = true;
    bool csv = true;
    std::vector<PlotKind> plots{PlotKind::bounds_vs_param};
};

struct RunConfig {
    std::vector<AnalyticState> states;
    RandomStates random;
    GridSpec grid;
    Physics physics;
    Tolerances tolerances;
    DiffScheme scheme = DiffScheme::central4;
    std::optional<EvolutionConfig> dynamics;
    std::optional<TrajectorySpec> trajectories;
    OutputSpec output;
    // Canonical dump of the parsed document, used for the provenance hash.
    std::string canonical;

    std::size_t state_count() const noexcept { return states.size() + random.count; }
};

// Throws config_parse with the key path (e.g. "states[2].sigma") or the
// line and column of a syntax error.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path &path);

// 64-bit FNV-1a, hex encoded.
std::string fnv1a_hex(std::string_view bytes);

} // namespace qpf
