#pragma once

#include "qpfisher/grid.hpp"
#include "qpfisher/wavefunction.hpp"

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace qpf {

enum class Family {
    gaussian,
    chirped_gaussian,
    cubic_phase_gaussian,
    ho_eigenstate,
    two_gaussian_superposition,
    box_eigenstate,
};

std::string_view to_string(Family family) noexcept;
std::optional<Family> parse_family(std::string_view name) noexcept;

// Closed-form test states. Gaussian-envelope families share one formula,
//   psi = (2 pi sigma^2)^(-1/4) exp(-u^2 / (4 sigma^2) + i S(u) / hbar),
//   S(u) = p0 u + alpha u^2 + beta u^3,  u = x - x0,
// and differ only in which phase coefficients they are expected to carry.
// two_gaussian_superposition: g(u - a/2) + exp(i phi) g(u + a/2), times exp(i p0 u / hbar).
// ho_eigenstate: n-th oscillator eigenfunction of frequency omega centred at x0.
// box_eigenstate: sqrt(2/L) sin(n pi (x - x0) / L) on [x0, x0 + L], zero outside.
struct AnalyticState {
    Family family = Family::gaussian;
    std::string id;
    double x0 = 0.0;
    double p0 = 0.0;
    double sigma = 1.0;
    double alpha = 0.0;
    double beta = 0.0;
    int n = 0;
    double omega = 1.0;
    double a = 4.0;
    double phi = 0.0;
    double L = 1.0;

    // Throws invalid_state on out-of-range parameters.
    void validate() const;
    double center() const noexcept;
    // Standard deviation of |psi|^2 (exact for every family).
    double density_std(const Physics &physics) const;
};

AnalyticState parse_state(const nlohmann::json &spec, const std::string &context = "state");
nlohmann::ordered_json to_json(const AnalyticState &state);
// Sets one numeric parameter by its JSON key; throws config_parse for unknown keys.
void set_parameter(AnalyticState &state, std::string_view key, double value);

struct ClosedFormMoments {
    double var_x;
    double var_p;
    double cov_x_pq;
    double fisher_I;
};

// Known moments, or nullopt for families without a closed form.
std::optional<ClosedFormMoments> closed_form_moments(const AnalyticState &state, const Physics &physics);

// Unnormalized closed-form amplitude at x.
cplx evaluate(const AnalyticState &state, double x, const Physics &physics);

// Samples, renormalizes on the grid and checks coverage and boundary decay
// (grid_too_small). Box walls must fall on grid nodes (grid_misaligned).
Wavefunction sample_analytic(const AnalyticState &state, const Grid1D &grid, const Physics &physics = {},
                             const Tolerances &tol = {});

// A grid with n points wide enough for the state's boundary decay; box grids
// are laid out so both walls land on nodes.
Grid1D suggested_grid(const AnalyticState &state, const Physics &physics, std::size_t n);

// Smooth, node-free random state: a constant plus a few Fourier modes with
// decaying complex coefficients (total modulation < 0.7, so no zeros) under a
// Gaussian envelope with random centre, width and mean momentum. Deterministic
// in (seed, index).
Wavefunction random_band_limited(const Grid1D &grid, const Physics &physics, std::uint64_t seed,
                                 std::uint64_t index);

} // namespace qpf
