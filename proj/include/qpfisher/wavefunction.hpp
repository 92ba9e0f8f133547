#pragma once

#include "qpfisher/grid.hpp"
#include "qpfisher/numerics.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace qpf {

// Natural units by default; both constants travel with every state.
struct Physics {
    double hbar = 1.0;
    double mass = 1.0;
};

struct Tolerances {
    double tol_norm = 1e-9;
    double tol_identity = 1e-6;
    double eps_node = 1e-12;
    double boundary_eps = 1e-8;
};

// Half-open node range [begin, end) outside of which the amplitude is
// identically zero. Hard-wall states use it so derivatives and quadratures
// never straddle the walls.
struct Support {
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t size() const noexcept { return end - begin; }
    bool operator==(const Support &) const = default;
};

class Wavefunction {
public:
    // Validates the sample count, the physical constants and the
    // normalization (|1 - integral |psi|^2| <= tol_norm).
    Wavefunction(Grid1D grid, std::vector<cplx> amplitudes, Physics physics, double tol_norm = 1e-9);
    Wavefunction(Grid1D grid, std::vector<cplx> amplitudes, Physics physics, Support support, bool spectral_ok,
                 double tol_norm = 1e-9);

    // Rescales the amplitudes to unit norm before validating.
    static Wavefunction normalized(Grid1D grid, std::vector<cplx> amplitudes, Physics physics);
    static Wavefunction normalized(Grid1D grid, std::vector<cplx> amplitudes, Physics physics, Support support,
                                   bool spectral_ok);

    const Grid1D &grid() const noexcept { return grid_; }
    std::span<const cplx> amplitudes() const noexcept { return amplitudes_; }
    const Physics &physics() const noexcept { return physics_; }
    double hbar() const noexcept { return physics_.hbar; }
    double mass() const noexcept { return physics_.mass; }
    const Support &support() const noexcept { return support_; }
    bool full_support() const noexcept { return support_.begin == 0 && support_.end == grid_.size(); }
    // False for states with hard walls inside the grid: their trigonometric
    // interpolant rings, so spectral operations are refused.
    bool spectral_ok() const noexcept { return spectral_ok_; }

    std::vector<double> density() const;
    double norm() const;
    // max(|psi(x_min)|, |psi(x_max)|) / max |psi|
    double edge_ratio() const;
    bool decays(double boundary_eps) const { return edge_ratio() < boundary_eps; }
    void require_decay(double boundary_eps) const;

    // Same grid and constants, new amplitudes (e.g. a time-evolved copy).
    Wavefunction with_amplitudes(std::vector<cplx> amplitudes, double tol_norm = 1e-9) const;

private:
    Grid1D grid_;
    std::vector<cplx> amplitudes_;
    Physics physics_;
    Support support_;
    bool spectral_ok_;
};

// Integral over the support window only, so integrands that jump at hard
// walls are still integrated to 4th order.
double integrate_on_support(std::span<const double> field, const Wavefunction &psi);

} // namespace qpf
