#pragma once

#include "qpfisher/bohmian.hpp"
#include "qpfisher/bounds.hpp"
#include "qpfisher/wavefunction.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace qpf {

struct Potential {
    enum class Kind { free, harmonic, double_well, sampled };

    Kind kind = Kind::free;
    double omega = 1.0;
    // V = barrier_height * (4 x^2 / separation^2 - 1)^2, minima at +-separation/2
    double barrier_height = 1.0;
    double separation = 2.0;
    std::vector<double> samples;

    static Potential free_particle() { return {}; }
    static Potential harmonic(double omega);
    static Potential double_well(double barrier_height, double separation);
    static Potential sampled(std::vector<double> values);

    void validate() const;
    std::vector<double> on(const Grid1D &grid, const Physics &physics) const;
    std::string name() const;
};

struct EvolutionConfig {
    Potential potential;
    double dt = 1e-3;
    double t_final = 1.0;
    std::size_t snapshot_stride = 10;

    void validate() const;
};

// Snapshots at t = 0, every snapshot_stride steps, and t_final. The step is
// shrunk to t_final / ceil(t_final / dt) so the last step lands on t_final.
struct Evolution {
    std::vector<double> times;
    std::vector<Wavefunction> snapshots;
    std::vector<double> potential;
    double dt = 0.0;
};

// Strang splitting: half potential kick, exact kinetic step in Fourier space,
// half potential kick. Throws unstable_step if dt max|V| / hbar > 0.5 and
// boundary_leakage when a snapshot no longer decays at the grid edges.
Evolution split_step_evolve(const Wavefunction &psi0, const EvolutionConfig &config, double boundary_eps = 1e-8,
                            double tol_norm = 1e-9);

// Inverse-CDF draws from rho; deterministic in seed.
std::vector<double> sample_initial_positions(std::span<const double> rho, const Grid1D &grid,
                                             std::size_t n_particles, std::uint64_t seed);

struct TrajectoryEnsemble {
    std::vector<double> initial_positions;
    std::vector<double> times;
    std::vector<std::vector<double>> positions; // [snapshot][particle]
    std::vector<std::uint8_t> flagged;          // 1 once a particle met a node or left the grid
    std::size_t node_encounters = 0;
    double dt_traj = 0.0;

    // Positions of unflagged particles at one snapshot.
    std::vector<double> active_positions(std::size_t snapshot) const;
    // True if the unflagged particles keep their initial order at every snapshot.
    bool order_preserved() const;
};

// RK4 on dx/dt = p_q(x, t) / m with 4-point Lagrange interpolation in x and
// linear interpolation in t between snapshots. dt_traj must divide every
// snapshot interval. Particles whose stencil touches a masked node are
// flagged and frozen.
TrajectoryEnsemble integrate_trajectories(const Evolution &evolution, std::span<const double> positions,
                                          double dt_traj, const BohmianOptions &opts = {});
TrajectoryEnsemble integrate_trajectories(std::span<const Wavefunction> snapshots, std::span<const double> times,
                                          std::span<const double> positions, double dt_traj,
                                          const BohmianOptions &opts = {});

// KS distance between the unflagged particles at a snapshot and a density.
double equivariance_distance(const TrajectoryEnsemble &ensemble, std::size_t snapshot,
                             std::span<const double> density, const Grid1D &grid);

struct TimePoint {
    double t = 0.0;
    MomentStats stats;
    BoundsReport report;
};

std::vector<TimePoint> bounds_over_time(const Evolution &evolution, const MomentOptions &opts = {},
                                        double tol_identity = 1e-6);

// L2 norm of (rho_{k+1} - rho_k) / dt_k + dJ/dx at snapshot k, with the
// probability current J = (hbar/m) Im(conj(psi) psi').
double continuity_residual(const Evolution &evolution, std::size_t k);
double max_continuity_residual(const Evolution &evolution);

// <H> = <P^2>/2m + <V>, kinetic part from the momentum-space density.
double energy(const Wavefunction &psi, std::span<const double> potential);

} // namespace qpf
