#pragma once

#include "qpfisher/bohmian.hpp"
#include "qpfisher/states.hpp"
#include "qpfisher/wavefunction.hpp"

#include <cstdint>
#include <string_view>

namespace qpf {

// Where var_p_spectral came from. Decaying states use the momentum-space
// density; hard-wall states, whose trigonometric interpolant rings, use the
// position-space operator moments hbar^2 <psi'|psi'> - <P>^2 instead.
enum class MomentumRoute { momentum_space, position_operator };

std::string_view to_string(MomentumRoute route) noexcept;

struct MomentStats {
    double mean_x = 0.0;
    double var_x = 0.0;
    double mean_p_op = 0.0;
    double var_p_spectral = 0.0;
    double var_p_bohm = 0.0; // var_pq + hbar^2 I / 4
    double mean_pq = 0.0;
    double var_pq = 0.0;
    double cov_x_pq = 0.0;
    // Re<XP> - <X><P> and Im<XP> - hbar/2 from the operator side.
    double cov_op = 0.0;
    double cov_op_imag = 0.0;
    double fisher_I = 0.0;
    double mean_Q = 0.0;
    double residual_q_identity = 0.0;
    double masked_fraction = 0.0;
    MomentumRoute route = MomentumRoute::momentum_space;

    // Correlation of x and p_q; 0 when p_q is constant.
    double pearson() const noexcept;
};

struct MomentOptions {
    BohmianOptions bohmian;
    double boundary_eps = 1e-8;
};

MomentStats moment_stats(const Wavefunction &psi, const MomentOptions &opts = {});

// <XP> = integral conj(psi) x (-i hbar psi'). Its real part is <{X,P}>/2
// because <PX> = conj(<XP>), and its imaginary part is hbar/2 because
// <XP> - <PX> = <[X,P]> = i hbar. Subtracting i hbar/2 therefore leaves the
// symmetrized covariance without forming the anticommutator.
struct CovarianceIdentity {
    double operator_side = 0.0;
    double operator_imag = 0.0; // should vanish
    double bohmian_side = 0.0;
    double residual = 0.0;      // |difference| / max(|bohmian_side|, hbar/2)
};

CovarianceIdentity covariance_identity(const Wavefunction &psi, const BohmianOptions &opts = {});
double covariance_identity_residual(const Wavefunction &psi, const BohmianOptions &opts = {});

struct BoundsReport {
    double product = 0.0;
    double bound_heisenberg = 0.0;
    double bound_rs = 0.0;
    double bound_cr = 0.0;
    double delta = 0.0;
    bool chain_ok = false;
    bool identity_ok = false;
    bool gap_ok = false;
    double residual_var_identity = 0.0;
    double residual_cov_identity = 0.0;
    double residual_mean_identity = 0.0;
    double residual_q_identity = 0.0;
    double masked_fraction = 0.0;
};

// Chain comparisons use tol = 10 tol_identity * product. The variance route
// identity is held to 10 tol_identity, the Q-bar, mean and covariance
// identities to tol_identity.
BoundsReport bounds_report(const MomentStats &stats, double hbar, double tol_identity = 1e-6);

struct CrlbResult {
    double empirical_var = 0.0;
    double crlb = 0.0;
    double ratio = 0.0;
    double fisher_I = 0.0;
    double estimator_mean = 0.0;
};

// Sample-mean estimator of a location parameter (theta = 0) over n_trials
// batches of n_samples draws from |psi|^2. Trial k uses substream (seed, k),
// so the result does not depend on how trials are scheduled.
CrlbResult crlb_monte_carlo(const Wavefunction &psi, std::size_t n_samples, std::size_t n_trials,
                            std::uint64_t seed);
CrlbResult crlb_monte_carlo(const AnalyticState &state, std::size_t n_samples, std::size_t n_trials,
                            std::uint64_t seed, const Physics &physics = {});

} // namespace qpf
