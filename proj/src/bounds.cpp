#include "qpfisher/bounds.hpp"

#include "qpfisher/error.hpp"
#include "qpfisher/fourier.hpp"
#include "qpfisher/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <thread>

namespace qpf {

namespace {

// psi' on the support window, zero elsewhere.
std::vector<cplx> support_derivative(const Wavefunction &psi, DiffScheme scheme) {
    const auto [b, e] = psi.support();
    const auto d = derivative(psi.amplitudes().subspan(b, e - b), psi.grid().window(b, e), 1, scheme);
    std::vector<cplx> out(psi.grid().size());
    std::copy(d.begin(), d.end(), out.begin() + static_cast<std::ptrdiff_t>(b));
    return out;
}

template <class F>
double moment(const Wavefunction &psi, F &&integrand) {
    std::vector<double> f(psi.grid().size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        f[i] = integrand(i);
    }
    return integrate_on_support(f, psi);
}

struct OperatorMoments {
    double mean_x;
    double mean_p;
    double xp_re;
    double xp_im;
    double p2;
};

// Position-space expectation values built from psi and psi'.
OperatorMoments operator_moments(const Wavefunction &psi, std::span<const cplx> dpsi) {
    const auto amps = psi.amplitudes();
    const Grid1D &g = psi.grid();
    const double hbar = psi.hbar();
    OperatorMoments m{};
    m.mean_x = moment(psi, [&](std::size_t i) { return g.x(i) * std::norm(amps[i]); });
    // conj(psi) (-i hbar psi') has real part hbar Im(conj(psi) psi').
    m.mean_p = moment(psi, [&](std::size_t i) { return hbar * (std::conj(amps[i]) * dpsi[i]).imag(); });
    m.xp_re = moment(psi, [&](std::size_t i) { return g.x(i) * hbar * (std::conj(amps[i]) * dpsi[i]).imag(); });
    m.xp_im = moment(psi, [&](std::size_t i) { return -g.x(i) * hbar * (std::conj(amps[i]) * dpsi[i]).real(); });
    m.p2 = moment(psi, [&](std::size_t i) { return hbar * hbar * std::norm(dpsi[i]); });
    return m;
}

double weighted(const Wavefunction &psi, const PolarFields &f, auto &&g) {
    return moment(psi, [&](std::size_t i) { return f.node_mask[i] ? 0.0 : f.rho[i] * g(i); });
}

} // namespace

std::string_view to_string(MomentumRoute route) noexcept {
    return route == MomentumRoute::momentum_space ? "momentum_space" : "position_operator";
}

double MomentStats::pearson() const noexcept {
    const double s = std::sqrt(var_x * var_pq);
    return s > 0.0 ? cov_x_pq / s : 0.0;
}

MomentStats moment_stats(const Wavefunction &psi, const MomentOptions &opts) {
    if (psi.full_support()) {
        psi.require_decay(opts.boundary_eps);
    }
    const double hbar = psi.hbar();
    const Grid1D &g = psi.grid();
    const PolarFields f = polar_fields(psi, opts.bohmian);
    const QuantumPotentialIdentity qi = mean_quantum_potential(psi, opts.bohmian);
    const auto dpsi = support_derivative(psi, psi.spectral_ok() ? opts.bohmian.scheme : DiffScheme::central4);
    const OperatorMoments op = operator_moments(psi, dpsi);

    MomentStats s;
    s.mean_x = op.mean_x;
    s.var_x = moment(psi, [&](std::size_t i) {
        const double u = g.x(i) - s.mean_x;
        return u * u * f.rho[i];
    });
    if (psi.spectral_ok()) {
        const MomentumRepresentation mom = to_momentum_space(psi, opts.boundary_eps);
        s.mean_p_op = mom.mean();
        s.var_p_spectral = mom.variance();
        s.route = MomentumRoute::momentum_space;
    } else {
        s.mean_p_op = op.mean_p;
        s.var_p_spectral = op.p2 - op.mean_p * op.mean_p;
        s.route = MomentumRoute::position_operator;
    }
    s.mean_pq = weighted(psi, f, [&](std::size_t i) { return f.p_q[i]; });
    s.var_pq = weighted(psi, f, [&](std::size_t i) {
        const double d = f.p_q[i] - s.mean_pq;
        return d * d;
    });
    s.cov_x_pq = weighted(psi, f, [&](std::size_t i) { return (g.x(i) - s.mean_x) * f.p_q[i]; });
    s.cov_op = op.xp_re - op.mean_x * op.mean_p;
    s.cov_op_imag = op.xp_im - 0.5 * hbar;
    s.fisher_I = qi.fisher_I;
    s.mean_Q = qi.mean_Q;
    s.residual_q_identity = qi.residual_rel;
    s.var_p_bohm = s.var_pq + 0.25 * hbar * hbar * s.fisher_I;
    s.masked_fraction = f.masked_fraction;
    return s;
}

CovarianceIdentity covariance_identity(const Wavefunction &psi, const BohmianOptions &opts) {
    const Grid1D &g = psi.grid();
    const PolarFields f = polar_fields(psi, opts);
    const auto dpsi = support_derivative(psi, psi.spectral_ok() ? opts.scheme : DiffScheme::central4);
    const OperatorMoments op = operator_moments(psi, dpsi);

    CovarianceIdentity c;
    c.operator_side = op.xp_re - op.mean_x * op.mean_p;
    c.operator_imag = op.xp_im - 0.5 * psi.hbar();
    const double mean_pq = weighted(psi, f, [&](std::size_t i) { return f.p_q[i]; });
    const double xpq = weighted(psi, f, [&](std::size_t i) { return g.x(i) * f.p_q[i]; });
    c.bohmian_side = xpq - op.mean_x * mean_pq;
    c.residual = std::abs(c.operator_side - c.bohmian_side) / std::max(std::abs(c.bohmian_side), 0.5 * psi.hbar());
    return c;
}

double covariance_identity_residual(const Wavefunction &psi, const BohmianOptions &opts) {
    return covariance_identity(psi, opts).residual;
}

BoundsReport bounds_report(const MomentStats &s, double hbar, double tol_identity) {
    BoundsReport r;
    r.product = s.var_x * s.var_p_spectral;
    r.bound_heisenberg = 0.25 * hbar * hbar;
    r.bound_rs = r.bound_heisenberg + s.cov_x_pq * s.cov_x_pq;
    r.bound_cr = r.bound_heisenberg + s.var_x * s.var_pq;
    r.delta = s.var_x * s.var_pq - s.cov_x_pq * s.cov_x_pq;

    const double tol = 10.0 * tol_identity * r.product;
    r.chain_ok = r.product >= r.bound_cr - tol && r.bound_cr >= r.bound_rs - tol &&
                 r.bound_rs >= r.bound_heisenberg - tol;
    r.gap_ok = r.delta >= -tol_identity * s.var_x * s.var_pq;

    r.residual_var_identity = std::abs(s.var_p_spectral - s.var_p_bohm) / s.var_p_spectral;
    r.residual_cov_identity = std::abs(s.cov_op - s.cov_x_pq) / std::max(std::abs(s.cov_x_pq), 0.5 * hbar);
    r.residual_mean_identity =
        std::abs(s.mean_p_op - s.mean_pq) / std::max(std::abs(s.mean_p_op), hbar / std::sqrt(s.var_x));
    r.residual_q_identity = s.residual_q_identity;
    r.masked_fraction = s.masked_fraction;
    r.identity_ok = r.residual_var_identity < 10.0 * tol_identity && r.residual_q_identity < tol_identity &&
                    r.residual_mean_identity < tol_identity && r.residual_cov_identity < tol_identity;
    return r;
}

CrlbResult crlb_monte_carlo(const Wavefunction &psi, std::size_t n_samples, std::size_t n_trials,
                            std::uint64_t seed) {
    if (n_samples < 10 || n_trials < 1000) {
        raise(ErrorKind::precondition, "crlb_monte_carlo needs n_samples >= 10 and n_trials >= 1000");
    }
    const Grid1D &g = psi.grid();
    const auto rho = psi.density();
    const GridCdf cdf(rho, g);
    const double mean = moment(psi, [&](std::size_t i) { return g.x(i) * rho[i]; });

    // The sample mean is an unbiased location estimator only if rho is
    // symmetric about its mean. Compare rho with its mirror image.
    const double peak = *std::max_element(rho.begin(), rho.end());
    const double h = g.spacing();
    for (std::size_t i = 0; i < rho.size(); ++i) {
        const double t = (2.0 * mean - g.x(i) - g.x_min()) / h;
        double mirrored = 0.0;
        if (t >= 0.0 && t <= static_cast<double>(rho.size() - 1)) {
            const auto j = std::min(static_cast<std::size_t>(t), rho.size() - 2);
            const double w = t - static_cast<double>(j);
            mirrored = (1.0 - w) * rho[j] + w * rho[j + 1];
        }
        if (std::abs(rho[i] - mirrored) > 1e-3 * peak) {
            raise(ErrorKind::asymmetric_density, "density is not symmetric about its mean");
        }
    }

    const double fisher = fisher_information(psi);
    std::vector<double> estimates(n_trials);
    auto run = [&](std::size_t begin, std::size_t end) {
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (std::size_t k = begin; k < end; ++k) {
            auto rng = substream(seed, k);
            double sum = 0.0;
            for (std::size_t s = 0; s < n_samples; ++s) {
                sum += cdf.quantile(unit(rng)) - mean;
            }
            estimates[k] = sum / static_cast<double>(n_samples);
        }
    };
    const std::size_t workers = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, 16);
    const std::size_t chunk = (n_trials + workers - 1) / workers;
    std::vector<std::future<void>> jobs;
    for (std::size_t b = 0; b < n_trials; b += chunk) {
        jobs.push_back(std::async(std::launch::async, run, b, std::min(n_trials, b + chunk)));
    }
    for (auto &j : jobs) {
        j.get();
    }

    CrlbResult r;
    double sum = 0.0;
    for (double e : estimates) {
        sum += e;
    }
    r.estimator_mean = sum / static_cast<double>(n_trials);
    double ss = 0.0;
    for (double e : estimates) {
        ss += (e - r.estimator_mean) * (e - r.estimator_mean);
    }
    r.empirical_var = ss / static_cast<double>(n_trials - 1);
    r.fisher_I = fisher;
    r.crlb = 1.0 / (static_cast<double>(n_samples) * fisher);
    r.ratio = r.empirical_var / r.crlb;
    return r;
}

CrlbResult crlb_monte_carlo(const AnalyticState &state, std::size_t n_samples, std::size_t n_trials,
                            std::uint64_t seed, const Physics &physics) {
    const Wavefunction psi = sample_analytic(state, suggested_grid(state, physics, 4096), physics);
    return crlb_monte_carlo(psi, n_samples, n_trials, seed);
}

} // namespace qpf
