#include "qpfisher/bohmian.hpp"

#include "qpfisher/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qpf {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

// Derivatives of psi and rho on the support window, scattered back to full
// grid length (zero outside the window).
struct Kernel {
    std::vector<cplx> dpsi;
    std::vector<cplx> d2psi;
    std::vector<double> drho;
    std::vector<double> rho;
    std::vector<std::uint8_t> mask;
    double masked_fraction = 0.0;
};

Kernel kernel(const Wavefunction &psi, const BohmianOptions &opts) {
    if (opts.scheme == DiffScheme::spectral && !psi.spectral_ok()) {
        raise(ErrorKind::precondition, "spectral derivatives are not available for states with hard walls");
    }
    const auto amps = psi.amplitudes();
    const std::size_t n = amps.size();
    const auto [b, e] = psi.support();
    const Grid1D window = psi.grid().window(b, e);

    Kernel k;
    k.rho = psi.density();
    const double peak = *std::max_element(k.rho.begin(), k.rho.end());
    if (!(peak > 0.0)) {
        raise(ErrorKind::all_masked, "every node lies below the node threshold");
    }
    const double floor = opts.eps_node * peak;
    k.mask.assign(n, 0);
    std::size_t first = n;
    std::size_t last = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (k.rho[i] < floor) {
            k.mask[i] = 1;
        } else {
            first = std::min(first, i);
            last = i;
        }
    }
    if (first == n) {
        raise(ErrorKind::all_masked, "every node lies below the node threshold");
    }
    std::size_t interior_masked = 0;
    for (std::size_t i = first; i <= last; ++i) {
        interior_masked += k.mask[i];
    }
    k.masked_fraction = static_cast<double>(interior_masked) / static_cast<double>(last - first + 1);
    if (k.masked_fraction >= opts.max_masked_fraction) {
        raise(ErrorKind::node_dominated, "masked fraction " + std::to_string(k.masked_fraction) + " exceeds " +
                                             std::to_string(opts.max_masked_fraction));
    }

    const std::span<const cplx> psi_w = amps.subspan(b, e - b);
    const std::span<const double> rho_w(k.rho.data() + b, e - b);
    const auto d1 = derivative(psi_w, window, 1, opts.scheme);
    const auto d2 = opts.scheme == DiffScheme::spectral ? derivative(psi_w, window, 2, opts.scheme)
                                                        : derivative(std::span<const cplx>(d1), window, 1, opts.scheme);
    const auto dr = derivative(rho_w, window, 1, opts.scheme);

    k.dpsi.assign(n, cplx{});
    k.d2psi.assign(n, cplx{});
    k.drho.assign(n, 0.0);
    std::copy(d1.begin(), d1.end(), k.dpsi.begin() + static_cast<std::ptrdiff_t>(b));
    std::copy(d2.begin(), d2.end(), k.d2psi.begin() + static_cast<std::ptrdiff_t>(b));
    std::copy(dr.begin(), dr.end(), k.drho.begin() + static_cast<std::ptrdiff_t>(b));
    return k;
}

PolarFields fields_from(const Wavefunction &psi, const Kernel &k) {
    const auto amps = psi.amplitudes();
    const std::size_t n = amps.size();
    const double hbar = psi.hbar();
    const double q_scale = -hbar * hbar / (2.0 * psi.mass());

    PolarFields f;
    f.rho = k.rho;
    f.node_mask = k.mask;
    f.masked_fraction = k.masked_fraction;
    f.R.resize(n);
    f.p_q.assign(n, nan);
    f.osmotic.assign(n, nan);
    f.Q.assign(n, nan);
    for (std::size_t i = 0; i < n; ++i) {
        f.R[i] = std::sqrt(f.rho[i]);
        if (k.mask[i]) {
            continue;
        }
        const cplx r1 = k.dpsi[i] / amps[i];
        const cplx r2 = k.d2psi[i] / amps[i];
        f.p_q[i] = hbar * r1.imag();
        f.osmotic[i] = hbar * r1.real();
        f.Q[i] = q_scale * (r2.real() + r1.imag() * r1.imag());
    }
    return f;
}

double fisher_from(const Wavefunction &psi, const Kernel &k) {
    std::vector<double> integrand(k.rho.size());
    for (std::size_t i = 0; i < integrand.size(); ++i) {
        integrand[i] = k.mask[i] ? 4.0 * std::norm(k.dpsi[i]) : k.drho[i] * k.drho[i] / k.rho[i];
    }
    return integrate_on_support(integrand, psi);
}

} // namespace

PolarFields polar_fields(const Wavefunction &psi, const BohmianOptions &opts) {
    return fields_from(psi, kernel(psi, opts));
}

MaskedField local_momentum(const Wavefunction &psi, const BohmianOptions &opts) {
    auto f = polar_fields(psi, opts);
    return {std::move(f.p_q), std::move(f.node_mask)};
}

MaskedField osmotic_momentum(const Wavefunction &psi, const BohmianOptions &opts) {
    auto f = polar_fields(psi, opts);
    return {std::move(f.osmotic), std::move(f.node_mask)};
}

MaskedField quantum_potential(const Wavefunction &psi, const BohmianOptions &opts) {
    auto f = polar_fields(psi, opts);
    return {std::move(f.Q), std::move(f.node_mask)};
}

double fisher_information(const Wavefunction &psi, const BohmianOptions &opts) {
    return fisher_from(psi, kernel(psi, opts));
}

QuantumPotentialIdentity mean_quantum_potential(const Wavefunction &psi, const BohmianOptions &opts) {
    const Kernel k = kernel(psi, opts);
    const PolarFields f = fields_from(psi, k);
    std::vector<double> rq(f.rho.size());
    for (std::size_t i = 0; i < rq.size(); ++i) {
        rq[i] = f.node_mask[i] ? 0.0 : f.rho[i] * f.Q[i];
    }
    QuantumPotentialIdentity out;
    out.mean_Q = integrate_on_support(rq, psi);
    out.fisher_I = fisher_from(psi, k);
    out.fisher_term = psi.hbar() * psi.hbar() * out.fisher_I / (8.0 * psi.mass());
    out.residual_abs = std::abs(out.mean_Q - out.fisher_term);
    out.residual_rel = out.residual_abs / std::abs(out.mean_Q);
    out.masked_fraction = f.masked_fraction;
    return out;
}

} // namespace qpf
