#include "qpfisher/wavefunction.hpp"

#include "qpfisher/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qpf {

namespace {

double norm_of(const Grid1D &grid, std::span<const cplx> amps, Support support) {
    std::vector<double> rho(support.size());
    for (std::size_t i = 0; i < rho.size(); ++i) {
        rho[i] = std::norm(amps[support.begin + i]);
    }
    return integrate(rho, grid.window(support.begin, support.end));
}

} // namespace

Wavefunction::Wavefunction(Grid1D grid, std::vector<cplx> amplitudes, Physics physics, double tol_norm)
    : Wavefunction(grid, std::move(amplitudes), physics, Support{0, grid.size()}, true, tol_norm) {}

Wavefunction::Wavefunction(Grid1D grid, std::vector<cplx> amplitudes, Physics physics, Support support,
                           bool spectral_ok, double tol_norm)
    : grid_(grid), amplitudes_(std::move(amplitudes)), physics_(physics), support_(support),
      spectral_ok_(spectral_ok) {
    if (amplitudes_.size() != grid_.size()) {
        raise(ErrorKind::length_mismatch, "wavefunction has " + std::to_string(amplitudes_.size()) +
                                              " amplitudes for a grid of " + std::to_string(grid_.size()));
    }
    if (!(physics_.hbar > 0.0) || !(physics_.mass > 0.0)) {
        raise(ErrorKind::invalid_state, "hbar and mass must be positive");
    }
    if (support_.end > grid_.size() || support_.size() < min_grid_points) {
        raise(ErrorKind::grid_too_small, "support window needs at least " + std::to_string(min_grid_points) +
                                             " nodes inside the grid");
    }
    for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
        if (!std::isfinite(amplitudes_[i].real()) || !std::isfinite(amplitudes_[i].imag())) {
            raise(ErrorKind::invalid_state, "non-finite amplitude at node " + std::to_string(i));
        }
        if ((i < support_.begin || i >= support_.end) && amplitudes_[i] != cplx{}) {
            raise(ErrorKind::invalid_state, "nonzero amplitude outside the support window");
        }
    }
    const double n = norm();
    if (std::abs(n - 1.0) > tol_norm) {
        raise(ErrorKind::not_normalized, "norm deviates from 1 by " + std::to_string(std::abs(n - 1.0)));
    }
}

Wavefunction Wavefunction::normalized(Grid1D grid, std::vector<cplx> amplitudes, Physics physics) {
    return normalized(grid, std::move(amplitudes), physics, Support{0, grid.size()}, true);
}

Wavefunction Wavefunction::normalized(Grid1D grid, std::vector<cplx> amplitudes, Physics physics, Support support,
                                      bool spectral_ok) {
    if (amplitudes.size() != grid.size()) {
        raise(ErrorKind::length_mismatch, "amplitude count does not match grid");
    }
    if (support.end > grid.size() || support.size() < min_grid_points) {
        raise(ErrorKind::grid_too_small, "support window too small");
    }
    const double n = norm_of(grid, amplitudes, support);
    if (!(n > 0.0) || !std::isfinite(n)) {
        raise(ErrorKind::invalid_state, "cannot normalize a state with zero or non-finite norm");
    }
    const double scale = 1.0 / std::sqrt(n);
    for (auto &a : amplitudes) {
        a *= scale;
    }
    return Wavefunction(grid, std::move(amplitudes), physics, support, spectral_ok);
}

std::vector<double> Wavefunction::density() const {
    std::vector<double> rho(amplitudes_.size());
    std::transform(amplitudes_.begin(), amplitudes_.end(), rho.begin(), [](cplx z) { return std::norm(z); });
    return rho;
}

double Wavefunction::norm() const { return norm_of(grid_, amplitudes_, support_); }

double Wavefunction::edge_ratio() const {
    double peak = 0.0;
    for (const cplx z : amplitudes_) {
        peak = std::max(peak, std::abs(z));
    }
    if (peak == 0.0) {
        return 0.0;
    }
    return std::max(std::abs(amplitudes_.front()), std::abs(amplitudes_.back())) / peak;
}

void Wavefunction::require_decay(double boundary_eps) const {
    if (!decays(boundary_eps)) {
        raise(ErrorKind::boundary_leakage,
              "edge amplitude ratio " + std::to_string(edge_ratio()) + " exceeds " + std::to_string(boundary_eps));
    }
}

Wavefunction Wavefunction::with_amplitudes(std::vector<cplx> amplitudes, double tol_norm) const {
    return Wavefunction(grid_, std::move(amplitudes), physics_, support_, spectral_ok_, tol_norm);
}

double integrate_on_support(std::span<const double> field, const Wavefunction &psi) {
    const Support s = psi.support();
    if (field.size() != psi.grid().size()) {
        raise(ErrorKind::length_mismatch, "field does not match the wavefunction grid");
    }
    return integrate(field.subspan(s.begin, s.size()), psi.grid().window(s.begin, s.end));
}

} // namespace qpf
