#include "qpfisher/fourier.hpp"

#include "qpfisher/error.hpp"
#include "qpfisher/wavefunction.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

namespace qpf {

namespace {

std::mutex &planner_mutex() {
    static std::mutex m;
    return m;
}

fftw_complex *as_fftw(cplx *p) { return reinterpret_cast<fftw_complex *>(p); }
fftw_complex *as_fftw(const cplx *p) { return reinterpret_cast<fftw_complex *>(const_cast<cplx *>(p)); }

} // namespace

struct FftPlan::Plans {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
};

FftPlan::FftPlan(std::size_t n) : n_(n), plans_(std::make_unique<Plans>()) {
    if (n == 0) {
        raise(ErrorKind::precondition, "FFT length must be positive");
    }
    std::vector<cplx> a(n), b(n);
    const int len = static_cast<int>(n);
    std::lock_guard lock(planner_mutex());
    plans_->fwd = fftw_plan_dft_1d(len, as_fftw(a.data()), as_fftw(b.data()), FFTW_FORWARD,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_->bwd = fftw_plan_dft_1d(len, as_fftw(a.data()), as_fftw(b.data()), FFTW_BACKWARD,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
}

FftPlan::~FftPlan() {
    if (!plans_) {
        return;
    }
    std::lock_guard lock(planner_mutex());
    if (plans_->fwd != nullptr) {
        fftw_destroy_plan(plans_->fwd);
    }
    if (plans_->bwd != nullptr) {
        fftw_destroy_plan(plans_->bwd);
    }
}

FftPlan::FftPlan(FftPlan &&) noexcept = default;
FftPlan &FftPlan::operator=(FftPlan &&) noexcept = default;

void FftPlan::forward(std::span<const cplx> in, std::span<cplx> out) const {
    if (in.size() != n_ || out.size() != n_) {
        raise(ErrorKind::length_mismatch, "FFT buffers must have length " + std::to_string(n_));
    }
    fftw_execute_dft(plans_->fwd, as_fftw(in.data()), as_fftw(out.data()));
}

void FftPlan::backward(std::span<const cplx> in, std::span<cplx> out) const {
    if (in.size() != n_ || out.size() != n_) {
        raise(ErrorKind::length_mismatch, "FFT buffers must have length " + std::to_string(n_));
    }
    fftw_execute_dft(plans_->bwd, as_fftw(in.data()), as_fftw(out.data()));
}

std::vector<double> fft_wavenumbers(std::size_t n, double dx) {
    std::vector<double> k(n);
    const double scale = 2.0 * std::numbers::pi / (static_cast<double>(n) * dx);
    for (std::size_t j = 0; j < n; ++j) {
        const auto signed_j = j < (n + 1) / 2 ? static_cast<double>(j) : static_cast<double>(j) - static_cast<double>(n);
        k[j] = scale * signed_j;
    }
    return k;
}

std::vector<cplx> spectral_derivative(std::span<const cplx> field, const Grid1D &grid, int order) {
    const std::size_t n = field.size();
    if (n != grid.size()) {
        raise(ErrorKind::length_mismatch, "field/grid size mismatch in spectral derivative");
    }
    double peak = 0.0;
    for (const cplx z : field) {
        peak = std::max(peak, std::abs(z));
    }
    if (std::abs(field.front()) > spectral_edge_eps * peak || std::abs(field.back()) > spectral_edge_eps * peak) {
        raise(ErrorKind::boundary_leakage, "spectral derivative needs a field that decays at both grid edges");
    }
    const FftPlan plan(n);
    std::vector<cplx> spec(n);
    plan.forward(field, spec);
    const auto k = fft_wavenumbers(n, grid.spacing());
    for (std::size_t j = 0; j < n; ++j) {
        const cplx ik(0.0, k[j]);
        spec[j] *= order == 1 ? ik : ik * ik;
    }
    // The Nyquist mode has no well-defined odd derivative.
    if (n % 2 == 0 && order == 1) {
        spec[n / 2] = 0.0;
    }
    std::vector<cplx> out(n);
    plan.backward(spec, out);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (auto &z : out) {
        z *= inv_n;
    }
    return out;
}

std::vector<double> MomentumRepresentation::density() const {
    std::vector<double> d(amplitude.size());
    for (std::size_t k = 0; k < d.size(); ++k) {
        d[k] = std::norm(amplitude[k]);
    }
    return d;
}

double MomentumRepresentation::norm() const {
    double s = 0.0;
    for (const cplx a : amplitude) {
        s += std::norm(a);
    }
    return s * dp;
}

double MomentumRepresentation::mean() const {
    double s = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        s += p[k] * std::norm(amplitude[k]);
    }
    return s * dp / norm();
}

double MomentumRepresentation::variance() const {
    const double m = mean();
    double s = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        const double d = p[k] - m;
        s += d * d * std::norm(amplitude[k]);
    }
    return s * dp / norm();
}

MomentumRepresentation to_momentum_space(const Wavefunction &psi, double boundary_eps) {
    if (!psi.spectral_ok()) {
        raise(ErrorKind::precondition, "hard-wall states have no band-limited momentum transform");
    }
    if (!psi.decays(boundary_eps)) {
        raise(ErrorKind::boundary_leakage, "edge amplitude ratio " + std::to_string(psi.edge_ratio()) +
                                               " exceeds " + std::to_string(boundary_eps) +
                                               "; the momentum transform would alias");
    }
    const Grid1D &grid = psi.grid();
    const std::size_t n = grid.size();
    const double dx = grid.spacing();
    const double hbar = psi.hbar();

    const FftPlan plan(n);
    std::vector<cplx> spec(n);
    plan.forward(psi.amplitudes(), spec);

    MomentumRepresentation out;
    out.dp = 2.0 * std::numbers::pi * hbar / (static_cast<double>(n) * dx);
    out.p.resize(n);
    out.amplitude.resize(n);
    const double scale = dx / std::sqrt(2.0 * std::numbers::pi * hbar);
    const auto half = static_cast<std::ptrdiff_t>(n / 2);
    for (std::size_t idx = 0; idx < n; ++idx) {
        // ascending k = -n/2 .. n - n/2 - 1
        const std::ptrdiff_t k = static_cast<std::ptrdiff_t>(idx) - half;
        const std::size_t slot = static_cast<std::size_t>((k + static_cast<std::ptrdiff_t>(n)) %
                                                          static_cast<std::ptrdiff_t>(n));
        const double p = out.dp * static_cast<double>(k);
        // x_j = x_min + j dx, so the x_min offset becomes a phase.
        const cplx shift = std::polar(1.0, -p * grid.x_min() / hbar);
        out.p[idx] = p;
        out.amplitude[idx] = scale * shift * spec[slot];
    }
    return out;
}

} // namespace qpf
