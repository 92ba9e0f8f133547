#pragma once

#include "qpfisher/grid.hpp"
#include "qpfisher/numerics.hpp"

#include <memory>
#include <span>
#include <vector>

namespace qpf {

class Wavefunction;

// Owns a forward/backward FFTW plan pair for one transform length. Plans are
// created and destroyed under a global lock (the FFTW planner is not
// reentrant); executing them is safe from any thread.
class FftPlan {
public:
    explicit FftPlan(std::size_t n);
    ~FftPlan();
    FftPlan(const FftPlan &) = delete;
    FftPlan &operator=(const FftPlan &) = delete;
    FftPlan(FftPlan &&) noexcept;
    FftPlan &operator=(FftPlan &&) noexcept;

    std::size_t size() const noexcept { return n_; }

    // out_k = sum_j in_j exp(-2 pi i j k / n)
    void forward(std::span<const cplx> in, std::span<cplx> out) const;
    // out_j = sum_k in_k exp(+2 pi i j k / n), unnormalized
    void backward(std::span<const cplx> in, std::span<cplx> out) const;

private:
    struct Plans;
    std::size_t n_;
    std::unique_ptr<Plans> plans_;
};

// Angular wavenumbers 2 pi k / (n dx) in FFT storage order (k = 0..n/2-1, -n/2..-1).
std::vector<double> fft_wavenumbers(std::size_t n, double dx);

std::vector<cplx> spectral_derivative(std::span<const cplx> field, const Grid1D &grid, int order);

// psi~(p_k) = dx / sqrt(2 pi hbar) * sum_j psi_j exp(-i p_k x_j / hbar) on the
// momentum grid p_k = 2 pi hbar k / (n dx), k = -n/2 .. n/2 - 1 (ascending).
// The rectangle rule sum |psi~|^2 dp reproduces dx * sum |psi|^2 exactly
// (discrete Parseval).
struct MomentumRepresentation {
    std::vector<double> p;
    std::vector<cplx> amplitude;
    double dp = 0.0;

    std::vector<double> density() const;
    double norm() const;
    double mean() const;
    double variance() const;
};

MomentumRepresentation to_momentum_space(const Wavefunction &psi, double boundary_eps = 1e-8);

} // namespace qpf
