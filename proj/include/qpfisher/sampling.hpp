#pragma once

#include "qpfisher/grid.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace qpf {

// Independent generator for (seed, stream). Streams are derived by mixing,
// so trial k draws the same numbers however trials are scheduled.
std::mt19937_64 substream(std::uint64_t seed, std::uint64_t stream);

// Piecewise-linear CDF of a density sampled on a grid (cumulative trapezoid,
// normalized to end at exactly 1).
class GridCdf {
public:
    GridCdf(std::span<const double> density, const Grid1D &grid);

    double operator()(double x) const;
    double quantile(double u) const;
    double total_mass() const noexcept { return total_; }

private:
    Grid1D grid_;
    std::vector<double> cdf_;
    double total_ = 0.0;
};

// Two-sided Kolmogorov-Smirnov distance between a sample and a grid density.
double ks_distance(std::span<const double> sample, std::span<const double> density, const Grid1D &grid);

// Asymptotic 1% critical value of the one-sample KS statistic, 1.628 / sqrt(n).
double ks_critical_1pct(std::size_t n);

} // namespace qpf
