#include "qpfisher/sampling.hpp"

#include "qpfisher/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qpf {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace

std::mt19937_64 substream(std::uint64_t seed, std::uint64_t stream) {
    return std::mt19937_64(splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL)));
}

GridCdf::GridCdf(std::span<const double> density, const Grid1D &grid) : grid_(grid), cdf_(density.size()) {
    if (density.size() != grid.size()) {
        raise(ErrorKind::length_mismatch, "density does not match grid");
    }
    const double h = grid.spacing();
    cdf_[0] = 0.0;
    for (std::size_t i = 1; i < density.size(); ++i) {
        if (density[i] < 0.0 || !std::isfinite(density[i])) {
            raise(ErrorKind::precondition, "density must be finite and non-negative");
        }
        cdf_[i] = cdf_[i - 1] + 0.5 * h * (density[i - 1] + density[i]);
    }
    total_ = cdf_.back();
    if (!(total_ > 0.0)) {
        raise(ErrorKind::precondition, "density has zero mass");
    }
    for (auto &c : cdf_) {
        c /= total_;
    }
    cdf_.back() = 1.0;
}

double GridCdf::operator()(double x) const {
    if (x <= grid_.x_min()) {
        return 0.0;
    }
    if (x >= grid_.x_max()) {
        return 1.0;
    }
    const double s = (x - grid_.x_min()) / grid_.spacing();
    const auto i = std::min(static_cast<std::size_t>(s), cdf_.size() - 2);
    const double t = s - static_cast<double>(i);
    return cdf_[i] + t * (cdf_[i + 1] - cdf_[i]);
}

double GridCdf::quantile(double u) const {
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.begin()) {
        return grid_.x_min();
    }
    if (it == cdf_.end()) {
        return grid_.x_max();
    }
    const auto i = static_cast<std::size_t>(it - cdf_.begin()) - 1;
    const double width = cdf_[i + 1] - cdf_[i];
    const double t = width > 0.0 ? (u - cdf_[i]) / width : 0.0;
    return grid_.x(i) + t * grid_.spacing();
}

double ks_distance(std::span<const double> sample, std::span<const double> density, const Grid1D &grid) {
    if (sample.empty()) {
        raise(ErrorKind::precondition, "KS distance of an empty sample");
    }
    const GridCdf cdf(density, grid);
    std::vector<double> sorted(sample.begin(), sample.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = cdf(sorted[i]);
        d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
    }
    return d;
}

double ks_critical_1pct(std::size_t n) { return 1.628 / std::sqrt(static_cast<double>(n)); }

} // namespace qpf
