#include "qpfisher/grid.hpp"

#include "qpfisher/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qpf {

Grid1D::Grid1D(double x_min, double x_max, std::size_t n_points)
    : x_min_(x_min), x_max_(x_max), n_(n_points), dx_(0.0) {
    if (!(x_max > x_min) || !std::isfinite(x_min) || !std::isfinite(x_max)) {
        raise(ErrorKind::invalid_extent,
              "grid needs x_max > x_min, got [" + std::to_string(x_min) + ", " + std::to_string(x_max) + "]");
    }
    if (n_points < min_grid_points) {
        raise(ErrorKind::too_coarse, "grid needs at least " + std::to_string(min_grid_points) + " points, got " +
                                         std::to_string(n_points));
    }
    dx_ = (x_max - x_min) / static_cast<double>(n_points - 1);
}

std::vector<double> Grid1D::coordinates() const {
    std::vector<double> xs(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        xs[i] = x(i);
    }
    return xs;
}

Grid1D Grid1D::window(std::size_t begin, std::size_t end) const {
    if (end > n_ || begin >= end) {
        raise(ErrorKind::length_mismatch, "grid window [" + std::to_string(begin) + ", " + std::to_string(end) +
                                              ") outside grid of " + std::to_string(n_) + " points");
    }
    if (begin == 0 && end == n_) {
        return *this;
    }
    return Grid1D(x(begin), x(end - 1), end - begin);
}

std::size_t Grid1D::nearest_index(double x) const noexcept {
    const double s = std::round((x - x_min_) / dx_);
    if (s <= 0.0) {
        return 0;
    }
    return std::min(static_cast<std::size_t>(s), n_ - 1);
}

Grid1D make_grid(double x_min, double x_max, std::size_t n_points) { return Grid1D(x_min, x_max, n_points); }

} // namespace qpf
