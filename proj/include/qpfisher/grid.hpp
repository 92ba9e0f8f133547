#pragma once

#include <cstddef>
#include <vector>

namespace qpf {

inline constexpr std::size_t min_grid_points = 16;

// Uniform 1D grid: x_i = x_min + i * dx, i = 0 .. n_points - 1.
class Grid1D {
public:
    Grid1D(double x_min, double x_max, std::size_t n_points);

    double x_min() const noexcept { return x_min_; }
    double x_max() const noexcept { return x_max_; }
    std::size_t size() const noexcept { return n_; }
    double spacing() const noexcept { return dx_; }
    double length() const noexcept { return x_max_ - x_min_; }

    // The last node returns x_max exactly rather than x_min + (n-1)*dx.
    double x(std::size_t i) const noexcept { return i + 1 == n_ ? x_max_ : x_min_ + static_cast<double>(i) * dx_; }
    std::vector<double> coordinates() const;

    // Nodes [begin, end) as a grid of their own.
    Grid1D window(std::size_t begin, std::size_t end) const;

    // Index of the node nearest to `x`, clamped to the grid.
    std::size_t nearest_index(double x) const noexcept;

    bool operator==(const Grid1D &) const = default;

private:
    double x_min_;
    double x_max_;
    std::size_t n_;
    double dx_;
};

Grid1D make_grid(double x_min, double x_max, std::size_t n_points);

} // namespace qpf
