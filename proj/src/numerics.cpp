#include "qpfisher/numerics.hpp"

#include "qpfisher/error.hpp"
#include "qpfisher/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qpf {

namespace {

void check_length(std::size_t field, const Grid1D &grid) {
    if (field != grid.size()) {
        raise(ErrorKind::length_mismatch,
              "field has " + std::to_string(field) + " samples, grid has " + std::to_string(grid.size()));
    }
}

template <class T>
std::vector<T> central4_first(std::span<const T> f, double h) {
    const std::size_t n = f.size();
    std::vector<T> d(n);
    const double c = 1.0 / (12.0 * h);
    for (std::size_t i = 2; i + 2 < n; ++i) {
        d[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) * c;
    }
    d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) * c;
    d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) * c;
    const std::size_t m = n - 1;
    d[m] = (25.0 * f[m] - 48.0 * f[m - 1] + 36.0 * f[m - 2] - 16.0 * f[m - 3] + 3.0 * f[m - 4]) * c;
    d[m - 1] = (3.0 * f[m] + 10.0 * f[m - 1] - 18.0 * f[m - 2] + 6.0 * f[m - 3] - f[m - 4]) * c;
    return d;
}

template <class T>
std::vector<T> central4_second(std::span<const T> f, double h) {
    const std::size_t n = f.size();
    std::vector<T> d(n);
    const double c = 1.0 / (12.0 * h * h);
    for (std::size_t i = 2; i + 2 < n; ++i) {
        d[i] = (-f[i - 2] + 16.0 * f[i - 1] - 30.0 * f[i] + 16.0 * f[i + 1] - f[i + 2]) * c;
    }
    // 6-point one-sided stencils keep 4th order at the edges.
    d[0] = (45.0 * f[0] - 154.0 * f[1] + 214.0 * f[2] - 156.0 * f[3] + 61.0 * f[4] - 10.0 * f[5]) * c;
    d[1] = (10.0 * f[0] - 15.0 * f[1] - 4.0 * f[2] + 14.0 * f[3] - 6.0 * f[4] + f[5]) * c;
    const std::size_t m = n - 1;
    d[m] = (45.0 * f[m] - 154.0 * f[m - 1] + 214.0 * f[m - 2] - 156.0 * f[m - 3] + 61.0 * f[m - 4] -
            10.0 * f[m - 5]) *
           c;
    d[m - 1] = (10.0 * f[m] - 15.0 * f[m - 1] - 4.0 * f[m - 2] + 14.0 * f[m - 3] - 6.0 * f[m - 4] + f[m - 5]) * c;
    return d;
}

template <class T>
std::vector<T> central4(std::span<const T> f, const Grid1D &grid, int order) {
    if (order == 1) {
        return central4_first(f, grid.spacing());
    }
    return central4_second(f, grid.spacing());
}

void check_order(int order) {
    if (order != 1 && order != 2) {
        raise(ErrorKind::precondition, "derivative order must be 1 or 2, got " + std::to_string(order));
    }
}

} // namespace

std::vector<cplx> derivative(std::span<const cplx> field, const Grid1D &grid, int order, DiffScheme scheme) {
    check_length(field.size(), grid);
    check_order(order);
    if (scheme == DiffScheme::spectral) {
        return spectral_derivative(field, grid, order);
    }
    return central4(field, grid, order);
}

std::vector<double> derivative(std::span<const double> field, const Grid1D &grid, int order, DiffScheme scheme) {
    check_length(field.size(), grid);
    check_order(order);
    if (scheme == DiffScheme::spectral) {
        std::vector<cplx> lifted(field.begin(), field.end());
        const auto d = spectral_derivative(lifted, grid, order);
        std::vector<double> out(d.size());
        std::transform(d.begin(), d.end(), out.begin(), [](cplx z) { return z.real(); });
        return out;
    }
    return central4(field, grid, order);
}

double integrate(std::span<const double> f, const Grid1D &grid) {
    check_length(f.size(), grid);
    const double h = grid.spacing();
    const std::size_t intervals = f.size() - 1;

    auto simpson = [&](std::size_t last) {
        // Nodes 0..last with `last` even.
        double odd = 0.0;
        double even = 0.0;
        for (std::size_t i = 1; i < last; i += 2) {
            odd += f[i];
        }
        for (std::size_t i = 2; i < last; i += 2) {
            even += f[i];
        }
        return h / 3.0 * (f[0] + f[last] + 4.0 * odd + 2.0 * even);
    };

    if (intervals % 2 == 0) {
        return simpson(intervals);
    }
    const std::size_t m = intervals - 3;
    return simpson(m) + 3.0 * h / 8.0 * (f[m] + 3.0 * f[m + 1] + 3.0 * f[m + 2] + f[m + 3]);
}

} // namespace qpf
