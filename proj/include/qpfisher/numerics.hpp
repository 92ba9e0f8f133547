#pragma once

#include "qpfisher/grid.hpp"

#include <complex>
#include <span>
#include <vector>

namespace qpf {

using cplx = std::complex<double>;

enum class DiffScheme {
    central4, // 5-point central stencils, 4th-order one-sided stencils at the two edges
    spectral, // exact derivative of the trigonometric interpolant (needs boundary decay)
};

// Relative edge amplitude above which the spectral scheme refuses a field.
inline constexpr double spectral_edge_eps = 1e-8;

std::vector<double> derivative(std::span<const double> field, const Grid1D &grid, int order,
                               DiffScheme scheme = DiffScheme::central4);
std::vector<cplx> derivative(std::span<const cplx> field, const Grid1D &grid, int order,
                             DiffScheme scheme = DiffScheme::central4);

// Composite Simpson rule. With an odd interval count the last three intervals
// use Simpson's 3/8 rule, which keeps the scheme 4th order.
double integrate(std::span<const double> field, const Grid1D &grid);

} // namespace qpf
