#pragma once

#include <cmath>
#include <numbers>

#include "qtherm/analytic.hpp"
#include "qtherm/field.hpp"
#include "qtherm/grid.hpp"

namespace qth_test {

using namespace qtherm;

/// Normalized 1-D Gaussian density with the packet convention: variance
/// a^2/4, i.e. |psi|^2 of the a-width packet, centered at `center`.
inline ScalarField gaussian_density_field(const Grid& grid, double a = 1.0,
                                          double center = 0.0) {
    ScalarField p(grid);
    const double norm = std::sqrt(2.0 / (std::numbers::pi * a * a));
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double x = grid.coordinate(0, i) - center;
        p.values[i] = norm * std::exp(-2.0 * x * x / (a * a));
    }
    return p;
}

/// Two-lobe asymmetric mixture, normalized on the grid; a convenient
/// nodeless base density without any special symmetry.
inline ScalarField mixture_density_field(const Grid& grid) {
    ScalarField p(grid);
    double mass = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double x = grid.coordinate(0, i);
        p.values[i] = 0.6 * std::exp(-2.0 * (x - 1.0) * (x - 1.0)) +
                      0.4 * std::exp(-1.5 * (x + 1.5) * (x + 1.5));
        mass += p.values[i];
    }
    mass *= grid.spacing(0);
    for (auto& v : p.values) v /= mass;
    return p;
}

inline double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

} // namespace qth_test
