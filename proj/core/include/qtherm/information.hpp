#pragma once

#include <array>

#include "qtherm/constants.hpp"
#include "qtherm/field.hpp"

namespace qtherm::info {

inline constexpr double default_density_floor = 1e-10;

/// Differential entropy -integral p log p in nats.  Contributions from points
/// below floor_eps * max(p) are zero.  Rejects densities whose integral
/// deviates from 1 by more than 1e-6.
double differential_entropy(const ScalarField& p, double floor_eps = default_density_floor);

/// Jensen-Shannon distance sqrt(H[(p1+p2)/2] - H[p1]/2 - H[p2]/2).
/// Radicands in [-1e-10, 0) clamp to zero; anything lower is an error.
double js_distance(const ScalarField& p1, const ScalarField& p2,
                   double floor_eps = default_density_floor);

enum class NuMode { closed_form, limit };

/// Information speed per axis.  Closed form evaluates
/// nu_i = sqrt((1/8) integral (d_i p)^2 / p dx); limit mode evaluates
/// d_JS[p(. + h e_i), p] / h and requires h >= 2 * spacing.
std::array<double, 2> nu_vector(const ScalarField& p, NuMode mode, double h = 0.0,
                                double floor_eps = default_density_floor);

struct FisherReport {
    std::array<double, 2> per_axis{0.0, 0.0};
    double total = 0.0;
};

/// Per-axis and total Fisher information integral (grad p)^2 / p dx with the
/// denominator floored at floor_eps * max(p) so node singularities integrate.
FisherReport fisher_information(const ScalarField& p, double floor_eps = default_density_floor);

struct InfoEnergy {
    double e_inf = 0.0; // gamma |nu|^2
    double u_q = 0.0;   // (hbar^2 / 8m) * Fisher total
};

InfoEnergy informational_energy(const ScalarField& p, const PhysicalConstants& constants);

} // namespace qtherm::info
