#pragma once

#include "qtherm/constants.hpp"
#include "qtherm/field.hpp"
#include "qtherm/grid.hpp"

namespace qtherm::analytic {

/// Free 1-D wave packet psi(x, 0) = (2 / (pi a^2))^{1/4} exp(-x^2 / a^2).
/// Initial density variance is a^2/4.
struct GaussianPacketParams {
    double a = 1.0;
    PhysicalConstants constants{};

    void validate() const;
};

/// Hard-wall eigenstate psi_n(x) = sqrt(2/a) sin(n pi x / a) on [0, a].
struct BoxParams {
    double a = 1.0;
    int n = 1;
    PhysicalConstants constants{};

    void validate() const;
};

/// Complex width factor c(t) = 1 + 2 i hbar t / (m a^2); |c|^2 is the squared
/// spreading factor of the packet envelope.
complexd gaussian_width_factor(const GaussianPacketParams& p, double t);

/// Density variance sigma(t)^2 = (a^2/4) (1 + (2 hbar t / (m a^2))^2).
double gaussian_sigma_sq(const GaussianPacketParams& p, double t);

complexd gaussian_amplitude(const GaussianPacketParams& p, double x, double t);
double gaussian_density(const GaussianPacketParams& p, double x, double t);

/// Drift velocity of the exact packet, x * 4 hbar^2 t / (m^2 a^4 |c|^2).
double gaussian_velocity(const GaussianPacketParams& p, double x, double t);

ComplexField gaussian_packet(const GaussianPacketParams& p, const Grid& grid, double t);

ComplexField box_eigenstate(const BoxParams& p, const Grid& grid);
double box_eigenstate_value(const BoxParams& p, double x);

/// E_n = n^2 pi^2 hbar^2 / (2 m a^2).
double box_energy(const BoxParams& p);

/// Wave-function temperature of the spreading packet,
/// (4 hbar^2 / (k_b m)) x^2 / (a^4 |c(t)|^4).
double analytic_temperature(const GaussianPacketParams& p, double x, double t);

/// Wave-function temperature of a box eigenstate,
/// (hbar^2 n^2 pi^2 / (k_b m a^2)) cot^2(n pi x / a).
/// Throws std::domain_error at the nodes where the value diverges.
double analytic_temperature(const BoxParams& p, double x);

} // namespace qtherm::analytic
