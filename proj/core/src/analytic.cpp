#include "qtherm/analytic.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qtherm::analytic {

namespace {
constexpr double pi = std::numbers::pi;
}

void GaussianPacketParams::validate() const {
    if (!(a > 0.0) || !std::isfinite(a)) {
        throw std::invalid_argument("GaussianPacketParams: width a must be > 0");
    }
    constants.validate();
}

void BoxParams::validate() const {
    if (!(a > 0.0) || !std::isfinite(a)) {
        throw std::invalid_argument("BoxParams: width a must be > 0");
    }
    if (n < 1) {
        throw std::invalid_argument("BoxParams: quantum number n must be >= 1, got " +
                                    std::to_string(n));
    }
    constants.validate();
}

complexd gaussian_width_factor(const GaussianPacketParams& p, double t) {
    const double tau = 2.0 * p.constants.hbar * t / (p.constants.mass * p.a * p.a);
    return complexd{1.0, tau};
}

double gaussian_sigma_sq(const GaussianPacketParams& p, double t) {
    const complexd c = gaussian_width_factor(p, t);
    return 0.25 * p.a * p.a * std::norm(c);
}

complexd gaussian_amplitude(const GaussianPacketParams& p, double x, double t) {
    const complexd c = gaussian_width_factor(p, t);
    const double prefactor = std::pow(2.0 / (pi * p.a * p.a), 0.25);
    return prefactor / std::sqrt(c) * std::exp(-x * x / (p.a * p.a * c));
}

double gaussian_density(const GaussianPacketParams& p, double x, double t) {
    const double beta_sq = std::norm(gaussian_width_factor(p, t));
    const double aa = p.a * p.a * beta_sq;
    return std::sqrt(2.0 / (pi * aa)) * std::exp(-2.0 * x * x / aa);
}

double gaussian_velocity(const GaussianPacketParams& p, double x, double t) {
    const double hbar = p.constants.hbar;
    const double m = p.constants.mass;
    const double beta_sq = std::norm(gaussian_width_factor(p, t));
    return x * 4.0 * hbar * hbar * t / (m * m * p.a * p.a * p.a * p.a * beta_sq);
}

ComplexField gaussian_packet(const GaussianPacketParams& p, const Grid& grid, double t) {
    p.validate();
    if (grid.dim() != 1) {
        throw std::invalid_argument("gaussian_packet: expected a 1-D grid");
    }
    ComplexField psi(grid);
    for (std::size_t i = 0; i < grid.points(0); ++i) {
        psi[i] = gaussian_amplitude(p, grid.coordinate(0, i), t);
    }
    return psi;
}

double box_eigenstate_value(const BoxParams& p, double x) {
    return std::sqrt(2.0 / p.a) * std::sin(p.n * pi * x / p.a);
}

ComplexField box_eigenstate(const BoxParams& p, const Grid& grid) {
    p.validate();
    if (grid.dim() != 1) {
        throw std::invalid_argument("box_eigenstate: expected a 1-D grid");
    }
    ComplexField psi(grid);
    for (std::size_t i = 0; i < grid.points(0); ++i) {
        psi[i] = complexd{box_eigenstate_value(p, grid.coordinate(0, i)), 0.0};
    }
    return psi;
}

double box_energy(const BoxParams& p) {
    const double hbar = p.constants.hbar;
    const double k = p.n * pi / p.a;
    return hbar * hbar * k * k / (2.0 * p.constants.mass);
}

double analytic_temperature(const GaussianPacketParams& p, double x, double t) {
    const double hbar = p.constants.hbar;
    const double m = p.constants.mass;
    const double beta_sq = std::norm(gaussian_width_factor(p, t));
    const double a4 = p.a * p.a * p.a * p.a;
    return 4.0 * hbar * hbar * x * x / (p.constants.k_b * m * a4 * beta_sq * beta_sq);
}

double analytic_temperature(const BoxParams& p, double x) {
    const double arg = p.n * pi * x / p.a;
    const double s = std::sin(arg);
    if (s == 0.0) {
        throw std::domain_error("analytic_temperature: box temperature diverges at node x = " +
                                std::to_string(x));
    }
    const double hbar = p.constants.hbar;
    const double cot = std::cos(arg) / s;
    const double value = hbar * hbar * p.n * p.n * pi * pi /
                         (p.constants.k_b * p.constants.mass * p.a * p.a) * cot * cot;
    if (!std::isfinite(value)) {
        throw std::domain_error("analytic_temperature: box temperature overflow near node x = " +
                                std::to_string(x));
    }
    return value;
}

} // namespace qtherm::analytic
