#include "qtherm/information.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qtherm/calculus.hpp"
#include "qtherm/errors.hpp"

namespace qtherm::info {

namespace {

double max_value(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, x);
    return m;
}

void require_normalized(const ScalarField& p, const char* where) {
    const double mass = integrate(p);
    if (std::abs(mass - 1.0) > 1e-6) {
        throw invariant_error(std::string(where) + ": density integrates to " +
                              std::to_string(mass) + ", expected 1 within 1e-6");
    }
}

double entropy_unchecked(const ScalarField& p, double floor_eps) {
    const double floor = floor_eps * max_value(p.values);
    ScalarField integrand(p.grid);
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double v = p.values[i];
        integrand[i] = (v > floor && !p.masked(i)) ? -v * std::log(v) : 0.0;
    }
    return integrate(integrand);
}

/// Entropy over an explicit inclusion set.  Densities compared against each
/// other must share one set, or their tail cutoffs land on different grid
/// points and the difference of entropies picks up spurious O(h * p_floor)
/// noise that swamps quadratic convergence studies.
double entropy_on(const ScalarField& p, const Mask& excluded) {
    ScalarField integrand(p.grid);
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double v = p.values[i];
        integrand[i] = (!mask_at(excluded, i) && v > 0.0) ? -v * std::log(v) : 0.0;
    }
    return integrate(integrand);
}

/// Excludes points lying below both support floors (and any input mask), so
/// the kept set is the union of the two supports.
Mask common_exclusion(const ScalarField& p1, const ScalarField& p2, double floor_eps) {
    const double f1 = floor_eps * max_value(p1.values);
    const double f2 = floor_eps * max_value(p2.values);
    Mask excluded = merge_masks(p1.mask, p2.mask);
    if (excluded.empty()) excluded.assign(p1.size(), 0);
    for (std::size_t i = 0; i < p1.size(); ++i) {
        if (p1.values[i] <= f1 && p2.values[i] <= f2) excluded[i] = 1;
    }
    return excluded;
}

} // namespace

double differential_entropy(const ScalarField& p, double floor_eps) {
    require_normalized(p, "differential_entropy");
    return entropy_unchecked(p, floor_eps);
}

double js_distance(const ScalarField& p1, const ScalarField& p2, double floor_eps) {
    require_same_grid(p1.grid, p2.grid, "js_distance");
    require_normalized(p1, "js_distance");
    require_normalized(p2, "js_distance");

    const Mask excluded = common_exclusion(p1, p2, floor_eps);
    ScalarField mix(p1.grid);
    for (std::size_t i = 0; i < mix.size(); ++i) {
        mix[i] = 0.5 * (p1.values[i] + p2.values[i]);
    }
    const double radicand = entropy_on(mix, excluded) - 0.5 * entropy_on(p1, excluded) -
                            0.5 * entropy_on(p2, excluded);
    if (radicand < -1e-10) {
        throw numerical_error("js_distance: radicand " + std::to_string(radicand) +
                              " below tolerance; entropies inconsistent");
    }
    return std::sqrt(std::max(radicand, 0.0));
}

FisherReport fisher_information(const ScalarField& p, double floor_eps) {
    const double floor = floor_eps * max_value(p.values);
    FisherReport report;
    for (int a = 0; a < p.grid.dim(); ++a) {
        const ScalarField dp = gradient_component(p, a);
        ScalarField integrand(p.grid);
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double denom = std::max(p.values[i], floor);
            integrand[i] = p.masked(i) ? 0.0 : dp.values[i] * dp.values[i] / denom;
        }
        const double value = integrate(integrand);
        report.per_axis[static_cast<std::size_t>(a)] = value;
        report.total += value;
    }
    return report;
}

std::array<double, 2> nu_vector(const ScalarField& p, NuMode mode, double h, double floor_eps) {
    std::array<double, 2> nu{0.0, 0.0};
    if (mode == NuMode::closed_form) {
        const FisherReport fisher = fisher_information(p, floor_eps);
        for (int a = 0; a < p.grid.dim(); ++a) {
            nu[static_cast<std::size_t>(a)] =
                std::sqrt(fisher.per_axis[static_cast<std::size_t>(a)] / 8.0);
        }
        return nu;
    }

    require_normalized(p, "nu_vector");
    for (int a = 0; a < p.grid.dim(); ++a) {
        if (!(h > 0.0)) {
            throw std::invalid_argument("nu_vector: limit mode requires h > 0");
        }
        if (h < 2.0 * p.grid.spacing(a)) {
            throw std::invalid_argument(
                "nu_vector: shift h below 2 * grid spacing is unresolvable on axis " +
                std::to_string(a));
        }
        const ScalarField shifted = shift_field(p, a, h);
        if (p.grid.periodic()) {
            nu[static_cast<std::size_t>(a)] = js_distance(shifted, p, floor_eps) / h;
            continue;
        }
        // Dirichlet shifts mask the strip whose source left the domain, so
        // the distance is taken on the valid overlap.
        const Mask excluded = common_exclusion(p, shifted, floor_eps);
        ScalarField mix(p.grid);
        for (std::size_t i = 0; i < mix.size(); ++i) {
            mix[i] = 0.5 * (p.values[i] + shifted.values[i]);
        }
        const double radicand = entropy_on(mix, excluded) - 0.5 * entropy_on(p, excluded) -
                                0.5 * entropy_on(shifted, excluded);
        if (radicand < -1e-10) {
            throw numerical_error("nu_vector: negative radicand in limit mode");
        }
        nu[static_cast<std::size_t>(a)] = std::sqrt(std::max(radicand, 0.0)) / h;
    }
    return nu;
}

InfoEnergy informational_energy(const ScalarField& p, const PhysicalConstants& constants) {
    constants.validate();
    const FisherReport fisher = fisher_information(p, constants.node_epsilon);
    InfoEnergy out;
    out.u_q = constants.hbar * constants.hbar / (8.0 * constants.mass) * fisher.total;
    out.e_inf = constants.gamma * fisher.total / 8.0;
    return out;
}

} // namespace qtherm::info
