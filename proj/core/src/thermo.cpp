#include "qtherm/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qtherm/calculus.hpp"
#include "qtherm/errors.hpp"

namespace qtherm::thermo {

namespace {

double max_value(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, x);
    return m;
}

Mask node_mask(const ScalarField& p, double node_epsilon) {
    const double floor = node_epsilon * max_value(p.values);
    Mask mask(p.size(), 0);
    for (std::size_t i = 0; i < p.size(); ++i) mask[i] = p.values[i] < floor ? 1 : 0;
    return merge_masks(mask, p.mask);
}

ScalarField gradient_norm(const ScalarField& p) {
    const VectorField grad = gradient(p);
    ScalarField norm(p.grid);
    for (std::size_t i = 0; i < p.size(); ++i) {
        double sq = 0.0;
        for (int a = 0; a < p.grid.dim(); ++a) {
            sq += grad.component(a)[i] * grad.component(a)[i];
        }
        norm[i] = std::sqrt(sq);
    }
    return norm;
}

ScalarField energy_with_mask(const ScalarField& p, const PhysicalConstants& constants,
                             const Mask& mask) {
    const ScalarField g = gradient_norm(p);
    const double coeff = constants.hbar * constants.hbar / (8.0 * constants.mass);
    ScalarField energy(p.grid);
    energy.mask = mask;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (mask_at(mask, i)) continue;
        const double ratio = g.values[i] / p.values[i];
        energy[i] = coeff * ratio * ratio;
    }
    return energy;
}

void check_perturbation(const ScalarField& p, const ScalarField& delta_p,
                        bool require_mass_zero, const char* where) {
    require_same_grid(p.grid, delta_p.grid, where);
    const double bound = 1e-3 * max_value(p.values);
    double linf = 0.0;
    for (double v : delta_p.values) linf = std::max(linf, std::abs(v));
    if (linf > bound) {
        throw invariant_error(std::string(where) + ": ||delta_p||_inf = " + std::to_string(linf) +
                              " exceeds the smallness bound 1e-3 max(p)");
    }
    if (require_mass_zero) {
        const double mass = integrate(delta_p);
        if (std::abs(mass) > 1e-10) {
            throw invariant_error(std::string(where) + ": perturbation carries net mass " +
                                  std::to_string(mass));
        }
    }
}

} // namespace

ScalarField pointwise_energy(const ScalarField& density, const PhysicalConstants& constants) {
    constants.validate();
    return energy_with_mask(density, constants, node_mask(density, constants.node_epsilon));
}

ScalarField temperature_field(const ScalarField& density, const PhysicalConstants& constants) {
    ScalarField t = pointwise_energy(density, constants);
    for (auto& v : t.values) v *= 2.0 / constants.k_b;
    return t;
}

ScalarField temperature_field(const ComplexField& psi, const PhysicalConstants& constants) {
    ScalarField p(psi.grid);
    for (std::size_t i = 0; i < psi.size(); ++i) p[i] = std::norm(psi[i]);
    return temperature_field(p, constants);
}

ScalarField pointwise_entropy(const ScalarField& density, const PhysicalConstants& constants) {
    constants.validate();
    const Mask mask = node_mask(density, constants.node_epsilon);
    ScalarField s(density.grid);
    s.mask = mask;
    for (std::size_t i = 0; i < density.size(); ++i) {
        s[i] = mask_at(mask, i) ? 0.0 : -constants.k_b * std::log(density.values[i]);
    }
    return s;
}

ScalarField heat_exchange(const ScalarField& density, const ScalarField& delta_p,
                          const PhysicalConstants& constants, bool require_mass_zero) {
    constants.validate();
    check_perturbation(density, delta_p, require_mass_zero, "heat_exchange");
    const Mask mask = node_mask(density, constants.node_epsilon);
    const ScalarField temp = temperature_field(density, constants);
    ScalarField heat(density.grid);
    heat.mask = mask;
    for (std::size_t i = 0; i < density.size(); ++i) {
        if (mask_at(mask, i)) continue;
        heat[i] = -constants.k_b * temp.values[i] * delta_p.values[i] / density.values[i];
    }
    return heat;
}

ScalarField work_exchange(const ScalarField& density, const ScalarField& delta_p,
                          const PhysicalConstants& constants, bool require_mass_zero) {
    constants.validate();
    check_perturbation(density, delta_p, require_mass_zero, "work_exchange");

    const ScalarField g0 = gradient_norm(density);
    ScalarField perturbed = density;
    perturbed.mask = Mask{};
    for (std::size_t i = 0; i < density.size(); ++i) {
        perturbed[i] = density.values[i] + delta_p.values[i];
    }
    const ScalarField g1 = gradient_norm(perturbed);

    Mask mask = node_mask(density, constants.node_epsilon);
    const double grad_floor = 1e-10 * max_value(g0.values);
    for (std::size_t i = 0; i < density.size(); ++i) {
        if (g0.values[i] < grad_floor) mask[i] = 1;
    }

    const ScalarField temp = temperature_field(density, constants);
    ScalarField work(density.grid);
    work.mask = mask;
    for (std::size_t i = 0; i < density.size(); ++i) {
        if (mask_at(mask, i)) continue;
        work[i] = constants.k_b * temp.values[i] * (g1.values[i] - g0.values[i]) / g0.values[i];
    }
    return work;
}

ThermoLedger first_law_ledger(const ScalarField& density, const ScalarField& delta_p,
                              const PhysicalConstants& constants) {
    constants.validate();
    check_perturbation(density, delta_p, false, "first_law_ledger");

    ThermoLedger ledger;
    ledger.heat = heat_exchange(density, delta_p, constants);
    ledger.work = work_exchange(density, delta_p, constants);
    const Mask mask = merge_masks(ledger.heat.mask, ledger.work.mask);

    ScalarField perturbed = density;
    perturbed.mask = Mask{};
    for (std::size_t i = 0; i < density.size(); ++i) {
        perturbed[i] = density.values[i] + delta_p.values[i];
    }
    const ScalarField e0 = energy_with_mask(density, constants, mask);
    const ScalarField e1 = energy_with_mask(perturbed, constants, mask);

    ledger.delta_e = ScalarField(density.grid);
    ledger.delta_e.mask = mask;
    ledger.residual = ScalarField(density.grid);
    ledger.residual.mask = mask;
    for (std::size_t i = 0; i < density.size(); ++i) {
        if (mask_at(mask, i)) continue;
        ledger.delta_e[i] = e1.values[i] - e0.values[i];
        ledger.residual[i] = ledger.delta_e[i] - ledger.heat.values[i] - ledger.work.values[i];
    }
    ledger.heat.mask = mask;
    ledger.work.mask = mask;

    double linf = 0.0;
    for (double v : delta_p.values) linf = std::max(linf, std::abs(v));
    ledger.perturbation_scale = linf / max_value(density.values);
    return ledger;
}

AdditivityReport product_additivity_report(const ScalarField& p1, const ScalarField& p2,
                                           const ScalarField& delta_p1,
                                           const ScalarField& delta_p2,
                                           const PhysicalConstants& constants) {
    constants.validate();
    require_same_grid(p1.grid, delta_p1.grid, "product_additivity_report");
    require_same_grid(p2.grid, delta_p2.grid, "product_additivity_report");
    if (p1.grid.dim() != 1 || p2.grid.dim() != 1) {
        throw std::invalid_argument("product_additivity_report: factors must be 1-D");
    }
    if (p1.grid.boundary() != p2.grid.boundary()) {
        throw std::invalid_argument("product_additivity_report: mixed boundary types");
    }

    const Grid grid = make_grid_2d(p1.grid.extent(0), p2.grid.extent(0), p1.grid.points(0),
                                   p2.grid.points(0), p1.grid.boundary());

    ScalarField p12(grid);
    ScalarField dp12(grid);
    for (std::size_t i = 0; i < p1.size(); ++i) {
        for (std::size_t j = 0; j < p2.size(); ++j) {
            const std::size_t idx = grid.flat_index(i, j);
            p12[idx] = p1.values[i] * p2.values[j];
            dp12[idx] = delta_p1.values[i] * p2.values[j] + p1.values[i] * delta_p2.values[j];
        }
    }

    const Mask mask2d = node_mask(p12, constants.node_epsilon);

    AdditivityReport report;
    report.heat_lhs_field = ScalarField(grid);
    report.heat_lhs_field.mask = mask2d;
    report.heat_rhs_field = ScalarField(grid);
    report.heat_rhs_field.mask = mask2d;
    for (std::size_t i = 0; i < p1.size(); ++i) {
        for (std::size_t j = 0; j < p2.size(); ++j) {
            const std::size_t idx = grid.flat_index(i, j);
            if (mask_at(mask2d, idx)) continue;
            report.heat_lhs_field[idx] = dp12.values[idx] / p12.values[idx];
            report.heat_rhs_field[idx] = delta_p1.values[i] / p1.values[i] +
                                         delta_p2.values[j] / p2.values[j];
        }
    }

    // Work side: relative change of the gradient magnitude, true 2-D value
    // against the sum of the 1-D factor values.
    const ScalarField g0 = gradient_norm(p12);
    ScalarField perturbed = p12;
    for (std::size_t i = 0; i < perturbed.size(); ++i) {
        perturbed[i] = p12.values[i] + dp12.values[i];
    }
    const ScalarField g1 = gradient_norm(perturbed);

    auto relative_gradient_change = [](const ScalarField& p, const ScalarField& dp) {
        const ScalarField a0 = gradient_norm(p);
        ScalarField moved = p;
        for (std::size_t i = 0; i < moved.size(); ++i) {
            moved[i] = p.values[i] + dp.values[i];
        }
        const ScalarField a1 = gradient_norm(moved);
        ScalarField out(p.grid);
        const double floor = 1e-10 * *std::max_element(a0.values.begin(), a0.values.end());
        out.mask = Mask(p.size(), 0);
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (a0.values[i] < floor) {
                out.mask[i] = 1;
                continue;
            }
            out[i] = (a1.values[i] - a0.values[i]) / a0.values[i];
        }
        return out;
    };

    const ScalarField w1 = relative_gradient_change(p1, delta_p1);
    const ScalarField w2 = relative_gradient_change(p2, delta_p2);

    Mask work_mask = mask2d;
    const double grad_floor = 1e-10 * max_value(g0.values);
    report.work_lhs_field = ScalarField(grid);
    report.work_rhs_field = ScalarField(grid);
    for (std::size_t i = 0; i < p1.size(); ++i) {
        for (std::size_t j = 0; j < p2.size(); ++j) {
            const std::size_t idx = grid.flat_index(i, j);
            if (g0.values[idx] < grad_floor || w1.masked(i) || w2.masked(j)) {
                work_mask[idx] = 1;
                continue;
            }
            if (mask_at(work_mask, idx)) continue;
            report.work_lhs_field[idx] = (g1.values[idx] - g0.values[idx]) / g0.values[idx];
            report.work_rhs_field[idx] = w1.values[i] + w2.values[j];
        }
    }
    report.work_lhs_field.mask = work_mask;
    report.work_rhs_field.mask = work_mask;

    auto weighted_norms = [&](const ScalarField& lhs, const ScalarField& rhs, const Mask& m,
                              double& norm_lhs, double& norm_rhs, double& gap) {
        ScalarField lhs_sq(grid);
        ScalarField rhs_sq(grid);
        ScalarField diff_sq(grid);
        for (std::size_t i = 0; i < lhs.size(); ++i) {
            if (mask_at(m, i)) continue;
            const double w = p12.values[i];
            const double d = lhs.values[i] - rhs.values[i];
            lhs_sq[i] = lhs.values[i] * lhs.values[i] * w;
            rhs_sq[i] = rhs.values[i] * rhs.values[i] * w;
            diff_sq[i] = d * d * w;
        }
        norm_lhs = std::sqrt(integrate(lhs_sq));
        norm_rhs = std::sqrt(integrate(rhs_sq));
        gap = norm_lhs > 0.0 ? std::sqrt(integrate(diff_sq)) / norm_lhs : 0.0;
    };

    weighted_norms(report.heat_lhs_field, report.heat_rhs_field, mask2d, report.heat_lhs,
                   report.heat_rhs, report.heat_gap);
    weighted_norms(report.work_lhs_field, report.work_rhs_field, work_mask, report.work_lhs,
                   report.work_rhs, report.work_gap);

    report.heat_additive = report.heat_gap < 1e-8;
    report.work_additive = report.work_gap < 1e-8;
    return report;
}

} // namespace qtherm::thermo
