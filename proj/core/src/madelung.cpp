#include "qtherm/madelung.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qtherm/calculus.hpp"
#include "qtherm/errors.hpp"
#include "qtherm/information.hpp"

namespace qtherm::madelung {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

double wrap_to_pi(double d) { return d - two_pi * std::round(d / two_pi); }

ScalarField density_of(const ComplexField& psi) {
    ScalarField p(psi.grid);
    for (std::size_t i = 0; i < psi.size(); ++i) p[i] = std::norm(psi[i]);
    return p;
}

Mask node_mask(const ScalarField& p, double node_epsilon) {
    double maxp = 0.0;
    for (double v : p.values) maxp = std::max(maxp, v);
    const double floor = node_epsilon * maxp;
    Mask mask(p.size(), 0);
    for (std::size_t i = 0; i < p.size(); ++i) mask[i] = p.values[i] < floor ? 1 : 0;
    return mask;
}

ComplexField reconstruct(const PolarPair& pair, const PhysicalConstants& constants) {
    ComplexField psi(pair.density.grid);
    for (std::size_t i = 0; i < psi.size(); ++i) {
        const double amp = std::sqrt(pair.density.values[i]);
        const double theta = pair.phase.values[i] / constants.hbar;
        psi[i] = amp * complexd{std::cos(theta), std::sin(theta)};
    }
    return psi;
}

// Momentum density (hbar) Im(conj(psi) grad psi); equals p grad S without any
// division, so it stays regular through nodes.
VectorField momentum_density(const ComplexField& psi, const PhysicalConstants& constants) {
    VectorField flux(psi.grid);
    for (int a = 0; a < psi.grid.dim(); ++a) {
        const ComplexField dpsi = gradient_component(psi, a);
        auto& comp = flux.component(a);
        for (std::size_t i = 0; i < psi.size(); ++i) {
            comp[i] = constants.hbar * std::imag(std::conj(psi[i]) * dpsi[i]);
        }
    }
    return flux;
}

} // namespace

PolarPair polar_decompose(const ComplexField& psi, const PhysicalConstants& constants) {
    constants.validate();
    const Grid& g = psi.grid;

    PolarPair pair;
    pair.density = density_of(psi);
    pair.density.mask = node_mask(pair.density, constants.node_epsilon);
    pair.masked_fraction = masked_fraction(pair.density.mask, g.total_points());
    pair.phase_reliable = pair.masked_fraction <= 0.5;

    std::vector<double> theta(psi.size());
    for (std::size_t i = 0; i < psi.size(); ++i) theta[i] = std::arg(psi[i]);

    ScalarField phase(g);
    phase.mask = pair.density.mask;
    const double hbar = constants.hbar;
    const std::size_t n0 = g.points(0);
    const std::size_t n1 = g.dim() == 2 ? g.points(1) : 1;

    // First row along axis 1, then every column along axis 0.
    phase[g.flat_index(0, 0)] = hbar * theta[g.flat_index(0, 0)];
    for (std::size_t i1 = 1; i1 < n1; ++i1) {
        const std::size_t cur = g.flat_index(0, i1);
        const std::size_t prev = g.flat_index(0, i1 - 1);
        phase[cur] = phase[prev] + hbar * wrap_to_pi(theta[cur] - theta[prev]);
    }
    for (std::size_t i1 = 0; i1 < n1; ++i1) {
        for (std::size_t i0 = 1; i0 < n0; ++i0) {
            const std::size_t cur = g.flat_index(i0, i1);
            const std::size_t prev = g.flat_index(i0 - 1, i1);
            phase[cur] = phase[prev] + hbar * wrap_to_pi(theta[cur] - theta[prev]);
        }
    }

    std::size_t peak = 0;
    for (std::size_t i = 1; i < pair.density.size(); ++i) {
        if (pair.density.values[i] > pair.density.values[peak]) peak = i;
    }
    const double offset = two_pi * hbar * std::round(phase[peak] / (two_pi * hbar));
    if (offset != 0.0) {
        for (auto& v : phase.values) v -= offset;
    }

    pair.phase = std::move(phase);
    return pair;
}

ScalarField quantum_potential(const ScalarField& density, const PhysicalConstants& constants,
                              QForm form) {
    constants.validate();
    const double coeff = constants.hbar * constants.hbar / constants.mass;

    ScalarField out(density.grid);
    out.mask = merge_masks(density.mask, node_mask(density, constants.node_epsilon));

    if (form == QForm::sqrt_laplacian) {
        ScalarField root(density.grid);
        for (std::size_t i = 0; i < density.size(); ++i) {
            root[i] = std::sqrt(density.values[i]);
        }
        const ScalarField lap = laplacian(root);
        for (std::size_t i = 0; i < density.size(); ++i) {
            out[i] = mask_at(out.mask, i) ? 0.0 : -0.5 * coeff * lap.values[i] / root.values[i];
        }
        return out;
    }

    const VectorField grad = gradient(density);
    const ScalarField lap = laplacian(density);
    for (std::size_t i = 0; i < density.size(); ++i) {
        if (mask_at(out.mask, i)) {
            out[i] = 0.0;
            continue;
        }
        const double p = density.values[i];
        double grad_sq = 0.0;
        for (int a = 0; a < density.grid.dim(); ++a) {
            const double d = grad.component(a)[i];
            grad_sq += d * d;
        }
        out[i] = coeff * (0.125 * grad_sq / (p * p) - 0.25 * lap.values[i] / p);
    }
    return out;
}

VectorField velocity_field(const PolarPair& pair, const PhysicalConstants& constants) {
    constants.validate();
    const ComplexField psi = reconstruct(pair, constants);
    VectorField v = momentum_density(psi, constants);
    v.mask = pair.density.mask;
    for (int a = 0; a < psi.grid.dim(); ++a) {
        auto& comp = v.component(a);
        for (std::size_t i = 0; i < psi.size(); ++i) {
            comp[i] = v.masked(i)
                          ? 0.0
                          : comp[i] / (constants.mass * pair.density.values[i]);
        }
    }
    return v;
}

MadelungResiduals madelung_residuals(const ComplexField& psi0, const ComplexField& psi1,
                                     double dt, const ScalarField& potential,
                                     const PhysicalConstants& constants) {
    constants.validate();
    require_same_grid(psi0.grid, psi1.grid, "madelung_residuals");
    require_same_grid(psi0.grid, potential.grid, "madelung_residuals");
    if (!(dt > 0.0)) throw std::invalid_argument("madelung_residuals: dt must be > 0");

    const Grid& g = psi0.grid;
    const ScalarField p0 = density_of(psi0);
    const ScalarField p1 = density_of(psi1);
    ComplexField mid(g);
    for (std::size_t i = 0; i < mid.size(); ++i) mid[i] = 0.5 * (psi0[i] + psi1[i]);
    ScalarField pmid = density_of(mid);

    Mask mask = merge_masks(node_mask(p0, constants.node_epsilon),
                            node_mask(p1, constants.node_epsilon));
    mask = merge_masks(mask, node_mask(pmid, constants.node_epsilon));
    pmid.mask = mask;

    MadelungResiduals res;

    const VectorField flux = momentum_density(mid, constants); // p grad S at midpoint
    VectorField scaled = flux;
    for (int a = 0; a < g.dim(); ++a) {
        auto& comp = scaled.component(a);
        for (auto& v : comp) v /= constants.mass;
    }
    const ScalarField div_flux = divergence(scaled);
    res.continuity = ScalarField(g);
    res.continuity.mask = mask;
    for (std::size_t i = 0; i < g.total_points(); ++i) {
        res.continuity[i] = (p1.values[i] - p0.values[i]) / dt + div_flux.values[i];
    }

    const ScalarField q_mid = quantum_potential(pmid, constants, QForm::sqrt_laplacian);
    res.hamilton_jacobi = ScalarField(g);
    res.hamilton_jacobi.mask = mask;
    for (std::size_t i = 0; i < g.total_points(); ++i) {
        if (mask_at(mask, i)) {
            res.hamilton_jacobi[i] = 0.0;
            continue;
        }
        const double ds_dt = constants.hbar * std::arg(psi1[i] * std::conj(psi0[i])) / dt;
        double grad_s_sq = 0.0;
        for (int a = 0; a < g.dim(); ++a) {
            const double ps = flux.component(a)[i] / pmid.values[i]; // grad S
            grad_s_sq += ps * ps;
        }
        res.hamilton_jacobi[i] = ds_dt + grad_s_sq / (2.0 * constants.mass) +
                                 potential.values[i] + q_mid.values[i];
    }
    return res;
}

WindingResult wallstrom_winding(const ComplexField& psi,
                                const std::vector<std::array<std::size_t, 2>>& loop,
                                const PhysicalConstants& constants) {
    constants.validate();
    if (psi.grid.dim() != 2) {
        throw std::invalid_argument("wallstrom_winding: requires a 2-D grid");
    }
    if (loop.size() < 3) {
        throw std::invalid_argument("wallstrom_winding: loop needs at least 3 vertices");
    }
    const ScalarField p = density_of(psi);
    const Mask mask = node_mask(p, constants.node_epsilon);

    std::vector<std::size_t> flat;
    flat.reserve(loop.size() + 1);
    for (const auto& v : loop) {
        if (v[0] >= psi.grid.points(0) || (psi.grid.dim() == 2 && v[1] >= psi.grid.points(1))) {
            throw std::invalid_argument("wallstrom_winding: loop vertex outside grid");
        }
        const std::size_t idx = psi.grid.flat_index(v[0], v[1]);
        if (mask_at(mask, idx)) {
            throw invariant_error("wallstrom_winding: loop crosses masked density region");
        }
        flat.push_back(idx);
    }
    if (flat.front() != flat.back()) flat.push_back(flat.front());

    double accumulated = 0.0;
    for (std::size_t k = 0; k + 1 < flat.size(); ++k) {
        accumulated += std::arg(psi[flat[k + 1]] * std::conj(psi[flat[k]]));
    }
    WindingResult result;
    result.n = std::lround(accumulated / two_pi);
    result.circulation = two_pi * constants.hbar * static_cast<double>(result.n);
    return result;
}

HamiltonianBreakdown hamiltonian_impl(const PolarPair& pair, const ScalarField& potential,
                                      const PhysicalConstants& constants) {
    const Grid& g = pair.density.grid;
    const VectorField v = velocity_field(pair, constants);

    ScalarField kinetic(g);
    for (std::size_t i = 0; i < g.total_points(); ++i) {
        if (pair.density.masked(i)) continue;
        double v_sq = 0.0;
        for (int a = 0; a < g.dim(); ++a) {
            v_sq += v.component(a)[i] * v.component(a)[i];
        }
        kinetic[i] = 0.5 * constants.mass * v_sq * pair.density.values[i];
    }

    ScalarField pot(g);
    for (std::size_t i = 0; i < g.total_points(); ++i) {
        pot[i] = potential.values[i] * pair.density.values[i];
    }

    // (hbar^2/8m) (grad p / p)^2 p rewritten as (hbar^2/2m) (grad sqrt p)^2,
    // which needs no division and stays integrable at nodes.
    ScalarField root(g);
    for (std::size_t i = 0; i < g.total_points(); ++i) {
        root[i] = std::sqrt(pair.density.values[i]);
    }
    const VectorField droot = gradient(root);
    ScalarField uq(g);
    const double coeff = constants.hbar * constants.hbar / (2.0 * constants.mass);
    for (std::size_t i = 0; i < g.total_points(); ++i) {
        double grad_sq = 0.0;
        for (int a = 0; a < g.dim(); ++a) {
            grad_sq += droot.component(a)[i] * droot.component(a)[i];
        }
        uq[i] = coeff * grad_sq;
    }

    HamiltonianBreakdown out;
    out.kinetic = integrate(kinetic);
    out.potential = integrate(pot);
    out.quantum = integrate(uq);
    return out;
}

HamiltonianBreakdown hamiltonian_functional(const PolarPair& pair, const ScalarField& potential,
                                            const PhysicalConstants& constants) {
    constants.validate();
    require_same_grid(pair.density.grid, potential.grid, "hamiltonian_functional");
    return hamiltonian_impl(pair, potential, constants);
}

WeakFormCheck uq_functional_derivative(const ScalarField& density, const ScalarField& test_fn,
                                       const PhysicalConstants& constants) {
    constants.validate();
    require_same_grid(density.grid, test_fn.grid, "uq_functional_derivative");

    ScalarField abs_fn(test_fn.grid);
    for (std::size_t i = 0; i < test_fn.size(); ++i) abs_fn[i] = std::abs(test_fn.values[i]);
    const double mass = integrate(test_fn);
    const double scale = integrate(abs_fn);
    if (std::abs(mass) > 1e-8 * std::max(scale, 1e-300)) {
        throw invariant_error("uq_functional_derivative: test function carries net mass " +
                              std::to_string(mass));
    }

    double maxp = 0.0;
    for (double v : density.values) maxp = std::max(maxp, v);
    const double epsilon = 1e-6 * maxp;

    ScalarField plus = density;
    ScalarField minus = density;
    for (std::size_t i = 0; i < density.size(); ++i) {
        plus[i] = density.values[i] + epsilon * test_fn.values[i];
        minus[i] = density.values[i] - epsilon * test_fn.values[i];
        if (!density.masked(i) && (plus[i] <= 0.0 || minus[i] <= 0.0)) {
            throw invariant_error(
                "uq_functional_derivative: perturbed density loses positivity");
        }
    }

    const double u_plus = info::informational_energy(plus, constants).u_q;
    const double u_minus = info::informational_energy(minus, constants).u_q;

    const ScalarField q = quantum_potential(density, constants, QForm::density_log);
    ScalarField integrand(density.grid);
    for (std::size_t i = 0; i < density.size(); ++i) {
        integrand[i] = q.masked(i) ? 0.0 : q.values[i] * test_fn.values[i];
    }

    WeakFormCheck check;
    check.epsilon = epsilon;
    check.lhs = (u_plus - u_minus) / (2.0 * epsilon);
    check.rhs = integrate(integrand);
    return check;
}

} // namespace qtherm::madelung
