#pragma once

#include <array>

#include "qtherm/constants.hpp"
#include "qtherm/field.hpp"

namespace qtherm::thermo {

/// Pointwise energy E = (hbar^2 / 8m) (grad p / p)^2; zero on masked points.
ScalarField pointwise_energy(const ScalarField& density, const PhysicalConstants& constants);

/// Equipartition temperature T = 2 E / k_b, produced on the same formula path
/// as pointwise_energy so the identity is exact.
ScalarField temperature_field(const ScalarField& density, const PhysicalConstants& constants);
ScalarField temperature_field(const ComplexField& psi, const PhysicalConstants& constants);

/// Pointwise entropy S = -k_b log p; masked at nodes.
ScalarField pointwise_entropy(const ScalarField& density, const PhysicalConstants& constants);

/// Heat exchanged under a density perturbation, -k_b T delta_p / p.
/// Rejects perturbations with ||delta_p||_inf > 1e-3 max(p); optionally
/// requires integrate(delta_p) = 0.
ScalarField heat_exchange(const ScalarField& density, const ScalarField& delta_p,
                          const PhysicalConstants& constants, bool require_mass_zero = false);

/// Work exchanged, k_b T * delta||grad p|| / ||grad p||, with the gradient
/// magnitude change evaluated from gradients of p and p + delta_p.  Points
/// with ||grad p|| < 1e-10 max ||grad p|| join the mask.
ScalarField work_exchange(const ScalarField& density, const ScalarField& delta_p,
                          const PhysicalConstants& constants, bool require_mass_zero = false);

struct ThermoLedger {
    ScalarField delta_e;  // E[p + delta_p] - E[p]
    ScalarField heat;
    ScalarField work;
    ScalarField residual; // delta_e - heat - work, O(eps^2)
    double perturbation_scale = 0.0;
};

ThermoLedger first_law_ledger(const ScalarField& density, const ScalarField& delta_p,
                              const PhysicalConstants& constants);

/// Additivity audit on the product state p12(x1, x2) = p1(x1) p2(x2) with
/// delta_p12 = delta_p1 p2 + p1 delta_p2.  lhs/rhs aggregates are
/// p12-weighted L2 norms of the relative-variation fields; gaps are relative
/// L2 distances between lhs and rhs fields.  The pointwise fields are kept so
/// callers can probe individual points.
struct AdditivityReport {
    double heat_lhs = 0.0;
    double heat_rhs = 0.0;
    double heat_gap = 0.0;
    double work_lhs = 0.0;
    double work_rhs = 0.0;
    double work_gap = 0.0;
    bool heat_additive = false;
    bool work_additive = false;
    ScalarField heat_lhs_field;
    ScalarField heat_rhs_field;
    ScalarField work_lhs_field;
    ScalarField work_rhs_field;
};

AdditivityReport product_additivity_report(const ScalarField& p1, const ScalarField& p2,
                                           const ScalarField& delta_p1,
                                           const ScalarField& delta_p2,
                                           const PhysicalConstants& constants);

} // namespace qtherm::thermo
