#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "qtherm/constants.hpp"
#include "qtherm/field.hpp"

namespace qtherm::madelung {

struct PolarPair {
    ScalarField density; // carries the node mask
    ScalarField phase;   // unwrapped, units of action
    double masked_fraction = 0.0;
    bool phase_reliable = true;
};

/// Splits psi into density |psi|^2 and an unwrapped phase.  The phase is
/// integrated from wrapped pointwise differences (row sweep, then column
/// sweeps in 2-D) and shifted by the multiple of 2 pi hbar that zeroes it at
/// the density maximum, which keeps sqrt(p) exp(iS/hbar) an exact
/// reconstruction.  Points with p < node_epsilon * max(p) are masked; if more
/// than half the grid is masked the phase is flagged unreliable.
PolarPair polar_decompose(const ComplexField& psi, const PhysicalConstants& constants);

enum class QForm {
    sqrt_laplacian, // -(hbar^2/2m) laplacian(sqrt p) / sqrt p
    density_log     // (hbar^2/8m)(grad p / p)^2 - (hbar^2/4m) laplacian(p)/p
};

/// Quantum potential of a density.  The two forms are algebraically equal;
/// numerically the sqrt form tracks smooth moduli best while the density form
/// is immune to the modulus kink at sign-change nodes.  Outputs are zero on
/// masked points.
ScalarField quantum_potential(const ScalarField& density, const PhysicalConstants& constants,
                              QForm form = QForm::sqrt_laplacian);

/// v = grad S / m, evaluated through the unit phasor exp(iS/hbar) so winding
/// phases differentiate cleanly on periodic grids.  Masked points carry zero
/// velocity; check pair.phase_reliable before trusting a mostly-masked field.
VectorField velocity_field(const PolarPair& pair, const PhysicalConstants& constants);

struct MadelungResiduals {
    ScalarField continuity;      // d_t p + div(p grad S / m)
    ScalarField hamilton_jacobi; // d_t S + (grad S)^2/2m + V + Q
};

/// Centered residuals of the Madelung system between two states dt apart;
/// spatial terms are taken on the midpoint state (psi0 + psi1)/2.
MadelungResiduals madelung_residuals(const ComplexField& psi0, const ComplexField& psi1,
                                     double dt, const ScalarField& potential,
                                     const PhysicalConstants& constants);

struct WindingResult {
    long n = 0;
    double circulation = 0.0; // 2 pi hbar n
};

/// Winding number of the phase along a closed loop of grid points (2-D).
/// Vertices are implicitly closed back to the first; loops touching masked
/// density are rejected.
WindingResult wallstrom_winding(const ComplexField& psi,
                                const std::vector<std::array<std::size_t, 2>>& loop,
                                const PhysicalConstants& constants);

struct HamiltonianBreakdown {
    double kinetic = 0.0;   // integral (grad S)^2 / 2m * p
    double potential = 0.0; // integral V p
    double quantum = 0.0;   // integral (hbar^2 / 2m) (grad sqrt p)^2
    double total() const { return kinetic + potential + quantum; }
};

HamiltonianBreakdown hamiltonian_functional(const PolarPair& pair, const ScalarField& potential,
                                            const PhysicalConstants& constants);

struct WeakFormCheck {
    double lhs = 0.0; // central difference of U_q[p +/- eps phi] / (2 eps)
    double rhs = 0.0; // integral (delta U_q / delta p) phi
    double epsilon = 0.0;
};

/// Weak-form probe of delta U_q / delta p = (hbar^2/8m)(grad p/p)^2
/// - (hbar^2/4m) laplacian(p)/p against a mass-zero test function.
WeakFormCheck uq_functional_derivative(const ScalarField& density, const ScalarField& test_fn,
                                       const PhysicalConstants& constants);

} // namespace qtherm::madelung
