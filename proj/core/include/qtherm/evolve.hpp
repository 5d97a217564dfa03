#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "qtherm/constants.hpp"
#include "qtherm/field.hpp"

namespace qtherm::evolve {

enum class Scheme { split_step, crank_nicolson };

struct Snapshot {
    double t = 0.0;
    ComplexField psi;
};

/// Time series of states.  Snapshots always include the initial and final
/// states; intermediate states are kept every `snapshot_every` steps, so
/// memory scales with the snapshot count rather than the step count.
struct EvolutionResult {
    std::vector<Snapshot> snapshots;
    std::vector<double> norms; // total probability per snapshot
    double dt = 0.0;
    Scheme scheme = Scheme::split_step;
};

/// Strang-split spectral stepper for periodic grids: half potential kick,
/// full kinetic step in wavenumber space, half potential kick.  Unitary to
/// round-off and second order in dt.  The state must be normalized; the
/// potential must share the grid.  Throws std::invalid_argument for
/// non-periodic grids or dt <= 0, invariant_error if any snapshot norm
/// leaves 1 by more than 1e-8.
EvolutionResult split_step_evolve(const ComplexField& psi0, const ScalarField& potential,
                                  double dt, std::size_t steps, std::size_t snapshot_every,
                                  const PhysicalConstants& constants);

/// Implicit-midpoint stepper for dirichlet-zero grids, second order in dt
/// and in the three-point spatial stencil.  One dimension solves the
/// tridiagonal system directly; two dimensions use an iterative sparse
/// solver and report non-convergence through numerical_error with the
/// iteration count.  The state must vanish on the walls and be normalized.
/// Snapshot norms are required to stay within 1e-6 of 1.
EvolutionResult crank_nicolson_evolve(const ComplexField& psi0, const ScalarField& potential,
                                      double dt, std::size_t steps, std::size_t snapshot_every,
                                      const PhysicalConstants& constants);

using Position = std::array<double, 2>; // second entry unused on 1-D grids

struct TrajectorySet {
    std::vector<Position> seeds;
    std::vector<std::vector<Position>> paths; // per seed, aligned with `times`
    std::vector<double> times;                // snapshot times of the source result
    std::vector<std::uint8_t> truncated;      // 1 if the path hit a masked region
    double dt = 0.0;                          // spacing between path samples
};

/// Transports seeds through the velocity field of an evolution result with
/// one classical 4th-order step per snapshot interval.  Velocity is
/// Im(conj(psi) grad psi) * hbar / (m |psi|^2), linearly interpolated in
/// space and in time between snapshots; a path that reaches a masked
/// near-node cell (or a wall on dirichlet grids) is truncated and flagged,
/// as is a seed that starts in one.
TrajectorySet bohmian_trajectories(const EvolutionResult& result,
                                   const std::vector<Position>& seeds,
                                   const PhysicalConstants& constants);

} // namespace qtherm::evolve
