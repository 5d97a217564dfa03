#pragma once

#include "qtherm/field.hpp"
#include "qtherm/grid.hpp"

namespace qtherm {

/// Partial derivative along one axis.  Periodic axes use spectral (FFT)
/// differentiation; dirichlet axes use 4th-order central stencils with
/// one-sided closures at the walls.
ScalarField gradient_component(const ScalarField& f, int axis);
ComplexField gradient_component(const ComplexField& f, int axis);

VectorField gradient(const ScalarField& f);

ScalarField laplacian(const ScalarField& f);
ComplexField laplacian(const ComplexField& f);

ScalarField divergence(const VectorField& v);

/// Rectangle rule on periodic grids, trapezoid on dirichlet grids.
/// Kahan-compensated; ignores masks (callers zero excluded contributions).
double integrate(const ScalarField& f);

/// Samples f at x + h along `axis`.  Periodic axes shift spectrally (exact
/// for band-limited data); dirichlet axes interpolate with a 6-point Lagrange
/// stencil and mask points whose source location leaves the domain.
ScalarField shift_field(const ScalarField& f, int axis, double h);

namespace detail {
/// Finite-difference weights for the m-th derivative (m = 0 interpolates) at
/// z over the given nodes, after Fornberg's recurrence.
std::vector<double> fd_weights(double z, const std::vector<double>& nodes, int m);
} // namespace detail

} // namespace qtherm
