#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "qtherm/grid.hpp"

namespace qtherm {

using complexd = std::complex<double>;

/// Mask convention: empty vector means "no point excluded"; otherwise one
/// byte per grid point where a nonzero entry excludes the point from any
/// pointwise division or comparison.
using Mask = std::vector<std::uint8_t>;

inline bool mask_at(const Mask& m, std::size_t i) { return !m.empty() && m[i] != 0; }

inline Mask merge_masks(const Mask& a, const Mask& b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    Mask out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = (a[i] || b[i]) ? 1 : 0;
    return out;
}

inline double masked_fraction(const Mask& m, std::size_t total) {
    if (m.empty() || total == 0) return 0.0;
    std::size_t n = 0;
    for (auto v : m) n += (v != 0);
    return static_cast<double>(n) / static_cast<double>(total);
}

struct ScalarField {
    Grid grid;
    std::vector<double> values;
    Mask mask;

    ScalarField() = default;
    explicit ScalarField(const Grid& g) : grid(g), values(g.total_points(), 0.0) {}

    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }
    std::size_t size() const { return values.size(); }
    bool masked(std::size_t i) const { return mask_at(mask, i); }
};

struct ComplexField {
    Grid grid;
    std::vector<complexd> values;

    ComplexField() = default;
    explicit ComplexField(const Grid& g) : grid(g), values(g.total_points(), complexd{}) {}

    complexd& operator[](std::size_t i) { return values[i]; }
    const complexd& operator[](std::size_t i) const { return values[i]; }
    std::size_t size() const { return values.size(); }
};

struct VectorField {
    Grid grid;
    std::array<std::vector<double>, 2> components;
    Mask mask;

    VectorField() = default;
    explicit VectorField(const Grid& g) : grid(g) {
        for (int a = 0; a < g.dim(); ++a) {
            components[static_cast<std::size_t>(a)].assign(g.total_points(), 0.0);
        }
    }

    std::vector<double>& component(int axis) { return components[static_cast<std::size_t>(axis)]; }
    const std::vector<double>& component(int axis) const {
        return components[static_cast<std::size_t>(axis)];
    }
    bool masked(std::size_t i) const { return mask_at(mask, i); }
};

inline void require_same_grid(const Grid& a, const Grid& b, const char* where) {
    if (a != b) throw std::invalid_argument(std::string(where) + ": grids do not match");
}

} // namespace qtherm
