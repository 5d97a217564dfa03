#pragma once

#include <stdexcept>

namespace qtherm {

/// Unit system for a run.  Everything defaults to 1 so the natural-unit test
/// cases read literally.  `gamma` converts squared information speed into
/// energy and equals hbar^2/mass unless overridden.  `node_epsilon` is the
/// relative density threshold below which points count as probability nodes.
struct PhysicalConstants {
    double hbar = 1.0;
    double mass = 1.0;
    double k_b = 1.0;
    double gamma = 1.0;
    double node_epsilon = 1e-10;

    void validate() const {
        if (!(hbar > 0.0) || !(mass > 0.0) || !(k_b > 0.0) || !(gamma > 0.0)) {
            throw std::invalid_argument("PhysicalConstants: hbar, mass, k_b, gamma must be > 0");
        }
        if (!(node_epsilon > 0.0) || !(node_epsilon < 1.0)) {
            throw std::invalid_argument("PhysicalConstants: node_epsilon must lie in (0, 1)");
        }
    }
};

inline PhysicalConstants make_constants(double hbar, double mass, double k_b,
                                        double node_epsilon = 1e-10) {
    PhysicalConstants c;
    c.hbar = hbar;
    c.mass = mass;
    c.k_b = k_b;
    c.gamma = hbar * hbar / mass;
    c.node_epsilon = node_epsilon;
    c.validate();
    return c;
}

} // namespace qtherm
