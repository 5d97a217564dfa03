#include <cmath>
#include <numbers>
#include <stdexcept>

#include "doctest.h"

#include "qtherm/calculus.hpp"
#include "qtherm/grid.hpp"

#include "helpers.hpp"

using namespace qtherm;
using qth_test::max_abs;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("grid construction rejects degenerate layouts") {
    CHECK_THROWS_AS(make_grid_1d(0.0, 1.0, 4, Boundary::periodic), std::invalid_argument);
    CHECK_THROWS_AS(make_grid_1d(1.0, 1.0, 64, Boundary::periodic), std::invalid_argument);
    CHECK_THROWS_AS(make_grid_1d(1.0, 0.0, 64, Boundary::periodic), std::invalid_argument);
    CHECK_THROWS_AS(make_grid_1d(0.0, 1.0, std::size_t{1} << 23, Boundary::periodic),
                    std::invalid_argument);
    std::array<AxisExtent, 2> ex{AxisExtent{0.0, 1.0}, AxisExtent{0.0, 1.0}};
    std::array<std::size_t, 2> pts{16, 16};
    CHECK_THROWS_AS(make_grid(3, ex, pts, Boundary::periodic), std::invalid_argument);
    CHECK_NOTHROW(make_grid(2, ex, pts, Boundary::periodic));
}

TEST_CASE("spacing conventions differ per boundary") {
    const Grid per = make_grid_1d(0.0, 1.0, 64, Boundary::periodic);
    CHECK(per.spacing(0) == doctest::Approx(1.0 / 64).epsilon(1e-15));
    CHECK(per.coordinate(0, 63) == doctest::Approx(1.0 - 1.0 / 64).epsilon(1e-15));

    const Grid dir = make_grid_1d(0.0, 1.0, 65, Boundary::dirichlet_zero);
    CHECK(dir.spacing(0) == doctest::Approx(1.0 / 64).epsilon(1e-15));
    CHECK(dir.coordinate(0, 64) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("integrate: rectangle rule is exact for trigonometric data") {
    const Grid grid = make_grid_1d(0.0, 1.0, 128, Boundary::periodic);
    ScalarField f(grid);
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double x = grid.coordinate(0, i);
        f.values[i] = 2.0 + std::sin(2.0 * pi * x) - 0.5 * std::cos(4.0 * pi * x);
    }
    CHECK(integrate(f) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("integrate: trapezoid rule on dirichlet grids") {
    const Grid grid = make_grid_1d(0.0, 1.0, 1001, Boundary::dirichlet_zero);
    ScalarField lin(grid), quad(grid);
    for (std::size_t i = 0; i < lin.size(); ++i) {
        const double x = grid.coordinate(0, i);
        lin.values[i] = x;
        quad.values[i] = x * x;
    }
    CHECK(integrate(lin) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(integrate(quad) == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
}

TEST_CASE("spectral gradient is exact for band-limited data") {
    const Grid grid = make_grid_1d(0.0, 2.0, 128, Boundary::periodic);
    ScalarField f(grid), expected(grid);
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double x = grid.coordinate(0, i);
        f.values[i] = std::sin(3.0 * pi * x) + std::cos(pi * x);
        expected.values[i] = 3.0 * pi * std::cos(3.0 * pi * x) - pi * std::sin(pi * x);
    }
    const ScalarField g = gradient_component(f, 0);
    double worst = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        worst = std::max(worst, std::abs(g.values[i] - expected.values[i]));
    }
    CHECK(worst < 1e-11);
}

TEST_CASE("stencil gradient and laplacian are exact for cubics") {
    const Grid grid = make_grid_1d(0.0, 2.0, 81, Boundary::dirichlet_zero);
    ScalarField f(grid);
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double x = grid.coordinate(0, i);
        f.values[i] = x * x * x - 2.0 * x * x + x;
    }
    const ScalarField g = gradient_component(f, 0);
    const ScalarField l = laplacian(f);
    double worst_g = 0.0, worst_l = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double x = grid.coordinate(0, i);
        worst_g = std::max(worst_g, std::abs(g.values[i] - (3.0 * x * x - 4.0 * x + 1.0)));
        worst_l = std::max(worst_l, std::abs(l.values[i] - (6.0 * x - 4.0)));
    }
    CHECK(worst_g < 1e-10);
    CHECK(worst_l < 1e-8);
}

TEST_CASE("laplacian agrees with divergence of the gradient") {
    const Grid grid = make_grid_1d(-8.0, 8.0, 256, Boundary::periodic);
    const ScalarField p = qth_test::mixture_density_field(grid);
    const ScalarField lap = laplacian(p);
    const ScalarField div_grad = divergence(gradient(p));
    double worst = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        worst = std::max(worst, std::abs(lap.values[i] - div_grad.values[i]));
    }
    CHECK(worst < 1e-8 * max_abs(lap.values));
}

TEST_CASE("integration by parts holds on periodic grids") {
    const Grid grid = make_grid_1d(0.0, 1.0, 128, Boundary::periodic);
    ScalarField f(grid), g(grid);
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double x = grid.coordinate(0, i);
        f.values[i] = std::sin(2.0 * pi * x) + 0.3 * std::cos(6.0 * pi * x);
        g.values[i] = std::cos(4.0 * pi * x) - 0.7 * std::sin(2.0 * pi * x);
    }
    ScalarField fg_prime(grid), f_prime_g(grid);
    const ScalarField df = gradient_component(f, 0);
    const ScalarField dg = gradient_component(g, 0);
    for (std::size_t i = 0; i < f.size(); ++i) {
        fg_prime.values[i] = f.values[i] * dg.values[i];
        f_prime_g.values[i] = df.values[i] * g.values[i];
    }
    CHECK(integrate(fg_prime) == doctest::Approx(-integrate(f_prime_g)).epsilon(1e-10));
}

TEST_CASE("shift_field translates exactly on periodic grids") {
    const Grid grid = make_grid_1d(0.0, 1.0, 64, Boundary::periodic);
    ScalarField f(grid);
    for (std::size_t i = 0; i < f.size(); ++i) {
        f.values[i] = std::sin(2.0 * pi * grid.coordinate(0, i));
    }
    const double h = 0.3;
    const ScalarField shifted = shift_field(f, 0, h);
    double worst = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double x = grid.coordinate(0, i);
        worst = std::max(worst, std::abs(shifted.values[i] - std::sin(2.0 * pi * (x + h))));
    }
    CHECK(worst < 1e-11);
    CHECK(shifted.mask.empty());
}

TEST_CASE("shift_field interpolates and masks on dirichlet grids") {
    const Grid grid = make_grid_1d(-6.0, 6.0, 241, Boundary::dirichlet_zero);
    ScalarField f(grid);
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double x = grid.coordinate(0, i);
        f.values[i] = std::exp(-x * x);
    }
    const double h = 0.07;
    const ScalarField shifted = shift_field(f, 0, h);
    double worst = 0.0;
    std::size_t masked = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (shifted.masked(i)) {
            ++masked;
            continue;
        }
        const double x = grid.coordinate(0, i);
        worst = std::max(worst, std::abs(shifted.values[i] - std::exp(-(x + h) * (x + h))));
    }
    CHECK(worst < 1e-8);
    CHECK(masked > 0);      // source points past the right wall
    CHECK(masked <= 4);
}

TEST_CASE("2-D gradients act along the right axes") {
    const Grid grid = make_grid_2d(AxisExtent{0.0, 1.0}, AxisExtent{0.0, 1.0}, 64, 64,
                                   Boundary::periodic);
    ScalarField f(grid);
    for (std::size_t i0 = 0; i0 < 64; ++i0) {
        for (std::size_t i1 = 0; i1 < 64; ++i1) {
            const double x = grid.coordinate(0, i0);
            const double y = grid.coordinate(1, i1);
            f.values[grid.flat_index(i0, i1)] = std::sin(2.0 * pi * x) * std::cos(2.0 * pi * y);
        }
    }
    const ScalarField dx = gradient_component(f, 0);
    const ScalarField dy = gradient_component(f, 1);
    double worst = 0.0;
    for (std::size_t i0 = 0; i0 < 64; ++i0) {
        for (std::size_t i1 = 0; i1 < 64; ++i1) {
            const double x = grid.coordinate(0, i0);
            const double y = grid.coordinate(1, i1);
            const std::size_t k = grid.flat_index(i0, i1);
            worst = std::max(
                worst, std::abs(dx.values[k] -
                                2.0 * pi * std::cos(2.0 * pi * x) * std::cos(2.0 * pi * y)));
            worst = std::max(
                worst, std::abs(dy.values[k] +
                                2.0 * pi * std::sin(2.0 * pi * x) * std::sin(2.0 * pi * y)));
        }
    }
    CHECK(worst < 1e-10);
}
