#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

#include <benchmark/benchmark.h>

#include "qtherm/analytic.hpp"
#include "qtherm/calculus.hpp"
#include "qtherm/evolve.hpp"
#include "qtherm/grid.hpp"
#include "qtherm/information.hpp"
#include "qtherm/madelung.hpp"
#include "qtherm/thermo.hpp"

using namespace qtherm;

namespace {

const PhysicalConstants kConstants = make_constants(1.0, 1.0, 1.0);

ScalarField packet_density(const Grid& grid, double t = 0.0) {
    const analytic::GaussianPacketParams packet{1.0, kConstants};
    ScalarField p(grid);
    for (std::size_t i = 0; i < grid.points(0); ++i) {
        p.values[i] = analytic::gaussian_density(packet, grid.coordinate(0, i), t);
    }
    return p;
}

ComplexField packet_state(const Grid& grid, double t) {
    return analytic::gaussian_packet({1.0, kConstants}, grid, t);
}

void bm_spectral_gradient(benchmark::State& state) {
    const Grid grid = make_grid_1d(-16.0, 16.0, 2048, Boundary::periodic);
    const ScalarField p = packet_density(grid);
    for (auto _ : state) {
        benchmark::DoNotOptimize(gradient(p));
    }
}

void bm_stencil_gradient(benchmark::State& state) {
    const Grid grid = make_grid_1d(0.0, 1.0, 2048, Boundary::dirichlet_zero);
    ScalarField p(grid);
    for (std::size_t i = 0; i < grid.points(0); ++i) {
        const double s = std::sin(std::numbers::pi * grid.coordinate(0, i));
        p.values[i] = 2.0 * s * s;
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(gradient(p));
    }
}

void bm_laplacian_2d(benchmark::State& state) {
    const Grid grid = make_grid_2d({-8.0, 8.0}, {-8.0, 8.0}, 256, 256, Boundary::periodic);
    ScalarField p(grid);
    for (std::size_t i0 = 0; i0 < grid.points(0); ++i0) {
        for (std::size_t i1 = 0; i1 < grid.points(1); ++i1) {
            const double x = grid.coordinate(0, i0);
            const double y = grid.coordinate(1, i1);
            p.values[grid.flat_index(i0, i1)] = std::exp(-0.5 * (x * x + y * y));
        }
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(laplacian(p));
    }
}

void bm_quantum_potential(benchmark::State& state) {
    const Grid grid = make_grid_1d(-16.0, 16.0, 2048, Boundary::periodic);
    const ScalarField p = packet_density(grid);
    for (auto _ : state) {
        benchmark::DoNotOptimize(madelung::quantum_potential(p, kConstants));
    }
}

void bm_temperature_field(benchmark::State& state) {
    const Grid grid = make_grid_1d(-16.0, 16.0, 2048, Boundary::periodic);
    const ScalarField p = packet_density(grid);
    for (auto _ : state) {
        benchmark::DoNotOptimize(thermo::temperature_field(p, kConstants));
    }
}

void bm_first_law_ledger(benchmark::State& state) {
    const Grid grid = make_grid_1d(-16.0, 16.0, 2048, Boundary::periodic);
    const ScalarField p = packet_density(grid);
    ScalarField dp(grid);
    for (std::size_t i = 0; i < grid.points(0); ++i) {
        dp.values[i] = 1e-4 * std::sin(1.3 * grid.coordinate(0, i)) * p.values[i];
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(thermo::first_law_ledger(p, dp, kConstants));
    }
}

void bm_fisher_information(benchmark::State& state) {
    const Grid grid = make_grid_1d(-16.0, 16.0, 2048, Boundary::periodic);
    const ScalarField p = packet_density(grid);
    for (auto _ : state) {
        benchmark::DoNotOptimize(info::fisher_information(p));
    }
}

void bm_js_distance(benchmark::State& state) {
    const Grid grid = make_grid_1d(-16.0, 16.0, 2048, Boundary::periodic);
    const ScalarField a = packet_density(grid, 0.0);
    const ScalarField b = packet_density(grid, 0.5);
    for (auto _ : state) {
        benchmark::DoNotOptimize(info::js_distance(a, b));
    }
}

void bm_polar_decompose(benchmark::State& state) {
    const Grid grid = make_grid_1d(-16.0, 16.0, 2048, Boundary::periodic);
    const ComplexField psi = packet_state(grid, 0.3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(madelung::polar_decompose(psi, kConstants));
    }
}

void bm_velocity_field(benchmark::State& state) {
    const Grid grid = make_grid_1d(-16.0, 16.0, 2048, Boundary::periodic);
    const auto pair = madelung::polar_decompose(packet_state(grid, 0.3), kConstants);
    for (auto _ : state) {
        benchmark::DoNotOptimize(madelung::velocity_field(pair, kConstants));
    }
}

void bm_split_step(benchmark::State& state) {
    const Grid grid = make_grid_1d(-16.0, 16.0, 2048, Boundary::periodic);
    const ComplexField psi0 = packet_state(grid, 0.0);
    const ScalarField potential(grid);
    const auto steps = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            evolve::split_step_evolve(psi0, potential, 1e-3, steps, steps, kConstants));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(steps));
}

void bm_crank_nicolson(benchmark::State& state) {
    const Grid grid = make_grid_1d(0.0, 1.0, 2049, Boundary::dirichlet_zero);
    const ComplexField psi0 = analytic::box_eigenstate({1.0, 1, kConstants}, grid);
    const ScalarField potential(grid);
    const auto steps = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            evolve::crank_nicolson_evolve(psi0, potential, 1e-5, steps, steps, kConstants));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(steps));
}

BENCHMARK(bm_spectral_gradient);
BENCHMARK(bm_stencil_gradient);
BENCHMARK(bm_laplacian_2d);
BENCHMARK(bm_quantum_potential);
BENCHMARK(bm_temperature_field);
BENCHMARK(bm_first_law_ledger);
BENCHMARK(bm_fisher_information);
BENCHMARK(bm_js_distance);
BENCHMARK(bm_polar_decompose);
BENCHMARK(bm_velocity_field);
BENCHMARK(bm_split_step)->Arg(32);
BENCHMARK(bm_crank_nicolson)->Arg(32);

} // namespace

BENCHMARK_MAIN();
