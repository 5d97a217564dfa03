// Acceptance suite: one line per criterion, measured values against pinned
// tolerances.  Exit code is the number of failed criteria.
//
// usage: qtherm_acceptance <cli-binary> <golden-dir> <scratch-dir>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "qtherm/analytic.hpp"
#include "qtherm/calculus.hpp"
#include "qtherm/constants.hpp"
#include "qtherm/errors.hpp"
#include "qtherm/evolve.hpp"
#include "qtherm/field.hpp"
#include "qtherm/grid.hpp"
#include "qtherm/information.hpp"
#include "qtherm/madelung.hpp"
#include "qtherm/thermo.hpp"

namespace fs = std::filesystem;
using namespace qtherm;
using json = nlohmann::json;

namespace {

constexpr double pi = std::numbers::pi;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

ScalarField sampled_density(const Grid& grid, const std::function<double(double)>& f) {
    ScalarField p(grid);
    for (std::size_t i = 0; i < grid.points(0); ++i) {
        p.values[i] = f(grid.coordinate(0, i));
    }
    const double mass = integrate(p);
    for (auto& v : p.values) v /= mass;
    return p;
}

ScalarField density_of(const ComplexField& psi) {
    ScalarField p(psi.grid);
    for (std::size_t i = 0; i < psi.values.size(); ++i) p.values[i] = std::norm(psi.values[i]);
    return p;
}

/// delta_p = eps (s - <s>_p) p, which integrates to zero.
ScalarField mass_zero_perturbation(const ScalarField& p, const std::function<double(double)>& s,
                                   double eps) {
    ScalarField sp(p.grid);
    for (std::size_t i = 0; i < p.values.size(); ++i) {
        sp.values[i] = s(p.grid.coordinate(0, i)) * p.values[i];
    }
    const double mean = integrate(sp) / integrate(p);
    ScalarField dp(p.grid);
    for (std::size_t i = 0; i < p.values.size(); ++i) {
        dp.values[i] = eps * (s(p.grid.coordinate(0, i)) - mean) * p.values[i];
    }
    return dp;
}

double max_abs_unmasked(const ScalarField& f) {
    double m = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        if (!f.masked(i)) m = std::max(m, std::abs(f.values[i]));
    }
    return m;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double l2_distance(const ComplexField& a, const ComplexField& b) {
    ScalarField d(a.grid);
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        d.values[i] = std::norm(a.values[i] - b.values[i]);
    }
    return std::sqrt(integrate(d));
}

// ---------------------------------------------------------------------------

Outcome criterion_box_temperature() {
    const auto constants = make_constants(1.0, 1.0, 1.0);
    const Grid grid = make_grid_1d(0.0, 1.0, 2048, Boundary::dirichlet_zero);
    constexpr double tol = 1e-6;

    double worst = 0.0;
    for (int n : {1, 2}) {
        const analytic::BoxParams box{1.0, n, constants};
        const ComplexField psi = analytic::box_eigenstate(box, grid);
        const ScalarField t = thermo::temperature_field(psi, constants);
        for (std::size_t i = 0; i < t.values.size(); ++i) {
            if (t.masked(i)) continue;
            double want = 0.0;
            try {
                want = analytic::analytic_temperature(box, grid.coordinate(0, i));
            } catch (const std::domain_error&) {
                continue;
            }
            worst = std::max(worst, std::abs(t.values[i] - want) / want);
        }
    }
    return {worst < tol, "max rel err " + fmt(worst) + " vs n^2 pi^2 cot^2 (tol " + fmt(tol) + ")"};
}

Outcome criterion_box_quantum_potential() {
    auto constants = make_constants(1.0, 1.0, 1.0);
    constants.node_epsilon = 1e-4; // widen the node window for the curvature form
    const Grid grid = make_grid_1d(0.0, 1.0, 2048, Boundary::dirichlet_zero);
    constexpr double tol = 1e-6;

    double worst_q = 0.0;
    for (int n : {1, 2}) {
        const analytic::BoxParams box{1.0, n, constants};
        const ScalarField p = density_of(analytic::box_eigenstate(box, grid));
        const ScalarField q = madelung::quantum_potential(p, constants);
        const double want = 0.5 * n * n * pi * pi;
        for (std::size_t i = 0; i < q.values.size(); ++i) {
            if (q.masked(i)) continue;
            worst_q = std::max(worst_q, std::abs(q.values[i] - want) / want);
        }
    }

    const analytic::BoxParams ground{1.0, 1, constants};
    const auto pair = madelung::polar_decompose(analytic::box_eigenstate(ground, grid), constants);
    const auto ham = madelung::hamiltonian_functional(pair, ScalarField(grid), constants);
    const double want = 0.5 * pi * pi;
    const double rel_total = std::abs(ham.total() - want) / want;
    const double rel_uq = std::abs(ham.quantum - want) / want;

    const bool pass = worst_q < tol && rel_total < tol && rel_uq < tol;
    return {pass, "Q rel " + fmt(worst_q) + ", H rel " + fmt(rel_total) + ", U_q rel " +
                      fmt(rel_uq) + " (tol " + fmt(tol) + ")"};
}

Outcome criterion_gaussian_information() {
    const auto constants = make_constants(1.0, 1.0, 1.0);
    const Grid grid = make_grid_1d(-8.0, 8.0, 1024, Boundary::periodic);
    const analytic::GaussianPacketParams packet{1.0, constants};
    constexpr double tol = 1e-6;

    ScalarField p(grid);
    for (std::size_t i = 0; i < grid.points(0); ++i) {
        p.values[i] = analytic::gaussian_density(packet, grid.coordinate(0, i), 0.0);
    }

    const double fisher = info::fisher_information(p).total;
    const double nu = info::nu_vector(p, info::NuMode::closed_form)[0];
    const auto energy = info::informational_energy(p, constants);
    const double entropy = info::differential_entropy(p);

    const double want_entropy = 0.5 * std::log(pi * std::numbers::e / 2.0);
    double worst = std::abs(fisher - 4.0) / 4.0;
    worst = std::max(worst, std::abs(nu - 1.0 / std::sqrt(2.0)) * std::sqrt(2.0));
    worst = std::max(worst, std::abs(energy.u_q - 0.5) / 0.5);
    worst = std::max(worst, std::abs(energy.e_inf - 0.5) / 0.5);
    worst = std::max(worst, std::abs(entropy - want_entropy) / want_entropy);

    return {worst < tol, "fisher/nu/U_q/E_inf/entropy worst rel " + fmt(worst) + " (tol " +
                             fmt(tol) + ")"};
}

Outcome criterion_nu_limit_convergence() {
    const auto constants = make_constants(1.0, 1.0, 1.0);
    const Grid grid = make_grid_1d(-8.0, 8.0, 32768, Boundary::periodic);
    const analytic::GaussianPacketParams packet{1.0, constants};
    constexpr double tol_defect = 1e-3;
    constexpr double order_min = 1.97;

    ScalarField p(grid);
    for (std::size_t i = 0; i < grid.points(0); ++i) {
        p.values[i] = analytic::gaussian_density(packet, grid.coordinate(0, i), 0.0);
    }

    const double nu_closed = info::nu_vector(p, info::NuMode::closed_form)[0];
    const std::vector<double> hs{4e-3, 2e-3, 1e-3};
    std::vector<double> defect;
    for (double h : hs) {
        const double nu_h = info::nu_vector(p, info::NuMode::limit, h)[0];
        defect.push_back(std::abs(nu_h - nu_closed) / nu_closed);
    }
    const double o01 = std::log2(defect[0] / defect[1]);
    const double o12 = std::log2(defect[1] / defect[2]);

    const bool pass = defect[2] < tol_defect && o01 >= order_min && o12 >= order_min;
    return {pass, "defect(1e-3) " + fmt(defect[2]) + " (tol " + fmt(tol_defect) + "), orders " +
                      fmt(o01) + "/" + fmt(o12) + " (min " + fmt(order_min) + ")"};
}

Outcome criterion_first_law_ledger() {
    const auto constants = make_constants(1.0, 1.0, 1.0);
    constexpr double slope_tol = 0.2;
    constexpr double rel_tol = 1e-3;

    struct Case {
        const char* label;
        ScalarField p;
        std::function<double(double)> shape;
    };
    std::vector<Case> cases;

    const Grid loose = make_grid_1d(-16.0, 16.0, 2048, Boundary::periodic);
    const analytic::GaussianPacketParams packet{1.0, constants};
    cases.push_back({"gaussian",
                     sampled_density(loose,
                                     [&](double x) {
                                         return analytic::gaussian_density(packet, x, 0.0);
                                     }),
                     [](double x) { return std::sin(1.3 * x); }});

    const Grid wall = make_grid_1d(0.0, 1.0, 2048, Boundary::dirichlet_zero);
    cases.push_back({"box",
                     sampled_density(wall,
                                     [](double x) {
                                         const double s = std::sin(pi * x);
                                         return 2.0 * s * s;
                                     }),
                     [](double x) { return std::cos(2.0 * pi * x); }});

    std::string detail;
    bool pass = true;
    for (const auto& c : cases) {
        const std::vector<double> eps{8e-4, 4e-4, 2e-4};
        std::vector<double> res_norm;
        for (double e : eps) {
            const ScalarField dp = mass_zero_perturbation(c.p, c.shape, e);
            const auto ledger = thermo::first_law_ledger(c.p, dp, constants);
            res_norm.push_back(max_abs_unmasked(ledger.residual));
        }
        const double slope = loglog_slope(eps, res_norm);

        const ScalarField dp = mass_zero_perturbation(c.p, c.shape, 1e-4);
        const auto ledger = thermo::first_law_ledger(c.p, dp, constants);
        const double rel = max_abs_unmasked(ledger.residual) / max_abs_unmasked(ledger.delta_e);

        pass = pass && std::abs(slope - 2.0) <= slope_tol && rel < rel_tol;
        if (!detail.empty()) detail += "; ";
        detail += std::string(c.label) + " slope " + fmt(slope) + ", rel " + fmt(rel);
    }
    return {pass, detail + " (slope 2+-" + fmt(slope_tol) + ", rel tol " + fmt(rel_tol) + ")"};
}

Outcome criterion_functional_derivative() {
    const auto constants = make_constants(1.0, 1.0, 1.0);
    const Grid grid = make_grid_1d(-8.0, 8.0, 2048, Boundary::periodic);
    constexpr double tol = 1e-5;

    std::vector<ScalarField> bases;
    const analytic::GaussianPacketParams packet{1.0, constants};
    bases.push_back(sampled_density(grid, [&](double x) {
        return analytic::gaussian_density(packet, x + 0.5, 0.0);
    }));
    bases.push_back(sampled_density(grid, [](double x) {
        return 0.6 * std::exp(-2.0 * (x - 1.0) * (x - 1.0)) +
               0.4 * std::exp(-1.5 * (x + 1.5) * (x + 1.5));
    }));

    // No shape may be odd about a base's symmetry point, or the weak-form
    // integral vanishes and the relative measure loses meaning.
    const std::vector<std::function<double(double)>> shapes{
        [](double x) { return std::exp(0.25 * x); },
        [](double x) { return std::sin(1.3 * x); },
        [](double x) { return x * x; },
        [](double x) { return std::cos(0.9 * x); },
        [](double x) { return x * x * x - 2.0 * x; },
    };

    double worst = 0.0;
    for (const auto& p : bases) {
        for (const auto& s : shapes) {
            const ScalarField phi = mass_zero_perturbation(p, s, 1.0);
            const auto check = madelung::uq_functional_derivative(p, phi, constants);
            worst = std::max(worst, std::abs(check.lhs - check.rhs) / std::abs(check.rhs));
        }
    }
    return {worst < tol,
            "10 weak-form probes, worst rel " + fmt(worst) + " (tol " + fmt(tol) + ")"};
}

Outcome criterion_evolution_fidelity() {
    const auto constants = make_constants(1.0, 1.0, 1.0);
    const Grid grid = make_grid_1d(-16.0, 16.0, 2048, Boundary::periodic);
    const analytic::GaussianPacketParams packet{1.0, constants};
    constexpr double l2_tol = 1e-6;
    constexpr double norm_tol = 1e-12;
    constexpr double ham_tol = 1e-5;
    constexpr double order_lo = 1.9;
    constexpr double order_hi = 2.1;

    const ComplexField psi0 = analytic::gaussian_packet(packet, grid, 0.0);
    const ScalarField free_v(grid);
    const auto result = evolve::split_step_evolve(psi0, free_v, 1e-3, 500, 500, constants);

    const double l2 = l2_distance(result.snapshots.back().psi,
                                  analytic::gaussian_packet(packet, grid, 0.5));
    double norm_drift = 0.0;
    for (double n : result.norms) norm_drift = std::max(norm_drift, std::abs(n - 1.0));

    const auto h0 = madelung::hamiltonian_functional(
        madelung::polar_decompose(result.snapshots.front().psi, constants), free_v, constants);
    const auto h1 = madelung::hamiltonian_functional(
        madelung::polar_decompose(result.snapshots.back().psi, constants), free_v, constants);
    const double ham_rel = std::abs(h1.total() - h0.total()) / h0.total();

    // Free evolution is exact for the spectral stepper, so probe the dt order
    // against a fine-step reference in a harmonic well.
    ScalarField well(grid);
    for (std::size_t i = 0; i < grid.points(0); ++i) {
        const double x = grid.coordinate(0, i);
        well.values[i] = 0.5 * x * x;
    }
    auto final_state = [&](double dt, std::size_t steps) {
        return evolve::split_step_evolve(psi0, well, dt, steps, steps, constants)
            .snapshots.back()
            .psi;
    };
    const ComplexField ref = final_state(1.25e-4, 1600);
    const double e1 = l2_distance(final_state(4e-3, 50), ref);
    const double e2 = l2_distance(final_state(2e-3, 100), ref);
    const double e3 = l2_distance(final_state(1e-3, 200), ref);
    const double o12 = std::log2(e1 / e2);
    const double o23 = std::log2(e2 / e3);

    const bool orders_ok = o12 >= order_lo && o12 <= order_hi && o23 >= order_lo && o23 <= order_hi;
    const bool pass = l2 < l2_tol && norm_drift < norm_tol && ham_rel < ham_tol && orders_ok;
    return {pass, "L2 " + fmt(l2) + ", norm drift " + fmt(norm_drift) + ", H rel " + fmt(ham_rel) +
                      ", dt orders " + fmt(o12) + "/" + fmt(o23)};
}

Outcome criterion_thermalization_trend() {
    const auto constants = make_constants(1.0, 1.0, 1.0);
    const Grid grid = make_grid_1d(-16.0, 16.0, 2048, Boundary::periodic);
    const analytic::GaussianPacketParams packet{1.0, constants};
    constexpr double tol = 1e-5;
    constexpr double window = 1e-6; // keep p >= window * max(p)

    const ComplexField psi0 = analytic::gaussian_packet(packet, grid, 0.0);
    const ScalarField free_v(grid);
    const auto result = evolve::split_step_evolve(psi0, free_v, 1e-3, 1000, 250, constants);

    const std::vector<double> times{0.0, 0.25, 0.5, 1.0};
    std::vector<double> peak;
    double worst = 0.0;
    for (double t : times) {
        const evolve::Snapshot* snap = nullptr;
        for (const auto& s : result.snapshots) {
            if (std::abs(s.t - t) < 1e-12) snap = &s;
        }
        if (snap == nullptr) return {false, "missing snapshot at t = " + fmt(t)};

        const ScalarField p = density_of(snap->psi);
        const ScalarField temp = thermo::temperature_field(p, constants);
        const double pmax = *std::max_element(p.values.begin(), p.values.end());

        double m = 0.0;
        for (std::size_t i = 0; i < p.values.size(); ++i) {
            if (temp.masked(i) || p.values[i] < window * pmax) continue;
            m = std::max(m, temp.values[i]);
        }
        peak.push_back(m);

        for (std::size_t i = 0; i < p.values.size(); ++i) {
            if (temp.masked(i) || p.values[i] < window * pmax) continue;
            const double want =
                analytic::analytic_temperature(packet, grid.coordinate(0, i), t);
            const double rel =
                std::abs(temp.values[i] - want) / std::max(want, 1e-9 * m);
            worst = std::max(worst, rel);
        }
    }

    bool monotone = true;
    for (std::size_t i = 1; i < peak.size(); ++i) monotone = monotone && peak[i] < peak[i - 1];

    std::string trend;
    for (double m : peak) trend += (trend.empty() ? "" : " > ") + fmt(m);
    return {monotone && worst < tol, "windowed max " + trend + (monotone ? "" : " NOT monotone") +
                                         ", closed-form rel " + fmt(worst) + " (tol " + fmt(tol) +
                                         ")"};
}

Outcome criterion_product_additivity() {
    const auto constants = make_constants(1.0, 1.0, 1.0);
    const Grid grid = make_grid_1d(-8.0, 8.0, 256, Boundary::periodic);
    constexpr double heat_tol = 1e-10;
    constexpr double work_min = 0.01;

    const auto unit = [](double x) { return std::exp(-0.5 * x * x); };
    const ScalarField p1 = sampled_density(grid, unit);
    const ScalarField p2 = sampled_density(grid, unit);

    ScalarField dp1(grid);
    ScalarField dp2(grid);
    for (std::size_t i = 0; i < grid.points(0); ++i) {
        const double x = grid.coordinate(0, i);
        dp1.values[i] = 1e-4 * x * p1.values[i];
        dp2.values[i] = 2e-4 * (x * x - 1.0) * p2.values[i];
    }

    const auto report = thermo::product_additivity_report(p1, p2, dp1, dp2, constants);

    // x1 = x2 = 0.5 sits well inside both supports.
    const std::size_t j = static_cast<std::size_t>(std::llround((0.5 + 8.0) / grid.spacing(0)));
    const std::size_t flat = report.work_lhs_field.grid.flat_index(j, j);
    if (report.work_lhs_field.masked(flat)) return {false, "probe point masked"};
    const double work_point_gap =
        std::abs(report.work_lhs_field.values[flat] - report.work_rhs_field.values[flat]) /
        std::abs(report.work_lhs_field.values[flat]);

    const bool pass = report.heat_gap < heat_tol && report.heat_additive && !report.work_additive &&
                      work_point_gap > work_min;
    return {pass, "heat gap " + fmt(report.heat_gap) + " (tol " + fmt(heat_tol) +
                      "), work gap at (0.5,0.5) " + fmt(work_point_gap) + " (min " +
                      fmt(work_min) + ")"};
}

Outcome criterion_equivariance() {
    const auto constants = make_constants(1.0, 1.0, 1.0);
    const Grid grid = make_grid_1d(-16.0, 16.0, 2048, Boundary::periodic);
    const analytic::GaussianPacketParams packet{1.0, constants};
    constexpr std::size_t n_paths = 10000;
    constexpr double ks_critical = 0.016276; // 1% level, N = 1e4

    const ComplexField psi0 = analytic::gaussian_packet(packet, grid, 0.0);
    const ScalarField free_v(grid);
    const auto result = evolve::split_step_evolve(psi0, free_v, 1e-3, 500, 10, constants);

    auto cdf = [](double x, double sigma) {
        return 0.5 * (1.0 + std::erf(x / (sigma * std::sqrt(2.0))));
    };
    auto inv_cdf = [&](double u, double sigma) {
        double lo = -8.0, hi = 8.0;
        for (int it = 0; it < 100; ++it) {
            const double mid = 0.5 * (lo + hi);
            (cdf(mid, sigma) < u ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    };

    // Stratified quantiles of p(., 0) stand in for an iid |psi|^2 sample.
    const double sigma0 = std::sqrt(analytic::gaussian_sigma_sq(packet, 0.0));
    std::vector<evolve::Position> seeds;
    seeds.reserve(n_paths);
    for (std::size_t i = 0; i < n_paths; ++i) {
        const double u = (static_cast<double>(i) + 0.5) / n_paths;
        seeds.push_back({inv_cdf(u, sigma0), 0.0});
    }

    const auto set = evolve::bohmian_trajectories(result, seeds, constants);
    std::size_t truncated = 0;
    std::vector<double> finals;
    finals.reserve(n_paths);
    for (std::size_t s = 0; s < n_paths; ++s) {
        if (set.truncated[s]) {
            ++truncated;
            continue;
        }
        finals.push_back(set.paths[s].back()[0]);
    }
    std::sort(finals.begin(), finals.end());

    const double sigma_t = std::sqrt(analytic::gaussian_sigma_sq(packet, 0.5));
    double ks = 0.0;
    const double n = static_cast<double>(finals.size());
    for (std::size_t i = 0; i < finals.size(); ++i) {
        const double f = cdf(finals[i], sigma_t);
        ks = std::max(ks, std::abs(f - static_cast<double>(i) / n));
        ks = std::max(ks, std::abs(static_cast<double>(i + 1) / n - f));
    }

    const bool pass = truncated == 0 && ks < ks_critical;
    return {pass, "KS " + fmt(ks) + " vs critical " + fmt(ks_critical) + ", truncated " +
                      std::to_string(truncated)};
}

Outcome criterion_winding() {
    const auto constants = make_constants(1.0, 1.0, 1.0);
    const Grid grid = make_grid_2d({-6.0, 6.0}, {-6.0, 6.0}, 128, 128, Boundary::periodic);

    ComplexField vortex(grid);
    ComplexField positive(grid);
    for (std::size_t i0 = 0; i0 < grid.points(0); ++i0) {
        for (std::size_t i1 = 0; i1 < grid.points(1); ++i1) {
            const double x = grid.coordinate(0, i0);
            const double y = grid.coordinate(1, i1);
            const double env = std::exp(-0.5 * (x * x + y * y));
            vortex.values[grid.flat_index(i0, i1)] = complexd{x, y} * env;
            positive.values[grid.flat_index(i0, i1)] = env;
        }
    }

    auto circle = [&](double cx, double cy, double r) {
        std::vector<std::array<std::size_t, 2>> loop;
        for (int k = 0; k < 16; ++k) {
            const double theta = 2.0 * pi * k / 16;
            loop.push_back({static_cast<std::size_t>(std::llround(
                                (cx + r * std::cos(theta) + 6.0) / grid.spacing(0))),
                            static_cast<std::size_t>(std::llround(
                                (cy + r * std::sin(theta) + 6.0) / grid.spacing(1)))});
        }
        return loop;
    };

    const std::vector<std::vector<std::array<std::size_t, 2>>> loops{
        circle(0.0, 0.0, 0.8), circle(0.0, 0.0, 1.5), circle(0.0, 0.0, 2.2),
        circle(2.5, 2.5, 0.8)};

    bool pass = true;
    std::string windings;
    for (std::size_t k = 0; k < loops.size(); ++k) {
        const auto w = madelung::wallstrom_winding(vortex, loops[k], constants);
        const long want = k < 3 ? 1 : 0;
        pass = pass && w.n == want;
        if (k < 3) {
            pass = pass &&
                   std::abs(w.circulation - 2.0 * pi * constants.hbar) < 1e-12 * 2.0 * pi;
        }
        windings += (windings.empty() ? "" : ",") + std::to_string(w.n);
    }
    for (const auto& loop : loops) {
        const auto w = madelung::wallstrom_winding(positive, loop, constants);
        pass = pass && w.n == 0;
    }
    return {pass, "vortex windings " + windings + " (want 1,1,1,0), real state all 0"};
}

Outcome criterion_invariance() {
    const auto constants = make_constants(1.0, 1.0, 1.0);
    const Grid grid = make_grid_1d(-16.0, 16.0, 2048, Boundary::periodic);
    const analytic::GaussianPacketParams packet{1.0, constants};
    constexpr double tol = 1e-12;

    const ScalarField p = density_of(analytic::gaussian_packet(packet, grid, 0.3));
    ScalarField p4(grid);
    for (std::size_t i = 0; i < p.values.size(); ++i) p4.values[i] = 4.0 * p.values[i];

    const ScalarField q1 = madelung::quantum_potential(p, constants);
    const ScalarField q2 = madelung::quantum_potential(p4, constants);
    const ScalarField t1 = thermo::temperature_field(p, constants);
    const ScalarField t2 = thermo::temperature_field(p4, constants);

    const double q_scale = max_abs_unmasked(q1);
    const double t_scale = max_abs_unmasked(t1);
    double rescale_err = 0.0;
    for (std::size_t i = 0; i < p.values.size(); ++i) {
        if (q1.masked(i)) continue;
        rescale_err = std::max(rescale_err, std::abs(q2.values[i] - q1.values[i]) / q_scale);
        rescale_err = std::max(rescale_err, std::abs(t2.values[i] - t1.values[i]) / t_scale);
    }

    double hbar_err = 0.0;
    for (double hbar : {0.5, 0.25}) {
        const auto scaled = make_constants(hbar, 1.0, 1.0);
        const ScalarField th = thermo::temperature_field(p, scaled);
        for (std::size_t i = 0; i < p.values.size(); ++i) {
            if (th.masked(i)) continue;
            const double want = hbar * hbar * t1.values[i];
            hbar_err = std::max(hbar_err,
                                std::abs(th.values[i] - want) / (hbar * hbar * t_scale));
        }
    }

    ScalarField uniform(grid);
    for (auto& v : uniform.values) v = 1.0 / grid.length(0);
    const double flat_max = max_abs_unmasked(thermo::temperature_field(uniform, constants));

    const ScalarField t0 = thermo::temperature_field(density_of(
                                analytic::gaussian_packet(packet, grid, 0.0)),
                            constants);
    const double peak = std::abs(t0.values[grid.points(0) / 2]); // x = 0, the density maximum

    const bool pass = rescale_err <= tol && hbar_err <= tol && flat_max == 0.0 && peak < 1e-20;
    return {pass, "rescale err " + fmt(rescale_err) + ", hbar^2 err " + fmt(hbar_err) +
                      ", uniform max " + fmt(flat_max) + ", peak " + fmt(peak)};
}

// --- CLI determinism ---------------------------------------------------------

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

std::vector<std::string> list_files(const fs::path& dir) {
    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file()) names.push_back(entry.path().filename().string());
    }
    std::sort(names.begin(), names.end());
    return names;
}

/// resolved_config.json echoes the output directory, which legitimately
/// differs between runs; everything else must match byte for byte.
bool outputs_match(const fs::path& a, const fs::path& b, std::string& why) {
    const auto names_a = list_files(a);
    const auto names_b = list_files(b);
    if (names_a != names_b) {
        why = "file lists differ between " + a.string() + " and " + b.string();
        return false;
    }
    for (const auto& name : names_a) {
        std::string left = read_file(a / name);
        std::string right = read_file(b / name);
        if (name == "resolved_config.json") {
            json lj = json::parse(left);
            json rj = json::parse(right);
            lj["outputs"].erase("directory");
            rj["outputs"].erase("directory");
            if (lj != rj) {
                why = name + " differs beyond the directory echo";
                return false;
            }
            continue;
        }
        if (left != right) {
            why = name + " differs";
            return false;
        }
    }
    return true;
}

Outcome criterion_cli_golden(const std::string& cli, const fs::path& golden,
                             const fs::path& scratch) {
    for (const std::string example : {"box", "gaussian-free"}) {
        const fs::path run1 = scratch / (example + "_run1");
        const fs::path run2 = scratch / (example + "_run2");
        fs::remove_all(run1);
        fs::remove_all(run2);
        for (const fs::path& dir : {run1, run2}) {
            const std::string cmd = "\"" + cli + "\" run " + example + " --out \"" +
                                    dir.string() + "\" > /dev/null 2>&1";
            if (std::system(cmd.c_str()) != 0) {
                return {false, "CLI failed on " + example};
            }
        }
        std::string why;
        if (!outputs_match(run1, run2, why)) {
            return {false, example + " not deterministic: " + why};
        }
        if (!outputs_match(run1, golden / example, why)) {
            return {false, example + " deviates from golden: " + why};
        }
    }
    return {true, "box and gaussian-free byte-identical across runs and against goldens"};
}

} // namespace

int main(int argc, char** argv) {
    if (argc != 4) {
        std::fprintf(stderr, "usage: %s <cli-binary> <golden-dir> <scratch-dir>\n", argv[0]);
        return 2;
    }
    const std::string cli = argv[1];
    const fs::path golden = argv[2];
    const fs::path scratch = argv[3];
    fs::create_directories(scratch);

    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"box temperature", criterion_box_temperature},
        {"box quantum potential and hamiltonian", criterion_box_quantum_potential},
        {"gaussian information set", criterion_gaussian_information},
        {"nu limit convergence", criterion_nu_limit_convergence},
        {"first law ledger", criterion_first_law_ledger},
        {"functional derivative identity", criterion_functional_derivative},
        {"free evolution fidelity", criterion_evolution_fidelity},
        {"thermalization trend", criterion_thermalization_trend},
        {"product density additivity", criterion_product_additivity},
        {"trajectory equivariance", criterion_equivariance},
        {"wallstrom winding", criterion_winding},
        {"invariance suite", criterion_invariance},
        {"cli determinism and goldens",
         [&] { return criterion_cli_golden(cli, golden, scratch); }},
    };

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome outcome;
        try {
            outcome = criteria[i].second();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        std::printf("[%2zu/13] %s  %s: %s\n", i + 1, outcome.pass ? "pass" : "FAIL",
                    criteria[i].first, outcome.detail.c_str());
        std::fflush(stdout);
        if (!outcome.pass) ++failed;
    }
    std::printf("%d of 13 criteria failed\n", failed);
    return failed;
}
