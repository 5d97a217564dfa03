#include "qtherm/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>

#include "qtherm/calculus.hpp"
#include "qtherm/errors.hpp"
#include "qtherm/fft.hpp"

namespace qtherm::evolve {

namespace {

struct LineWalk {
    std::size_t count = 1;     // number of lines along the axis
    std::size_t n = 0;         // points per line
    std::size_t stride = 1;    // flat stride between neighbors on a line
    std::size_t line_step = 0; // flat offset between consecutive line starts
};

LineWalk line_walk(const Grid& g, int axis) {
    LineWalk w;
    w.n = g.points(axis);
    if (g.dim() == 1) return w;
    if (axis == 0) {
        w.count = g.points(1);
        w.stride = g.points(1);
        w.line_step = 1;
    } else {
        w.count = g.points(0);
        w.stride = 1;
        w.line_step = g.points(1);
    }
    return w;
}

double total_probability(const ComplexField& psi) {
    ScalarField p(psi.grid);
    for (std::size_t i = 0; i < psi.size(); ++i) p[i] = std::norm(psi[i]);
    return integrate(p);
}

void append_snapshot(EvolutionResult& result, double t, const ComplexField& psi,
                     double norm_tol) {
    const double norm = total_probability(psi);
    if (std::abs(norm - 1.0) > norm_tol) {
        throw invariant_error("evolution norm drifted to " + std::to_string(norm) + " at t = " +
                              std::to_string(t) + " (tolerance " + std::to_string(norm_tol) + ")");
    }
    result.snapshots.push_back({t, psi});
    result.norms.push_back(norm);
}

bool want_snapshot(std::size_t step, std::size_t steps, std::size_t snapshot_every) {
    if (step == steps) return true;
    return snapshot_every > 0 && step % snapshot_every == 0;
}

void kinetic_drift(ComplexField& psi, const std::array<std::vector<complexd>, 2>& factors) {
    const Grid& g = psi.grid;
    for (int axis = 0; axis < g.dim(); ++axis) {
        const LineWalk w = line_walk(g, axis);
        const auto& factor = factors[static_cast<std::size_t>(axis)];
        std::vector<complexd> line(w.n);
        for (std::size_t l = 0; l < w.count; ++l) {
            const std::size_t start = l * w.line_step;
            for (std::size_t j = 0; j < w.n; ++j) line[j] = psi[start + j * w.stride];
            detail::fft_forward(w.n, line.data());
            for (std::size_t j = 0; j < w.n; ++j) line[j] *= factor[j];
            detail::fft_inverse(w.n, line.data());
            for (std::size_t j = 0; j < w.n; ++j) psi[start + j * w.stride] = line[j];
        }
    }
}

void require_zero_walls(const ComplexField& psi) {
    const Grid& g = psi.grid;
    double peak = 0.0;
    for (const auto& v : psi.values) peak = std::max(peak, std::abs(v));
    const double bound = 1e-9 * peak;
    auto check = [&](std::size_t flat) {
        if (std::abs(psi[flat]) > bound) {
            throw std::invalid_argument(
                "crank_nicolson_evolve: state must vanish on the dirichlet walls");
        }
    };
    const std::size_t n0 = g.points(0);
    if (g.dim() == 1) {
        check(g.flat_index(0));
        check(g.flat_index(n0 - 1));
        return;
    }
    const std::size_t n1 = g.points(1);
    for (std::size_t j = 0; j < n1; ++j) {
        check(g.flat_index(0, j));
        check(g.flat_index(n0 - 1, j));
    }
    for (std::size_t i = 0; i < n0; ++i) {
        check(g.flat_index(i, 0));
        check(g.flat_index(i, n1 - 1));
    }
}

void zero_walls(ComplexField& psi) {
    const Grid& g = psi.grid;
    const std::size_t n0 = g.points(0);
    if (g.dim() == 1) {
        psi[g.flat_index(0)] = 0.0;
        psi[g.flat_index(n0 - 1)] = 0.0;
        return;
    }
    const std::size_t n1 = g.points(1);
    for (std::size_t j = 0; j < n1; ++j) {
        psi[g.flat_index(0, j)] = 0.0;
        psi[g.flat_index(n0 - 1, j)] = 0.0;
    }
    for (std::size_t i = 0; i < n0; ++i) {
        psi[g.flat_index(i, 0)] = 0.0;
        psi[g.flat_index(i, n1 - 1)] = 0.0;
    }
}

class Tridiagonal {
  public:
    Tridiagonal(const std::vector<complexd>& diag, complexd off) : off_(off), cprime_(diag.size()),
                                                                   denom_(diag.size()) {
        denom_[0] = diag[0];
        cprime_[0] = off / denom_[0];
        for (std::size_t i = 1; i < diag.size(); ++i) {
            denom_[i] = diag[i] - off * cprime_[i - 1];
            cprime_[i] = off / denom_[i];
        }
    }

    void solve(std::vector<complexd>& rhs) const {
        const std::size_t n = rhs.size();
        rhs[0] /= denom_[0];
        for (std::size_t i = 1; i < n; ++i) {
            rhs[i] = (rhs[i] - off_ * rhs[i - 1]) / denom_[i];
        }
        for (std::size_t i = n - 1; i-- > 0;) {
            rhs[i] -= cprime_[i] * rhs[i + 1];
        }
    }

  private:
    complexd off_;
    std::vector<complexd> cprime_;
    std::vector<complexd> denom_;
};

void crank_nicolson_1d(ComplexField& psi, const ScalarField& potential, double dt,
                       std::size_t steps, std::size_t snapshot_every,
                       const PhysicalConstants& constants, EvolutionResult& result,
                       double norm_tol) {
    const Grid& g = psi.grid;
    const std::size_t n = g.points(0);
    const std::size_t m = n - 2;
    const double h = g.spacing(0);
    const double kappa = constants.hbar * constants.hbar / (2.0 * constants.mass * h * h);
    const complexd z(0.0, dt / (2.0 * constants.hbar));

    std::vector<complexd> diag_a(m);
    std::vector<complexd> diag_b(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double hd = 2.0 * kappa + potential[i + 1];
        diag_a[i] = 1.0 + z * hd;
        diag_b[i] = 1.0 - z * hd;
    }
    const complexd off_a = -z * kappa;
    const complexd off_b = z * kappa;
    const Tridiagonal solver(diag_a, off_a);

    std::vector<complexd> interior(m);
    for (std::size_t i = 0; i < m; ++i) interior[i] = psi[i + 1];

    std::vector<complexd> rhs(m);
    for (std::size_t s = 1; s <= steps; ++s) {
        for (std::size_t i = 0; i < m; ++i) {
            rhs[i] = diag_b[i] * interior[i];
            if (i > 0) rhs[i] += off_b * interior[i - 1];
            if (i + 1 < m) rhs[i] += off_b * interior[i + 1];
        }
        solver.solve(rhs);
        interior.swap(rhs);
        if (want_snapshot(s, steps, snapshot_every)) {
            for (std::size_t i = 0; i < m; ++i) psi[i + 1] = interior[i];
            append_snapshot(result, dt * static_cast<double>(s), psi, norm_tol);
        }
    }
}

void crank_nicolson_2d(ComplexField& psi, const ScalarField& potential, double dt,
                       std::size_t steps, std::size_t snapshot_every,
                       const PhysicalConstants& constants, EvolutionResult& result,
                       double norm_tol) {
    const Grid& g = psi.grid;
    const std::size_t n0 = g.points(0);
    const std::size_t n1 = g.points(1);
    const std::size_t m0 = n0 - 2;
    const std::size_t m1 = n1 - 2;
    const auto unknowns = static_cast<Eigen::Index>(m0 * m1);
    const double kx = constants.hbar * constants.hbar /
                      (2.0 * constants.mass * g.spacing(0) * g.spacing(0));
    const double ky = constants.hbar * constants.hbar /
                      (2.0 * constants.mass * g.spacing(1) * g.spacing(1));
    const complexd z(0.0, dt / (2.0 * constants.hbar));

    auto row_of = [m1](std::size_t i, std::size_t j) {
        return static_cast<Eigen::Index>((i - 1) * m1 + (j - 1));
    };

    std::vector<Eigen::Triplet<complexd>> triplets;
    triplets.reserve(static_cast<std::size_t>(unknowns) * 5);
    for (std::size_t i = 1; i + 1 < n0; ++i) {
        for (std::size_t j = 1; j + 1 < n1; ++j) {
            const Eigen::Index r = row_of(i, j);
            const double hd = 2.0 * kx + 2.0 * ky + potential[g.flat_index(i, j)];
            triplets.emplace_back(r, r, 1.0 + z * hd);
            if (i > 1) triplets.emplace_back(r, row_of(i - 1, j), -z * kx);
            if (i + 2 < n0) triplets.emplace_back(r, row_of(i + 1, j), -z * kx);
            if (j > 1) triplets.emplace_back(r, row_of(i, j - 1), -z * ky);
            if (j + 2 < n1) triplets.emplace_back(r, row_of(i, j + 1), -z * ky);
        }
    }
    Eigen::SparseMatrix<complexd> a(unknowns, unknowns);
    a.setFromTriplets(triplets.begin(), triplets.end());

    Eigen::BiCGSTAB<Eigen::SparseMatrix<complexd>> solver;
    solver.setTolerance(1e-13);
    solver.setMaxIterations(10000);
    solver.compute(a);

    Eigen::VectorXcd x(unknowns);
    for (std::size_t i = 1; i + 1 < n0; ++i) {
        for (std::size_t j = 1; j + 1 < n1; ++j) {
            x[row_of(i, j)] = psi[g.flat_index(i, j)];
        }
    }

    auto value_at = [&](const Eigen::VectorXcd& v, std::size_t i, std::size_t j) -> complexd {
        if (i == 0 || j == 0 || i + 1 >= n0 || j + 1 >= n1) return complexd{};
        return v[row_of(i, j)];
    };

    Eigen::VectorXcd rhs(unknowns);
    for (std::size_t s = 1; s <= steps; ++s) {
        for (std::size_t i = 1; i + 1 < n0; ++i) {
            for (std::size_t j = 1; j + 1 < n1; ++j) {
                const double hd = 2.0 * kx + 2.0 * ky + potential[g.flat_index(i, j)];
                complexd acc = (1.0 - z * hd) * x[row_of(i, j)];
                acc += z * kx * (value_at(x, i - 1, j) + value_at(x, i + 1, j));
                acc += z * ky * (value_at(x, i, j - 1) + value_at(x, i, j + 1));
                rhs[row_of(i, j)] = acc;
            }
        }
        x = solver.solveWithGuess(rhs, x);
        if (solver.info() != Eigen::Success) {
            throw numerical_error("crank_nicolson_evolve: iterative solve stalled at step " +
                                      std::to_string(s),
                                  static_cast<std::size_t>(solver.iterations()));
        }
        if (want_snapshot(s, steps, snapshot_every)) {
            for (std::size_t i = 1; i + 1 < n0; ++i) {
                for (std::size_t j = 1; j + 1 < n1; ++j) {
                    psi[g.flat_index(i, j)] = x[row_of(i, j)];
                }
            }
            append_snapshot(result, dt * static_cast<double>(s), psi, norm_tol);
        }
    }
}

VectorField velocity_of(const ComplexField& psi, const PhysicalConstants& constants) {
    ScalarField p(psi.grid);
    double peak = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) {
        p[i] = std::norm(psi[i]);
        peak = std::max(peak, p[i]);
    }
    Mask mask(p.size(), 0);
    const double floor = constants.node_epsilon * peak;
    for (std::size_t i = 0; i < p.size(); ++i) mask[i] = p[i] < floor ? 1 : 0;

    VectorField v(psi.grid);
    v.mask = mask;
    const double scale = constants.hbar / constants.mass;
    for (int axis = 0; axis < psi.grid.dim(); ++axis) {
        const ComplexField d = gradient_component(psi, axis);
        auto& comp = v.component(axis);
        for (std::size_t i = 0; i < psi.size(); ++i) {
            if (mask[i]) continue;
            comp[i] = scale * std::imag(std::conj(psi[i]) * d[i]) / p[i];
        }
    }
    return v;
}

/// Bilinear sample of a velocity field; false when the point leaves a
/// dirichlet domain or any stencil corner is masked.
bool sample_velocity(const VectorField& v, const Position& x, std::array<double, 2>& out) {
    const Grid& g = v.grid;
    std::array<std::size_t, 2> lo{0, 0};
    std::array<std::size_t, 2> hi{0, 0};
    std::array<double, 2> frac{0.0, 0.0};
    for (int a = 0; a < g.dim(); ++a) {
        const auto ua = static_cast<std::size_t>(a);
        const std::size_t n = g.points(a);
        double rel = (x[ua] - g.extent(a).min) / g.spacing(a);
        if (g.periodic()) {
            const auto nd = static_cast<double>(n);
            rel = std::fmod(rel, nd);
            if (rel < 0.0) rel += nd;
            if (rel >= nd) rel = 0.0;
            const auto j = std::min(static_cast<std::size_t>(rel), n - 1);
            lo[ua] = j;
            hi[ua] = (j + 1) % n;
            frac[ua] = rel - static_cast<double>(j);
        } else {
            if (x[ua] < g.extent(a).min || x[ua] > g.extent(a).max) return false;
            const auto j = std::min(static_cast<std::size_t>(rel), n - 2);
            lo[ua] = j;
            hi[ua] = j + 1;
            frac[ua] = rel - static_cast<double>(j);
        }
    }

    std::array<std::size_t, 4> corner{};
    std::array<double, 4> weight{};
    std::size_t corners = 0;
    if (g.dim() == 1) {
        corner = {g.flat_index(lo[0]), g.flat_index(hi[0]), 0, 0};
        weight = {1.0 - frac[0], frac[0], 0.0, 0.0};
        corners = 2;
    } else {
        corner = {g.flat_index(lo[0], lo[1]), g.flat_index(lo[0], hi[1]),
                  g.flat_index(hi[0], lo[1]), g.flat_index(hi[0], hi[1])};
        weight = {(1.0 - frac[0]) * (1.0 - frac[1]), (1.0 - frac[0]) * frac[1],
                  frac[0] * (1.0 - frac[1]), frac[0] * frac[1]};
        corners = 4;
    }
    for (std::size_t c = 0; c < corners; ++c) {
        if (v.masked(corner[c])) return false;
    }
    out = {0.0, 0.0};
    for (int a = 0; a < g.dim(); ++a) {
        const auto& comp = v.component(a);
        double acc = 0.0;
        for (std::size_t c = 0; c < corners; ++c) acc += weight[c] * comp[corner[c]];
        out[static_cast<std::size_t>(a)] = acc;
    }
    return true;
}

bool blend_velocity(const VectorField& va, const VectorField& vb, double theta,
                    const Position& x, std::array<double, 2>& out) {
    std::array<double, 2> ua{};
    std::array<double, 2> ub{};
    if (!sample_velocity(va, x, ua) || !sample_velocity(vb, x, ub)) return false;
    out = {(1.0 - theta) * ua[0] + theta * ub[0], (1.0 - theta) * ua[1] + theta * ub[1]};
    return true;
}

bool wrap_position(const Grid& g, Position& x) {
    for (int a = 0; a < g.dim(); ++a) {
        const auto ua = static_cast<std::size_t>(a);
        if (g.periodic()) {
            const double len = g.length(a);
            x[ua] = g.extent(a).min + std::fmod(x[ua] - g.extent(a).min, len);
            if (x[ua] < g.extent(a).min) x[ua] += len;
        } else if (x[ua] < g.extent(a).min || x[ua] > g.extent(a).max) {
            return false;
        }
    }
    return true;
}

} // namespace

EvolutionResult split_step_evolve(const ComplexField& psi0, const ScalarField& potential,
                                  double dt, std::size_t steps, std::size_t snapshot_every,
                                  const PhysicalConstants& constants) {
    constants.validate();
    require_same_grid(psi0.grid, potential.grid, "split_step_evolve");
    if (!psi0.grid.periodic()) {
        throw std::invalid_argument(
            "split_step_evolve: periodic grid required (boxes take crank_nicolson_evolve)");
    }
    if (!(dt > 0.0)) throw std::invalid_argument("split_step_evolve: dt must be positive");

    EvolutionResult result;
    result.dt = dt;
    result.scheme = Scheme::split_step;
    constexpr double norm_tol = 1e-8;

    ComplexField psi = psi0;
    append_snapshot(result, 0.0, psi, norm_tol);

    std::vector<complexd> half_kick(psi.size());
    for (std::size_t i = 0; i < psi.size(); ++i) {
        half_kick[i] = std::exp(complexd(0.0, -potential[i] * dt / (2.0 * constants.hbar)));
    }
    std::array<std::vector<complexd>, 2> drift;
    for (int axis = 0; axis < psi.grid.dim(); ++axis) {
        const std::size_t n = psi.grid.points(axis);
        auto& factor = drift[static_cast<std::size_t>(axis)];
        factor.resize(n);
        for (std::size_t j = 0; j < n; ++j) {
            const double k = detail::fft_wavenumber(j, n, psi.grid.length(axis));
            factor[j] = std::exp(
                complexd(0.0, -constants.hbar * k * k * dt / (2.0 * constants.mass)));
        }
    }

    for (std::size_t s = 1; s <= steps; ++s) {
        for (std::size_t i = 0; i < psi.size(); ++i) psi[i] *= half_kick[i];
        kinetic_drift(psi, drift);
        for (std::size_t i = 0; i < psi.size(); ++i) psi[i] *= half_kick[i];
        if (want_snapshot(s, steps, snapshot_every)) {
            append_snapshot(result, dt * static_cast<double>(s), psi, norm_tol);
        }
    }
    return result;
}

EvolutionResult crank_nicolson_evolve(const ComplexField& psi0, const ScalarField& potential,
                                      double dt, std::size_t steps, std::size_t snapshot_every,
                                      const PhysicalConstants& constants) {
    constants.validate();
    require_same_grid(psi0.grid, potential.grid, "crank_nicolson_evolve");
    if (psi0.grid.periodic()) {
        throw std::invalid_argument(
            "crank_nicolson_evolve: dirichlet grid required (periodic takes split_step_evolve)");
    }
    if (!(dt > 0.0)) throw std::invalid_argument("crank_nicolson_evolve: dt must be positive");
    require_zero_walls(psi0);

    EvolutionResult result;
    result.dt = dt;
    result.scheme = Scheme::crank_nicolson;
    constexpr double norm_tol = 1e-6;

    ComplexField psi = psi0;
    zero_walls(psi);
    append_snapshot(result, 0.0, psi, norm_tol);

    if (psi.grid.dim() == 1) {
        crank_nicolson_1d(psi, potential, dt, steps, snapshot_every, constants, result, norm_tol);
    } else {
        crank_nicolson_2d(psi, potential, dt, steps, snapshot_every, constants, result, norm_tol);
    }
    return result;
}

TrajectorySet bohmian_trajectories(const EvolutionResult& result,
                                   const std::vector<Position>& seeds,
                                   const PhysicalConstants& constants) {
    constants.validate();
    if (result.snapshots.size() < 2) {
        throw std::invalid_argument("bohmian_trajectories: need at least two snapshots");
    }
    const Grid& grid = result.snapshots.front().psi.grid;

    std::vector<VectorField> velocity;
    velocity.reserve(result.snapshots.size());
    for (const auto& snap : result.snapshots) {
        require_same_grid(grid, snap.psi.grid, "bohmian_trajectories");
        velocity.push_back(velocity_of(snap.psi, constants));
    }

    TrajectorySet set;
    set.seeds = seeds;
    set.times.reserve(result.snapshots.size());
    for (const auto& snap : result.snapshots) set.times.push_back(snap.t);
    set.dt = set.times[1] - set.times[0];
    set.paths.resize(seeds.size());
    set.truncated.assign(seeds.size(), 0);

    for (std::size_t s = 0; s < seeds.size(); ++s) {
        Position x = seeds[s];
        auto& path = set.paths[s];

        std::array<double, 2> probe{};
        if (!sample_velocity(velocity[0], x, probe)) {
            set.truncated[s] = 1;
            path.push_back(x);
            continue;
        }
        path.push_back(x);

        for (std::size_t k = 0; k + 1 < velocity.size(); ++k) {
            const double h = set.times[k + 1] - set.times[k];
            const VectorField& va = velocity[k];
            const VectorField& vb = velocity[k + 1];

            std::array<double, 2> k1{};
            std::array<double, 2> k2{};
            std::array<double, 2> k3{};
            std::array<double, 2> k4{};
            auto shifted = [&](const std::array<double, 2>& slope, double scale) {
                return Position{x[0] + scale * slope[0], x[1] + scale * slope[1]};
            };
            const bool ok = blend_velocity(va, vb, 0.0, x, k1) &&
                            blend_velocity(va, vb, 0.5, shifted(k1, 0.5 * h), k2) &&
                            blend_velocity(va, vb, 0.5, shifted(k2, 0.5 * h), k3) &&
                            blend_velocity(va, vb, 1.0, shifted(k3, h), k4);
            if (!ok) {
                set.truncated[s] = 1;
                break;
            }
            for (std::size_t a = 0; a < 2; ++a) {
                x[a] += h / 6.0 * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a]);
            }
            if (!wrap_position(grid, x)) {
                set.truncated[s] = 1;
                break;
            }
            path.push_back(x);
        }
    }
    return set;
}

} // namespace qtherm::evolve
