#include "pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "qtherm/analytic.hpp"
#include "qtherm/evolve.hpp"
#include "qtherm/field.hpp"
#include "qtherm/information.hpp"
#include "qtherm/madelung.hpp"
#include "qtherm/thermo.hpp"

namespace qtherm::tool {
namespace {

namespace fs = std::filesystem;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_short(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

class FileWriter {
  public:
    explicit FileWriter(const fs::path& path) : f_(std::fopen(path.string().c_str(), "wb")) {
        if (f_ == nullptr) {
            throw std::runtime_error("cannot open '" + path.string() + "' for writing");
        }
    }
    FileWriter(const FileWriter&) = delete;
    FileWriter& operator=(const FileWriter&) = delete;
    ~FileWriter() {
        if (f_ != nullptr) std::fclose(f_);
    }

    void line(const std::string& s) {
        std::fputs(s.c_str(), f_);
        std::fputc('\n', f_);
    }

  private:
    std::FILE* f_;
};

void write_json_file(const fs::path& path, const json& doc) {
    FileWriter out(path);
    out.line(doc.dump(2));
}

/// Closed-form temperature reference for states that have one.  NaN marks
/// points where the oracle is undefined (box nodes).
struct TemperatureOracle {
    std::variant<std::monostate, analytic::GaussianPacketParams, analytic::BoxParams> params;

    bool valid() const { return !std::holds_alternative<std::monostate>(params); }

    double at(double x, double t) const {
        if (const auto* g = std::get_if<analytic::GaussianPacketParams>(&params)) {
            return analytic::analytic_temperature(*g, x, t);
        }
        if (const auto* b = std::get_if<analytic::BoxParams>(&params)) {
            try {
                return analytic::analytic_temperature(*b, x);
            } catch (const std::domain_error&) {
                return std::numeric_limits<double>::quiet_NaN();
            }
        }
        return std::numeric_limits<double>::quiet_NaN();
    }
};

/// One concrete initial state; box configs expand to one run per quantum
/// number, everything else is a single run.
struct StateRun {
    std::string label;
    std::string stem;
    ComplexField psi0;
    TemperatureOracle oracle;
};

std::vector<StateRun> build_state_runs(const SimulationConfig& cfg, const Grid& grid) {
    std::vector<StateRun> runs;
    if (cfg.state.kind == "box") {
        for (int n : cfg.state.quantum_numbers) {
            analytic::BoxParams p;
            p.a = cfg.state.a;
            p.n = n;
            p.constants = cfg.constants;
            StateRun run;
            run.label = "box n=" + std::to_string(n) + " (a=" + fmt_short(cfg.state.a) + ")";
            run.stem = "box_n" + std::to_string(n);
            run.psi0 = analytic::box_eigenstate(p, grid);
            run.oracle.params = p; // eigenstates are stationary, valid at any t
            runs.push_back(std::move(run));
        }
        return runs;
    }

    analytic::GaussianPacketParams p;
    p.a = cfg.state.a;
    p.constants = cfg.constants;
    StateRun run;
    run.label = "gaussian packet (a=" + fmt_short(cfg.state.a) + ")";
    run.stem = "gaussian";
    run.psi0 = analytic::gaussian_packet(p, grid, 0.0);
    // Free spreading is only the truth without walls; Crank-Nicolson runs on
    // a hard-wall grid, so the closed form stops applying there.
    if (cfg.solver.scheme != "crank_nicolson") run.oracle.params = p;
    runs.push_back(std::move(run));
    return runs;
}

struct ProbeState {
    double t = 0.0;
    ComplexField psi;
};

/// Snapshot times are produced as dt * step on both sides, so the lookup
/// can demand exact equality.
const evolve::Snapshot& snapshot_at(const evolve::EvolutionResult& result, double dt, long long step) {
    const double want = dt * static_cast<double>(step);
    for (const auto& snap : result.snapshots) {
        if (snap.t == want) return snap;
    }
    throw std::logic_error("no snapshot recorded for step " + std::to_string(step));
}

double masked_l2(const ScalarField& f, double h) {
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (f.masked(i)) continue;
        acc += f.values[i] * f.values[i];
    }
    return std::sqrt(acc * h);
}

double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    const auto n = static_cast<double>(xs.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double lx = std::log(xs[i]);
        const double ly = std::log(ys[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

struct FieldCsvSummary {
    std::string file;
    double t = 0.0;
    bool oracle = false;
    double max_rel_err = 0.0;
    std::size_t masked_rows = 0;
};

FieldCsvSummary write_field_csv(const fs::path& path, const StateRun& run, double t,
                                const madelung::PolarPair& pair, const VectorField& velocity,
                                const ScalarField& q_potential, const ScalarField& energy,
                                const ScalarField& temperature) {
    const Grid& grid = pair.density.grid;
    const std::size_t n = grid.total_points();
    const bool with_oracle = run.oracle.valid();

    std::vector<double> t_ana(n, 0.0);
    double max_abs_ana = 0.0;
    if (with_oracle) {
        for (std::size_t i = 0; i < n; ++i) {
            if (pair.density.masked(i)) continue;
            t_ana[i] = run.oracle.at(grid.coordinate(0, i), t);
            if (std::isfinite(t_ana[i])) max_abs_ana = std::max(max_abs_ana, std::abs(t_ana[i]));
        }
    }
    const double denom_floor = std::max(1e-12 * max_abs_ana, 1e-300);

    FieldCsvSummary summary;
    summary.file = path.filename().string();
    summary.t = t;
    summary.oracle = with_oracle;

    FileWriter out(path);
    out.line("# qtherm field export");
    out.line("# state: " + run.label);
    out.line("# t = " + fmt_short(t));
    std::string header =
        "x[length],p[1/length],S[action],v[length/time],Q[energy],E[energy],"
        "T_numeric[energy/k_b]";
    if (with_oracle) header += ",T_analytic[energy/k_b]";
    header += ",masked";
    out.line(header);

    for (std::size_t i = 0; i < n; ++i) {
        const bool masked = pair.density.masked(i);
        if (masked) summary.masked_rows += 1;
        const double x = grid.coordinate(0, i);
        const double p = pair.density.values[i];
        const double s = masked ? 0.0 : pair.phase.values[i];
        const double v = masked ? 0.0 : velocity.component(0)[i];
        const double q = masked ? 0.0 : q_potential.values[i];
        const double e = masked ? 0.0 : energy.values[i];
        const double tn = masked ? 0.0 : temperature.values[i];

        std::string row = fmt(x);
        for (double col : {p, s, v, q, e, tn}) {
            row += ',';
            row += fmt(col);
        }
        if (with_oracle) {
            const double ta = (!masked && std::isfinite(t_ana[i])) ? t_ana[i] : 0.0;
            row += ',';
            row += fmt(ta);
            if (!masked && std::isfinite(t_ana[i])) {
                const double rel =
                    std::abs(tn - t_ana[i]) / std::max(std::abs(t_ana[i]), denom_floor);
                summary.max_rel_err = std::max(summary.max_rel_err, rel);
            }
        }
        row += masked ? ",1" : ",0";
        out.line(row);
    }
    return summary;
}

json probe_entry(const StateRun& run, double t, const madelung::PolarPair& pair,
                 const ScalarField& potential, const PhysicalConstants& constants) {
    const ScalarField& p = pair.density;
    const int dim = p.grid.dim();

    const double entropy = info::differential_entropy(p);
    const auto fisher = info::fisher_information(p);
    const auto nu = info::nu_vector(p, info::NuMode::closed_form);
    const auto energy = info::informational_energy(p, constants);
    const auto breakdown = madelung::hamiltonian_functional(pair, potential, constants);

    json fisher_axis = json::array();
    json nu_axis = json::array();
    for (int a = 0; a < dim; ++a) {
        fisher_axis.push_back(fisher.per_axis[static_cast<std::size_t>(a)]);
        nu_axis.push_back(nu[static_cast<std::size_t>(a)]);
    }

    return json{
        {"state", run.label},
        {"t", t},
        {"entropy", entropy},
        {"fisher_per_axis", fisher_axis},
        {"fisher_total", fisher.total},
        {"nu_closed", nu_axis},
        {"u_q", energy.u_q},
        {"e_inf", energy.e_inf},
        {"hamiltonian",
         {{"kinetic", breakdown.kinetic},
          {"potential", breakdown.potential},
          {"quantum", breakdown.quantum},
          {"total", breakdown.total()}}},
    };
}

/// First-law sweep on the t = 0 density: delta_p = eps * shape * p with a
/// smooth wave shape, residual L2 norms fitted for the O(eps^2) slope.
json ledger_entry(const StateRun& run, const ScalarField& p, const LedgerSpec& spec,
                  const PhysicalConstants& constants) {
    const Grid& grid = p.grid;
    const double h = grid.spacing(0);
    const double lo = grid.extent(0).min;
    const double length = grid.length(0);
    const bool periodic = grid.periodic();
    const double center = lo + 0.5 * length;

    std::vector<double> shape(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double x = grid.coordinate(0, i);
        shape[i] = periodic ? std::sin(1.3 * (x - center))
                            : std::cos(2.0 * std::numbers::pi * (x - lo) / length);
    }

    json eps_list = json::array();
    json residual_norms = json::array();
    json heat_norms = json::array();
    json work_norms = json::array();
    json delta_e_norms = json::array();
    std::vector<double> eps_vals;
    std::vector<double> res_vals;

    for (double eps : spec.epsilons) {
        ScalarField dp(grid);
        for (std::size_t i = 0; i < p.size(); ++i) dp.values[i] = eps * shape[i] * p.values[i];
        const auto ledger = thermo::first_law_ledger(p, dp, constants);

        const double res = masked_l2(ledger.residual, h);
        eps_list.push_back(eps);
        residual_norms.push_back(res);
        heat_norms.push_back(masked_l2(ledger.heat, h));
        work_norms.push_back(masked_l2(ledger.work, h));
        delta_e_norms.push_back(masked_l2(ledger.delta_e, h));
        eps_vals.push_back(eps);
        res_vals.push_back(res);
    }

    return json{
        {"state", run.label},
        {"perturbation", periodic ? "sin(1.3 (x - center)) * p" : "cos(2 pi (x - min)/L) * p"},
        {"epsilons", eps_list},
        {"residual_norms", residual_norms},
        {"heat_norms", heat_norms},
        {"work_norms", work_norms},
        {"delta_e_norms", delta_e_norms},
        {"residual_slope", loglog_slope(eps_vals, res_vals)},
    };
}

/// Product-state audit on two unit Gaussians with a shift perturbation on
/// one factor and a breathing perturbation on the other; heat should come
/// out additive, work should not.
json additivity_report(const AdditivitySpec& spec, const PhysicalConstants& constants) {
    const Grid grid = make_grid_1d(-8.0, 8.0, spec.points, Boundary::periodic);
    ScalarField p1(grid), p2(grid), dp1(grid), dp2(grid);
    const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    for (std::size_t i = 0; i < grid.total_points(); ++i) {
        const double x = grid.coordinate(0, i);
        const double g = norm * std::exp(-0.5 * x * x);
        p1.values[i] = g;
        p2.values[i] = g;
        dp1.values[i] = spec.eps1 * x * g;
        dp2.values[i] = spec.eps2 * (x * x - 1.0) * g;
    }

    const auto report = thermo::product_additivity_report(p1, p2, dp1, dp2, constants);

    const double probe_x = 0.5;
    const auto j = static_cast<std::size_t>(
        std::llround((probe_x - grid.extent(0).min) / grid.spacing(0)));
    const Grid& pg = report.heat_lhs_field.grid;
    const std::size_t flat = pg.flat_index(j, j);

    return json{
        {"grid_points", spec.points},
        {"eps1", spec.eps1},
        {"eps2", spec.eps2},
        {"heat",
         {{"lhs", report.heat_lhs},
          {"rhs", report.heat_rhs},
          {"gap", report.heat_gap},
          {"additive", report.heat_additive}}},
        {"work",
         {{"lhs", report.work_lhs},
          {"rhs", report.work_rhs},
          {"gap", report.work_gap},
          {"additive", report.work_additive}}},
        {"probe",
         {{"x1", pg.coordinate(0, j)},
          {"x2", pg.coordinate(1, j)},
          {"heat_lhs", report.heat_lhs_field.values[flat]},
          {"heat_rhs", report.heat_rhs_field.values[flat]},
          {"work_lhs", report.work_lhs_field.values[flat]},
          {"work_rhs", report.work_rhs_field.values[flat]}}},
    };
}

void write_trajectories_csv(const fs::path& path, const evolve::EvolutionResult& result,
                            const SimulationConfig& cfg) {
    const TrajectorySpec& spec = cfg.outputs.trajectories;
    const Grid& grid = result.snapshots.front().psi.grid;
    const double center =
        cfg.state.kind == "box" ? 0.5 * (grid.extent(0).min + grid.extent(0).max) : 0.0;

    std::mt19937_64 gen(spec.seed);
    std::normal_distribution<double> dist(center, cfg.state.a / 2.0);
    std::vector<evolve::Position> seeds;
    seeds.reserve(spec.count);
    for (std::size_t k = 0; k < spec.count; ++k) seeds.push_back(evolve::Position{dist(gen), 0.0});

    const auto set = evolve::bohmian_trajectories(result, seeds, cfg.constants);

    FileWriter out(path);
    out.line("# qtherm bohmian trajectories");
    out.line("path,t[time],x[length],truncated");
    for (std::size_t k = 0; k < set.paths.size(); ++k) {
        const bool truncated = set.truncated[k] != 0;
        for (std::size_t j = 0; j < set.paths[k].size(); ++j) {
            std::string row = std::to_string(k);
            row += ',';
            row += fmt(set.times[j]);
            row += ',';
            row += fmt(set.paths[k][j][0]);
            row += truncated ? ",1" : ",0";
            out.line(row);
        }
    }
}

} // namespace

void execute_run(const SimulationConfig& cfg) {
    const fs::path out_dir(cfg.outputs.directory);
    fs::create_directories(out_dir);

    const Grid grid = make_grid(cfg.grid.dim, cfg.grid.extents, cfg.grid.points,
                                cfg.grid.boundary);
    const ScalarField potential(grid); // "zero" is the only supported form

    const auto probe_times = cfg.outputs.probe_times;
    const auto steps_list = cfg.probe_steps();
    const long long total_steps = cfg.resolved_steps();
    const bool dynamic = cfg.solver.scheme != "none" && total_steps > 0;

    json field_files = json::array();
    json probes = json::array();
    json ledger_runs = json::array();

    for (const StateRun& run : build_state_runs(cfg, grid)) {
        std::vector<ProbeState> states;
        if (dynamic) {
            const auto snapshot_every =
                static_cast<std::size_t>(cfg.resolved_snapshot_every());
            const auto steps = static_cast<std::size_t>(total_steps);
            const evolve::EvolutionResult result =
                cfg.solver.scheme == "split_step"
                    ? evolve::split_step_evolve(run.psi0, potential, cfg.solver.dt, steps,
                                        snapshot_every, cfg.constants)
                    : evolve::crank_nicolson_evolve(run.psi0, potential, cfg.solver.dt, steps,
                                            snapshot_every, cfg.constants);
            for (std::size_t k = 0; k < probe_times.size(); ++k) {
                const auto& snap = snapshot_at(result, cfg.solver.dt, steps_list[k]);
                states.push_back(ProbeState{probe_times[k], snap.psi});
            }
            if (cfg.outputs.trajectories.enabled) {
                write_trajectories_csv(out_dir / (run.stem + "_trajectories.csv"), result,
                                       cfg);
            }
        } else {
            for (double t : probe_times) states.push_back(ProbeState{t, run.psi0});
        }

        for (const ProbeState& probe : states) {
            const auto pair = madelung::polar_decompose(probe.psi, cfg.constants);

            if (cfg.outputs.fields) {
                const auto velocity = madelung::velocity_field(pair, cfg.constants);
                const auto q_potential = madelung::quantum_potential(pair.density, cfg.constants);
                const auto energy = thermo::pointwise_energy(pair.density, cfg.constants);
                const auto temperature = thermo::temperature_field(pair.density, cfg.constants);

                std::string name = run.stem;
                if (dynamic) name += "_t" + fmt_short(probe.t);
                name += ".csv";
                const auto summary = write_field_csv(out_dir / name, run, probe.t, pair,
                                                     velocity, q_potential, energy,
                                                     temperature);
                field_files.push_back(json{
                    {"file", summary.file},
                    {"state", run.label},
                    {"t", summary.t},
                    {"masked_rows", summary.masked_rows},
                    {"temperature_oracle", summary.oracle},
                    {"temperature_max_rel_err", summary.oracle ? json(summary.max_rel_err)
                                                               : json()},
                });
            }

            if (cfg.outputs.info_report) {
                probes.push_back(probe_entry(run, probe.t, pair, potential, cfg.constants));
            }
        }

        if (cfg.outputs.ledger.enabled) {
            const auto pair0 = madelung::polar_decompose(run.psi0, cfg.constants);
            ledger_runs.push_back(
                ledger_entry(run, pair0.density, cfg.outputs.ledger, cfg.constants));
        }
    }

    if (cfg.outputs.info_report) {
        write_json_file(out_dir / "info_report.json",
                        json{{"field_files", field_files}, {"probes", probes}});
    }
    if (cfg.outputs.ledger.enabled) {
        write_json_file(out_dir / "ledger_summary.json", json{{"runs", ledger_runs}});
    }
    if (cfg.outputs.additivity.enabled) {
        write_json_file(out_dir / "additivity_report.json",
                        additivity_report(cfg.outputs.additivity, cfg.constants));
    }
    write_json_file(out_dir / "resolved_config.json", cfg.to_json());
}

} // namespace qtherm::tool
