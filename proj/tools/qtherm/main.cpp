#include <cstdio>
#include <exception>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "qtherm/errors.hpp"

#include "config.hpp"
#include "pipeline.hpp"

namespace {

using qtherm::tool::SimulationConfig;

struct RunOverrides {
    std::optional<std::string> out;
    std::optional<std::vector<double>> probe_times;
    std::optional<int> box_n;
    std::optional<double> a;
    std::optional<std::size_t> grid_points;
    std::optional<double> dt;
    std::optional<std::uint64_t> seed;
};

void apply_overrides(SimulationConfig& cfg, const RunOverrides& ov) {
    if (ov.out) cfg.outputs.directory = *ov.out;
    if (ov.probe_times) cfg.outputs.probe_times = *ov.probe_times;
    if (ov.box_n) {
        if (cfg.state.kind != "box") {
            throw qtherm::tool::config_error("--n only applies to box states");
        }
        cfg.state.quantum_numbers = {*ov.box_n};
    }
    if (ov.a) {
        cfg.state.a = *ov.a;
        // Box grids span exactly [0, a]; keep that coupling under --a.
        if (cfg.state.kind == "box") cfg.grid.extents[0] = qtherm::AxisExtent{0.0, *ov.a};
    }
    if (ov.grid_points) {
        cfg.grid.points[0] = *ov.grid_points;
        if (cfg.grid.dim == 2) cfg.grid.points[1] = *ov.grid_points;
    }
    if (ov.dt) cfg.solver.dt = *ov.dt;
    if (ov.seed) {
        cfg.outputs.trajectories.enabled = true;
        cfg.outputs.trajectories.seed = *ov.seed;
    }
}

int execute_with_exit_codes(const SimulationConfig& cfg) {
    try {
        qtherm::tool::execute_run(cfg);
        return 0;
    } catch (const qtherm::numerical_error& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 4;
    } catch (const qtherm::invariant_error& e) {
        std::fprintf(stderr, "invariant violation: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"qtherm: Madelung fields, information geometry and wave-function "
                 "thermodynamics on grids"};
    app.require_subcommand(1);

    std::string target;
    RunOverrides ov;
    auto* run_cmd = app.add_subcommand("run", "Run a built-in example or a config file");
    run_cmd->add_option("target", target, "Example name (gaussian-free, box) or config path")
        ->required();
    run_cmd->add_option("--out", ov.out, "Output directory");
    run_cmd->add_option("--t", ov.probe_times, "Comma-separated probe times")->delimiter(',');
    run_cmd->add_option("--n", ov.box_n, "Box quantum number");
    run_cmd->add_option("--a", ov.a, "State width / box length");
    run_cmd->add_option("--grid", ov.grid_points, "Grid points per axis");
    run_cmd->add_option("--dt", ov.dt, "Solver time step");
    run_cmd->add_option("--seed", ov.seed, "Enable trajectory export with this seed");

    std::string config_path;
    auto* validate_cmd = app.add_subcommand(
        "validate", "Validate a built-in example or a config file and echo the resolved form");
    validate_cmd->add_option("path", config_path, "Example name (gaussian-free, box) or config path")
        ->required();

    auto* version_cmd = app.add_subcommand("version", "Print the tool version");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    if (version_cmd->parsed()) {
        std::printf("qtherm %s\n", QTHERM_VERSION);
        return 0;
    }

    SimulationConfig cfg;
    try {
        if (validate_cmd->parsed()) {
            cfg = qtherm::tool::is_builtin_example(config_path)
                      ? qtherm::tool::builtin_example(config_path)
                      : qtherm::tool::load_config_file(config_path);
            cfg.validate();
            std::printf("%s\n", cfg.to_json().dump(2).c_str());
            return 0;
        }
        cfg = qtherm::tool::is_builtin_example(target)
                  ? qtherm::tool::builtin_example(target)
                  : qtherm::tool::load_config_file(target);
        apply_overrides(cfg, ov);
        cfg.validate();
    } catch (const qtherm::tool::config_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    }

    return execute_with_exit_codes(cfg);
}
