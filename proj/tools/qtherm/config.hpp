#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "qtherm/constants.hpp"
#include "qtherm/grid.hpp"

namespace qtherm::tool {

using json = nlohmann::json;

/// Configuration problem: malformed document, unknown key, inconsistent
/// values.  The CLI maps this family to exit code 2.
class config_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct GridSpec {
    int dim = 1;
    std::array<AxisExtent, 2> extents{{{0.0, 1.0}, {0.0, 1.0}}};
    std::array<std::size_t, 2> points{2048, 1};
    Boundary boundary = Boundary::periodic;
};

/// Initial state, restricted to the built-in families.
struct StateSpec {
    std::string kind = "gaussian"; // gaussian | box
    double a = 1.0;
    std::vector<int> quantum_numbers{1}; // box only; one run per entry
};

struct SolverSpec {
    std::string scheme = "none"; // none | split_step | crank_nicolson
    double dt = 1e-3;
    long long steps = -1;          // -1: derive from the probe times
    long long snapshot_every = -1; // -1: derive (gcd of probe steps)
};

struct LedgerSpec {
    bool enabled = true;
    std::vector<double> epsilons{1e-3, 5e-4, 2.5e-4};
};

/// Standalone product-state audit on two unit Gaussians; independent of the
/// run's own grid and state.
struct AdditivitySpec {
    bool enabled = false;
    std::size_t points = 256;
    double eps1 = 1e-4;
    double eps2 = 2e-4;
};

struct TrajectorySpec {
    bool enabled = false;
    std::size_t count = 100;
    std::uint64_t seed = 1;
};

struct OutputsSpec {
    std::string directory = ".";
    bool fields = true;
    bool info_report = true;
    std::vector<double> probe_times{0.0};
    LedgerSpec ledger;
    AdditivitySpec additivity;
    TrajectorySpec trajectories;
};

struct SimulationConfig {
    GridSpec grid;
    PhysicalConstants constants{};
    StateSpec state;
    std::string potential = "zero";
    SolverSpec solver;
    OutputsSpec outputs;

    /// Cross-field consistency checks; throws config_error or
    /// std::invalid_argument (from core validators) on bad input.
    void validate() const;

    /// Probe times as solver step indices.  Each probe time must be an
    /// integer multiple of dt; validate() enforces this.
    std::vector<long long> probe_steps() const;

    /// Total solver steps and snapshot stride after applying defaults.
    long long resolved_steps() const;
    long long resolved_snapshot_every() const;

    /// Resolved echo; parses back to an identical config.
    json to_json() const;
};

SimulationConfig config_from_json(const json& doc);
SimulationConfig load_config_file(const std::string& path);

/// Built-in configs for the two worked examples: "gaussian-free" (spreading
/// packet on a periodic grid, split-step evolution) and "box" (hard-wall
/// eigenstates n = 1, 2, static).
SimulationConfig builtin_example(const std::string& name);
bool is_builtin_example(const std::string& name);

} // namespace qtherm::tool
