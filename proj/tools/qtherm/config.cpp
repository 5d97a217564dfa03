#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "qtherm/analytic.hpp"

namespace qtherm::tool {
namespace {

[[noreturn]] void fail(const std::string& msg) { throw config_error(msg); }

std::string joined(const std::string& scope, const std::string& key) {
    return scope.empty() ? key : scope + "." + key;
}

void check_keys(const json& obj, const std::string& scope,
                std::initializer_list<const char*> allowed) {
    for (const auto& item : obj.items()) {
        bool known = std::any_of(allowed.begin(), allowed.end(),
                                 [&](const char* k) { return item.key() == k; });
        if (!known) {
            fail("unknown key '" + joined(scope, item.key()) + "'");
        }
    }
}

const json* find(const json& obj, const char* key) {
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

const json& require(const json& obj, const std::string& scope, const char* key) {
    const json* v = find(obj, key);
    if (v == nullptr) fail("missing required key '" + joined(scope, key) + "'");
    return *v;
}

double as_number(const json& v, const std::string& where) {
    if (!v.is_number()) fail("'" + where + "' must be a number");
    return v.get<double>();
}

long long as_integer(const json& v, const std::string& where) {
    if (!v.is_number_integer()) fail("'" + where + "' must be an integer");
    return v.get<long long>();
}

bool as_bool(const json& v, const std::string& where) {
    if (!v.is_boolean()) fail("'" + where + "' must be a boolean");
    return v.get<bool>();
}

std::string as_string(const json& v, const std::string& where) {
    if (!v.is_string()) fail("'" + where + "' must be a string");
    return v.get<std::string>();
}

/// Scalar or array form; a scalar means a 1-D grid.
std::vector<double> as_axis_numbers(const json& v, const std::string& where) {
    if (v.is_number()) return {v.get<double>()};
    if (v.is_array()) {
        std::vector<double> out;
        for (const auto& e : v) out.push_back(as_number(e, where));
        return out;
    }
    fail("'" + where + "' must be a number or an array of numbers");
}

std::vector<long long> as_axis_integers(const json& v, const std::string& where) {
    if (v.is_number_integer()) return {v.get<long long>()};
    if (v.is_array()) {
        std::vector<long long> out;
        for (const auto& e : v) out.push_back(as_integer(e, where));
        return out;
    }
    fail("'" + where + "' must be an integer or an array of integers");
}

std::vector<double> as_number_list(const json& v, const std::string& where) {
    if (!v.is_array()) fail("'" + where + "' must be an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) out.push_back(as_number(e, where));
    return out;
}

GridSpec parse_grid(const json& v) {
    if (!v.is_object()) fail("'grid' must be an object");
    check_keys(v, "grid", {"boundary", "min", "max", "points"});

    GridSpec g;
    const std::string boundary = as_string(require(v, "grid", "boundary"), "grid.boundary");
    if (boundary == "periodic") {
        g.boundary = Boundary::periodic;
    } else if (boundary == "dirichlet") {
        g.boundary = Boundary::dirichlet_zero;
    } else {
        fail("'grid.boundary' must be \"periodic\" or \"dirichlet\", got \"" + boundary + "\"");
    }

    auto mins = as_axis_numbers(require(v, "grid", "min"), "grid.min");
    auto maxs = as_axis_numbers(require(v, "grid", "max"), "grid.max");
    auto pts = as_axis_integers(require(v, "grid", "points"), "grid.points");
    if (mins.size() != maxs.size() || mins.size() != pts.size()) {
        fail("'grid.min', 'grid.max' and 'grid.points' must have matching shapes");
    }
    if (mins.empty() || mins.size() > 2) {
        fail("'grid' must describe 1 or 2 axes");
    }
    g.dim = static_cast<int>(mins.size());
    for (std::size_t i = 0; i < mins.size(); ++i) {
        if (!(maxs[i] > mins[i])) fail("'grid.max' must exceed 'grid.min' on every axis");
        if (pts[i] < 8) fail("'grid.points' must be at least 8 per axis");
        g.extents[i] = AxisExtent{mins[i], maxs[i]};
        g.points[i] = static_cast<std::size_t>(pts[i]);
    }
    if (g.dim == 1) g.points[1] = 1;
    return g;
}

PhysicalConstants parse_constants(const json& v) {
    if (!v.is_object()) fail("'constants' must be an object");
    check_keys(v, "constants", {"hbar", "mass", "k_b", "gamma", "node_epsilon"});

    PhysicalConstants c;
    if (const json* e = find(v, "hbar")) c.hbar = as_number(*e, "constants.hbar");
    if (const json* e = find(v, "mass")) c.mass = as_number(*e, "constants.mass");
    if (const json* e = find(v, "k_b")) c.k_b = as_number(*e, "constants.k_b");
    if (const json* e = find(v, "node_epsilon")) {
        c.node_epsilon = as_number(*e, "constants.node_epsilon");
    }
    const double derived_gamma = c.hbar * c.hbar / c.mass;
    if (const json* e = find(v, "gamma")) {
        const double gamma = as_number(*e, "constants.gamma");
        if (std::abs(gamma - derived_gamma) > 1e-12 * std::abs(derived_gamma)) {
            fail("'constants.gamma' must equal hbar^2 / mass");
        }
    }
    c.gamma = derived_gamma;
    c.validate();
    return c;
}

StateSpec parse_state(const json& v) {
    if (!v.is_object()) fail("'initial_state' must be an object");
    check_keys(v, "initial_state", {"kind", "a", "n"});

    StateSpec s;
    s.kind = as_string(require(v, "initial_state", "kind"), "initial_state.kind");
    if (s.kind != "gaussian" && s.kind != "box") {
        fail("'initial_state.kind' must be \"gaussian\" or \"box\", got \"" + s.kind + "\"");
    }
    if (const json* e = find(v, "a")) s.a = as_number(*e, "initial_state.a");

    const json* n = find(v, "n");
    if (n != nullptr && s.kind != "box") {
        fail("'initial_state.n' only applies to box states");
    }
    if (n != nullptr) {
        auto ns = as_axis_integers(*n, "initial_state.n");
        if (ns.empty()) fail("'initial_state.n' must not be empty");
        s.quantum_numbers.clear();
        for (long long q : ns) s.quantum_numbers.push_back(static_cast<int>(q));
    }
    return s;
}

SolverSpec parse_solver(const json& v) {
    if (!v.is_object()) fail("'solver' must be an object");
    check_keys(v, "solver", {"scheme", "dt", "steps", "snapshot_every"});

    SolverSpec s;
    if (const json* e = find(v, "scheme")) {
        s.scheme = as_string(*e, "solver.scheme");
        if (s.scheme != "none" && s.scheme != "split_step" && s.scheme != "crank_nicolson") {
            fail("'solver.scheme' must be \"none\", \"split_step\" or \"crank_nicolson\"");
        }
    }
    if (const json* e = find(v, "dt")) s.dt = as_number(*e, "solver.dt");
    if (const json* e = find(v, "steps")) s.steps = as_integer(*e, "solver.steps");
    if (const json* e = find(v, "snapshot_every")) {
        s.snapshot_every = as_integer(*e, "solver.snapshot_every");
    }
    return s;
}

LedgerSpec parse_ledger(const json& v) {
    LedgerSpec l;
    if (v.is_boolean()) {
        l.enabled = v.get<bool>();
        return l;
    }
    if (!v.is_object()) fail("'outputs.ledger' must be a boolean or an object");
    check_keys(v, "outputs.ledger", {"epsilons"});
    l.enabled = true;
    if (const json* e = find(v, "epsilons")) {
        l.epsilons = as_number_list(*e, "outputs.ledger.epsilons");
    }
    return l;
}

AdditivitySpec parse_additivity(const json& v) {
    AdditivitySpec a;
    if (v.is_boolean()) {
        a.enabled = v.get<bool>();
        return a;
    }
    if (!v.is_object()) fail("'outputs.additivity' must be a boolean or an object");
    check_keys(v, "outputs.additivity", {"points", "eps1", "eps2"});
    a.enabled = true;
    if (const json* e = find(v, "points")) {
        long long n = as_integer(*e, "outputs.additivity.points");
        if (n < 64) fail("'outputs.additivity.points' must be at least 64");
        a.points = static_cast<std::size_t>(n);
    }
    if (const json* e = find(v, "eps1")) a.eps1 = as_number(*e, "outputs.additivity.eps1");
    if (const json* e = find(v, "eps2")) a.eps2 = as_number(*e, "outputs.additivity.eps2");
    return a;
}

TrajectorySpec parse_trajectories(const json& v) {
    TrajectorySpec t;
    if (v.is_boolean()) {
        t.enabled = v.get<bool>();
        return t;
    }
    if (!v.is_object()) fail("'outputs.trajectories' must be a boolean or an object");
    check_keys(v, "outputs.trajectories", {"count", "seed"});
    t.enabled = true;
    if (const json* e = find(v, "count")) {
        long long n = as_integer(*e, "outputs.trajectories.count");
        if (n < 1) fail("'outputs.trajectories.count' must be at least 1");
        t.count = static_cast<std::size_t>(n);
    }
    if (const json* e = find(v, "seed")) {
        t.seed = static_cast<std::uint64_t>(as_integer(*e, "outputs.trajectories.seed"));
    }
    return t;
}

OutputsSpec parse_outputs(const json& v) {
    if (!v.is_object()) fail("'outputs' must be an object");
    check_keys(v, "outputs",
               {"directory", "fields", "info_report", "probe_times", "ledger", "additivity",
                "trajectories"});

    OutputsSpec o;
    if (const json* e = find(v, "directory")) {
        o.directory = as_string(*e, "outputs.directory");
        if (o.directory.empty()) fail("'outputs.directory' must not be empty");
    }
    if (const json* e = find(v, "fields")) o.fields = as_bool(*e, "outputs.fields");
    if (const json* e = find(v, "info_report")) {
        o.info_report = as_bool(*e, "outputs.info_report");
    }
    if (const json* e = find(v, "probe_times")) {
        o.probe_times = as_number_list(*e, "outputs.probe_times");
    }
    if (const json* e = find(v, "ledger")) o.ledger = parse_ledger(*e);
    if (const json* e = find(v, "additivity")) o.additivity = parse_additivity(*e);
    if (const json* e = find(v, "trajectories")) o.trajectories = parse_trajectories(*e);
    return o;
}

json axis_json_numbers(const GridSpec& g, double AxisExtent::*member) {
    if (g.dim == 1) return json(g.extents[0].*member);
    return json::array({g.extents[0].*member, g.extents[1].*member});
}

} // namespace

SimulationConfig config_from_json(const json& doc) {
    if (!doc.is_object()) fail("config root must be an object");
    check_keys(doc, "",
               {"grid", "constants", "initial_state", "potential", "solver", "outputs"});

    SimulationConfig cfg;
    cfg.grid = parse_grid(require(doc, "", "grid"));
    if (const json* e = find(doc, "constants")) cfg.constants = parse_constants(*e);
    cfg.state = parse_state(require(doc, "", "initial_state"));
    if (const json* e = find(doc, "potential")) {
        cfg.potential = as_string(*e, "potential");
        if (cfg.potential != "zero") {
            fail("'potential' must be \"zero\", got \"" + cfg.potential + "\"");
        }
    }
    if (const json* e = find(doc, "solver")) cfg.solver = parse_solver(*e);
    if (find(doc, "outputs") == nullptr) {
        fail("config must declare an 'outputs' section");
    }
    cfg.outputs = parse_outputs(*find(doc, "outputs"));
    return cfg;
}

SimulationConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open config file '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        fail("cannot parse '" + path + "': " + e.what());
    }
    return config_from_json(doc);
}

void SimulationConfig::validate() const {
    // Grid and constants invariants are enforced by the core constructors;
    // build them once here so errors surface before any file is written.
    constants.validate();
    make_grid(grid.dim, grid.extents, grid.points, grid.boundary);

    if (state.kind == "box") {
        if (grid.dim != 1) fail("box states require a 1-D grid");
        if (grid.boundary != Boundary::dirichlet_zero) {
            fail("box states require 'grid.boundary' = \"dirichlet\"");
        }
        const double span = 1e-9 * std::max(1.0, std::abs(state.a));
        if (std::abs(grid.extents[0].min) > span ||
            std::abs(grid.extents[0].max - state.a) > span) {
            fail("box states require the grid to span exactly [0, a]");
        }
        if (state.quantum_numbers.empty()) fail("box states need at least one quantum number");
        for (int n : state.quantum_numbers) {
            analytic::BoxParams p;
            p.a = state.a;
            p.n = n;
            p.constants = constants;
            p.validate();
        }
        if (solver.scheme == "split_step") {
            fail("box states evolve with \"crank_nicolson\"; \"split_step\" needs a periodic grid");
        }
    } else {
        analytic::GaussianPacketParams p;
        p.a = state.a;
        p.constants = constants;
        p.validate();
    }

    if (solver.scheme == "split_step" && grid.boundary != Boundary::periodic) {
        fail("'split_step' requires 'grid.boundary' = \"periodic\"");
    }
    if (solver.scheme == "crank_nicolson" && grid.boundary != Boundary::dirichlet_zero) {
        fail("'crank_nicolson' requires 'grid.boundary' = \"dirichlet\"");
    }
    if (!(solver.dt > 0.0) || !std::isfinite(solver.dt)) {
        fail("'solver.dt' must be positive and finite");
    }

    if (outputs.probe_times.empty()) fail("'outputs.probe_times' must not be empty");
    const auto steps_list = probe_steps(); // validates multiples of dt
    const long long max_step = *std::max_element(steps_list.begin(), steps_list.end());
    if (max_step > 0 && solver.scheme == "none") {
        fail("probe times beyond t = 0 require a solver scheme");
    }
    if (solver.steps >= 0 && solver.steps < max_step) {
        fail("'solver.steps' ends the run before the last probe time");
    }
    if (solver.snapshot_every == 0) fail("'solver.snapshot_every' must be positive");
    if (solver.snapshot_every > 0) {
        const long long total = resolved_steps();
        for (long long s : steps_list) {
            if (s != 0 && s != total && s % solver.snapshot_every != 0) {
                fail("'solver.snapshot_every' skips one of the probe times");
            }
        }
    }

    if (outputs.fields && grid.dim != 1) {
        fail("field CSV export supports 1-D grids; set 'outputs.fields' to false");
    }
    if (outputs.ledger.enabled) {
        if (grid.dim != 1) fail("the first-law ledger sweep supports 1-D grids only");
        if (outputs.ledger.epsilons.size() < 2) {
            fail("'outputs.ledger.epsilons' needs at least two values for a slope fit");
        }
        for (double eps : outputs.ledger.epsilons) {
            if (!(eps > 0.0) || eps > 1e-3) {
                fail("'outputs.ledger.epsilons' entries must lie in (0, 1e-3]");
            }
        }
    }
    if (outputs.additivity.enabled) {
        for (double eps : {outputs.additivity.eps1, outputs.additivity.eps2}) {
            if (!(eps > 0.0) || eps > 1e-3) {
                fail("'outputs.additivity' perturbation scales must lie in (0, 1e-3]");
            }
        }
    }
    if (outputs.trajectories.enabled) {
        if (grid.dim != 1) fail("trajectory export supports 1-D grids only");
        if (solver.scheme == "none" || resolved_steps() == 0) {
            fail("trajectories need a dynamic run: a solver scheme and a probe time beyond 0");
        }
    }
}

std::vector<long long> SimulationConfig::probe_steps() const {
    std::vector<long long> out;
    out.reserve(outputs.probe_times.size());
    for (double t : outputs.probe_times) {
        if (!(t >= 0.0) || !std::isfinite(t)) {
            fail("'outputs.probe_times' entries must be finite and non-negative");
        }
        const long long s = std::llround(t / solver.dt);
        if (std::abs(static_cast<double>(s) * solver.dt - t) >
            1e-9 * std::max(1.0, std::abs(t))) {
            char buf[128];
            std::snprintf(buf, sizeof(buf),
                          "probe time %.17g is not an integer multiple of dt = %.17g", t,
                          solver.dt);
            fail(buf);
        }
        out.push_back(s);
    }
    return out;
}

long long SimulationConfig::resolved_steps() const {
    if (solver.steps >= 0) return solver.steps;
    const auto steps_list = probe_steps();
    return *std::max_element(steps_list.begin(), steps_list.end());
}

long long SimulationConfig::resolved_snapshot_every() const {
    if (solver.snapshot_every > 0) return solver.snapshot_every;
    long long g = 0;
    for (long long s : probe_steps()) g = std::gcd(g, s);
    if (g == 0) g = std::max<long long>(resolved_steps(), 1);
    // Trajectory integration steps once per snapshot, so keep snapshots dense.
    if (outputs.trajectories.enabled) g = std::gcd(g, 10LL);
    return g;
}

json SimulationConfig::to_json() const {
    json grid_j{
        {"boundary", grid.boundary == Boundary::periodic ? "periodic" : "dirichlet"},
        {"min", axis_json_numbers(grid, &AxisExtent::min)},
        {"max", axis_json_numbers(grid, &AxisExtent::max)},
    };
    if (grid.dim == 1) {
        grid_j["points"] = grid.points[0];
    } else {
        grid_j["points"] = json::array({grid.points[0], grid.points[1]});
    }

    json state_j{{"kind", state.kind}, {"a", state.a}};
    if (state.kind == "box") state_j["n"] = state.quantum_numbers;

    json solver_j{{"scheme", solver.scheme}, {"dt", solver.dt}};
    if (solver.steps >= 0) solver_j["steps"] = solver.steps;
    if (solver.snapshot_every > 0) solver_j["snapshot_every"] = solver.snapshot_every;

    json ledger_j = false;
    if (outputs.ledger.enabled) ledger_j = json{{"epsilons", outputs.ledger.epsilons}};
    json additivity_j = false;
    if (outputs.additivity.enabled) {
        additivity_j = json{{"points", outputs.additivity.points},
                            {"eps1", outputs.additivity.eps1},
                            {"eps2", outputs.additivity.eps2}};
    }
    json trajectories_j = false;
    if (outputs.trajectories.enabled) {
        trajectories_j = json{{"count", outputs.trajectories.count},
                              {"seed", outputs.trajectories.seed}};
    }

    return json{
        {"grid", grid_j},
        {"constants",
         {{"hbar", constants.hbar},
          {"mass", constants.mass},
          {"k_b", constants.k_b},
          {"gamma", constants.gamma},
          {"node_epsilon", constants.node_epsilon}}},
        {"initial_state", state_j},
        {"potential", potential},
        {"solver", solver_j},
        {"outputs",
         {{"directory", outputs.directory},
          {"fields", outputs.fields},
          {"info_report", outputs.info_report},
          {"probe_times", outputs.probe_times},
          {"ledger", ledger_j},
          {"additivity", additivity_j},
          {"trajectories", trajectories_j}}},
    };
}

SimulationConfig builtin_example(const std::string& name) {
    SimulationConfig cfg;
    if (name == "gaussian-free") {
        cfg.grid.dim = 1;
        cfg.grid.extents[0] = AxisExtent{-16.0, 16.0};
        cfg.grid.points = {2048, 1};
        cfg.grid.boundary = Boundary::periodic;
        cfg.state.kind = "gaussian";
        cfg.state.a = 1.0;
        cfg.solver.scheme = "split_step";
        cfg.solver.dt = 1e-3;
        cfg.outputs.probe_times = {0.0, 0.5, 1.0};
        return cfg;
    }
    if (name == "box") {
        cfg.grid.dim = 1;
        cfg.grid.extents[0] = AxisExtent{0.0, 1.0};
        cfg.grid.points = {2048, 1};
        cfg.grid.boundary = Boundary::dirichlet_zero;
        cfg.state.kind = "box";
        cfg.state.a = 1.0;
        cfg.state.quantum_numbers = {1, 2};
        cfg.solver.scheme = "none";
        cfg.outputs.probe_times = {0.0};
        return cfg;
    }
    fail("unknown example '" + name + "' (built-ins: gaussian-free, box)");
}

bool is_builtin_example(const std::string& name) {
    return name == "gaussian-free" || name == "box";
}

} // namespace qtherm::tool
