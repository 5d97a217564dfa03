#pragma once

#include "config.hpp"

namespace qtherm::tool {

/// Runs the configured pipeline (state construction, optional evolution,
/// Madelung and thermo fields, information probes) and writes every
/// requested artifact under cfg.outputs.directory, creating it if missing.
/// Assumes cfg.validate() has already passed.
void execute_run(const SimulationConfig& cfg);

} // namespace qtherm::tool
