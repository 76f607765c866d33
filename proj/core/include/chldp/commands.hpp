#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "chldp/config.hpp"

namespace chldp {

/// simulate, skeleton, rate-min, mc, is, verify-a1, verify-a2, green-check, scaling-study.
const std::vector<std::string>& command_names();

/// Version string recorded in manifests.
std::string library_version();

/// Initial condition u0 sampled on the configured grid.
GridField initial_field(const RunConfig& cfg);
/// Control selected by cfg.control on the configured grid.
ControlPath load_control(const RunConfig& cfg);
/// Terminal centre g = base + shift.
GridField resolve_centre(const RunConfig& cfg, const CentreSpec& centre);
EventSpec build_event(const RunConfig& cfg);
RateProblem build_rate_problem(const RunConfig& cfg);
McSetup build_setup(const RunConfig& cfg);

/// Runs one command and writes its artifacts plus manifest.json into cfg.output.
/// Progress goes to `log`. Throws ConfigError / SolverAbort / Error on failure.
void run_command(const std::string& command, const RunConfig& cfg, std::ostream& log);

}  // namespace chldp
