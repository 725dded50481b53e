#pragma once

#include <string>

#include "opsk/config.hpp"
#include "opsk/simulation.hpp"

namespace opsk {

/// Result table of a table-producing subcommand (everything but
/// `thresholds`). ser1/ser2/run/rate/mass-ratio sweep the configured axes;
/// adaptive runs the extension analysis per allocation and distribution.
/// Throws ConfigError for missing keys or invalid combinations.
Table run_command(Command command, const RunConfig& cfg);

/// Columns: n_p, n_i, n_e, distribution, initial_runtime, total_runtime,
/// updates, extension_percent, final_n_p, final_n_i, final_n_e.
Table adaptive_table(const RunConfig& cfg);

/// Comma-separated thresholds of an n-bit dimension ("25,50,75" for n = 2).
std::string thresholds_line(int n);

}  // namespace opsk
