#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "opsk/adaptive.hpp"
#include "opsk/simulation.hpp"

namespace opsk {

/// Malformed, unknown, duplicate, missing or out-of-range configuration.
/// `line()` is 0 when the problem is not tied to a line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

enum class Command { ser1, ser2, rate, mass_ratio, adaptive, run, thresholds };

/// Parses "ser1", "ser2", "rate", "mass-ratio", "adaptive", "run", "thresholds".
std::optional<Command> parse_command(std::string_view name);
const char* to_string(Command c);

struct NamedDistribution {
  std::string label;
  std::vector<double> weights;
};

struct AdaptiveSettings {
  UpdatePolicy policy;
  double capsule_releases = 0.0;          // capsule mass in units of one release
  std::size_t random_distributions = 5;   // skewed distributions after the uniform one
  std::vector<NamedDistribution> distributions;  // explicit ones, in file order
  std::vector<BitAllocation> allocations;        // empty: use the scenario allocation
};

/// Everything a config file can set.
struct RunConfig {
  ScenarioConfig scenario;
  std::vector<SweepAxis> axes;  // in file order
  AdaptiveSettings adaptive;
  int threads = 1;
  std::map<std::string, int> key_lines;  // key as written -> line number
};

/// Parses `key = value` lines; `#` starts a comment. Unknown keys, duplicates,
/// malformed lines and out-of-range values throw ConfigError with the line.
///
/// Sweep axes are written `sweep.<axis> = v1 v2 ...` or
/// `sweep.<axis> = log|lin <min> <max> <points>`.
RunConfig parse_config_text(std::string_view text);

/// Reads and parses a file; an unreadable file throws ConfigError at line 0.
RunConfig parse_config_file(const std::string& path);

/// Throws ConfigError naming the first key `command` needs that neither the
/// file nor a sweep axis provides.
void require_keys(const RunConfig& cfg, Command command);

/// Numeric helpers shared with the command line front end.
double parse_real(std::string_view text);
std::uint64_t parse_unsigned(std::string_view text);

}  // namespace opsk
