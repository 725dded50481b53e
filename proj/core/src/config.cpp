#include "opsk/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

namespace opsk {

ConfigError::ConfigError(int line, const std::string& message)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
      line_(line) {}

namespace {

const std::pair<std::string_view, Command> kCommands[] = {
    {"ser1", Command::ser1},         {"ser2", Command::ser2},
    {"rate", Command::rate},         {"mass-ratio", Command::mass_ratio},
    {"adaptive", Command::adaptive}, {"run", Command::run},
    {"thresholds", Command::thresholds},
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(std::string_view s, std::string_view seps) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const auto start = s.find_first_not_of(seps, i);
    if (start == std::string_view::npos) break;
    auto end = s.find_first_of(seps, start);
    if (end == std::string_view::npos) end = s.size();
    out.emplace_back(s.substr(start, end - start));
    i = end;
  }
  return out;
}

std::int64_t parse_integer(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw std::invalid_argument("'" + std::string(text) + "' is not an integer");
  }
  return v;
}

double at_least(double v, double lo, const char* what) {
  if (!(v >= lo)) throw std::invalid_argument(std::string(what));
  return v;
}

double positive(std::string_view text) {
  const double v = parse_real(text);
  if (!(v > 0.0)) throw std::invalid_argument("must be > 0");
  return v;
}

FlowNoiseRatio parse_fnr(std::string_view text) {
  const std::string_view t = trim(text);
  if (t == "none" || t == "inf") return FlowNoiseRatio::noise_free();
  return FlowNoiseRatio::ratio(positive(t));
}

using Setter = std::function<void(RunConfig&, std::string_view)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"allocation",
       [](RunConfig& c, std::string_view v) { c.scenario.allocation = parse_allocation(std::string(v)); }},
      {"distance", [](RunConfig& c, std::string_view v) { c.scenario.distance = positive(v); }},
      {"edge_ratio", [](RunConfig& c, std::string_view v) { c.scenario.edge_ratio = positive(v); }},
      {"flow_ratio", [](RunConfig& c, std::string_view v) { c.scenario.flow_ratio = positive(v); }},
      {"flow", [](RunConfig& c, std::string_view v) { c.scenario.flow = positive(v); }},
      {"fnr",
       [](RunConfig& c, std::string_view v) {
         const auto parts = split(v, ", \t");
         if (parts.size() == 1) {
           c.scenario.fnr.fill(parse_fnr(parts[0]));
         } else if (parts.size() == 3) {
           for (int k = 0; k < 3; ++k) c.scenario.fnr[k] = parse_fnr(parts[k]);
         } else {
           throw std::invalid_argument("expected one value or x,y,z");
         }
       }},
      {"pn",
       [](RunConfig& c, std::string_view v) {
         c.scenario.pn = at_least(parse_real(v), 0.0, "must be >= 0");
       }},
      {"quality",
       [](RunConfig& c, std::string_view v) {
         const double q = parse_real(v);
         if (!(q > 0.0 && q <= 1.0)) throw std::invalid_argument("must lie in (0, 1]");
         c.scenario.quality = q;
       }},
      {"mass", [](RunConfig& c, std::string_view v) { c.scenario.release_mass = positive(v); }},
      {"diffusion",
       [](RunConfig& c, std::string_view v) {
         const auto parts = split(v, ", \t");
         if (parts.size() == 1) {
           c.scenario.diffusion = DiffusionModel::isotropic(positive(parts[0]));
         } else if (parts.size() == 3) {
           for (int k = 0; k < 3; ++k) c.scenario.diffusion.coefficient[k] = positive(parts[k]);
         } else {
           throw std::invalid_argument("expected one value or x,y,z");
         }
       }},
      {"m_ratio",
       [](RunConfig& c, std::string_view v) {
         c.scenario.m_ratio = at_least(parse_real(v), 1.0, "must be >= 1");
       }},
      {"n_symbols",
       [](RunConfig& c, std::string_view v) {
         c.scenario.n_symbols = parse_integer(v);
         if (c.scenario.n_symbols < 1) throw std::invalid_argument("must be >= 1");
       }},
      {"seed", [](RunConfig& c, std::string_view v) { c.scenario.seed = parse_unsigned(v); }},
      {"threads",
       [](RunConfig& c, std::string_view v) {
         const std::int64_t t = parse_integer(v);
         if (t < 1 || t > 1024) throw std::invalid_argument("must lie in [1, 1024]");
         c.threads = static_cast<int>(t);
       }},
      {"window",
       [](RunConfig& c, std::string_view v) {
         const std::int64_t n = parse_integer(v);
         if (n < 1 || n > 100000000) throw std::invalid_argument("must be >= 1");
         c.adaptive.policy.window = static_cast<int>(n);
       }},
      {"extension",
       [](RunConfig& c, std::string_view v) {
         c.adaptive.policy.min_extension = at_least(parse_real(v), 0.0, "must be >= 0");
       }},
      {"extension_percent",
       [](RunConfig& c, std::string_view v) {
         c.adaptive.policy.min_extension_percent = at_least(parse_real(v), 0.0, "must be >= 0");
       }},
      {"silence_len",
       [](RunConfig& c, std::string_view v) {
         const std::int64_t n = parse_integer(v);
         if (n < 1 || n > 1000) throw std::invalid_argument("must lie in [1, 1000]");
         c.adaptive.policy.silence_len = static_cast<int>(n);
       }},
      {"repeats",
       [](RunConfig& c, std::string_view v) {
         const std::int64_t n = parse_integer(v);
         if (n < 1 || n > 1001 || n % 2 == 0) throw std::invalid_argument("must be odd and >= 1");
         c.adaptive.policy.repeat_count = static_cast<int>(n);
       }},
      {"capsule_releases",
       [](RunConfig& c, std::string_view v) { c.adaptive.capsule_releases = positive(v); }},
      {"distributions",
       [](RunConfig& c, std::string_view v) {
         const std::int64_t n = parse_integer(v);
         if (n < 0 || n > 10000) throw std::invalid_argument("must lie in [0, 10000]");
         c.adaptive.random_distributions = static_cast<std::size_t>(n);
       }},
      {"allocations",
       [](RunConfig& c, std::string_view v) {
         c.adaptive.allocations.clear();
         for (const std::string& tok : split(v, " \t")) {
           c.adaptive.allocations.push_back(parse_allocation(tok));
         }
         if (c.adaptive.allocations.empty()) throw std::invalid_argument("empty list");
       }},
  };
  return table;
}

std::vector<double> parse_weights(std::string_view v) {
  std::vector<double> w;
  for (const std::string& tok : split(v, ", \t")) {
    w.push_back(at_least(parse_real(tok), 0.0, "weights must be >= 0"));
  }
  if (w.empty()) throw std::invalid_argument("empty weight list");
  return w;
}

std::vector<double> generated_values(const std::vector<std::string>& parts) {
  if (parts.size() != 4) throw std::invalid_argument("expected log|lin <min> <max> <points>");
  const bool log_spaced = parts[0] == "log";
  const double lo = parse_real(parts[1]);
  const double hi = parse_real(parts[2]);
  const std::int64_t points = parse_integer(parts[3]);
  if (points < 1 || points > 100000) throw std::invalid_argument("points must lie in [1, 100000]");
  if (log_spaced && !(lo > 0.0 && hi > 0.0)) {
    throw std::invalid_argument("log spacing needs positive bounds");
  }
  std::vector<double> out;
  for (std::int64_t i = 0; i < points; ++i) {
    if (points == 1) {
      out.push_back(lo);
      break;
    }
    if (i == points - 1) {
      out.push_back(hi);
      break;
    }
    const double f = static_cast<double>(i) / static_cast<double>(points - 1);
    out.push_back(log_spaced ? std::exp(std::log(lo) + f * (std::log(hi) - std::log(lo)))
                             : lo + f * (hi - lo));
  }
  return out;
}

SweepAxis parse_axis(const std::string& axis, std::string_view value) {
  const auto& names = sweep_axis_names();
  if (std::find(names.begin(), names.end(), axis) == names.end()) {
    throw std::invalid_argument("unknown sweep axis '" + axis + "'");
  }
  SweepAxis out{axis, {}};
  const std::vector<std::string> parts = split(value, " \t");
  if (parts.empty()) throw std::invalid_argument("empty sweep");
  if (parts[0] == "log" || parts[0] == "lin") {
    if (axis == "allocation") throw std::invalid_argument("allocation axes take a list");
    for (double v : generated_values(parts)) out.values.emplace_back(v);
  } else {
    for (const std::string& tok : parts) {
      if (axis == "allocation") {
        out.values.emplace_back(parse_allocation(tok));
      } else if (axis == "fnr") {
        out.values.emplace_back(parse_fnr(tok));
      } else {
        out.values.emplace_back(parse_real(tok));
      }
    }
  }
  // Range-check every value the same way a scalar key would be.
  for (const AxisValue& v : out.values) {
    ScenarioConfig probe;
    apply_axis(probe, axis, v);
    probe.validate();
    if (axis == "n_symbols" && std::floor(std::get<double>(v)) != std::get<double>(v)) {
      throw std::invalid_argument("n_symbols must be an integer");
    }
  }
  return out;
}

}  // namespace

std::optional<Command> parse_command(std::string_view name) {
  for (const auto& [text, cmd] : kCommands) {
    if (text == name) return cmd;
  }
  return std::nullopt;
}

const char* to_string(Command c) {
  for (const auto& [text, cmd] : kCommands) {
    if (cmd == c) return text.data();
  }
  return "?";
}

double parse_real(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty() || !std::isfinite(v)) {
    throw std::invalid_argument("'" + std::string(text) + "' is not a finite number");
  }
  return v;
}

std::uint64_t parse_unsigned(std::string_view text) {
  text = trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw std::invalid_argument("'" + std::string(text) + "' is not an unsigned 64-bit integer");
  }
  return v;
}

RunConfig parse_config_text(std::string_view text) {
  RunConfig cfg;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(line_no, "expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(line_no, "missing key before '='");
    if (value.empty()) throw ConfigError(line_no, "key '" + key + "' has no value");
    if (const auto prev = cfg.key_lines.find(key); prev != cfg.key_lines.end()) {
      throw ConfigError(line_no, "duplicate key '" + key + "' (first set on line " +
                                     std::to_string(prev->second) + ")");
    }

    try {
      if (key.starts_with("sweep.")) {
        cfg.axes.push_back(parse_axis(key.substr(6), value));
      } else if (key.starts_with("distribution.")) {
        const std::string label = key.substr(13);
        if (label.empty()) throw std::invalid_argument("missing distribution label");
        cfg.adaptive.distributions.push_back({label, parse_weights(value)});
      } else if (const auto it = setters().find(key); it != setters().end()) {
        it->second(cfg, value);
      } else {
        throw ConfigError(line_no, "unknown key '" + key + "'");
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(line_no, "key '" + key + "': " + e.what());
    }
    cfg.key_lines.emplace(key, line_no);
  }
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(0, "cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

void require_keys(const RunConfig& cfg, Command command) {
  auto has = [&](const std::string& key) {
    return cfg.key_lines.contains(key) || cfg.key_lines.contains("sweep." + key);
  };
  auto need = [&](const std::string& key) {
    if (!has(key)) throw ConfigError(0, "missing required key '" + key + "'");
  };
  switch (command) {
    case Command::ser1:
    case Command::ser2:
    case Command::rate:
    case Command::mass_ratio:
    case Command::run:
      need("distance");
      need("edge_ratio");
      if (!has("flow_ratio") && !has("flow")) {
        throw ConfigError(0, "missing required key 'flow_ratio' (or 'flow')");
      }
      break;
    case Command::adaptive:
      need("window");
      need("capsule_releases");
      break;
    case Command::thresholds:
      break;
  }
}

}  // namespace opsk
