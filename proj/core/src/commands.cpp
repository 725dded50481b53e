#include "opsk/commands.hpp"

#include "opsk/csv.hpp"

namespace opsk {

namespace {

SweepMode sweep_mode(Command c) {
  switch (c) {
    case Command::ser1: return SweepMode::type1;
    case Command::ser2: return SweepMode::type2;
    case Command::rate: return SweepMode::rate;
    case Command::mass_ratio: return SweepMode::mass_ratio;
    case Command::run: return SweepMode::full;
    default: break;
  }
  throw std::invalid_argument(std::string("'") + to_string(c) + "' is not a sweep command");
}

}  // namespace

Table adaptive_table(const RunConfig& cfg) {
  if (!cfg.axes.empty()) throw ConfigError(0, "adaptive does not take sweep axes");
  const AdaptiveSettings& ad = cfg.adaptive;
  const std::vector<BitAllocation> starts =
      ad.allocations.empty() ? std::vector<BitAllocation>{cfg.scenario.allocation} : ad.allocations;
  const double capsule_mass = ad.capsule_releases * cfg.scenario.release_mass;

  struct Labelled {
    std::vector<std::string> labels;
    std::vector<std::vector<double>> weights;
  };
  std::vector<Labelled> inputs;
  for (const BitAllocation& a : starts) {
    Labelled in;
    in.weights = make_test_distributions(a, ad.random_distributions, cfg.scenario.seed);
    in.labels.push_back("uniform");
    for (std::size_t j = 1; j < in.weights.size(); ++j) in.labels.push_back("skewed" + std::to_string(j));
    for (const NamedDistribution& d : ad.distributions) {
      if (d.weights.size() != a.class_count()) {
        throw ConfigError(cfg.key_lines.at("distribution." + d.label),
                          "distribution '" + d.label + "' has " + std::to_string(d.weights.size()) +
                              " weights but allocation " + a.to_string() + " has " +
                              std::to_string(a.class_count()) + " symbols");
      }
      in.labels.push_back(d.label);
      in.weights.push_back(d.weights);
    }
    inputs.push_back(std::move(in));
  }

  const std::function<std::vector<ExtensionResult>(std::size_t)> analyse = [&](std::size_t i) {
    return adaptive_extension_analysis(starts[i], inputs[i].weights, ad.policy, capsule_mass,
                                       cfg.scenario.release_mass, cfg.scenario.seed);
  };
  const auto results = parallel_map<std::vector<ExtensionResult>>(starts.size(), cfg.threads, analyse);

  Table t;
  t.header = {"n_p", "n_i", "n_e", "distribution", "initial_runtime", "total_runtime",
              "updates", "extension_percent", "final_n_p", "final_n_i", "final_n_e"};
  for (std::size_t i = 0; i < starts.size(); ++i) {
    for (const ExtensionResult& r : results[i]) {
      std::vector<Cell> row;
      for (Dimension d : kDimensions) row.emplace_back(std::int64_t{starts[i].bits(d)});
      row.emplace_back(inputs[i].labels[r.distribution_index]);
      row.emplace_back(r.initial_runtime);
      row.emplace_back(r.total_runtime);
      row.emplace_back(static_cast<std::int64_t>(r.updates.size()));
      row.emplace_back(r.extension_percent);
      for (Dimension d : kDimensions) row.emplace_back(std::int64_t{r.final_allocation.bits(d)});
      t.rows.push_back(std::move(row));
    }
  }
  return t;
}

Table run_command(Command command, const RunConfig& cfg) {
  require_keys(cfg, command);
  if (command == Command::adaptive) return adaptive_table(cfg);
  const SweepMode mode = sweep_mode(command);
  try {
    return sweep(cfg.scenario, cfg.axes, mode, cfg.threads);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(0, e.what());
  }
}

std::string thresholds_line(int n) {
  std::string out;
  for (double t : build_thresholds(n)) {
    if (!out.empty()) out += ',';
    out += format_double(t);
  }
  return out;
}

}  // namespace opsk
