#include "opsk/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace opsk {

void ScenarioConfig::validate() const {
  auto positive = [](double v, const char* what) {
    if (!std::isfinite(v) || v <= 0.0) throw std::invalid_argument(std::string(what) + " must be > 0");
  };
  positive(distance, "distance");
  positive(edge_ratio, "edge_ratio");
  if (flow) {
    positive(*flow, "flow");
  } else {
    positive(flow_ratio, "flow_ratio");
  }
  positive(release_mass, "mass");
  positive(m_ratio, "m_ratio");
  if (m_ratio < 1.0) throw std::invalid_argument("m_ratio must be >= 1");
  if (!std::isfinite(pn) || pn < 0.0) throw std::invalid_argument("pn must be >= 0");
  if (!(quality > 0.0 && quality <= 1.0)) throw std::invalid_argument("quality must lie in (0, 1]");
  if (n_symbols < 1) throw std::invalid_argument("n_symbols must be >= 1");
  for (const FlowNoiseRatio& r : fnr) {
    if (!r.is_noise_free() && !(r.value() > 0.0)) throw std::invalid_argument("fnr must be > 0");
  }
  diffusion.validate();
}

ReceiverGeometry ScenarioConfig::geometry() const {
  return ReceiverGeometry{{distance, 0.0, 0.0}, edge()};
}

Vec3 ScenarioConfig::mean_flow() const { return {flow_speed(), 0.0, 0.0}; }

FlowModel ScenarioConfig::flow_model() const {
  FlowModel m;
  m.mean = mean_flow();
  for (int k = 0; k < 3; ++k) m.sigma[k] = sigma_from_fnr(m.mean[k], fnr[k]);
  return m;
}

bool ScenarioConfig::noise_free_channel() const {
  return std::all_of(fnr.begin(), fnr.end(),
                     [](const FlowNoiseRatio& r) { return r.is_noise_free(); });
}

LinkPlan plan_link(const ScenarioConfig& cfg) {
  cfg.validate();
  LinkPlan plan;
  plan.geometry = cfg.geometry();
  plan.diffusion = cfg.diffusion;
  plan.flow = cfg.flow_model();
  const Vec3 mean = plan.flow.mean;
  plan.absorption_time = optimize_absorption_time(
      plan.geometry, mean, plan.diffusion, default_search(plan.geometry, mean, plan.diffusion));
  const TimingPlan timing(plan.absorption_time, cfg.m_ratio);
  plan.symbol_period = timing.symbol_period();
  plan.mass_ratio = mass_ratio(plan.geometry, mean, plan.diffusion, plan.absorption_time);
  return plan;
}

RunResult run_scenario(const ScenarioConfig& cfg) {
  const LinkPlan plan = plan_link(cfg);
  const BitAllocation& a = cfg.allocation;
  const OdorBank bank = generate_odor_bank(a, cfg.quality, cfg.release_mass);
  const ProcessorModel proc{cfg.pn};

  RandomStream bit_rng = make_stream(cfg.seed, StreamPurpose::payload_bits);
  RandomStream flow_rng = make_stream(cfg.seed, StreamPurpose::channel_flow);
  RandomStream proc_rng = make_stream(cfg.seed, StreamPurpose::processor_noise);

  const double t_a = plan.absorption_time;
  const double t_rest = plan.symbol_period - plan.absorption_time;
  const std::uint64_t mask = (std::uint64_t{1} << a.total_bits()) - 1u;

  RunResult out;
  out.n_symbols = cfg.n_symbols;
  out.symbol_rate = 1.0 / plan.symbol_period;
  out.mass_ratio_expected = plan.mass_ratio;
  out.absorption_time = plan.absorption_time;

  const double retire_below = retirement_threshold(cfg.release_mass * plan.mass_ratio);
  std::vector<ReleaseEvent> live;
  for (std::int64_t n = 1; n <= cfg.n_symbols; ++n) {
    const FlowSample u = sample_flow(plan.flow, n, flow_rng);
    const ClassCode sent = code_from_index(static_cast<std::uint32_t>(bit_rng() & mask), a);
    const Odor& odor = bank.odors_of(sent).front();
    live.push_back(ReleaseEvent{odor.id, cfg.release_mass, n, {0.0, 0.0, 0.0}, 0.0});

    for (ReleaseEvent& c : live) c = advance_drift(c, u, t_a);
    const AbsorptionResult absorbed = absorbed_mass(live, plan.geometry, plan.diffusion, n);

    std::optional<OdorId> picked;
    try {
      picked = select_greatest_mass(absorbed);
    } catch (const SilenceError&) {
      picked.reset();
    }
    // Always consume the processor draws so runs differing only in channel
    // parameters see the same measurement noise.
    const PerceptualVector measured = demodulate(odor.vector, proc, proc_rng);
    if (!picked || *picked != odor.id) {
      ++out.type1_errors;
    } else if (decode_received(measured, a) != sent) {
      ++out.type2_errors;
    }

    for (ReleaseEvent& c : live) c = advance_drift(c, u, t_rest);
    std::erase_if(live, [&](const ReleaseEvent& c) {
      return contribution_bound(c, plan.geometry, plan.diffusion, plan.flow.mean) < retire_below;
    });
  }
  out.ser = static_cast<double>(out.type1_errors + out.type2_errors) /
            static_cast<double>(out.n_symbols);
  return out;
}

double ser_type2_analytic(const OdorBank& bank, double pn) {
  if (!std::isfinite(pn) || pn < 0.0) throw std::invalid_argument("pn must be >= 0");
  if (!bank.single_odor_per_class()) {
    throw std::invalid_argument("analytic type-2 SER needs one odor per class");
  }
  if (pn == 0.0) return 0.0;
  const BitAllocation& a = bank.allocation();
  const double scale = pn * std::sqrt(2.0);
  // P(N(0,1) > x) without cancellation.
  auto upper_tail = [&](double distance) { return 0.5 * std::erfc(distance / scale); };

  double total = 0.0;
  const auto codes = all_codes(a);
  for (const ClassCode& c : codes) {
    const PerceptualVector& v = bank.odors_of(c).front().vector;
    double log_correct = 0.0;
    for (Dimension d : kDimensions) {
      const int n = a.bits(d);
      if (n == 0) continue;
      const double w = class_width(n);
      const std::uint32_t k = c[d];
      const std::uint32_t top = a.classes(d) - 1u;
      const double lo = static_cast<double>(k) * w;
      const double hi = static_cast<double>(k + 1) * w;
      double miss = 0.0;
      if (k < top) miss += upper_tail(hi - v[d]);
      if (k > 0) miss += upper_tail(v[d] - lo);
      log_correct += std::log1p(-std::min(miss, 1.0));
    }
    total += -std::expm1(log_correct);
  }
  return total / static_cast<double>(codes.size());
}

double symbol_rate(const ScenarioConfig& cfg) { return 1.0 / plan_link(cfg).symbol_period; }

const char* to_string(SweepMode mode) {
  switch (mode) {
    case SweepMode::type1: return "type1";
    case SweepMode::type2: return "type2";
    case SweepMode::full: return "full";
    case SweepMode::rate: return "rate";
    case SweepMode::mass_ratio: return "mass_ratio";
  }
  return "?";
}

const std::vector<std::string>& sweep_axis_names() {
  static const std::vector<std::string> names = {
      "allocation", "distance", "edge_ratio", "flow_ratio", "flow",     "fnr",
      "pn",         "quality",  "m_ratio",    "mass",       "n_symbols", "diffusion"};
  return names;
}

namespace {

double as_double(const std::string& axis, const AxisValue& v) {
  if (const double* d = std::get_if<double>(&v)) return *d;
  throw std::invalid_argument("axis '" + axis + "' takes numeric values");
}

}  // namespace

void apply_axis(ScenarioConfig& cfg, const std::string& axis, const AxisValue& value) {
  if (axis == "allocation") {
    const BitAllocation* a = std::get_if<BitAllocation>(&value);
    if (a == nullptr) throw std::invalid_argument("axis 'allocation' takes n_p,n_i,n_e values");
    cfg.allocation = *a;
  } else if (axis == "fnr") {
    if (const FlowNoiseRatio* r = std::get_if<FlowNoiseRatio>(&value)) {
      cfg.fnr = {*r, *r, *r};
    } else {
      const auto ratio = FlowNoiseRatio::ratio(as_double(axis, value));
      cfg.fnr = {ratio, ratio, ratio};
    }
  } else if (axis == "distance") {
    cfg.distance = as_double(axis, value);
  } else if (axis == "edge_ratio") {
    cfg.edge_ratio = as_double(axis, value);
  } else if (axis == "flow_ratio") {
    cfg.flow_ratio = as_double(axis, value);
    cfg.flow.reset();
  } else if (axis == "flow") {
    cfg.flow = as_double(axis, value);
  } else if (axis == "pn") {
    cfg.pn = as_double(axis, value);
  } else if (axis == "quality") {
    cfg.quality = as_double(axis, value);
  } else if (axis == "m_ratio") {
    cfg.m_ratio = as_double(axis, value);
  } else if (axis == "mass") {
    cfg.release_mass = as_double(axis, value);
  } else if (axis == "n_symbols") {
    cfg.n_symbols = static_cast<std::int64_t>(std::llround(as_double(axis, value)));
  } else if (axis == "diffusion") {
    cfg.diffusion = DiffusionModel::isotropic(as_double(axis, value));
  } else {
    throw std::invalid_argument("unknown sweep axis '" + axis + "'");
  }
}

std::vector<GridPoint> build_grid(const ScenarioConfig& base, const std::vector<SweepAxis>& axes) {
  std::size_t total = 1;
  for (const SweepAxis& ax : axes) {
    if (ax.values.empty()) throw std::invalid_argument("sweep axis '" + ax.name + "' is empty");
    total *= ax.values.size();
  }
  std::vector<GridPoint> grid;
  grid.reserve(total);
  for (std::size_t flat = 0; flat < total; ++flat) {
    GridPoint gp{base, {}};
    std::size_t stride = total;
    std::size_t rem = flat;
    for (const SweepAxis& ax : axes) {
      stride /= ax.values.size();
      const std::size_t idx = rem / stride;
      rem %= stride;
      apply_axis(gp.config, ax.name, ax.values[idx]);
      gp.axis_values.push_back(ax.values[idx]);
    }
    grid.push_back(std::move(gp));
  }
  return grid;
}

namespace {

void append_axis_header(std::vector<std::string>& header, const SweepAxis& ax) {
  if (ax.name == "allocation") {
    header.insert(header.end(), {"n_p", "n_i", "n_e"});
  } else {
    header.push_back(ax.name);
  }
}

void append_axis_cells(std::vector<Cell>& row, const AxisValue& v) {
  if (const BitAllocation* a = std::get_if<BitAllocation>(&v)) {
    for (Dimension d : kDimensions) row.emplace_back(static_cast<std::int64_t>(a->bits(d)));
  } else if (const FlowNoiseRatio* r = std::get_if<FlowNoiseRatio>(&v)) {
    if (r->is_noise_free()) {
      row.emplace_back(std::string("none"));
    } else {
      row.emplace_back(r->value());
    }
  } else {
    row.emplace_back(std::get<double>(v));
  }
}

}  // namespace

Table sweep(const ScenarioConfig& base, const std::vector<SweepAxis>& axes, SweepMode mode,
            int threads) {
  for (const SweepAxis& ax : axes) {
    if (mode == SweepMode::type1 && ax.name == "pn") {
      throw std::invalid_argument("type-1 sweeps force a noise-free processor; pn cannot be swept");
    }
    if (mode == SweepMode::type2 && ax.name == "fnr") {
      throw std::invalid_argument("type-2 sweeps force a noise-free channel; fnr cannot be swept");
    }
  }
  ScenarioConfig forced = base;
  if (mode == SweepMode::type1) forced.pn = 0.0;
  if (mode == SweepMode::type2) forced.fnr.fill(FlowNoiseRatio::noise_free());

  const std::vector<GridPoint> grid = build_grid(forced, axes);

  Table table;
  for (const SweepAxis& ax : axes) append_axis_header(table.header, ax);
  switch (mode) {
    case SweepMode::rate:
      table.header.insert(table.header.end(), {"absorption_time", "symbol_period", "symbol_rate"});
      break;
    case SweepMode::mass_ratio:
      table.header.insert(table.header.end(), {"absorption_time", "mass_ratio"});
      break;
    default:
      table.header.insert(table.header.end(),
                          {"ser", "type1_errors", "type2_errors", "n_symbols", "symbol_rate",
                           "mass_ratio", "absorption_time"});
      if (mode == SweepMode::type2) table.header.push_back("ser_type2_analytic");
  }

  const std::function<std::vector<Cell>(std::size_t)> evaluate = [&](std::size_t i) {
    const GridPoint& gp = grid[i];
    std::vector<Cell> row;
    for (const AxisValue& v : gp.axis_values) append_axis_cells(row, v);
    if (mode == SweepMode::rate || mode == SweepMode::mass_ratio) {
      const LinkPlan plan = plan_link(gp.config);
      row.emplace_back(plan.absorption_time);
      if (mode == SweepMode::rate) {
        row.emplace_back(plan.symbol_period);
        row.emplace_back(1.0 / plan.symbol_period);
      } else {
        row.emplace_back(plan.mass_ratio);
      }
      return row;
    }
    const RunResult r = run_scenario(gp.config);
    row.emplace_back(r.ser);
    row.emplace_back(r.type1_errors);
    row.emplace_back(r.type2_errors);
    row.emplace_back(r.n_symbols);
    row.emplace_back(r.symbol_rate);
    row.emplace_back(r.mass_ratio_expected);
    row.emplace_back(r.absorption_time);
    if (mode == SweepMode::type2) {
      const OdorBank bank =
          generate_odor_bank(gp.config.allocation, gp.config.quality, gp.config.release_mass);
      row.emplace_back(ser_type2_analytic(bank, gp.config.pn));
    }
    return row;
  };
  table.rows = parallel_map<std::vector<Cell>>(grid.size(), threads, evaluate);
  return table;
}

namespace {

double unit_uniform(RandomStream& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t draw_index(const std::vector<double>& cdf, RandomStream& rng) {
  const double u = unit_uniform(rng) * cdf.back();
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return std::min(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
}

}  // namespace

std::vector<ExtensionResult> adaptive_extension_analysis(
    const BitAllocation& start, const std::vector<std::vector<double>>& distributions,
    const UpdatePolicy& policy, double capsule_mass, double release_mass, std::uint64_t seed) {
  policy.validate();
  if (!(release_mass > 0.0)) throw std::invalid_argument("release mass must be > 0");
  std::vector<ExtensionResult> results;
  for (std::size_t j = 0; j < distributions.size(); ++j) {
    const std::vector<double>& weights = distributions[j];
    if (weights.size() != start.class_count()) {
      throw std::invalid_argument("distribution " + std::to_string(j) + " has " +
                                  std::to_string(weights.size()) + " weights, allocation " +
                                  start.to_string() + " has " +
                                  std::to_string(start.class_count()) + " symbols");
    }
    std::vector<double> cdf(weights.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
      if (!(weights[k] >= 0.0) || !std::isfinite(weights[k])) {
        throw std::invalid_argument("distribution weights must be finite and >= 0");
      }
      acc += weights[k];
      cdf[k] = acc;
    }
    if (!(acc > 0.0)) throw std::invalid_argument("distribution weights sum to zero");

    AdaptiveTransmitter tx(generate_odor_bank(start, 1.0, capsule_mass), policy, release_mass);
    RandomStream rng = make_stream(seed, StreamPurpose::symbol_source, j);

    ExtensionResult res;
    res.start = start;
    res.distribution_index = j;
    std::optional<std::int64_t> initial;
    std::int64_t last_checked = 0;
    while (true) {
      if (tx.at_check_point() && last_checked != tx.symbols_sent()) {
        last_checked = tx.symbols_sent();
        const AdaptiveTransmitter::Decision d = tx.evaluate();
        if (d.update_needed) {
          if (!initial) initial = tx.symbols_sent();
          if (!d.chosen) break;
          res.updates.push_back({tx.symbols_sent(), tx.allocation(), *d.chosen, d.candidates});
          tx.apply(*d.chosen);
        }
      }
      const ClassCode source =
          code_from_index(static_cast<std::uint32_t>(draw_index(cdf, rng)), start);
      if (!tx.can_send(rebin_code(source, start, tx.allocation()))) {
        // A capsule ran dry between check points: the link cannot send N
        // more symbols, so the update decision runs now.
        if (!initial) initial = tx.symbols_sent();
        const AdaptiveTransmitter::Decision d = tx.evaluate(true);
        if (!d.chosen) break;
        res.updates.push_back({tx.symbols_sent(), tx.allocation(), *d.chosen, d.candidates});
        tx.apply(*d.chosen);
        if (!tx.can_send(rebin_code(source, start, tx.allocation()))) break;
      }
      tx.send(rebin_code(source, start, tx.allocation()));
    }
    res.total_runtime = tx.symbols_sent();
    res.initial_runtime = initial.value_or(res.total_runtime);
    res.extension_percent =
        res.initial_runtime > 0
            ? 100.0 * static_cast<double>(res.total_runtime - res.initial_runtime) /
                  static_cast<double>(res.initial_runtime)
            : 0.0;
    res.final_allocation = tx.allocation();
    results.push_back(std::move(res));
  }
  return results;
}

std::vector<std::vector<double>> make_test_distributions(const BitAllocation& a,
                                                         std::size_t count,
                                                         std::uint64_t seed) {
  const std::size_t symbols = a.class_count();
  std::vector<std::vector<double>> out;
  out.emplace_back(symbols, 1.0 / static_cast<double>(symbols));
  for (std::size_t j = 0; j < count; ++j) {
    RandomStream rng = make_stream(seed, StreamPurpose::distribution, j);
    std::vector<double> w(symbols);
    for (double& x : w) x = std::exp(1.5 * standard_normal(rng));
    const double sum = std::accumulate(w.begin(), w.end(), 0.0);
    for (double& x : w) x /= sum;
    out.push_back(std::move(w));
  }
  return out;
}

}  // namespace opsk
