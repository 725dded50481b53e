#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "opsk/adaptive.hpp"
#include "opsk/channel.hpp"
#include "opsk/perceptual.hpp"
#include "opsk/receiver.hpp"

namespace opsk {

inline constexpr double kDefaultDiffusion = 0.14e-4;   // m^2/s
inline constexpr double kDefaultReleaseMass = 2.4e-9;  // kg
inline constexpr double kDefaultSymbolToSampling = 2.0;
inline constexpr std::int64_t kDefaultSymbols = 10000;

/// One simulated point-to-point link. The transmitter sits at the origin and
/// the receiver cube at (distance, 0, 0); edge length and flow scale with
/// distance unless an absolute flow is given.
struct ScenarioConfig {
  BitAllocation allocation{1, 1, 1};
  double distance = 0.1;             // m
  double edge_ratio = 0.05;          // l / distance
  double flow_ratio = 1.0;           // v_x / distance, 1/s
  std::optional<double> flow;        // absolute v_x in m/s; overrides flow_ratio
  std::array<FlowNoiseRatio, 3> fnr{FlowNoiseRatio::noise_free(), FlowNoiseRatio::noise_free(),
                                    FlowNoiseRatio::noise_free()};
  double pn = 0.0;
  double quality = 1.0;
  double release_mass = kDefaultReleaseMass;
  DiffusionModel diffusion = DiffusionModel::isotropic(kDefaultDiffusion);
  double m_ratio = kDefaultSymbolToSampling;
  std::int64_t n_symbols = kDefaultSymbols;
  std::uint64_t seed = 1;

  /// Throws std::invalid_argument describing the first violated constraint.
  void validate() const;

  double edge() const { return edge_ratio * distance; }
  double flow_speed() const { return flow ? *flow : flow_ratio * distance; }
  ReceiverGeometry geometry() const;
  Vec3 mean_flow() const;
  FlowModel flow_model() const;
  bool noise_free_channel() const;
};

/// Quantities fixed before any symbol is sent.
struct LinkPlan {
  ReceiverGeometry geometry;
  DiffusionModel diffusion;
  FlowModel flow;
  double absorption_time = 0.0;  // T_a
  double symbol_period = 0.0;    // T_s = m * T_a
  double mass_ratio = 0.0;       // expected fraction of a fresh release absorbed
};

/// Geometry, flow and the optimized absorption instant of `cfg`.
LinkPlan plan_link(const ScenarioConfig& cfg);

struct RunResult {
  double ser = 0.0;
  std::int64_t type1_errors = 0;
  std::int64_t type2_errors = 0;
  std::int64_t n_symbols = 0;
  double symbol_rate = 0.0;          // symbols/s
  double mass_ratio_expected = 0.0;
  double absorption_time = 0.0;      // s
};

/// End-to-end Monte-Carlo run of a link. Errors where the greatest-mass filter
/// picks the wrong odor (or nothing at all) are type 1; errors where the right
/// odor decodes to the wrong class are type 2.
RunResult run_scenario(const ScenarioConfig& cfg);

/// Exact type-2 symbol error rate of a one-odor-per-class bank under
/// processor noise pn, uniform symbol prior and boundary clamping.
/// pn = 0 yields exactly 0.
double ser_type2_analytic(const OdorBank& bank, double pn);

/// 1 / (m * T_a).
double symbol_rate(const ScenarioConfig& cfg);

enum class SweepMode { type1, type2, full, rate, mass_ratio };

const char* to_string(SweepMode mode);

/// Value of one sweep axis at one grid point.
using AxisValue = std::variant<double, FlowNoiseRatio, BitAllocation>;

struct SweepAxis {
  std::string name;  // distance, edge_ratio, flow_ratio, flow, fnr, pn, quality, m_ratio,
                     // mass, n_symbols, allocation
  std::vector<AxisValue> values;
};

/// Sets the field named by `axis` on `cfg`. Throws std::invalid_argument for
/// unknown axes or mismatched value types.
void apply_axis(ScenarioConfig& cfg, const std::string& axis, const AxisValue& value);

/// Names usable as sweep axes.
const std::vector<std::string>& sweep_axis_names();

struct GridPoint {
  ScenarioConfig config;
  std::vector<AxisValue> axis_values;  // one per axis, in axis order
};

/// Cartesian product of the axes over `base`; the first axis varies slowest.
std::vector<GridPoint> build_grid(const ScenarioConfig& base, const std::vector<SweepAxis>& axes);

/// One table cell.
using Cell = std::variant<std::int64_t, double, std::string>;

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;
};

/// Evaluates every grid point with `threads` workers. type1 forces a
/// noise-free processor and type2 a noise-free channel; sweeping the forced
/// parameter in those modes throws std::invalid_argument. Rows follow grid
/// order regardless of the worker count.
Table sweep(const ScenarioConfig& base, const std::vector<SweepAxis>& axes, SweepMode mode,
            int threads = 1);

/// Runs fn(0 .. count-1) on a pool of `threads` workers and returns the
/// results in index order. The first exception by index is rethrown.
template <typename T>
std::vector<T> parallel_map(std::size_t count, int threads,
                            const std::function<T(std::size_t)>& fn);

/// One accepted update of the adaptive analysis.
struct UpdateRecord {
  std::int64_t at_symbol = 0;
  BitAllocation from{1, 0, 0};
  BitAllocation to{1, 0, 0};
  std::vector<CandidateExtension> candidates;
};

struct ExtensionResult {
  BitAllocation start{1, 0, 0};
  std::size_t distribution_index = 0;
  std::int64_t initial_runtime = 0;  // symbols until the first update state
  std::int64_t total_runtime = 0;    // symbols until the system ends
  double extension_percent = 0.0;    // (total - initial) / initial * 100
  BitAllocation final_allocation{1, 0, 0};
  std::vector<UpdateRecord> updates;
};

/// Draws i.i.d. source symbols from each frequency vector (indexed by the
/// linear class index of `start`), transmits them through an
/// AdaptiveTransmitter with capsules of `capsule_mass` and `release_mass` per
/// symbol, applies updates whenever the last window shows the bank cannot
/// cover the next N symbols, and stops when no update is accepted or a capsule
/// runs dry. After an update each source symbol is sent as its merged class.
std::vector<ExtensionResult> adaptive_extension_analysis(
    const BitAllocation& start, const std::vector<std::vector<double>>& distributions,
    const UpdatePolicy& policy, double capsule_mass, double release_mass, std::uint64_t seed);

/// Uniform distribution followed by `count` skewed ones (log-normal weights),
/// for 2^K symbols.
std::vector<std::vector<double>> make_test_distributions(const BitAllocation& a,
                                                         std::size_t count,
                                                         std::uint64_t seed);

}  // namespace opsk

#include "opsk/detail/parallel.hpp"
