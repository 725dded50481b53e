#pragma once

#include <algorithm>
#include <array>
#include <cstdint>

#include "opsk/perceptual.hpp"
#include "opsk/random.hpp"

namespace opsk {

using Vec3 = std::array<double, 3>;

/// Clouds whose largest possible future absorbed mass drops below this are
/// dropped from the simulation (kg).
inline constexpr double kRetirementMass = 1e-18;

/// Receivers small enough that a fresh release delivers less than
/// kRetirementMass use this fraction of the expected absorbed mass instead.
inline constexpr double kRetirementFraction = 1e-9;

/// Retirement cutoff for a link whose fresh release absorbs `expected_absorbed` kg.
inline double retirement_threshold(double expected_absorbed) {
  return std::min(kRetirementMass, kRetirementFraction * expected_absorbed);
}

/// Per-axis diffusion coefficients (m^2/s).
struct DiffusionModel {
  Vec3 coefficient{};

  static DiffusionModel isotropic(double d) { return DiffusionModel{{d, d, d}}; }
  /// Throws std::invalid_argument unless all coefficients are finite and > 0.
  void validate() const;
};

/// Mean channel flow and the per-interval standard deviation around it (m/s).
struct FlowModel {
  Vec3 mean{};
  Vec3 sigma{};

  /// Throws std::invalid_argument for negative or non-finite sigma.
  void validate() const;
};

/// Flow realized during one symbol interval.
struct FlowSample {
  Vec3 u{};
  std::int64_t interval = 1;
};

/// Flow-rate-to-noise ratio of one axis. The noise-free case (sigma = 0) is a
/// distinct state rather than an infinite ratio.
class FlowNoiseRatio {
 public:
  static FlowNoiseRatio noise_free() { return FlowNoiseRatio(true, 0.0); }
  /// Throws std::invalid_argument for non-finite ratios.
  static FlowNoiseRatio ratio(double value);

  bool is_noise_free() const { return noise_free_; }
  /// Throws std::logic_error for the noise-free state.
  double value() const;

  bool operator==(const FlowNoiseRatio&) const = default;

 private:
  FlowNoiseRatio(bool noise_free, double value) : noise_free_(noise_free), value_(value) {}
  bool noise_free_;
  double value_;
};

/// v / sigma, or noise-free when sigma == 0. Throws for negative sigma.
FlowNoiseRatio fnr(double v, double sigma);

/// |v| / fnr, or 0 when noise-free. Throws unless fnr > 0.
double sigma_from_fnr(double v, const FlowNoiseRatio& fnr);

/// Independent normal draw per axis; axes with sigma = 0 return the mean
/// exactly. A standard normal is consumed for every axis regardless of sigma.
FlowSample sample_flow(const FlowModel& model, std::int64_t interval, RandomStream& rng);

/// One instantaneous release and the state of its cloud.
struct ReleaseEvent {
  OdorId odor;
  double mass = 0.0;                // kg
  std::int64_t release_interval = 1;
  Vec3 drift{};                     // accumulated advective displacement (m)
  double elapsed = 0.0;             // s since release
};

/// Concentration (kg/m^3) of a released cloud at `point`: the instantaneous
/// point-source solution of the advection-diffusion equation, centred on the
/// cloud's accumulated drift. Throws std::domain_error for elapsed <= 0.
double concentration(const ReleaseEvent& rel, const Vec3& point, const DiffusionModel& diff);

/// drift += u * dt, elapsed += dt. Throws std::invalid_argument for dt < 0.
ReleaseEvent advance_drift(ReleaseEvent rel, const FlowSample& u, double dt);

}  // namespace opsk
