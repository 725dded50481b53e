#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>

#include "opsk/channel.hpp"
#include "opsk/perceptual.hpp"
#include "opsk/random.hpp"

namespace opsk {

/// Axis-aligned absorbing cube.
struct ReceiverGeometry {
  Vec3 center{};
  double edge = 0.0;  // m

  void validate() const;
};

/// Absorption instant within a symbol interval and the symbol period derived
/// from it (T_s = m * T_a).
class TimingPlan {
 public:
  /// Throws std::invalid_argument unless absorption_time > 0 and ratio >= 1.
  TimingPlan(double absorption_time, double symbol_to_sampling_ratio);

  double absorption_time() const { return absorption_time_; }
  double ratio() const { return ratio_; }
  double symbol_period() const { return ratio_ * absorption_time_; }

 private:
  double absorption_time_;
  double ratio_;
};

/// Mass absorbed in one interval, split by odor.
struct AbsorptionResult {
  std::map<OdorId, double> per_odor_mass;
  std::int64_t interval = 0;

  double greatest_mass() const;
};

/// Gaussian measurement noise of the perceptual processor.
struct ProcessorModel {
  double pn = 0.0;
};

/// Raised when an absorption result has no positive mass to select.
class SilenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fraction bracket of one axis: erf((c + l/2 - x)/s) - erf((c - l/2 - x)/s)
/// with s = sqrt(4 D t). Evaluated through erfc on the tails so that values
/// far from the cloud keep their relative accuracy. Throws for t <= 0.
double axis_absorption_factor(double center, double edge, double drift, double diffusion,
                              double t);

/// Mass of one cloud inside the cube: (mass / 8) * B_x * B_y * B_z.
double release_contribution(const ReleaseEvent& rel, const ReceiverGeometry& geom,
                            const DiffusionModel& diff);

/// Per-odor absorbed mass of every live cloud. Absorption does not deplete
/// the clouds.
AbsorptionResult absorbed_mass(std::span<const ReleaseEvent> releases,
                               const ReceiverGeometry& geom, const DiffusionModel& diff,
                               std::int64_t interval = 0);

/// Upper bound on what `rel` can contribute at any later absorption,
/// assuming the cloud keeps moving with the sign of `mean_flow` per axis.
/// Axes on which the cloud has already passed the cube use the mass fraction
/// still behind the cube's far face; other axes use the best case of a cloud
/// centred on the cube.
double contribution_bound(const ReleaseEvent& rel, const ReceiverGeometry& geom,
                          const DiffusionModel& diff, const Vec3& mean_flow);

/// B_x * B_y * B_z for a cloud released at the origin that drifted with
/// `mean_flow` for time t.
double absorption_objective(const ReceiverGeometry& geom, const Vec3& mean_flow,
                            const DiffusionModel& diff, double t);

/// log(absorption_objective), finite even where the product underflows.
double log_absorption_objective(const ReceiverGeometry& geom, const Vec3& mean_flow,
                                const DiffusionModel& diff, double t);

struct AbsorptionSearch {
  double t_lo = 0.0;
  double t_hi = 0.0;
  double relative_tolerance = 1e-12;
  int grid_points = 512;
};

/// Bounds spanning three decades either side of the advective and diffusive
/// arrival times of the receiver centre.
AbsorptionSearch default_search(const ReceiverGeometry& geom, const Vec3& mean_flow,
                                const DiffusionModel& diff);

/// Absorption instant maximizing absorption_objective: log-spaced grid scan,
/// then golden-section refinement around the best grid point. Throws
/// std::runtime_error when the maximum sits on a search bound or the objective
/// vanishes everywhere.
double optimize_absorption_time(const ReceiverGeometry& geom, const Vec3& mean_flow,
                                const DiffusionModel& diff, const AbsorptionSearch& search);

/// Expected fraction of a fresh release absorbed at T_a under mean flow.
double mass_ratio(const ReceiverGeometry& geom, const Vec3& mean_flow,
                  const DiffusionModel& diff, double absorption_time);

/// Odor with the largest absorbed mass; ties go to the smallest id. Throws
/// SilenceError when nothing positive was absorbed.
OdorId select_greatest_mass(const AbsorptionResult& res);

/// Adds N(0, pn^2) noise per component and clamps into [0, 100 - ulp].
/// Three normals are consumed per call even when pn = 0.
PerceptualVector demodulate(const PerceptualVector& true_vector, const ProcessorModel& proc,
                            RandomStream& rng);

/// Receiver-side class decision; the same mapping as classify.
ClassCode decode_received(const PerceptualVector& v, const BitAllocation& a);

/// True iff the greatest per-odor mass is strictly below `threshold_mass`.
bool detect_silence(const AbsorptionResult& res, double threshold_mass);

/// 0.1 * released mass * expected mass ratio.
double default_silence_threshold(double release_mass, double expected_mass_ratio);

}  // namespace opsk
