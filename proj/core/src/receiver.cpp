#include "opsk/receiver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace opsk {

void ReceiverGeometry::validate() const {
  for (double c : center) {
    if (!std::isfinite(c)) throw std::invalid_argument("receiver centre must be finite");
  }
  if (!std::isfinite(edge) || edge <= 0.0) throw std::invalid_argument("receiver edge must be > 0");
}

TimingPlan::TimingPlan(double absorption_time, double symbol_to_sampling_ratio)
    : absorption_time_(absorption_time), ratio_(symbol_to_sampling_ratio) {
  if (!std::isfinite(absorption_time) || absorption_time <= 0.0) {
    throw std::invalid_argument("absorption time must be > 0");
  }
  if (!std::isfinite(symbol_to_sampling_ratio) || symbol_to_sampling_ratio < 1.0) {
    throw std::invalid_argument("symbol-to-sampling ratio must be >= 1");
  }
}

double AbsorptionResult::greatest_mass() const {
  double best = 0.0;
  for (const auto& [id, m] : per_odor_mass) best = std::max(best, m);
  return best;
}

double axis_absorption_factor(double center, double edge, double drift, double diffusion,
                              double t) {
  if (!(t > 0.0)) throw std::domain_error("absorption factor needs t > 0");
  if (!(edge > 0.0)) throw std::invalid_argument("edge must be > 0");
  if (!(diffusion > 0.0)) throw std::invalid_argument("diffusion must be > 0");
  const double s = std::sqrt(4.0 * diffusion * t);
  const double hi = (center + 0.5 * edge - drift) / s;
  const double lo = (center - 0.5 * edge - drift) / s;
  if (lo >= 0.0) return std::erfc(lo) - std::erfc(hi);
  if (hi <= 0.0) return std::erfc(-hi) - std::erfc(-lo);
  return std::erf(hi) - std::erf(lo);
}

double release_contribution(const ReleaseEvent& rel, const ReceiverGeometry& geom,
                            const DiffusionModel& diff) {
  double product = rel.mass / 8.0;
  for (int k = 0; k < 3; ++k) {
    product *= axis_absorption_factor(geom.center[k], geom.edge, rel.drift[k],
                                      diff.coefficient[k], rel.elapsed);
    if (product == 0.0) break;
  }
  return product;
}

AbsorptionResult absorbed_mass(std::span<const ReleaseEvent> releases,
                               const ReceiverGeometry& geom, const DiffusionModel& diff,
                               std::int64_t interval) {
  AbsorptionResult res;
  res.interval = interval;
  for (const ReleaseEvent& rel : releases) {
    res.per_odor_mass[rel.odor] += release_contribution(rel, geom, diff);
  }
  return res;
}

double contribution_bound(const ReleaseEvent& rel, const ReceiverGeometry& geom,
                          const DiffusionModel& diff, const Vec3& mean_flow) {
  if (!(rel.elapsed > 0.0)) return rel.mass;
  double bound = rel.mass;
  for (int k = 0; k < 3; ++k) {
    const double s = std::sqrt(4.0 * diff.coefficient[k] * rel.elapsed);
    const double near_face = geom.center[k] - 0.5 * geom.edge;
    const double far_face = geom.center[k] + 0.5 * geom.edge;
    double g;
    if (mean_flow[k] > 0.0 && rel.drift[k] > far_face) {
      g = 0.5 * std::erfc((rel.drift[k] - far_face) / s);
    } else if (mean_flow[k] < 0.0 && rel.drift[k] < near_face) {
      g = 0.5 * std::erfc((near_face - rel.drift[k]) / s);
    } else {
      g = std::erf(0.5 * geom.edge / s);
    }
    bound *= std::min(1.0, g);
  }
  return bound;
}

double absorption_objective(const ReceiverGeometry& geom, const Vec3& mean_flow,
                            const DiffusionModel& diff, double t) {
  double product = 1.0;
  for (int k = 0; k < 3; ++k) {
    product *= axis_absorption_factor(geom.center[k], geom.edge, mean_flow[k] * t,
                                      diff.coefficient[k], t);
  }
  return product;
}

AbsorptionSearch default_search(const ReceiverGeometry& geom, const Vec3& mean_flow,
                                const DiffusionModel& diff) {
  geom.validate();
  diff.validate();
  const double r2 = geom.center[0] * geom.center[0] + geom.center[1] * geom.center[1] +
                    geom.center[2] * geom.center[2];
  const double r = std::sqrt(r2);
  const double reach = std::max(r, geom.edge);
  const double d_min = std::min({diff.coefficient[0], diff.coefficient[1], diff.coefficient[2]});
  double t_fast = reach * reach / (6.0 * d_min);
  double t_slow = t_fast;
  const double speed = std::hypot(mean_flow[0], mean_flow[1], mean_flow[2]);
  if (speed > 0.0) {
    const double t_adv = reach / speed;
    t_fast = std::min(t_fast, t_adv);
    t_slow = std::max(t_slow, t_adv);
  }
  AbsorptionSearch s;
  s.t_lo = 1e-3 * t_fast;
  s.t_hi = 1e3 * t_slow;
  return s;
}

namespace {

// log(erfc(x)); the asymptotic series takes over before erfc underflows.
double log_erfc(double x) {
  if (x < 25.0) return std::log(std::erfc(x));
  const double r = 1.0 / (2.0 * x * x);
  const double series = 1.0 - r * (1.0 - 3.0 * r * (1.0 - 5.0 * r));
  return -x * x - std::log(x) - 0.5 * std::log(std::numbers::pi) + std::log(series);
}

// log of one erf bracket, evaluated on the tail that does not cancel.
double log_axis_factor(double center, double edge, double drift, double diffusion, double t) {
  const double s = std::sqrt(4.0 * diffusion * t);
  double hi = (center + 0.5 * edge - drift) / s;
  double lo = (center - 0.5 * edge - drift) / s;
  if (hi <= 0.0) {
    std::swap(hi, lo);
    hi = -hi;
    lo = -lo;
  }
  if (lo < 0.0) return std::log(std::erf(hi) - std::erf(lo));
  const double a = log_erfc(lo);
  const double b = log_erfc(hi);
  return a + std::log1p(-std::exp(b - a));
}

}  // namespace

double log_absorption_objective(const ReceiverGeometry& geom, const Vec3& mean_flow,
                                const DiffusionModel& diff, double t) {
  if (!(t > 0.0)) throw std::domain_error("absorption objective needs t > 0");
  double sum = 0.0;
  for (int k = 0; k < 3; ++k) {
    sum += log_axis_factor(geom.center[k], geom.edge, mean_flow[k] * t, diff.coefficient[k], t);
  }
  if (std::isnan(sum)) throw std::runtime_error("absorption objective is not finite");
  return sum;
}

double optimize_absorption_time(const ReceiverGeometry& geom, const Vec3& mean_flow,
                                const DiffusionModel& diff, const AbsorptionSearch& search) {
  geom.validate();
  diff.validate();
  if (!(search.t_lo > 0.0) || !(search.t_hi > search.t_lo) || !std::isfinite(search.t_hi)) {
    throw std::invalid_argument("absorption search needs 0 < t_lo < t_hi");
  }
  if (!(search.relative_tolerance > 0.0)) {
    throw std::invalid_argument("absorption search tolerance must be > 0");
  }
  const int n = std::max(search.grid_points, 8);

  // Work in u = log t; the objective spans many decades of time.
  const double u_lo = std::log(search.t_lo);
  const double u_hi = std::log(search.t_hi);
  const double du = (u_hi - u_lo) / (n - 1);
  auto f = [&](double u) { return log_absorption_objective(geom, mean_flow, diff, std::exp(u)); };

  int best_i = 0;
  double best_f = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double v = f(u_lo + du * i);
    if (v > best_f) {
      best_f = v;
      best_i = i;
    }
  }
  if (!std::isfinite(best_f)) {
    throw std::runtime_error("absorption objective vanishes over the whole search range");
  }
  if (best_i == 0 || best_i == n - 1) {
    throw std::runtime_error("absorption time search does not bracket a maximum");
  }

  double a = u_lo + du * (best_i - 1);
  double b = u_lo + du * (best_i + 1);
  double best_u = u_lo + du * best_i;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  auto track = [&](double u, double v) {
    if (v > best_f) {
      best_f = v;
      best_u = u;
    }
  };
  track(c, fc);
  track(d, fd);
  for (int iter = 0; iter < 200 && (b - a) > search.relative_tolerance; ++iter) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
      track(c, fc);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
      track(d, fd);
    }
  }
  return std::exp(best_u);
}

double mass_ratio(const ReceiverGeometry& geom, const Vec3& mean_flow, const DiffusionModel& diff,
                  double absorption_time) {
  if (!(absorption_time > 0.0)) throw std::invalid_argument("mass ratio needs T_a > 0");
  return absorption_objective(geom, mean_flow, diff, absorption_time) / 8.0;
}

OdorId select_greatest_mass(const AbsorptionResult& res) {
  const OdorId* best = nullptr;
  double best_mass = 0.0;
  for (const auto& [id, m] : res.per_odor_mass) {
    if (m > best_mass) {
      best_mass = m;
      best = &id;
    }
  }
  if (best == nullptr) throw SilenceError("no odor was absorbed");
  return *best;
}

PerceptualVector demodulate(const PerceptualVector& true_vector, const ProcessorModel& proc,
                            RandomStream& rng) {
  if (!(proc.pn >= 0.0) || !std::isfinite(proc.pn)) {
    throw std::invalid_argument("processor noise must be finite and >= 0");
  }
  PerceptualVector out = true_vector;
  for (Dimension d : kDimensions) {
    const double z = standard_normal(rng);
    if (proc.pn == 0.0) continue;
    out[d] = std::clamp(true_vector[d] + proc.pn * z, 0.0, scale_top());
  }
  return out;
}

ClassCode decode_received(const PerceptualVector& v, const BitAllocation& a) {
  return classify(v, a);
}

bool detect_silence(const AbsorptionResult& res, double threshold_mass) {
  if (!(threshold_mass > 0.0)) throw std::invalid_argument("silence threshold must be > 0");
  return res.greatest_mass() < threshold_mass;
}

double default_silence_threshold(double release_mass, double expected_mass_ratio) {
  return 0.1 * release_mass * expected_mass_ratio;
}

}  // namespace opsk
