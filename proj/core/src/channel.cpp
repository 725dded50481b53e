#include "opsk/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace opsk {

void DiffusionModel::validate() const {
  for (double d : coefficient) {
    if (!std::isfinite(d) || d <= 0.0) {
      throw std::invalid_argument("diffusion coefficients must be finite and > 0");
    }
  }
}

void FlowModel::validate() const {
  for (int k = 0; k < 3; ++k) {
    if (!std::isfinite(mean[k])) throw std::invalid_argument("mean flow must be finite");
    if (!std::isfinite(sigma[k]) || sigma[k] < 0.0) {
      throw std::invalid_argument("flow sigma must be finite and >= 0");
    }
  }
}

FlowNoiseRatio FlowNoiseRatio::ratio(double value) {
  if (!std::isfinite(value)) throw std::invalid_argument("FNR must be finite");
  return FlowNoiseRatio(false, value);
}

double FlowNoiseRatio::value() const {
  if (noise_free_) throw std::logic_error("noise-free channel has no finite FNR");
  return value_;
}

FlowNoiseRatio fnr(double v, double sigma) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("sigma must be >= 0");
  if (sigma == 0.0) return FlowNoiseRatio::noise_free();
  return FlowNoiseRatio::ratio(v / sigma);
}

double sigma_from_fnr(double v, const FlowNoiseRatio& ratio) {
  if (ratio.is_noise_free()) return 0.0;
  if (!(ratio.value() > 0.0)) throw std::invalid_argument("FNR must be > 0");
  return std::abs(v) / ratio.value();
}

FlowSample sample_flow(const FlowModel& model, std::int64_t interval, RandomStream& rng) {
  FlowSample s;
  s.interval = interval;
  for (int k = 0; k < 3; ++k) {
    if (!(model.sigma[k] >= 0.0 && std::isfinite(model.sigma[k]))) {
      throw std::invalid_argument("flow sigma must be finite and >= 0");
    }
    const double z = standard_normal(rng);
    s.u[k] = model.sigma[k] == 0.0 ? model.mean[k] : model.mean[k] + model.sigma[k] * z;
  }
  return s;
}

double concentration(const ReleaseEvent& rel, const Vec3& point, const DiffusionModel& diff) {
  const double t = rel.elapsed;
  if (!(t > 0.0)) throw std::domain_error("concentration needs elapsed time > 0");
  const auto& d = diff.coefficient;
  const double norm = rel.mass / (std::pow(4.0 * std::numbers::pi * t, 1.5) *
                                  std::sqrt(d[0] * d[1] * d[2]));
  double exponent = 0.0;
  for (int k = 0; k < 3; ++k) {
    const double r = point[k] - rel.drift[k];
    exponent += r * r / (4.0 * d[k] * t);
  }
  return norm * std::exp(-exponent);
}

ReleaseEvent advance_drift(ReleaseEvent rel, const FlowSample& u, double dt) {
  if (!(dt >= 0.0)) throw std::invalid_argument("advance_drift needs dt >= 0");
  for (int k = 0; k < 3; ++k) rel.drift[k] += u.u[k] * dt;
  rel.elapsed += dt;
  return rel;
}

}  // namespace opsk
