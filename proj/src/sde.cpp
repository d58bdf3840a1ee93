#include "purify/sde.hpp"

#include <stdexcept>
#include <string>

namespace purify {

void StepConfig::validate(const DeviceParams& params) const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be positive");
  if (params.gamma * dt > 1e-3) {
    throw std::invalid_argument("gamma*dt = " + std::to_string(params.gamma * dt) +
                                " exceeds 1e-3");
  }
  if (params.nu > 0.0 && dt > params.josephson_period() / 200.0) {
    throw std::invalid_argument("dt exceeds 1/200 of the Josephson period");
  }
  if (sample_stride < 1) throw std::invalid_argument("sample_stride must be >= 1");
}

Eigen::Matrix3d hamiltonian_propagator(double n_g, const DeviceParams& params, double t) {
  const Eigen::Vector3d omega = rotation_vector(n_g, params);
  const double rate = omega.norm();
  if (rate == 0.0 || t == 0.0) return Eigen::Matrix3d::Identity();
  return Eigen::AngleAxisd(rate * t, omega / rate).toRotationMatrix();
}

namespace {

StepOutcome finish(BlochState rotated, const DeviceParams& params, const StepConfig& cfg,
                   double dW) {
  StepOutcome out;
  out.current = measurement_current_sample(rotated, dW, params.gamma, cfg.dt);
  switch (cfg.scheme) {
    case MeasurementScheme::exact_map:
      out.state = measurement_map(rotated, dW, params.gamma, cfg.dt);
      break;
    case MeasurementScheme::euler_maruyama:
      out.state = rotated + measurement_increment(rotated, dW, params.gamma, cfg.dt);
      break;
  }
  if (cfg.clamp_to_sphere) {
    const double r2 = out.state.squaredNorm();
    if (r2 > 1.0) {
      out.state /= std::sqrt(r2);
      out.clamped = true;
    }
  }
  return out;
}

}  // namespace

StepOutcome step(const BlochState& state, const ControlOutput& control,
                 const DeviceParams& params, const StepConfig& cfg, double dW) {
  BlochState rotated = state;
  if (control.hamiltonian) {
    const double first = cfg.dt * control.hold_fraction;
    rotated = hamiltonian_propagator(control.n_g, params, first) * rotated;
    if (control.hold_fraction < 1.0) {
      rotated = hamiltonian_propagator(control.n_g_after, params, cfg.dt - first) * rotated;
    }
  }
  return finish(rotated, params, cfg, dW);
}

StepOutcome step(const BlochState& state, const ControlOutput& control,
                 const DeviceParams& params, const StepConfig& cfg, NoiseStream& noise) {
  return step(state, control, params, cfg, noise.increment(cfg.dt));
}

Stepper::Stepper(const DeviceParams& params, const StepConfig& cfg)
    : params_(params), cfg_(cfg) {}

const Eigen::Matrix3d& Stepper::rotation_for(double n_g) {
  if (n_g != cached_n_g_) {
    cached_rotation_ = hamiltonian_propagator(n_g, params_, cfg_.dt);
    cached_n_g_ = n_g;
  }
  return cached_rotation_;
}

StepOutcome Stepper::advance(const BlochState& state, const ControlOutput& control, double dW) {
  if (!control.hamiltonian) return measure(state, dW);
  if (control.hold_fraction >= 1.0) {
    return finish(rotation_for(control.n_g) * state, params_, cfg_, dW);
  }
  const double first = cfg_.dt * control.hold_fraction;
  BlochState rotated = hamiltonian_propagator(control.n_g, params_, first) * state;
  rotated = hamiltonian_propagator(control.n_g_after, params_, cfg_.dt - first) * rotated;
  return finish(rotated, params_, cfg_, dW);
}

StepOutcome Stepper::measure(const BlochState& state, double dW) const {
  return finish(state, params_, cfg_, dW);
}

}  // namespace purify
