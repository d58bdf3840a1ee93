#pragma once

#include "purify/physics.hpp"

#include <cstdint>
#include <limits>
#include <random>

namespace purify {

enum class MeasurementScheme {
  /// Kraus update exp(l sz) rho exp(l sz) driven by the sampled current.
  /// Agrees with the Ito equations to first order and never leaves the ball.
  exact_map,
  /// Explicit increment of the Bloch equations, followed by the sphere clamp.
  euler_maruyama,
};

struct StepConfig {
  double dt = 2.0e-13;
  MeasurementScheme scheme = MeasurementScheme::exact_map;
  bool clamp_to_sphere = true;
  int sample_stride = 50;

  /// Throws std::invalid_argument when dt is non-positive, gamma*dt > 1e-3,
  /// dt exceeds 1/200 of the Josephson period, or the stride is < 1.
  void validate(const DeviceParams& params) const;
};

/// 64-bit avalanche mix (splitmix64 finaliser).
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Per-trajectory source of Wiener increments, a pure function of
/// (master_seed, trajectory_index).
class NoiseStream {
 public:
  NoiseStream(std::uint64_t master_seed, std::uint64_t trajectory_index)
      : engine_(mix64(mix64(master_seed) ^ mix64(trajectory_index + 0x632be59bd9b4e019ULL))) {}

  double standard_normal() { return normal_(engine_); }

  /// dW ~ N(0, dt).
  double increment(double dt) { return std::sqrt(dt) * normal_(engine_); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Explicit Bloch increment of the continuous z measurement:
/// dx = -(4 g dt + z sqrt(8g) dW) x, dy likewise, dz = (1 - z^2) sqrt(8g) dW.
template <typename Derived>
BlochVector<typename Derived::Scalar> measurement_increment(const Eigen::MatrixBase<Derived>& v,
                                                            typename Derived::Scalar dW,
                                                            typename Derived::Scalar gamma,
                                                            typename Derived::Scalar dt) {
  using Scalar = typename Derived::Scalar;
  const Scalar kick = std::sqrt(Scalar(8) * gamma) * dW;
  const Scalar shrink = Scalar(4) * gamma * dt + v.z() * kick;
  return {-shrink * v.x(), -shrink * v.y(), (Scalar(1) - v.z() * v.z()) * kick};
}

/// Measurement current sample I dt = 4 g z dt + sqrt(2g) dW for the same dW
/// that drives the paired state update.
template <typename Scalar>
Scalar measurement_current_sample(const BlochVector<Scalar>& v, Scalar dW, Scalar gamma,
                                  Scalar dt) {
  return Scalar(4) * gamma * v.z() * dt + std::sqrt(Scalar(2) * gamma) * dW;
}

/// Conditional state after one measurement interval, computed from the
/// current sample I dt as rho -> M rho M / tr with M = exp(I dt sz).
template <typename Scalar>
BlochVector<Scalar> measurement_map(const BlochVector<Scalar>& v, Scalar dW, Scalar gamma,
                                    Scalar dt) {
  const Scalar two_lambda = Scalar(2) * measurement_current_sample(v, dW, gamma, dt);
  const Scalar up = std::exp(two_lambda);
  const Scalar down = Scalar(1) / up;
  const Scalar c = Scalar(0.5) * (up + down);
  const Scalar s = Scalar(0.5) * (up - down);
  const Scalar norm = c + v.z() * s;
  return {v.x() / norm, v.y() / norm, (s + v.z() * c) / norm};
}

/// Closed-loop measurement update when feedback holds z at zero
/// continuously. The z kick is rotated straight back into the plane, so only
/// its quadratic variation survives and the squared length obeys
/// d(r^2) = 8 g (1 - r^2) dt with no noise; one Euler step of that is taken.
template <typename Scalar>
BlochVector<Scalar> equatorial_feedback_update(const BlochVector<Scalar>& v, Scalar gamma,
                                               Scalar dt) {
  const Scalar planar = std::hypot(v.x(), v.y());
  const Scalar r2 = v.squaredNorm();
  const Scalar len = std::sqrt(std::min(Scalar(1), r2 + Scalar(8) * gamma * dt * (Scalar(1) - r2)));
  if (planar == Scalar(0)) return {len, Scalar(0), Scalar(0)};
  return {len * v.x() / planar, len * v.y() / planar, Scalar(0)};
}

template <typename Scalar>
BlochVector<Scalar> hamiltonian_rotation(const BlochVector<Scalar>& v, Scalar omega_x,
                                         Scalar omega_z, Scalar dt) {
  return rotate_about_xz(v, omega_x, omega_z, dt);
}

/// Bias applied over one step. The first `hold_fraction` of the step uses
/// `n_g`, the remainder `n_g_after`; this lets a pulse end inside a step.
struct ControlOutput {
  double n_g = 0.5;
  double hold_fraction = 1.0;
  double n_g_after = 0.5;
  bool hamiltonian = true;
};

struct StepOutcome {
  BlochState state;
  double current = 0.0;  ///< I dt for the step
  bool clamped = false;
};

/// One step: exact Hamiltonian rotation over dt, then the measurement update
/// for the drawn dW, then the sphere clamp.
StepOutcome step(const BlochState& state, const ControlOutput& control,
                 const DeviceParams& params, const StepConfig& cfg, double dW);

StepOutcome step(const BlochState& state, const ControlOutput& control,
                 const DeviceParams& params, const StepConfig& cfg, NoiseStream& noise);

/// Same arithmetic as `step`, with the per-bias rotation matrix cached.
class Stepper {
 public:
  Stepper(const DeviceParams& params, const StepConfig& cfg);

  StepOutcome advance(const BlochState& state, const ControlOutput& control, double dW);

  /// Measurement-only update (no Hamiltonian), as used by the ideal protocols.
  StepOutcome measure(const BlochState& state, double dW) const;

  const DeviceParams& params() const { return params_; }
  const StepConfig& config() const { return cfg_; }

 private:
  const Eigen::Matrix3d& rotation_for(double n_g);

  DeviceParams params_;
  StepConfig cfg_;
  double cached_n_g_ = std::numeric_limits<double>::quiet_NaN();
  Eigen::Matrix3d cached_rotation_ = Eigen::Matrix3d::Identity();
};

/// Rotation matrix for the Hamiltonian at bias n_g acting for time t.
Eigen::Matrix3d hamiltonian_propagator(double n_g, const DeviceParams& params, double t);

}  // namespace purify
