#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

namespace purify {

inline constexpr double kHbar = 1.054571817e-34;          // J s
inline constexpr double kElectronCharge = 1.602176634e-19; // C

/// Cartesian Bloch vector (x, y, z) of the conditional qubit state.
template <typename Scalar>
using BlochVector = Eigen::Matrix<Scalar, 3, 1>;

using BlochState = BlochVector<double>;

/// Cooper pair box device constants in SI units.
///
/// `nu` is the angular Josephson tunnelling rate; `gamma` is the measurement
/// strength as a rate (1/s). The effective capacitance is always derived from
/// the three physical capacitances.
struct DeviceParams {
  double nu = 2.0 * std::numbers::pi * 10.0e9;
  double c_j = 500.0e-18;
  double c_g = 0.5e-18;
  double c_p = 1.0e-18;
  double gamma = 7.5e7;

  /// Reference device: 10 GHz, 500/0.5/1.0 aF, 7.5e7 /s.
  static DeviceParams standard() { return {}; }

  double c_q() const;

  /// (2e)^2 / (hbar C_q): slope of the bias to z-rotation-rate map, rad/s.
  double charging_rate() const;

  double josephson_period() const { return 2.0 * std::numbers::pi / nu; }

  /// Throws std::domain_error when a capacitance, rate or frequency is out of range.
  void validate() const;
};

double effective_capacitance(double c_j, double c_g, double c_p);

/// z rotation rate produced by the gate bias, omega_z = (2e)^2/(hbar C_q) (1/2 - n_g).
double omega_z_from_bias(double n_g, const DeviceParams& params);

double bias_from_omega_z(double omega_z, const DeviceParams& params);

/// Eigenvalues of the two-level charge Hamiltonian (identity term dropped),
/// returned as (lower, upper) in joules.
std::pair<double, double> energy_levels(double n_g, const DeviceParams& params);

template <typename Derived>
typename Derived::Scalar impurity(const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  const Scalar value = Scalar(0.5) * (Scalar(1) - v.squaredNorm());
  return std::clamp(value, Scalar(0), Scalar(0.5));
}

/// Bloch vector length recovered from an impurity value, |a| = sqrt(1 - 2L).
template <typename Scalar>
Scalar bloch_length_from_impurity(Scalar l) {
  return std::sqrt(std::max(Scalar(0), Scalar(1) - Scalar(2) * l));
}

/// Rotation of a Bloch vector by angle |omega| dt about (omega_x, 0, omega_z).
///
/// Right-handed: positive omega_x carries +y toward +z.
template <typename Derived>
BlochVector<typename Derived::Scalar> rotate_about_xz(const Eigen::MatrixBase<Derived>& v,
                                                      typename Derived::Scalar omega_x,
                                                      typename Derived::Scalar omega_z,
                                                      typename Derived::Scalar dt) {
  using Scalar = typename Derived::Scalar;
  const Scalar rate = std::hypot(omega_x, omega_z);
  if (rate == Scalar(0) || dt == Scalar(0)) return v;
  const BlochVector<Scalar> axis(omega_x / rate, Scalar(0), omega_z / rate);
  return Eigen::AngleAxis<Scalar>(rate * dt, axis) * v;
}

/// Half-angle construction for the return-to-x-axis pulse: alpha = asin(z/r)/2.
///
/// Throws std::domain_error when z_limit exceeds the Bloch length.
double feedback_axis_angle(double z_limit, double bloch_len);

/// Signs of the triggering state: (sign x or +1 at x = 0, sign z or +1 at z = 0).
struct Quadrant {
  int x_sign = 1;
  int z_sign = 1;

  static Quadrant of(const BlochState& v) {
    return {v.x() < 0.0 ? -1 : 1, v.z() < 0.0 ? -1 : 1};
  }
};

/// Bias pulse that pi-rotates a point (sqrt(r^2 - z^2), 0, z) onto (r, 0, 0).
///
/// The rotation axis (cos a, 0, tilt_sign sin a) lies in the xz plane; the
/// Hamiltonian rotation vector during the pulse is (-nu, 0, omega_z), so a
/// positive tilt needs omega_z < 0, i.e. n_g above the degeneracy point.
struct PulsePlan {
  double alpha = 0.0;   ///< tilt magnitude, radians
  int tilt_sign = 1;    ///< +1 tilts the axis from +x toward +z
  int target_sign = 1;  ///< pulse lands on (target_sign r, 0, 0)
  double target_length = 0.0;
  double omega_z = 0.0; ///< signed rate; |omega_z| = nu tan(alpha)
  double n_g = 0.5;
  double tau = 0.0;     ///< pi / sqrt(nu^2 + omega_z^2)
};

PulsePlan pulse_plan(double z_limit, double bloch_len, Quadrant quadrant,
                     const DeviceParams& params);

/// Angle of the rotation axis above the xy plane for a steady bias, atan(|omega_z|/nu).
double tilted_axis_angle(double omega_z, const DeviceParams& params);

/// Rotation vector (-nu, 0, omega_z(n_g)) of the two-level Hamiltonian.
inline Eigen::Vector3d rotation_vector(double n_g, const DeviceParams& params) {
  return {-params.nu, 0.0, omega_z_from_bias(n_g, params)};
}

}  // namespace purify
