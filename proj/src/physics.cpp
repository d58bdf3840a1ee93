#include "purify/physics.hpp"

#include <stdexcept>
#include <string>

namespace purify {

namespace {

constexpr double kTwoE = 2.0 * kElectronCharge;

// Bloch lengths come out of floating point updates; allow a hair above 1.
constexpr double kLengthSlack = 1e-12;

}  // namespace

double effective_capacitance(double c_j, double c_g, double c_p) {
  if (!(c_j > 0.0) || !(c_g >= 0.0) || !(c_p >= 0.0) || !(c_g + c_p > 0.0)) {
    throw std::domain_error("effective_capacitance: c_j must be positive, c_g and c_p "
                            "non-negative with a positive sum");
  }
  return (c_g * c_j + c_j * c_p + c_p * c_g) / (c_g + c_p);
}

double DeviceParams::c_q() const { return effective_capacitance(c_j, c_g, c_p); }

double DeviceParams::charging_rate() const { return kTwoE * kTwoE / (kHbar * c_q()); }

void DeviceParams::validate() const {
  if (!(nu > 0.0)) throw std::domain_error("nu must be positive");
  if (!(c_j > 0.0)) throw std::domain_error("c_j must be positive");
  if (!(c_g > 0.0)) throw std::domain_error("c_g must be positive");
  if (!(c_p > 0.0)) throw std::domain_error("c_p must be positive");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw std::domain_error("gamma must be >= 0");
}

double omega_z_from_bias(double n_g, const DeviceParams& params) {
  return params.charging_rate() * (0.5 - n_g);
}

double bias_from_omega_z(double omega_z, const DeviceParams& params) {
  return 0.5 - omega_z / params.charging_rate();
}

std::pair<double, double> energy_levels(double n_g, const DeviceParams& params) {
  const double e_el = kTwoE * kTwoE / params.c_q() * (0.5 - n_g);
  const double e_j = kHbar * params.nu;
  const double half = 0.5 * std::hypot(e_el, e_j);
  return {-half, half};
}

double feedback_axis_angle(double z_limit, double bloch_len) {
  if (!(z_limit > 0.0) || !(bloch_len <= 1.0 + kLengthSlack)) {
    throw std::domain_error("feedback_axis_angle: need 0 < z_limit and bloch_len <= 1");
  }
  if (z_limit > bloch_len * (1.0 + kLengthSlack)) {
    throw std::domain_error("feedback_axis_angle: z_limit " + std::to_string(z_limit) +
                            " exceeds Bloch length " + std::to_string(bloch_len));
  }
  return 0.5 * std::asin(std::min(1.0, z_limit / bloch_len));
}

PulsePlan pulse_plan(double z_limit, double bloch_len, Quadrant quadrant,
                     const DeviceParams& params) {
  PulsePlan plan;
  plan.alpha = feedback_axis_angle(z_limit, bloch_len);
  plan.tilt_sign = quadrant.x_sign * quadrant.z_sign;
  plan.target_sign = quadrant.x_sign;
  plan.target_length = bloch_len;
  // Axis (cos a, 0, s sin a) is antiparallel to (-nu, 0, omega_z) for omega_z = -s nu tan a.
  plan.omega_z = -plan.tilt_sign * params.nu * std::tan(plan.alpha);
  plan.n_g = bias_from_omega_z(plan.omega_z, params);
  plan.tau = std::numbers::pi / std::hypot(params.nu, plan.omega_z);
  return plan;
}

double tilted_axis_angle(double omega_z, const DeviceParams& params) {
  return std::atan(std::abs(omega_z) / params.nu);
}

}  // namespace purify
