#include <doctest.h>

#include "purify/physics.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

using namespace purify;

namespace {

constexpr double kAf = 1e-18;
constexpr double kDeg = std::numbers::pi / 180.0;

// Direct rotation by the matrix exponential of the cross-product generator.
BlochState rodrigues(const BlochState& v, const Eigen::Vector3d& omega, double t) {
  const double rate = omega.norm();
  if (rate == 0.0) return v;
  const Eigen::Vector3d k = omega / rate;
  const double th = rate * t;
  return v * std::cos(th) + k.cross(v) * std::sin(th) + k * k.dot(v) * (1.0 - std::cos(th));
}

}  // namespace

TEST_CASE("effective capacitance") {
  CHECK(effective_capacitance(500 * kAf, 0.5 * kAf, 1.0 * kAf) / kAf == doctest::Approx(500.3333333).epsilon(1e-9));
  CHECK(effective_capacitance(500 * kAf, 0.5 * kAf, 0.0) / kAf == doctest::Approx(500.0).epsilon(1e-12));
  CHECK(effective_capacitance(2 * kAf, 2 * kAf, 2 * kAf) / kAf == doctest::Approx(3.0).epsilon(1e-12));
  CHECK_THROWS_AS(effective_capacitance(0.0, 1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(effective_capacitance(1.0, -1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(effective_capacitance(1.0, 0.0, 0.0), std::domain_error);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.1, 1000.0);
  for (int i = 0; i < 100; ++i) {
    const double cj = u(rng), cg = u(rng), cp = u(rng);
    // Series combination of c_g and c_p in parallel with c_j, written out differently.
    const double expected = cj + cg * cp / (cg + cp);
    CHECK(effective_capacitance(cj, cg, cp) == doctest::Approx(expected).epsilon(1e-13));
  }
}

TEST_CASE("bias map") {
  const DeviceParams p = DeviceParams::standard();
  CHECK(p.c_q() / kAf == doctest::Approx(500.333).epsilon(1e-6));
  CHECK(p.charging_rate() == doctest::Approx(1.94601e12).epsilon(1e-5));
  CHECK(omega_z_from_bias(0.5, p) == 0.0);
  CHECK(omega_z_from_bias(0.4, p) > 0.0);
  CHECK(omega_z_from_bias(0.5323, p) / -p.nu == doctest::Approx(1.0).epsilon(5e-3));
  CHECK(std::abs(omega_z_from_bias(0.70, p)) / p.nu == doctest::Approx(6.19).epsilon(2e-3));
  CHECK(bias_from_omega_z(0.0, p) == 0.5);
  CHECK(bias_from_omega_z(-p.nu, p) == doctest::Approx(0.5323).epsilon(0.0001 / 0.5323));
  for (double g : {0.4, 0.5, 0.7}) CHECK(bias_from_omega_z(omega_z_from_bias(g, p), p) == doctest::Approx(g).epsilon(1e-15));
  // Affine with negative slope.
  const double s1 = omega_z_from_bias(0.6, p) - omega_z_from_bias(0.5, p);
  const double s2 = omega_z_from_bias(0.9, p) - omega_z_from_bias(0.8, p);
  CHECK(s1 < 0.0);
  CHECK(s1 == doctest::Approx(s2).epsilon(1e-12));
}

TEST_CASE("energy levels") {
  DeviceParams p = DeviceParams::standard();
  const auto [lo, hi] = energy_levels(0.5, p);
  CHECK(hi - lo == doctest::Approx(kHbar * p.nu).epsilon(1e-12));
  CHECK(lo == doctest::Approx(-hi).epsilon(1e-15));
  for (double g : {0.1, 0.3, 0.45}) {
    CHECK(energy_levels(g, p).second == doctest::Approx(energy_levels(1.0 - g, p).second).epsilon(1e-12));
  }
  p.nu = 1e-300;
  const double e_el = std::pow(2 * kElectronCharge, 2) / p.c_q() * (0.5 - 0.3);
  CHECK(energy_levels(0.3, p).second * 2.0 == doctest::Approx(std::abs(e_el)).epsilon(1e-12));
}

TEST_CASE("impurity") {
  CHECK(impurity(BlochState(0, 0, 0)) == 0.5);
  CHECK(impurity(BlochState(1, 0, 0)) == 0.0);
  CHECK(impurity(BlochState(0.6, 0, 0.8)) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(impurity(BlochState(0.3, 0.4, 0.0)) == doctest::Approx(0.375));
  CHECK(bloch_length_from_impurity(0.375) == doctest::Approx(0.5));
  CHECK(impurity(Eigen::Vector3f(0.0f, 0.0f, 0.5f)) == doctest::Approx(0.375f));
}

TEST_CASE("rotation about the xz plane") {
  const double nu = 2 * std::numbers::pi * 10e9;
  const BlochState v(0.1, 0.2, 0.3);
  const BlochState w = rotate_about_xz(v, nu, 0.0, std::numbers::pi / nu);
  CHECK(w.x() == doctest::Approx(0.1));
  CHECK(w.y() == doctest::Approx(-0.2));
  CHECK(w.z() == doctest::Approx(-0.3));
  CHECK(rotate_about_xz(v, 0.0, 0.0, 1.0) == v);
  // Positive omega_x rotates +y toward +z.
  CHECK(rotate_about_xz(BlochState(0, 1, 0), nu, 0.0, 0.25 * std::numbers::pi / nu).z() > 0.7);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const BlochState s(u(rng), u(rng), u(rng));
    const double ox = 1e11 * u(rng), oz = 1e12 * u(rng), t = 1e-11 * (1.0 + u(rng));
    const BlochState a = rotate_about_xz(s, ox, oz, t);
    CHECK((a - rodrigues(s, Eigen::Vector3d(ox, 0, oz), t)).norm() < 1e-12);
    CHECK(impurity(a) == doctest::Approx(impurity(s)).epsilon(1e-12));
  }
}

TEST_CASE("feedback axis angle") {
  CHECK(feedback_axis_angle(0.7, 0.7) == doctest::Approx(std::numbers::pi / 4));
  CHECK(feedback_axis_angle(0.333, 1.0) / kDeg == doctest::Approx(9.727).epsilon(2e-4));
  CHECK_THROWS_AS(feedback_axis_angle(0.5, 0.4), std::domain_error);
  CHECK_THROWS_AS(feedback_axis_angle(0.0, 0.4), std::domain_error);
}

TEST_CASE("pulse plan") {
  const DeviceParams p = DeviceParams::standard();
  const PulsePlan half = pulse_plan(1.0, 1.0, {1, 1}, p);
  CHECK(std::abs(half.omega_z) == doctest::Approx(p.nu));
  CHECK(half.tau == doctest::Approx(35.355e-12).epsilon(1e-4));
  CHECK(pulse_plan(1e-9, 1.0, {1, 1}, p).tau == doctest::Approx(50e-12).epsilon(1e-6));

  const PulsePlan typical = pulse_plan(0.333, 1.0, {1, 1}, p);
  CHECK(typical.alpha / kDeg == doctest::Approx(9.727).epsilon(2e-4));
  CHECK(typical.n_g == doctest::Approx(0.5055).epsilon(1e-4 / 0.5055));
  CHECK(typical.tau == doctest::Approx(49.3e-12).epsilon(2e-3));

  // Landing on the x-axis pole from every quadrant.
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const double r = 0.05 + 0.95 * u(rng);
    const double zl = r * (1e-6 + (1.0 - 1e-6) * u(rng));
    const int sx = u(rng) < 0.5 ? -1 : 1;
    const int sz = u(rng) < 0.5 ? -1 : 1;
    const BlochState start(sx * std::sqrt(r * r - zl * zl), 0.0, sz * zl);
    const PulsePlan plan = pulse_plan(zl, r, Quadrant::of(start), p);
    const BlochState end = rodrigues(start, rotation_vector(plan.n_g, p), plan.tau);
    CHECK((end - BlochState(sx * r, 0, 0)).norm() < 1e-12);
    CHECK(plan.alpha > 0.0);
    CHECK(plan.alpha <= std::numbers::pi / 4 + 1e-15);
    CHECK(plan.n_g >= 0.4677);
    CHECK(plan.n_g <= 0.5323);
  }
}

TEST_CASE("tilted axis angle") {
  const DeviceParams p = DeviceParams::standard();
  CHECK(tilted_axis_angle(0.0, p) == 0.0);
  CHECK(tilted_axis_angle(p.nu, p) == doctest::Approx(std::numbers::pi / 4));
  CHECK(tilted_axis_angle(-p.nu, p) == doctest::Approx(std::numbers::pi / 4));
  CHECK(tilted_axis_angle(omega_z_from_bias(0.70, p), p) / kDeg == doctest::Approx(80.8).epsilon(1.5 / 80.8));
  CHECK(tilted_axis_angle(1e6 * p.nu, p) < std::numbers::pi / 2);
  CHECK(tilted_axis_angle(2 * p.nu, p) > tilted_axis_angle(p.nu, p));
}

TEST_CASE("device validation") {
  DeviceParams p;
  CHECK_NOTHROW(p.validate());
  p.gamma = -1.0;
  CHECK_THROWS_AS(p.validate(), std::domain_error);
  p = {};
  p.nu = 0.0;
  CHECK_THROWS_AS(p.validate(), std::domain_error);
}
