#include <doctest.h>

#include "purify/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

using namespace purify;

namespace {

constexpr double kGamma = 7.5e7;

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double whole, double fa,
                        double fm, double fb, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(f, a, m, left, fa, flm, fm, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, right, fm, frm, fb, 0.5 * tol, depth - 1);
}

// Reference evaluation in the unscaled variable x over +-40 sqrt(t).
double reference_L(double t, double g) {
  auto f = [&](double x) { return std::exp(-x * x / (2 * t)) / std::cosh(std::sqrt(8 * g) * x); };
  const double w = 40.0 * std::sqrt(t);
  const double fa = f(-w), fm = f(0.0), fb = f(w);
  const double whole = 2 * w / 6.0 * (fa + 4 * fm + fb);
  // The integral is at least of order min(sqrt(t), 1/sqrt(8 g)).
  const double scale = std::min(std::sqrt(t), 1.0 / std::sqrt(8 * g));
  const double integral = adaptive_simpson(f, -w, w, whole, fa, fm, fb, 1e-13 * scale, 40);
  return std::exp(-4 * g * t) / std::sqrt(8 * std::numbers::pi * t) * integral;
}

}  // namespace

TEST_CASE("no-Hamiltonian impurity: frozen values") {
  CHECK(impurity_no_hamiltonian(0.0, kGamma) == 0.5);
  CHECK(impurity_no_hamiltonian(5e-9, kGamma) == doctest::Approx(0.06215895119357068).epsilon(1e-9));
  CHECK_THROWS_AS(impurity_no_hamiltonian(-1e-9, kGamma), std::domain_error);
}

TEST_CASE("no-Hamiltonian impurity: independent quadrature") {
  for (double t : {1e-11, 1e-10, 1e-9, 3e-9, 7.5e-9, 1e-8, 2e-8, 4e-8}) {
    CHECK(impurity_no_hamiltonian(t, kGamma) == doctest::Approx(reference_L(t, kGamma)).epsilon(1e-8));
  }
}

TEST_CASE("no-Hamiltonian impurity: monotone and bounded") {
  double prev = 0.5;
  for (int i = 1; i <= 1000; ++i) {
    const double l = impurity_no_hamiltonian(i * 4e-11, kGamma);
    CHECK(l < prev);
    CHECK(l > 0.0);
    prev = l;
  }
}

TEST_CASE("no-Hamiltonian impurity: node doubling") {
  QuadratureConfig fine;
  fine.nodes = 4001;
  for (double t : {1e-10, 1e-9, 1e-8, 5e-8}) {
    const double a = impurity_no_hamiltonian(t, kGamma);
    const double b = impurity_no_hamiltonian(t, kGamma, fine);
    CHECK(std::abs(a - b) <= 1e-9 * b);
  }
  QuadratureConfig bad;
  bad.nodes = 2000;
  CHECK_THROWS_AS(impurity_no_hamiltonian(1e-9, kGamma, bad), std::invalid_argument);
}

TEST_CASE("ideal I impurity") {
  CHECK(impurity_ideal_I(0.0, kGamma) == 0.5);
  CHECK(impurity_ideal_I(1.0 / (8 * kGamma), kGamma) == doctest::Approx(0.5 / std::numbers::e));
  CHECK(time_to_impurity_I(0.5, kGamma) == 0.0);
  CHECK(time_to_impurity_I(1e-3, kGamma) == doctest::Approx(10.35768e-9).epsilon(1e-6));
  CHECK_THROWS_AS(time_to_impurity_I(0.0, kGamma), std::domain_error);
}

TEST_CASE("inversion: frozen times") {
  struct Row {
    double eps, t2, t1;
  };
  const Row rows[] = {{0.3, 1.00663, 0.85138},   {0.1, 3.71314, 2.68240},   {1e-2, 10.25679, 6.52004},
                      {5e-3, 12.33043, 7.67528}, {1e-3, 17.24311, 10.35768}, {1e-4, 24.42434, 14.19532}};
  for (const Row& r : rows) {
    CHECK(time_to_impurity_II(r.eps, kGamma) * 1e9 == doctest::Approx(r.t2).epsilon(1e-5));
    CHECK(time_to_impurity_I(r.eps, kGamma) * 1e9 == doctest::Approx(r.t1).epsilon(1e-5));
  }
}

TEST_CASE("inversion: round trips") {
  for (double eps : {0.4, 0.1, 1e-3, 1e-5}) {
    CHECK(impurity_no_hamiltonian(time_to_impurity_II(eps, kGamma), kGamma) == doctest::Approx(eps).epsilon(1e-9));
    CHECK(impurity_ideal_I(time_to_impurity_I(eps, kGamma), kGamma) == doctest::Approx(eps).epsilon(1e-12));
  }
  CHECK_THROWS_AS(time_to_impurity_II(0.5, kGamma), std::domain_error);
  CHECK_THROWS_AS(time_to_impurity_II(0.0, kGamma), std::domain_error);
}

TEST_CASE("speed-up") {
  const double t2 = time_to_impurity_II(1e-3, kGamma);
  CHECK(speedup(1e-3, t2, kGamma) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(speedup(1e-3, time_to_impurity_I(1e-3, kGamma), kGamma) == doctest::Approx(1.66477).epsilon(1e-5));
  CHECK_THROWS_AS(speedup(1e-3, 0.0, kGamma), std::domain_error);
  double prev = 1.0;
  for (double eps : {0.3, 0.1, 1e-2, 1e-3, 1e-4, 1e-6}) {
    const double s = time_to_impurity_II(eps, kGamma) / time_to_impurity_I(eps, kGamma);
    CHECK(s > prev);
    CHECK(s < 2.0);
    prev = s;
  }
}
