#include "purify/baseline.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace purify {

namespace {

constexpr double kZeroTime = 1e-15;

// 1/cosh(a) without overflow for large |a|.
double sech(double a) {
  const double e = std::exp(-std::abs(a));
  return 2.0 * e / (1.0 + e * e);
}

void require_eps(double eps, const char* where) {
  if (!(eps > 0.0 && eps < 0.5)) {
    throw std::domain_error(std::string(where) + ": eps must lie in (0, 0.5)");
  }
}

}  // namespace

void QuadratureConfig::validate() const {
  if (nodes < 3 || nodes % 2 == 0) throw std::invalid_argument("quadrature nodes must be odd and >= 3");
  if (!(half_width > 0.0)) throw std::invalid_argument("quadrature half_width must be positive");
}

double impurity_no_hamiltonian(double t, double gamma, const QuadratureConfig& quad) {
  if (t < 0.0) throw std::domain_error("impurity_no_hamiltonian: negative time");
  if (t < kZeroTime) return 0.5;
  quad.validate();

  // Even integrand: Simpson on [0, W], doubled.
  const double scale = std::sqrt(8.0 * gamma * t);
  const int intervals = quad.nodes - 1;
  const double h = quad.half_width / intervals;
  auto f = [scale](double u) { return std::exp(-0.5 * u * u) * sech(scale * u); };

  double sum = f(0.0) + f(quad.half_width);
  for (int i = 1; i < intervals; ++i) sum += (i % 2 == 1 ? 4.0 : 2.0) * f(i * h);
  const double integral = 2.0 * sum * h / 3.0;

  return std::exp(-4.0 * gamma * t) / std::sqrt(8.0 * std::numbers::pi) * integral;
}

double impurity_ideal_I(double t, double gamma) {
  if (t < 0.0) throw std::domain_error("impurity_ideal_I: negative time");
  return 0.5 * std::exp(-8.0 * gamma * t);
}

double time_to_impurity_II(double eps, double gamma, const QuadratureConfig& quad) {
  require_eps(eps, "time_to_impurity_II");
  if (!(gamma > 0.0)) throw std::domain_error("time_to_impurity_II: gamma must be positive");

  double lo = kZeroTime;
  double hi = 50.0 / (4.0 * gamma);
  double f_lo = impurity_no_hamiltonian(lo, gamma, quad) - eps;
  double f_hi = impurity_no_hamiltonian(hi, gamma, quad) - eps;
  while (f_hi > 0.0) {
    lo = hi;
    f_lo = f_hi;
    hi *= 2.0;
    f_hi = impurity_no_hamiltonian(hi, gamma, quad) - eps;
    if (hi > 1e6 / gamma) throw std::runtime_error("time_to_impurity_II: bracket expansion failed");
  }
  if (!(f_lo > 0.0)) throw std::logic_error("time_to_impurity_II: impurity not decreasing");

  // Bisection to a relative bracket width of 1e-13.
  for (int iter = 0; iter < 200 && (hi - lo) > 1e-13 * hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = impurity_no_hamiltonian(mid, gamma, quad) - eps;
    if (f_mid > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double time_to_impurity_I(double eps, double gamma) {
  if (!(eps > 0.0 && eps <= 0.5)) {
    throw std::domain_error("time_to_impurity_I: eps must lie in (0, 0.5]");
  }
  return std::log(1.0 / (2.0 * eps)) / (8.0 * gamma);
}

double speedup(double eps, double t_test, double gamma, const QuadratureConfig& quad) {
  if (!(t_test > 0.0)) throw std::domain_error("speedup: t_test must be positive");
  return time_to_impurity_II(eps, gamma, quad) / t_test;
}

}  // namespace purify
