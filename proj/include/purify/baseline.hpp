#pragma once

namespace purify {

/// Composite Simpson rule for the no-Hamiltonian average impurity, on the
/// scaled variable u = x / sqrt(t) over [-half_width, half_width].
struct QuadratureConfig {
  double half_width = 12.0;
  int nodes = 2001;
  double rel_tol = 1e-9;

  /// Throws std::invalid_argument unless nodes is odd and >= 3 and half_width > 0.
  void validate() const;
};

/// Run-averaged impurity when the state diffuses along the measurement axis
/// with no Hamiltonian:
///   L(t) = e^{-4 g t} / sqrt(8 pi t) * int exp(-x^2 / 2t) / cosh(sqrt(8 g) x) dx.
/// Returns exactly 0.5 for t < 1e-15 s. Throws std::domain_error for t < 0.
double impurity_no_hamiltonian(double t, double gamma, const QuadratureConfig& quad = {});

/// Impurity under instantaneous rotation onto the xy plane, (1/2) e^{-8 g t}.
double impurity_ideal_I(double t, double gamma);

/// Time at which impurity_no_hamiltonian reaches eps, 0 < eps < 0.5.
double time_to_impurity_II(double eps, double gamma, const QuadratureConfig& quad = {});

/// ln(1 / (2 eps)) / (8 g).
double time_to_impurity_I(double eps, double gamma);

/// T_II(eps) / t_test.
double speedup(double eps, double t_test, double gamma, const QuadratureConfig& quad = {});

}  // namespace purify
