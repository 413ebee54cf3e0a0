#pragma once

#include <vector>

#include "scalekit/levy_model.hpp"

namespace scalekit {

/// Partial-fraction data of 1/(kappa(s) - delta) for models with rational
/// Laplace exponent:
///
///   1/(kappa(s)-delta) = [a2/s^2 + a1/s] + sum_i A_i / (s - zeta_i),
///
/// where the bracket is present only when s = 0 is a root (delta = 0).
/// Roots are real, distinct and stored in descending order; for delta > 0
/// roots.front() equals Phi_delta.
struct RationalExponent {
  double delta{0.0};
  std::vector<double> roots;    // zeta_i, descending
  std::vector<double> weights;  // A_i = 1/kappa'(zeta_i)
  bool zero_simple_root{false};   // delta == 0, kappa'(0) != 0: zero root folded into roots[]
  bool zero_double_root{false};   // delta == 0, kappa'(0) == 0
  double a2{0.0};                 // coefficient of the 1/s^2 term (double zero only)
  double a1{0.0};                 // coefficient of the 1/s term (double zero only)
};

/// All roots of kappa(theta) = delta with their partial-fraction weights.
/// Throws RepeatedRootError when two roots are closer than 1e-8 and
/// ComplexRootError when a complex conjugate pair arises.
RationalExponent rational_factorization(const LevyModel& m, double delta);

/// 1/(kappa(s)-delta) reconstructed from the partial fractions; used by the
/// validation layer and tests.
double partial_fraction_value(const RationalExponent& r, double s);

}  // namespace scalekit
