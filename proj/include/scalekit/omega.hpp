#pragma once

#include <functional>
#include <vector>

#include "scalekit/grid.hpp"
#include "scalekit/scale_set.hpp"

namespace scalekit {

/// State-dependent killing rate omega(x) >= 0 on [0, x_max] plus the
/// quadrature grid of the renewal solver. The rate may be an arbitrary
/// callback or a step function.
struct OmegaSpec {
  std::function<double(double)> omega;
  double h{1.0 / 512.0};
  double x_max{4.0};

  struct Step {
    double from, to, rate;
  };
  static OmegaSpec steps(const std::vector<Step>& steps, double h, double x_max);
  static OmegaSpec constant(double rate, double h, double x_max);
};

/// Grid solutions of the renewal equations
///   Wom(x) = W(x) + int_0^x W(x-y) omega(y) Wom(y) dy
///   Zom(x) = 1    + int_0^x W(x-y) omega(y) Zom(y) dy
/// with W the zero scale function. Immutable after construction.
struct OmegaScales {
  UniformGrid grid;
  ArrayXd w_omega;
  ArrayXd z_omega;

  double w(double x) const { return interpolate(w_omega, grid, x); }
  double z(double x) const { return interpolate(z_omega, grid, x); }
};

/// Forward-marching trapezoid Volterra solve; the diagonal half-weight is
/// kept implicit so nonnegative kernels stay unconditionally stable.
OmegaScales omega_scales(const ScaleSet& zero_set, const OmegaSpec& spec);

}  // namespace scalekit
