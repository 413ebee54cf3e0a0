#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>

#include "scalekit/errors.hpp"

namespace scalekit {

using Eigen::ArrayXd;

/// Uniform grid 0, h, 2h, ..., n*h.
struct UniformGrid {
  double h{0.0};
  int n{0};  // number of panels; n+1 nodes

  double x_max() const { return h * n; }
  double x(int i) const { return h * i; }

  static UniformGrid over(double h, double x_max) {
    if (h <= 0.0 || x_max <= 0.0) throw GridError("grid step and extent must be positive");
    int n = int(std::ceil(x_max / h - 1e-12));
    return UniformGrid{h, n};
  }
};

/// Cumulative integral of grid samples by trapezoid with the Euler-Maclaurin
/// endpoint correction -h^2/12 (f'(x_k) - f'(0)); O(h^4) for smooth f.
ArrayXd cumulative_integral(const ArrayXd& f, double h);

/// Convolution (f*g)(x_k) = int_0^{x_k} f(y) g(x_k - y) dy on the shared grid,
/// trapezoid with endpoint corrections.
ArrayXd convolve(const ArrayXd& f, const ArrayXd& g, double h);

/// Cubic (4-point Lagrange) interpolation of grid samples at x in [0, n*h].
double interpolate(const ArrayXd& f, const UniformGrid& grid, double x);

/// Derivative of order 1 or 2 from 5-point stencils; centered in the
/// interior, one-sided near the edges.
double stencil_derivative(const ArrayXd& f, const UniformGrid& grid, double x, int order);

/// Adaptive Simpson quadrature of `fn` over [a, b] to absolute tolerance.
double integrate(const std::function<double(double)>& fn, double a, double b, double tol);

}  // namespace scalekit
