#include "scalekit/grid.hpp"

#include <cmath>
#include <functional>

namespace scalekit {

namespace {

// One-sided 4-point derivative estimates at the two ends of u[0..n].
double deriv_left(const ArrayXd& u, int n, double h) {
  if (n >= 3) return (-11.0 * u[0] + 18.0 * u[1] - 9.0 * u[2] + 2.0 * u[3]) / (6.0 * h);
  if (n >= 1) return (u[1] - u[0]) / h;
  return 0.0;
}

double deriv_right(const ArrayXd& u, int n, double h) {
  if (n >= 3) return (11.0 * u[n] - 18.0 * u[n - 1] + 9.0 * u[n - 2] - 2.0 * u[n - 3]) / (6.0 * h);
  if (n >= 1) return (u[n] - u[n - 1]) / h;
  return 0.0;
}

}  // namespace

ArrayXd cumulative_integral(const ArrayXd& f, double h) {
  const int n = int(f.size()) - 1;
  ArrayXd out(n + 1);
  out[0] = 0.0;
  double acc = 0.0;
  for (int k = 1; k <= n; ++k) {
    acc += 0.5 * h * (f[k - 1] + f[k]);
    out[k] = acc;
  }
  if (n >= 4) {
    const double d0 = deriv_left(f, n, h);
    for (int k = 4; k <= n; ++k) {
      double dk = (k + 2 <= n)
                      ? (f[k - 2] - 8.0 * f[k - 1] + 8.0 * f[k + 1] - f[k + 2]) / (12.0 * h)
                      : deriv_right(f, k, h);
      out[k] -= h * h / 12.0 * (dk - d0);
    }
    // Small-k corrections with the derivative stencil that fits.
    for (int k = 1; k < 4 && k <= n; ++k) {
      double dk = (f.size() > k + 2 && k >= 2)
                      ? (f[k - 2] - 8.0 * f[k - 1] + 8.0 * f[k + 1] - f[k + 2]) / (12.0 * h)
                      : (k + 1 <= n ? (f[k + 1] - f[k - 1]) / (2.0 * h) : deriv_right(f, k, h));
      out[k] -= h * h / 12.0 * (dk - d0);
    }
  }
  return out;
}

ArrayXd convolve(const ArrayXd& f, const ArrayXd& g, double h) {
  const int n = int(std::min(f.size(), g.size())) - 1;
  ArrayXd out(n + 1);
  out[0] = 0.0;
  for (int k = 1; k <= n; ++k) {
    // u_j = f_j g_{k-j}, j = 0..k
    double acc = 0.5 * (f[0] * g[k] + f[k] * g[0]);
    for (int j = 1; j < k; ++j) acc += f[j] * g[k - j];
    double val = h * acc;
    if (k >= 4) {
      // Euler-Maclaurin endpoint correction from one-sided stencils of u.
      double u0 = f[0] * g[k], u1 = f[1] * g[k - 1], u2 = f[2] * g[k - 2], u3 = f[3] * g[k - 3];
      double um0 = f[k] * g[0], um1 = f[k - 1] * g[1], um2 = f[k - 2] * g[2],
             um3 = f[k - 3] * g[3];
      double dl = (-11.0 * u0 + 18.0 * u1 - 9.0 * u2 + 2.0 * u3) / (6.0 * h);
      double dr = (11.0 * um0 - 18.0 * um1 + 9.0 * um2 - 2.0 * um3) / (6.0 * h);
      val -= h * h / 12.0 * (dr - dl);
    }
    out[k] = val;
  }
  return out;
}

double interpolate(const ArrayXd& f, const UniformGrid& grid, double x) {
  const int n = grid.n;
  if (x < -1e-12 || x > grid.x_max() + 1e-9 * (1.0 + grid.x_max()))
    throw GridError("interpolation point outside grid");
  double t = x / grid.h;
  if (n < 3) {  // degenerate tiny grids: linear
    int j = std::max(0, std::min(int(std::floor(t)), n - 1));
    double u = t - j;
    return f[j] * (1.0 - u) + f[j + 1] * u;
  }
  int i = int(std::floor(t));
  i = std::max(1, std::min(i, n - 2));  // 4-point window [i-1, i+2]
  double u = t - i;
  double fm1 = f[i - 1], f0 = f[i], f1 = f[i + 1], f2 = f[i + 2];
  // Lagrange basis on offsets {-1, 0, 1, 2}
  double a = -u * (u - 1.0) * (u - 2.0) / 6.0;
  double b = (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0;
  double c = -(u + 1.0) * u * (u - 2.0) / 2.0;
  double d = (u + 1.0) * u * (u - 1.0) / 6.0;
  return a * fm1 + b * f0 + c * f1 + d * f2;
}

double stencil_derivative(const ArrayXd& f, const UniformGrid& grid, double x, int order) {
  const int n = grid.n;
  const double h = grid.h;
  if (order < 1 || order > 2) throw DomainError("stencil_derivative supports orders 1 and 2");
  if (n < 5) throw DerivativeUnavailable("grid too small for 5-point stencils");
  if (x < 0.0 || x > grid.x_max()) throw GridError("derivative point outside grid");

  int i = int(std::llround(x / h));
  bool on_node = std::abs(x - i * h) < 1e-9 * (1.0 + std::abs(x));
  auto node_deriv = [&](int j) {
    j = std::max(0, std::min(j, n));
    if (order == 1) {
      if (j >= 2 && j + 2 <= n)
        return (f[j - 2] - 8.0 * f[j - 1] + 8.0 * f[j + 1] - f[j + 2]) / (12.0 * h);
      if (j < 2)
        return (-25.0 * f[j] + 48.0 * f[j + 1] - 36.0 * f[j + 2] + 16.0 * f[j + 3] -
                3.0 * f[j + 4]) / (12.0 * h);
      return (25.0 * f[j] - 48.0 * f[j - 1] + 36.0 * f[j - 2] - 16.0 * f[j - 3] +
              3.0 * f[j - 4]) / (12.0 * h);
    }
    if (j >= 2 && j + 2 <= n)
      return (-f[j - 2] + 16.0 * f[j - 1] - 30.0 * f[j] + 16.0 * f[j + 1] - f[j + 2]) /
             (12.0 * h * h);
    throw DerivativeUnavailable("second derivative unavailable at grid edges");
  };
  if (on_node) return node_deriv(i);

  // Off-node: differentiate through 4 neighbouring node derivatives.
  int base = std::max(1, std::min(int(std::floor(x / h)), n - 2));
  double u = x / h - base;
  double dm1 = node_deriv(base - 1), d0 = node_deriv(base), d1 = node_deriv(base + 1),
         d2 = node_deriv(base + 2);
  double a = -u * (u - 1.0) * (u - 2.0) / 6.0;
  double b = (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0;
  double c = -(u + 1.0) * u * (u - 2.0) / 2.0;
  double d = (u + 1.0) * u * (u - 1.0) / 6.0;
  return a * dm1 + b * d0 + c * d1 + d * d2;
}

namespace {

double simpson_rule(double a, double fa, double fm, double b, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adapt(const std::function<double(double)>& fn, double a, double fa, double b, double fb,
             double m, double fm, double whole, double tol, int depth) {
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = fn(lm), frm = fn(rm);
  double left = simpson_rule(a, fa, flm, m, fm);
  double right = simpson_rule(m, fm, frm, b, fb);
  if (depth <= 0) return left + right;
  if (std::abs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adapt(fn, a, fa, m, fm, lm, flm, left, tol / 2.0, depth - 1) +
         adapt(fn, m, fm, b, fb, rm, frm, right, tol / 2.0, depth - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& fn, double a, double b, double tol) {
  if (a == b) return 0.0;
  double fa = fn(a), fb = fn(b), m = 0.5 * (a + b), fm = fn(m);
  double whole = simpson_rule(a, fa, fm, b, fb);
  return adapt(fn, a, fa, b, fb, m, fm, whole, tol, 40);
}

}  // namespace scalekit
