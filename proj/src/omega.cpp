#include "scalekit/omega.hpp"

#include <cmath>

namespace scalekit {

OmegaSpec OmegaSpec::steps(const std::vector<Step>& steps, double h, double x_max) {
  OmegaSpec spec;
  spec.h = h;
  spec.x_max = x_max;
  auto table = steps;
  // Trapezoid nodes sitting exactly on a seam between two segments take the
  // average of the one-sided rates; keeps the quadrature second order.
  spec.omega = [table](double x) {
    const double eps = 1e-12 * (1.0 + std::abs(x));
    for (const auto& s : table) {
      if (std::abs(x - s.from) <= eps) {
        for (const auto& left : table)
          if (std::abs(x - left.to) <= eps) return 0.5 * (left.rate + s.rate);
        return s.rate;
      }
    }
    for (const auto& s : table)
      if (x >= s.from && x < s.to) return s.rate;
    return 0.0;
  };
  return spec;
}

OmegaSpec OmegaSpec::constant(double rate, double h, double x_max) {
  OmegaSpec spec;
  spec.h = h;
  spec.x_max = x_max;
  spec.omega = [rate](double) { return rate; };
  return spec;
}

OmegaScales omega_scales(const ScaleSet& zero_set, const OmegaSpec& spec) {
  if (!spec.omega) throw GridError("omega rate function not set");
  if (zero_set.delta() != 0.0) throw DeltaError("omega solver runs on the zero scale function");
  UniformGrid grid = UniformGrid::over(spec.h, spec.x_max);
  const int n = grid.n;
  const double h = grid.h;

  ArrayXd Wg(n + 1), om(n + 1);
  for (int i = 0; i <= n; ++i) {
    Wg[i] = zero_set.w(grid.x(i));
    om[i] = spec.omega(grid.x(i));
    if (om[i] < 0.0) throw GridError("omega rate must be nonnegative");
  }

  ArrayXd wo(n + 1), zo(n + 1);
  wo[0] = Wg[0];
  zo[0] = 1.0;
  const double w0 = Wg[0];
  for (int k = 1; k <= n; ++k) {
    double accW = 0.5 * Wg[k] * om[0] * wo[0];
    double accZ = 0.5 * Wg[k] * om[0] * zo[0];
    for (int j = 1; j < k; ++j) {
      double kj = Wg[k - j] * om[j];
      accW += kj * wo[j];
      accZ += kj * zo[j];
    }
    double diag = 0.5 * h * w0 * om[k];
    if (diag >= 1.0) throw GridError("grid step too coarse for the killing rate");
    wo[k] = (Wg[k] + h * accW) / (1.0 - diag);
    zo[k] = (1.0 + h * accZ) / (1.0 - diag);
  }
  return OmegaScales{grid, wo, zo};
}

}  // namespace scalekit
