#include "scalekit/parisian.hpp"

#include <cmath>

#include "scalekit/grid.hpp"
#include "scalekit/rational.hpp"

namespace scalekit {

namespace {

double z_dr(const ScaleSet& set, double phi_hi, double r, double x, double theta) {
  const double delta = set.delta();
  double k = laplace_exponent(set.model(), theta);
  double den = delta + r - k;
  auto value = [&](double th) {
    double kk = laplace_exponent(set.model(), th);
    return (r * set.z(x, th) + (delta - kk) * set.z(x, phi_hi)) / (delta + r - kk);
  };
  if (std::abs(den) < 1e-7 * (1.0 + delta + r)) {
    // Removable singularity at kappa(theta) = delta + r: symmetric difference.
    double step = 1e-5 * (1.0 + std::abs(phi_hi));
    return 0.5 * (value(theta - step) + value(theta + step));
  }
  return value(theta);
}

}  // namespace

ParisianScales parisian_scales(const ScaleSet& set, const ScaleSet& set_hi, double x,
                               double theta) {
  if (set.delta() >= set_hi.delta())
    throw DomainError("parisian_scales needs the second set at killing delta + r, r > 0");
  const double r = set_hi.delta() - set.delta();
  const double phi_hi = set_hi.phi();
  return ParisianScales{set.z(x, phi_hi), z_dr(set, phi_hi, r, x, theta)};
}

double parisian_survival(const ScaleSet& zero_set, double x, double r) {
  if (zero_set.delta() != 0.0) throw DeltaError("parisian_survival is a delta = 0 law");
  if (r <= 0.0) throw DomainError("observation rate must be positive");
  const double p = profit_rate(zero_set.model());
  if (p <= 0.0) throw DriftSignError("parisian survival needs kappa'(0+) > 0");
  const double phir = phi(zero_set.model(), r);
  return p * phir / r * zero_set.z(x, phir);
}

namespace {

double em1_over(double u) {
  if (std::abs(u) < 1e-8) return 1.0 + u / 2.0 + u * u / 6.0;
  return std::expm1(u) / u;
}

// int_0^a W_delta(x - y) W_r(y) dy; exponential-sum closed form when both
// sets expose their roots, scaled adaptive quadrature otherwise.
double scale_convolution(const ScaleSet& set_delta, const ScaleSet& set_r, double x, double a) {
  const RationalExponent* fd = set_delta.rational_fraction();
  const RationalExponent* fr = set_r.rational_fraction();
  if (fd && fr && !fd->zero_double_root && !fr->zero_double_root && x - a >= 0.0) {
    double out = 0.0;
    for (std::size_t i = 0; i < fd->roots.size(); ++i) {
      double zi = fd->roots[i];
      for (std::size_t j = 0; j < fr->roots.size(); ++j) {
        double ej = fr->roots[j];
        out += fd->weights[i] * fr->weights[j] * std::exp(zi * x) * a *
               em1_over((ej - zi) * a);
      }
    }
    return out;
  }
  double scale = 1.0;
  for (double y : {0.0, 0.25 * a, 0.5 * a, 0.75 * a, a})
    scale = std::max(scale, std::abs(set_delta.w(x - y) * set_r.w(y)));
  return integrate([&](double y) { return set_delta.w(x - y) * set_r.w(y); }, 0.0, a,
                   1e-12 * (1.0 + a) * scale);
}

}  // namespace

double occupation_auxiliary(const ScaleSet& set_r, const ScaleSet& set_delta, double x,
                            double a) {
  const double r = set_r.delta(), delta = set_delta.delta();
  if (a <= 0.0) return set_delta.w(x);
  if (x <= a) return set_r.w(x);
  if (std::abs(r - delta) < 1e-14) return set_delta.w(x);
  // W_delta(x) + (r - delta) int_0^a W_delta(x-y) W_r(y) dy
  return set_delta.w(x) + (r - delta) * scale_convolution(set_delta, set_r, x, a);
}

double occupation_joint_density(const ScaleSet& set_dm, const ScaleSet& set_dp, double x,
                                double y) {
  const double dm = set_dm.delta(), dp = set_dp.delta();
  if (dm == dp) throw DegenerateError("equal rates in the joint occupation density");
  const double phim = set_dm.phi(), phip = set_dp.phi();
  double pref = (phip - phim) / (dp - dm);
  double main = pref * set_dp.z(x, phim) * set_dm.z(-y, phip);
  return main - occupation_auxiliary(set_dm, set_dp, x - y, -y);
}

double occupation_positive_lt(const LevyModel& m, double delta, double r) {
  if (delta <= 0.0) throw DeltaError("occupation transform needs delta > 0");
  if (r < 0.0) throw DomainError("occupation rate must be nonnegative");
  return phi(m, delta) / (delta * phi(m, delta + r));
}

double occupation_reflected_band(const ScaleSet& set_total, double delta, double b) {
  if (delta <= 0.0) throw DeltaError("occupation transform needs delta > 0");
  if (profit_rate(set_total.model()) <= 0.0)
    throw DriftSignError("reflected-band occupation law needs positive drift");
  // set_total carries the full rate delta + r active inside the band; its
  // excess over the discount is the occupation rate r.
  const double r = set_total.delta() - delta;
  if (r < 0.0) throw DomainError("band occupation set must be built at rate delta + r");
  const double phid = phi(set_total.model(), delta);
  double zr = set_total.z(b, phid);
  return phid / delta * zr / (r * set_total.w(b) + phid * zr);
}

double occupation_ld_rate(const ScaleSet& set_r, double b) {
  const double p = profit_rate(set_r.model());
  if (p <= 0.0) throw DriftSignError("large-deviations rate needs positive drift");
  const double r = set_r.delta();
  if (r <= 0.0) throw DeltaError("large-deviations rate needs r > 0");
  return set_r.z(b) / (p * r * set_r.w(b));
}

}  // namespace scalekit
