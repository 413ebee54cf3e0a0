#include "scalekit/scale_set.hpp"

#include <cmath>
#include <complex>

#include "scalekit/grid.hpp"
#include "scalekit/laplace_inversion.hpp"
#include "scalekit/rational.hpp"

namespace scalekit {

namespace detail {

namespace {

// (e^u - 1)/u and (e^u - 1 - u)/u^2, stable near u = 0.
double em1_over(double u) {
  if (std::abs(u) < 1e-8) return 1.0 + u / 2.0 + u * u / 6.0;
  return std::expm1(u) / u;
}
double em2_over(double u) {
  if (std::abs(u) < 1e-3) return 0.5 + u / 6.0 + u * u / 24.0 + u * u * u / 120.0;
  return (std::expm1(u) - u) / (u * u);
}

// int_0^x e^{theta (x-y)} e^{zeta y} dy, stable for zeta near theta.
double conv_exp(double x, double theta, double zeta) {
  double d = zeta - theta;
  if (std::abs(d) * x < 1e-7)
    return x * std::exp(theta * x) * (1.0 + d * x / 2.0 + d * d * x * x / 6.0);
  return (std::exp(zeta * x) - std::exp(theta * x)) / d;
}

}  // namespace

class ScaleBackendImpl {
 public:
  virtual ~ScaleBackendImpl() = default;
  virtual double w(double x, int order) const = 0;
  virtual double wbar(double x) const = 0;
  virtual double wbarbar(double x) const = 0;
  virtual double z_theta(double x, double theta) const = 0;
  virtual double w_conv_w(double x) const = 0;
};

// ---------------------------------------------------------------------------
// Rational backend: W(x) = [a2 x + a1] + sum_i A_i e^{zeta_i x}
// ---------------------------------------------------------------------------
class RationalScale : public ScaleBackendImpl {
 public:
  RationalScale(const LevyModel& m, double delta)
      : model_(m), delta_(delta), fraction_(rational_factorization(m, delta)) {}

  const RationalExponent& fraction() const { return fraction_; }

  double w(double x, int order) const override {
    if (x < 0.0) return 0.0;
    double out = 0.0;
    double scale = 0.0;
    if (fraction_.zero_double_root) {
      if (order == 0) out += fraction_.a2 * x + fraction_.a1;
      if (order == 1) out += fraction_.a2;
    }
    for (std::size_t i = 0; i < fraction_.roots.size(); ++i) {
      double z = fraction_.roots[i];
      double f = fraction_.weights[i];
      for (int k = 0; k < order; ++k) f *= z;
      double term = f * std::exp(z * x);
      out += term;
      scale += std::abs(term);
    }
    // roundoff from cancelling exponential sums: W itself is nonnegative
    if (order == 0 && out < 0.0 && out > -1e-13 * scale) out = 0.0;
    return out;
  }

  double wbar(double x) const override {
    if (x <= 0.0) return 0.0;
    double out = 0.0;
    if (fraction_.zero_double_root) out += fraction_.a2 * x * x / 2.0 + fraction_.a1 * x;
    for (std::size_t i = 0; i < fraction_.roots.size(); ++i) {
      double z = fraction_.roots[i], A = fraction_.weights[i];
      out += A * x * em1_over(z * x);
    }
    return out;
  }

  double wbarbar(double x) const override {
    if (x <= 0.0) return 0.0;
    double out = 0.0;
    if (fraction_.zero_double_root)
      out += fraction_.a2 * x * x * x / 6.0 + fraction_.a1 * x * x / 2.0;
    for (std::size_t i = 0; i < fraction_.roots.size(); ++i) {
      double z = fraction_.roots[i], A = fraction_.weights[i];
      out += A * x * x * em2_over(z * x);
    }
    return out;
  }

  double z_theta(double x, double theta) const override {
    if (x <= 0.0) return std::exp(theta * x);
    // Compact partial-fraction form: the e^{theta x} parts of the analytic
    // continuation cancel exactly, so they are never materialized. Terms with
    // theta near a root use the series of (delta - kappa(theta))/(zeta - theta).
    const double pref = delta_ - laplace_exponent(model_, theta);
    if (fraction_.zero_double_root) {
      // The compact form divides kappa by theta^2 and inherits the absolute
      // roundoff of kappa near its double zero; the continuation integral is
      // the stable route until e^{theta x} starts to dominate.
      if (std::abs(theta * x) < 20.0) {
        double J = fraction_.a1 * x * em1_over(theta * x) +
                   fraction_.a2 * x * x * em2_over(theta * x);
        for (std::size_t i = 0; i < fraction_.roots.size(); ++i)
          J += fraction_.weights[i] * conv_exp(x, theta, fraction_.roots[i]);
        return std::exp(theta * x) + pref * J;
      }
      double k = laplace_exponent(model_, theta);
      double out = k * (fraction_.a2 * (1.0 + theta * x) / (theta * theta) +
                        fraction_.a1 / theta);
      for (std::size_t i = 0; i < fraction_.roots.size(); ++i) {
        double zeta = fraction_.roots[i];
        double ratio;  // k(theta)/(zeta - theta), removable at the roots
        if (std::abs(theta - zeta) < 1e-6 * (1.0 + std::abs(zeta))) {
          double d = theta - zeta;
          ratio = -(kappa_derivative(model_, zeta, 1) +
                    kappa_derivative(model_, zeta, 2) * d / 2.0 +
                    kappa_derivative(model_, zeta, 3) * d * d / 6.0);
        } else {
          ratio = k / (zeta - theta);
        }
        out -= ratio * fraction_.weights[i] * std::exp(zeta * x);
      }
      return out;
    }
    double out = 0.0;
    for (std::size_t i = 0; i < fraction_.roots.size(); ++i) {
      double zeta = fraction_.roots[i];
      double ratio;
      if (std::abs(theta - zeta) < 1e-6 * (1.0 + std::abs(zeta))) {
        double d = theta - zeta;
        ratio = kappa_derivative(model_, zeta, 1) + kappa_derivative(model_, zeta, 2) * d / 2.0 +
                kappa_derivative(model_, zeta, 3) * d * d / 6.0;
      } else {
        ratio = pref / (zeta - theta);
      }
      out += fraction_.weights[i] * ratio * std::exp(zeta * x);
    }
    return out;
  }

  double w_conv_w(double x) const override {
    if (x <= 0.0) return 0.0;
    if (fraction_.zero_double_root)
      throw DegenerateError("W*W closed form not available at a double zero root");
    const auto& zs = fraction_.roots;
    const auto& As = fraction_.weights;
    double out = 0.0;
    for (std::size_t i = 0; i < zs.size(); ++i) {
      out += As[i] * As[i] * x * std::exp(zs[i] * x);
      for (std::size_t j = i + 1; j < zs.size(); ++j)
        out += 2.0 * As[i] * As[j] * (std::exp(zs[i] * x) - std::exp(zs[j] * x)) /
               (zs[i] - zs[j]);
    }
    return out;
  }

 private:
  LevyModel model_;
  double delta_;
  RationalExponent fraction_;
};

// ---------------------------------------------------------------------------
// Series backend: W_delta = sum_k delta^k W_0^{*,k+1} sampled on a grid.
// ---------------------------------------------------------------------------
class SeriesScale : public ScaleBackendImpl {
 public:
  SeriesScale(const LevyModel& m, double delta, UniformGrid grid, bool* truncation_hit)
      : model_(m), delta_(delta), grid_(grid) {
    RationalScale w0(m, 0.0);
    const int n = grid_.n;
    ArrayXd w0g(n + 1);
    for (int i = 0; i <= n; ++i) w0g[i] = w0.w(grid_.x(i), 0);

    wg_ = w0g;
    if (delta != 0.0) {
      ArrayXd term = w0g;
      double mult = 1.0;
      bool converged = false;
      for (int k = 1; k <= 200; ++k) {
        term = convolve(term, w0g, grid_.h);
        mult *= delta;
        wg_ += mult * term;
        if (mult * term.abs().maxCoeff() < 1e-12 * wg_.abs().maxCoeff()) {
          converged = true;
          break;
        }
      }
      if (!converged && truncation_hit) *truncation_hit = true;
    }
    wbarg_ = cumulative_integral(wg_, grid_.h);
    wbarbarg_ = cumulative_integral(wbarg_, grid_.h);
    wconvg_ = convolve(wg_, wg_, grid_.h);
  }

  double w(double x, int order) const override {
    if (x < 0.0) return 0.0;
    if (order == 0) return interpolate(wg_, grid_, x);
    return stencil_derivative(wg_, grid_, x, order);
  }

  double wbar(double x) const override {
    if (x <= 0.0) return 0.0;
    return interpolate(wbarg_, grid_, x);
  }

  double wbarbar(double x) const override {
    if (x <= 0.0) return 0.0;
    return interpolate(wbarbarg_, grid_, x);
  }

  double z_theta(double x, double theta) const override {
    if (x <= 0.0) return std::exp(theta * x);
    double pref = delta_ - laplace_exponent(model_, theta);
    // J(x) = int_0^x e^{theta (x-y)} W(y) dy on the grid, partial last panel
    // by 2-point Gauss with interpolated W.
    int mfull = std::min(int(std::floor(x / grid_.h)), grid_.n);
    ArrayXd g(mfull + 1);
    for (int j = 0; j <= mfull; ++j) g[j] = std::exp(-theta * grid_.x(j)) * wg_[j];
    double K = (mfull >= 1) ? cumulative_integral(g, grid_.h)[mfull] : 0.0;
    double y0 = grid_.x(mfull);
    if (x > y0 + 1e-14) {
      double half = 0.5 * (x - y0), mid = 0.5 * (x + y0), off = half / std::sqrt(3.0);
      for (double yq : {mid - off, mid + off})
        K += half * std::exp(-theta * yq) * interpolate(wg_, grid_, yq);
    }
    return std::exp(theta * x) * (1.0 + pref * K);
  }

  double w_conv_w(double x) const override {
    if (x <= 0.0) return 0.0;
    return interpolate(wconvg_, grid_, x);
  }

 private:
  LevyModel model_;
  double delta_;
  UniformGrid grid_;
  ArrayXd wg_, wbarg_, wbarbarg_, wconvg_;
};

// ---------------------------------------------------------------------------
// Inversion backend: Talbot (default) or Gaver-Stehfest on the tilted
// transform 1/(kappa(s + Phi) - delta), multiplied back by e^{Phi x}.
// ---------------------------------------------------------------------------
class InversionScale : public ScaleBackendImpl {
 public:
  InversionScale(const LevyModel& m, double delta, double phi, InversionParams params)
      : model_(m), delta_(delta), phi_(phi), params_(params) {
    const double c = m.drift, s2 = m.sigma * m.sigma;
    const double lam = m.jumps.empty() ? 0.0 : m.jumps.lambda;
    if (m.sigma > 0.0) {
      w0_ = 0.0;
      wp0_ = 2.0 / s2;
      wpp0_ = -c * (2.0 / s2) * (2.0 / s2);
    } else {
      w0_ = 1.0 / c;
      wp0_ = (delta + lam) / (c * c);
      wpp0_ = ((lam / c + delta / c) * (lam / c + delta / c) -
               (lam / c) * claim_density_at_zero(m.jumps)) / c;
    }
  }

  double invert(const ComplexTransform& F, const RealTransform& Freal, double x) const {
    if (params_.method == InversionMethod::GaverStehfest)
      return invert_gaver_stehfest(Freal, x, params_.gs_terms);
    return invert_talbot(F, x, params_.talbot_nodes);
  }

  // shifted transform U(s) = 1/(kappa(s + Phi) - delta)
  std::complex<double> U(std::complex<double> s) const {
    return 1.0 / (laplace_exponent(model_, s + phi_) - delta_);
  }
  double Ureal(double s) const { return 1.0 / (laplace_exponent(model_, s + phi_) - delta_); }

  double w(double x, int order) const override {
    if (x < 0.0) return 0.0;
    if (x < 1e-12) return order == 0 ? w0_ : (order == 1 ? wp0_ : wpp0_);
    double tilted;
    switch (order) {
      case 0:
        tilted = invert([&](std::complex<double> s) { return U(s); },
                        [&](double s) { return Ureal(s); }, x);
        break;
      case 1:
        tilted = invert([&](std::complex<double> s) { return (s + phi_) * U(s) - w0_; },
                        [&](double s) { return (s + phi_) * Ureal(s) - w0_; }, x);
        break;
      case 2:
        tilted = invert(
            [&](std::complex<double> s) {
              return (s + phi_) * ((s + phi_) * U(s) - w0_) - wp0_;
            },
            [&](double s) { return (s + phi_) * ((s + phi_) * Ureal(s) - w0_) - wp0_; }, x);
        break;
      default:
        throw DomainError("w supports derivative orders 0..2");
    }
    return std::exp(phi_ * x) * tilted;
  }

  double wbar(double x) const override {
    if (x <= 0.0) return 0.0;
    double tilted = invert([&](std::complex<double> s) { return U(s) / (s + phi_); },
                           [&](double s) { return Ureal(s) / (s + phi_); }, x);
    return std::exp(phi_ * x) * tilted;
  }

  double wbarbar(double x) const override {
    if (x <= 0.0) return 0.0;
    double tilted =
        invert([&](std::complex<double> s) { return U(s) / ((s + phi_) * (s + phi_)); },
               [&](double s) { return Ureal(s) / ((s + phi_) * (s + phi_)); }, x);
    return std::exp(phi_ * x) * tilted;
  }

  double z_theta(double x, double theta) const override {
    if (x <= 0.0) return std::exp(theta * x);
    double pref = delta_ - laplace_exponent(model_, theta);
    double K = integrate([&](double y) { return std::exp(-theta * y) * w(y, 0); }, 0.0, x,
                         1e-11 * (1.0 + std::abs(x)));
    return std::exp(theta * x) * (1.0 + pref * K);
  }

  double w_conv_w(double x) const override {
    if (x <= 0.0) return 0.0;
    double tilted = invert([&](std::complex<double> s) { return U(s) * U(s); },
                           [&](double s) { return Ureal(s) * Ureal(s); }, x);
    return std::exp(phi_ * x) * tilted;
  }

 private:
  LevyModel model_;
  double delta_;
  double phi_;
  InversionParams params_;
  double w0_, wp0_, wpp0_;
};

}  // namespace detail

namespace {

// Decay/growth scale used for the default series grid extent.
double default_extent(const LevyModel& m, double delta) {
  double rate = 0.0;
  try {
    auto fr = rational_factorization(m, delta);
    for (double z : fr.roots) {
      if (z > 1e-9) rate = std::max(rate, z);
    }
    if (rate == 0.0)
      for (double z : fr.roots)
        if (z < -1e-9) rate = std::max(rate, -z);
  } catch (const Error&) {
    rate = 1.0;
  }
  if (rate <= 0.0) rate = 1.0;
  return 4.0 * std::max(1.0, 1.0 / rate);
}

}  // namespace

double ScaleSet::w(double x, int order) const { return impl_->w(x, order); }
double ScaleSet::wbar(double x) const { return impl_->wbar(x); }
double ScaleSet::wbarbar(double x) const { return impl_->wbarbar(x); }
double ScaleSet::z(double x) const { return x <= 0.0 ? 1.0 : 1.0 + delta_ * impl_->wbar(x); }
double ScaleSet::zbar(double x) const { return x + delta_ * impl_->wbarbar(x); }
double ScaleSet::z(double x, double theta) const { return impl_->z_theta(x, theta); }
double ScaleSet::z_prime(double x, double theta) const {
  return theta * impl_->z_theta(x, theta) +
         (delta_ - laplace_exponent(model_, theta)) * impl_->w(x, 0);
}
double ScaleSet::z1(double x) const {
  return zbar(x) - kappa_derivative(model_, 0.0, 1) * impl_->wbar(x);
}
double ScaleSet::w_conv_w(double x) const { return impl_->w_conv_w(x); }
double ScaleSet::excursion_rate(double x) const {
  if (x <= 0.0) throw DomainError("excursion rate needs x > 0");
  double wx = impl_->w(x, 0);
  if (wx <= 0.0) throw DomainError("excursion rate needs W(x) > 0");
  return impl_->w(x, 1) / wx;
}

const RationalExponent* ScaleSet::rational_fraction() const {
  if (backend_ != Backend::Rational) return nullptr;
  return &static_cast<const detail::RationalScale*>(impl_.get())->fraction();
}

ScaleSet build_rational(const LevyModel& m, double delta) {
  ScaleSet set;
  set.model_ = m;
  set.delta_ = delta;
  set.phi_ = phi(m, delta);
  set.backend_ = Backend::Rational;
  set.impl_ = std::make_shared<const detail::RationalScale>(m, delta);
  return set;
}

ScaleSet build_series(const LevyModel& m, double delta, GridSpec grid) {
  if (grid.h <= 0.0) throw GridError("series grid step must be positive");
  double x_max = grid.x_max > 0.0 ? grid.x_max : default_extent(m, delta);
  ScaleSet set;
  set.model_ = m;
  set.delta_ = delta;
  set.phi_ = phi(m, delta);
  set.backend_ = Backend::Series;
  bool hit = false;
  set.impl_ = std::make_shared<const detail::SeriesScale>(m, delta, UniformGrid::over(grid.h, x_max),
                                                          &hit);
  set.truncation_hit_ = hit;
  return set;
}

ScaleSet build_inversion(const LevyModel& m, double delta, InversionParams params) {
  ScaleSet set;
  set.model_ = m;
  set.delta_ = delta;
  set.phi_ = phi(m, delta);
  set.backend_ = Backend::Inversion;
  set.impl_ = std::make_shared<const detail::InversionScale>(m, delta, set.phi_, params);
  return set;
}

}  // namespace scalekit
