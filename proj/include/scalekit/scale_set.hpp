#pragma once

#include <memory>

#include "scalekit/levy_model.hpp"

namespace scalekit {

enum class Backend { Rational, Series, Inversion };

/// Grid controls for the Series backend. x_max <= 0 selects the default
/// 4 * max(1, 1/rate) where rate is Phi_delta (or the slowest decaying
/// negative root when Phi_delta = 0).
struct GridSpec {
  double h{1.0 / 512.0};
  double x_max{0.0};
};

enum class InversionMethod { Talbot, GaverStehfest };

struct InversionParams {
  InversionMethod method{InversionMethod::Talbot};
  int talbot_nodes{32};
  int gs_terms{14};
};

namespace detail {
class ScaleBackendImpl;
}

struct RationalExponent;

/// Evaluator bundle for the scale-function family at a fixed killing rate:
/// W, its derivatives and antiderivatives, Z, Z(.,theta) and relatives, and
/// the excursion rate nu = W'/W. Immutable and cheap to copy; evaluations are
/// pure and thread-safe.
class ScaleSet {
 public:
  const LevyModel& model() const { return model_; }
  double delta() const { return delta_; }
  Backend backend() const { return backend_; }

  /// Largest nonnegative root of kappa(s) = delta.
  double phi() const { return phi_; }

  /// True when the series build hit its 200-term cap before the tail
  /// criterion; results are still usable but less accurate.
  bool series_truncation_hit() const { return truncation_hit_; }

  /// W^{(order)}(x); W itself vanishes on x < 0.
  double w(double x, int order = 0) const;
  /// int_0^x W
  double wbar(double x) const;
  /// int_0^x int_0^y W
  double wbarbar(double x) const;
  /// Z(x) = 1 + delta * wbar(x)
  double z(double x) const;
  /// int_0^x Z
  double zbar(double x) const;
  /// Two-argument Z(x, theta), analytic continuation valid for every real theta.
  double z(double x, double theta) const;
  /// d/dx Z(x, theta) = theta Z(x, theta) + (delta - kappa(theta)) W(x)
  double z_prime(double x, double theta) const;
  /// d/dtheta Z(x, theta) at theta = 0:  zbar - kappa'(0+) wbar
  double z1(double x) const;
  /// (W * W)(x)
  double w_conv_w(double x) const;
  /// nu(x) = W'(x)/W(x), x > 0
  double excursion_rate(double x) const;

  /// Partial-fraction data when this is a Rational backend, else nullptr.
  const RationalExponent* rational_fraction() const;

  ScaleSet() = default;

 private:
  friend ScaleSet build_rational(const LevyModel&, double);
  friend ScaleSet build_series(const LevyModel&, double, GridSpec);
  friend ScaleSet build_inversion(const LevyModel&, double, InversionParams);

  LevyModel model_{};
  double delta_{0.0};
  double phi_{0.0};
  Backend backend_{Backend::Rational};
  bool truncation_hit_{false};
  std::shared_ptr<const detail::ScaleBackendImpl> impl_{};
};

/// Exponential-sum closed forms from the roots of kappa(s) = delta.
/// Requires a rational exponent with distinct real roots.
ScaleSet build_rational(const LevyModel& m, double delta);

/// Convolution series W_delta = sum_k delta^k W_0^{*,k+1} on a uniform grid.
ScaleSet build_series(const LevyModel& m, double delta, GridSpec grid = {});

/// Numerical Laplace inversion of the tilted transform 1/(kappa(s+Phi)-delta).
ScaleSet build_inversion(const LevyModel& m, double delta, InversionParams params = {});

inline double eval_w(const ScaleSet& set, double x, int deriv_order = 0) {
  return set.w(x, deriv_order);
}
inline double eval_z(const ScaleSet& set, double x) { return set.z(x); }
inline double eval_z(const ScaleSet& set, double x, double theta) { return set.z(x, theta); }
inline double excursion_rate(const ScaleSet& set, double x) { return set.excursion_rate(x); }

}  // namespace scalekit
