#include "scalekit/passage_laws.hpp"

#include <cmath>

namespace scalekit {

namespace {

void require(bool cond, const char* what) {
  if (!cond) throw DomainError(what);
}

void require_band(double x, double b) {
  require(x >= 0.0 && b > 0.0 && x <= b, "need 0 <= x <= b, b > 0");
}

}  // namespace

double two_sided_exit_up(const ScaleSet& set, double x, double b) {
  require_band(x, b);
  return set.w(x) / set.w(b);
}

double gerber_shiu_exit(const ScaleSet& set, double x, double b, UpperMode mode, double theta) {
  require(x >= 0.0, "gerber_shiu_exit needs x >= 0");
  const double delta = set.delta();
  if (mode == UpperMode::None || std::isinf(b)) {
    const double ph = set.phi();
    // Removable singularity at theta = Phi: the value there is the hitting
    // transform, approached via the guard band.
    if (std::abs(theta - ph) < 1e-7 * (1.0 + std::abs(ph))) return hitting_time_transform(set, x);
    if (theta == 0.0) {
      if (delta == 0.0) {
        double p = profit_rate(set.model());
        return p > 0.0 ? 1.0 - p * set.w(x) : 1.0;  // ruin is certain without profit
      }
      return set.z(x) - set.w(x) * delta / ph;
    }
    double k = laplace_exponent(set.model(), theta);
    return set.z(x, theta) - set.w(x) * (k - delta) / (theta - ph);
  }
  require(x <= b, "gerber_shiu_exit needs x <= b");
  if (mode == UpperMode::Absorb)
    return set.z(x, theta) - set.w(x) / set.w(b) * set.z(b, theta);
  return set.z(x, theta) - set.w(x) / set.w(b, 1) * set.z_prime(b, theta);
}

double hitting_time_transform(const ScaleSet& set, double x) {
  double kp = kappa_derivative(set.model(), set.phi(), 1);
  return std::exp(set.phi() * x) - set.w(x) * kp;
}

double three_level_hitting(const ScaleSet& set, double x, double i, double a, double b) {
  require(a < i && i < b && x > a && x < b, "need a < i < b and x inside (a, b)");
  return set.w(x - a) / set.w(i - a) -
         set.w(x - i) / set.w(b - i) * set.w(b - a) / set.w(i - a);
}

double creeping_probability(const ScaleSet& set, double x) {
  require(x >= 0.0, "creeping_probability needs x >= 0");
  double s2 = set.model().sigma * set.model().sigma;
  if (s2 == 0.0) return 0.0;
  return 0.5 * s2 * (set.w(x, 1) - set.phi() * set.w(x));
}

double maximal_severity(const ScaleSet& set, double x, double u) {
  if (set.delta() != 0.0) throw DeltaError("maximal_severity is a delta = 0 law");
  require(x > 0.0 && u > 0.0, "maximal_severity needs x, u > 0");
  return (set.w(x + u) - set.w(x)) / set.w(u);
}

ResolventValue resolvent_density(const ScaleSet& set, double x, double y, double a, double b,
                                 UpperMode mode) {
  require(x >= a && y >= a, "resolvent arguments must lie above a");
  ResolventValue out;
  if (mode == UpperMode::None || std::isinf(b)) {
    out.density = set.w(x - a) * std::exp(-set.phi() * (y - a)) - set.w(x - y);
    return out;
  }
  require(x <= b && y <= b, "resolvent arguments must lie in [a, b]");
  if (mode == UpperMode::Absorb) {
    out.density = set.w(x - a) / set.w(b - a) * set.w(b - y) - set.w(x - y);
  } else {
    double wpb = set.w(b - a, 1);
    out.density = set.w(x - a) / wpb * set.w(b - y, 1) - set.w(x - y);
    out.atom_at_b = set.w(x - a) / wpb * set.w(0.0);
  }
  return out;
}

double exit_time_transform(const ScaleSet& set, double x, double b) {
  require_band(x, b);
  return 1.0 - set.delta() * (set.w(x) / set.w(b) * set.wbar(b) - set.wbar(x));
}

double capital_injection_transform(const ScaleSet& set, double x, double b, double theta) {
  require_band(x, b);
  require(theta > 0.0, "capital_injection_transform needs theta > 0");
  if (std::isinf(theta)) return set.w(x) / set.w(b);
  return set.z(x, theta) / set.z(b, theta);
}

double delta_zw(const ScaleSet& set, double x, double theta) {
  return set.z(x, theta) * set.w(x, 1) - set.z_prime(x, theta) * set.w(x);
}

double drawdown_deficit_joint_density(const ScaleSet& set, double x, double m, double d,
                                      double theta) {
  require(d > 0.0 && m >= x, "joint drawdown density needs d > 0 and m >= x");
  double nu = set.excursion_rate(d);
  double gap = m > x ? m - x : 0.0;
  return std::exp(-gap * nu) * nu * delta_zw(set, d, theta) / set.w(d, 1);
}

double drawdown_deficit_no_recovery(const ScaleSet& set, double x, double theta) {
  require(x > 0.0, "deficit without recovery needs x > 0");
  return set.w(x) / set.w(x, 1) * delta_zw(set, x, theta) / set.w(x);
}

double bailout_exponential_time(const ScaleSet& set, double x, double b, double theta,
                                BailoutVariant variant) {
  require_band(x, b);
  if (set.delta() <= 0.0) throw DeltaError("bailout laws over E_delta need delta > 0");
  double zx = set.z(x), zxt = set.z(x, theta), zbt = set.z(b, theta);
  switch (variant) {
    case BailoutVariant::BeforeTauB:
      return 1.0 - zx - zxt * (1.0 - set.z(b)) / zbt;
    case BailoutVariant::UpToMin:
      return 1.0 - zx + zxt * set.z(b) / zbt;
    case BailoutVariant::DoublyReflected:
    default:
      return 1.0 - zx + zxt * set.z_prime(b, 0.0) / set.z_prime(b, theta);
  }
}

double dividends_penalty_transform(const ScaleSet& set, double x, double b, double theta,
                                   double vartheta) {
  require_band(x, b);
  require(vartheta >= 0.0, "dividends-penalty tilt must be nonnegative");
  double h = (set.z_prime(b, theta) + vartheta * set.z(b, theta)) /
             (set.w(b, 1) + vartheta * set.w(b));
  return set.z(x, theta) - set.w(x) * h;
}

double joint_dividends_bailouts(const ScaleSet& set, double x, double b, double theta,
                                double vartheta) {
  require_band(x, b);
  if (set.delta() <= 0.0) throw DeltaError("joint dividends-bailouts law needs delta > 0");
  double num = set.delta() * (set.w(b) + vartheta * set.wbar(b));
  double den = set.z_prime(b, theta) + vartheta * set.z(b, theta);
  return 1.0 - set.z(x) + set.z(x, theta) * num / den;
}

double expected_ruin_time(const ScaleSet& set, double x, RuinTimeVariant variant, double b) {
  if (set.delta() != 0.0) throw DeltaError("expected ruin times are delta = 0 laws");
  require(x >= 0.0, "expected_ruin_time needs x >= 0");
  const double p = profit_rate(set.model());
  switch (variant) {
    case RuinTimeVariant::NegativeDrift: {
      if (p >= 0.0) throw DriftSignError("NegativeDrift variant needs kappa'(0+) < 0");
      return set.w(x) / set.phi() - set.wbar(x);
    }
    case RuinTimeVariant::PositiveDriftConditional: {
      if (p <= 0.0) throw DriftSignError("conditional variant needs kappa'(0+) > 0");
      double k2 = kappa_derivative(set.model(), 0.0, 2);
      return k2 / (2.0 * p) * set.w(x) + p * set.w_conv_w(x) - set.wbar(x);
    }
    case RuinTimeVariant::ReflectedAtB:
    default:
      require(b >= x && b > 0.0, "ReflectedAtB needs b >= x > 0");
      return set.w(x) * set.w(b) / set.w(b, 1) - set.wbar(x);
  }
}

double expected_hitting_time(const ScaleSet& set, double x) {
  if (set.delta() != 0.0) throw DeltaError("expected hitting time is a delta = 0 law");
  const double p0 = set.phi();
  double kp = kappa_derivative(set.model(), p0, 1);
  if (kp == 0.0) throw DriftSignError("expected hitting time needs kappa'(Phi_0) != 0");
  double k2 = kappa_derivative(set.model(), p0, 2);
  return kp * set.w_conv_w(x) + k2 / kp * set.w(x) - x * std::exp(x * p0) / kp;
}

double expected_dividends(const ScaleSet& set, double x, double b, Horizon horizon) {
  require_band(x, b);
  if (horizon == Horizon::UntilRuin) return set.w(x) / set.w(b, 1);
  if (set.delta() <= 0.0) throw DeltaError("infinite-horizon dividends need delta > 0");
  return set.z(x) / (set.delta() * set.w(b));
}

double expected_bailouts(const ScaleSet& set, double x, double b, BailoutHorizon horizon) {
  require_band(x, b);
  if (set.delta() <= 0.0) throw DeltaError("expected bailouts need delta > 0");
  const double kp0 = profit_rate(set.model());
  auto G = [&](double y) { return set.zbar(y) + kp0 / set.delta(); };
  if (horizon == BailoutHorizon::UntilTauB) return set.z(x) / set.z(b) * G(b) - G(x);
  // G'(b) = Z(b); Z'(b) = delta W(b).
  return set.z(x) / (set.delta() * set.w(b)) * set.z(b) - G(x);
}

double smooth_gerber_shiu(const ScaleSet& set, const Penalty& penalty, double x) {
  require(x >= 0.0, "smooth_gerber_shiu needs x >= 0");
  if (std::holds_alternative<ExponentialPenalty>(penalty))
    return set.z(x, std::get<ExponentialPenalty>(penalty).theta);
  const auto& lin = std::get<LinearPenalty>(penalty);
  return lin.k * set.z1(x) - lin.K * set.z(x);
}

}  // namespace scalekit
