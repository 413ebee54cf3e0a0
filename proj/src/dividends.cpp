#include "scalekit/dividends.hpp"

#include <algorithm>
#include <cmath>

#include "scalekit/grid.hpp"
#include "scalekit/passage_laws.hpp"
#include "scalekit/rational.hpp"

namespace scalekit {

namespace {

double golden_max(const std::function<double(double)>& f, double a, double b, double tol) {
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc > fd) {
      b = d; d = c; fd = fc;
      c = b - gr * (b - a);
      fc = f(c);
    } else {
      a = c; c = d; fc = fd;
      d = a + gr * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

double default_b_max(const ScaleSet& set) {
  double rate = set.phi();
  if (rate <= 1e-9) {
    // fall back on the slowest decay rate of W' - the adjustment coefficient
    try {
      auto fr = rational_factorization(set.model(), set.delta());
      for (double z : fr.roots)
        if (z < -1e-9) rate = std::max(rate, -z);
    } catch (const Error&) {
    }
  }
  if (rate <= 0.0) rate = 1.0;
  return 10.0 * std::max(1.0, 1.0 / rate);
}

}  // namespace

double barrier_function(const BarrierObjective& objective, const ScaleSet& set, double b) {
  if (b < 0.0) throw DomainError("barrier level must be nonnegative");
  if (b == 0.0) return barrier_limit_at_zero(objective, set);
  struct Visitor {
    const ScaleSet& set;
    double b;
    double operator()(const DeFinetti&) const { return 1.0 / set.w(b, 1); }
    double operator()(const DeFinettiPenalty& o) const {
      // H(b) = (1 - G_w'(b)) / W'(b) with G_w = k Z_1 - K Z.
      double gw_prime = o.k * (set.z(b) - profit_rate(set.model()) * set.w(b)) -
                        o.K * set.delta() * set.w(b);
      return (1.0 - gw_prime) / set.w(b, 1);
    }
    double operator()(const Slg& o) const {
      return (1.0 - o.k * set.z(b)) / set.w(b) - profit_rate(set.model());
    }
    double operator()(const DividendsPenalty& o) const {
      return (set.z_prime(b, o.theta) + o.vartheta * set.z(b, o.theta)) /
             (set.w(b, 1) + o.vartheta * set.w(b));
    }
    double operator()(const DividendsTime& o) const {
      return (set.delta() * set.w(b) + o.vartheta * set.z(b)) /
             (set.w(b, 1) + o.vartheta * set.w(b));
    }
    double operator()(const TaxedDrawdown& o) const {
      // influence function of the delayed-taxation value: the tax stream is
      // gamma dXbar, so the raw expectation carries a gamma factor
      double y = (1.0 - o.xi) * b + o.d;
      return std::pow(set.w(y), -1.0 / (1.0 - o.xi)) * o.gamma *
             taxed_drawdown_dividends(set, b, kInf, o.xi, o.d, o.gamma);
    }
  };
  return std::visit(Visitor{set, b}, objective);
}

double barrier_limit_at_zero(const BarrierObjective& objective, const ScaleSet& set) {
  const double w0 = set.w(0.0), wp0 = set.w(0.0, 1);
  struct Visitor {
    const ScaleSet& set;
    double w0, wp0;
    double operator()(const DeFinetti&) const { return 1.0 / wp0; }
    double operator()(const DeFinettiPenalty& o) const {
      double gw_prime = o.k * (1.0 - profit_rate(set.model()) * w0) - o.K * set.delta() * w0;
      return (1.0 - gw_prime) / wp0;
    }
    double operator()(const Slg& o) const {
      if (w0 == 0.0) {
        if (o.k > 1.0) return -kInf;
        if (o.k < 1.0) return kInf;
        return -profit_rate(set.model());
      }
      return (1.0 - o.k) / w0 - profit_rate(set.model());
    }
    double operator()(const DividendsPenalty& o) const {
      double zp0 = o.theta + (set.delta() - laplace_exponent(set.model(), o.theta)) * w0;
      return (zp0 + o.vartheta) / (wp0 + o.vartheta * w0);
    }
    double operator()(const DividendsTime& o) const {
      return (set.delta() * w0 + o.vartheta) / (wp0 + o.vartheta * w0);
    }
    double operator()(const TaxedDrawdown& o) const {
      if (set.w(o.d) <= 0.0)
        throw DomainError("taxed drawdown with d = 0 needs a bounded-variation model");
      return std::pow(set.w(o.d), -1.0 / (1.0 - o.xi)) * o.gamma *
             taxed_drawdown_dividends(set, 0.0, kInf, o.xi, o.d, o.gamma);
    }
  };
  return std::visit(Visitor{set, w0, wp0}, objective);
}

double barrier_limit_at_infinity(const BarrierObjective& objective, const ScaleSet& set) {
  const double ph = set.phi();
  const double delta = set.delta();
  struct Visitor {
    const ScaleSet& set;
    double ph, delta;
    double operator()(const DeFinetti&) const { return ph > 0.0 ? 0.0 : kInf; }
    double operator()(const DeFinettiPenalty& o) const {
      // numerator 1 - k(Z - pW) + K delta W ~ (k p - k delta/Phi + K delta) W(b)
      if (ph <= 0.0) return kInf;
      double slope = o.k * (profit_rate(set.model()) - delta / ph) + o.K * delta;
      return slope / ph;
    }
    double operator()(const Slg& o) const {
      if (ph <= 0.0) throw DeltaError("SLG limit needs delta > 0");
      return -o.k * delta / ph - profit_rate(set.model());
    }
    double operator()(const DividendsPenalty& o) const {
      double k = laplace_exponent(set.model(), o.theta);
      return (delta - k) / (ph - o.theta);
    }
    double operator()(const DividendsTime&) const {
      if (ph <= 0.0) throw DeltaError("dividends-time limit needs delta > 0");
      return delta / ph;
    }
    double operator()(const TaxedDrawdown&) const { return 0.0; }
  };
  return std::visit(Visitor{set, ph, delta}, objective);
}

BarrierResult optimize_barrier(const BarrierObjective& objective, const ScaleSet& set,
                               ScanParams scan) {
  double b_max = scan.b_max > 0.0 ? scan.b_max : default_b_max(set);
  double step = scan.coarse_step > 0.0 ? scan.coarse_step : b_max / 2000.0;
  if (b_max <= 0.0 || step <= 0.0) throw ScanError("scan range must be positive");

  auto H = [&](double b) { return barrier_function(objective, set, b); };

  const int n = int(std::ceil(b_max / step));
  std::vector<double> bs(n + 1), hs(n + 1);
  for (int i = 0; i <= n; ++i) {
    bs[i] = std::min(i * step, b_max);
    hs[i] = H(bs[i]);
    if (std::isnan(hs[i])) throw ScanError("barrier function not finite on the scan range");
  }

  BarrierResult out;
  // golden section down to ~sqrt(eps), then parabolic-vertex polish to push
  // past the derivative-free noise floor
  auto refine = [&](double lo, double hi) {
    double b1 = golden_max(H, lo, hi, 1e-9);
    for (int it = 0; it < 2; ++it) {
      double h = 1e-5 * std::max(1.0, std::abs(b1));
      if (b1 - h <= lo || b1 + h >= hi) break;
      double up = H(b1 + h), dn = H(b1 - h), mid = H(b1);
      double den = up - 2.0 * mid + dn;
      if (den >= 0.0) break;
      double step = -0.5 * h * (up - dn) / den;
      if (std::abs(step) > 10.0 * h) break;
      b1 += step;
    }
    return b1;
  };

  // Interior local maxima plus the two endpoints when they dominate their
  // neighbours.
  for (int i = 0; i <= n; ++i) {
    bool is_max = false;
    double b_loc = bs[i], h_loc = hs[i];
    if (i == 0) {
      is_max = hs[0] >= hs[1];
    } else if (i == n) {
      is_max = hs[n] >= hs[n - 1];
    } else if (hs[i] >= hs[i - 1] && hs[i] >= hs[i + 1]) {
      is_max = true;
      b_loc = refine(bs[i - 1], bs[i + 1]);
      h_loc = H(b_loc);
      if (std::isinf(h_loc)) h_loc = hs[i], b_loc = bs[i];
    }
    if (is_max) {
      if (!out.local_maxima.empty() && std::abs(b_loc - out.local_maxima.back()) < 2.0 * step &&
          h_loc <= out.local_maxima_values.back() + 1e-15)
        continue;  // same plateau
      out.local_maxima.push_back(b_loc);
      out.local_maxima_values.push_back(h_loc);
    }
  }
  if (out.local_maxima.empty()) throw ScanError("no barrier maximum found on the scan range");

  double h_best = *std::max_element(out.local_maxima_values.begin(),
                                    out.local_maxima_values.end());
  int ties = 0;
  for (std::size_t i = 0; i < out.local_maxima.size(); ++i) {
    if (out.local_maxima_values[i] >= h_best - 1e-9 * std::max(1.0, std::abs(h_best))) {
      ++ties;
      out.b_star = out.local_maxima[i];  // ascending order: ends at the last one
      out.h_star = out.local_maxima_values[i];
    }
  }
  out.multimodal = ties >= 2;
  out.value_at = [objective, set, b = out.b_star](double x) {
    return value_function(objective, set, x, b);
  };
  return out;
}

double value_function(const BarrierObjective& objective, const ScaleSet& set, double x,
                      double b) {
  if (x < 0.0 || b < 0.0) throw DomainError("value_function needs x, b >= 0");
  struct Visitor {
    const ScaleSet& set;
    double x, b;
    const BarrierObjective& obj;
    double definetti_family(double k, double K) const {
      if (x > b) return x - b + definetti_at(b, k, K);
      return definetti_at(x, k, K);
    }
    double definetti_at(double y, double k, double K) const {
      double gw = k * set.z1(y) - K * set.z(y);
      double gw_prime_b = k * (set.z(b) - profit_rate(set.model()) * set.w(b)) -
                          K * set.delta() * set.w(b);
      return gw + set.w(y) * (1.0 - gw_prime_b) / set.w(b, 1);
    }
    double operator()(const DeFinetti&) const { return definetti_family(0.0, 0.0); }
    double operator()(const DeFinettiPenalty& o) const { return definetti_family(o.k, o.K); }
    double operator()(const Slg& o) const {
      double at_b_or_less = [&](double y) {
        return o.k * set.z1(y) +
               set.z(y) * (1.0 - o.k * (set.z(b) - profit_rate(set.model()) * set.w(b))) /
                   (set.delta() * set.w(b));
      }(std::min(x, b));
      // starting above b pays the lump x - b immediately
      return x > b ? x - b + at_b_or_less : at_b_or_less;
    }
    double operator()(const DividendsPenalty& o) const {
      double xx = std::min(x, b);
      double base = set.z(xx, o.theta) - set.w(xx) * barrier_function(obj, set, b);
      // an initial lump dividend x - b scales the transform by e^{-vartheta (x-b)}
      return x > b ? std::exp(-o.vartheta * (x - b)) * base : base;
    }
    double operator()(const DividendsTime& o) const {
      double xx = std::min(x, b);
      double base = set.z(xx) - set.w(xx) * barrier_function(obj, set, b);
      return x > b ? std::exp(-o.vartheta * (x - b)) * base : base;
    }
    double operator()(const TaxedDrawdown& o) const {
      if (x >= b) return o.gamma * taxed_drawdown_dividends(set, x, kInf, o.xi, o.d, o.gamma);
      double wy_x = set.w((1.0 - o.xi) * x + o.d);
      double wy_b = set.w((1.0 - o.xi) * b + o.d);
      return std::pow(wy_x / wy_b, 1.0 / (1.0 - o.xi)) * o.gamma *
             taxed_drawdown_dividends(set, b, kInf, o.xi, o.d, o.gamma);
    }
  };
  return std::visit(Visitor{set, x, b, objective}, objective);
}

SlgClassification slg_monotonicity_test(const ScaleSet& set, double k) {
  if (set.delta() <= 0.0) throw DeltaError("SLG objective needs delta > 0");
  SlgClassification out;
  const LevyModel& m = set.model();
  const double mass = m.jumps.empty() ? 0.0 : m.jumps.lambda;
  if (m.sigma == 0.0 && mass > 0.0 && k <= 1.0 + set.delta() / mass) {
    out.decreasing = true;
    return out;
  }
  // f(b) = k Delta^{ZW}(b)/W'(b) - 1 decreases to -1; bisect its root.
  auto f = [&](double b) { return k * delta_zw(set, b, 0.0) / set.w(b, 1) - 1.0; };
  double lo = 1e-9, hi = 1.0;
  int guard = 0;
  while (f(hi) > 0.0) {
    hi *= 2.0;
    if (++guard > 100) throw ConvergenceError("SLG maximum not bracketed");
  }
  while (hi - lo > 1e-10 * (1.0 + hi)) {
    double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  out.interior_maximum = 0.5 * (lo + hi);
  return out;
}

double lagrange_cost(const ScaleSet& set, double b) {
  double defect = curvature_defect(set, b);
  if (defect <= 1e-14) throw DegenerateError("curvature defect vanishes at b");
  return set.w(b, 2) / (set.delta() * defect);
}

double curvature_defect(const ScaleSet& set, double b) {
  double wp = set.w(b, 1);
  return wp * wp - set.w(b) * set.w(b, 2);
}

double taxed_drawdown_exit(const ScaleSet& set, double u, double a, double xi, double d,
                           double gamma) {
  if (!(u > 0.0) || u > a) throw DomainError("taxed exit needs 0 < u <= a");
  if (gamma < 0.0 || gamma >= 1.0) throw DomainError("tax rate gamma must lie in [0, 1)");
  if (xi == 1.0) {
    if (d <= 0.0) throw DomainError("classic drawdown needs d > 0");
    return std::exp(-(a - u) * set.w(d, 1) / ((1.0 - gamma) * set.w(d)));
  }
  if (xi > 1.0) throw DomainError("affine drawdown slope must satisfy xi <= 1");
  auto level = [&](double s) { return (1.0 - xi) * s + d; };
  if (d <= 0.0 && set.w(level(u)) <= 0.0)
    throw DomainError("d = 0 with xi < 1 needs W((1-xi)u) > 0 (bounded variation)");
  double expnt = 1.0 / ((1.0 - xi) * (1.0 - gamma));
  return std::pow(set.w(level(u)) / set.w(level(a)), expnt);
}

double taxed_drawdown_dividends(const ScaleSet& set, double u, double a, double xi, double d,
                                double gamma) {
  if (u < 0.0 || u > a) throw DomainError("taxed dividends need 0 <= u <= a");
  auto level = [&](double s) { return (1.0 - xi) * s + d; };
  if (gamma == 1.0) return set.w(level(u)) / set.w(level(u), 1);
  if (gamma < 0.0 || gamma > 1.0) throw DomainError("tax rate gamma must lie in [0, 1]");
  if (u == a) return 0.0;
  double expnt = 1.0 / ((1.0 - xi) * (1.0 - gamma));
  double wu = set.w(level(u));
  auto integrand = [&](double s) { return std::pow(wu / set.w(level(s)), expnt); };
  if (std::isinf(a)) {
    // integrand ~ e^{-expnt (1-xi) Phi (s-u)}
    double rate = expnt * (1.0 - xi) * set.phi();
    if (rate <= 0.0) throw DivergentIntegral("tax integrand does not decay on [u, inf)");
    double cutoff = u + 40.0 / rate;
    return integrate(integrand, u, cutoff, 1e-9) / (1.0 - gamma);
  }
  return integrate(integrand, u, a, 1e-9) / (1.0 - gamma);
}

TaxedDelayResult taxed_delay_optimize(const ScaleSet& set, double xi, double d, double gamma,
                                      ScanParams scan) {
  if (set.delta() <= 0.0) throw DeltaError("taxation delay optimization needs delta > 0");
  BarrierObjective obj = TaxedDrawdown{xi, d, gamma};
  double b_max = scan.b_max > 0.0 ? scan.b_max : default_b_max(set);
  double step = scan.coarse_step > 0.0 ? scan.coarse_step : b_max / 400.0;

  auto f = [&](double b) { return barrier_function(obj, set, b); };
  TaxedDelayResult out;
  double best = -kInf, best_b = 0.0;
  for (double b = 0.0; b <= b_max + 1e-12; b += step) {
    double v = f(b);
    out.scan_b.push_back(b);
    out.scan_value.push_back(v);
    if (v > best) {
      best = v;
      best_b = b;
    }
  }
  double lo = std::max(0.0, best_b - step), hi = std::min(b_max, best_b + step);
  out.b_star = golden_max(f, lo, hi, 1e-9);
  if (f(0.0) >= f(out.b_star)) out.b_star = 0.0;
  out.influence_at_b_star = f(out.b_star);
  return out;
}

double cl_definetti_discriminant(const LevyModel& m, double delta, DiscriminantReading reading) {
  if (!std::holds_alternative<ExponentialJumps>(m.jumps.law) || m.sigma != 0.0)
    throw DomainError("discriminant applies to the compound Poisson model with exponential claims");
  double mu = std::get<ExponentialJumps>(m.jumps.law).rate;
  double lambda = m.jumps.lambda;
  double p = reading == DiscriminantReading::PremiumRate ? m.drift : profit_rate(m);
  return (delta + lambda) * (delta + lambda) - p * lambda * mu;
}

}  // namespace scalekit
