#include "scalekit/levy_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace scalekit {

namespace {

double pow_int(double base, int n) {
  double out = 1.0;
  for (int i = 0; i < n; ++i) out *= base;
  return out;
}

// Rising factorial n (n+1) ... (n+k-1).
double rising(int n, int k) {
  double out = 1.0;
  for (int i = 0; i < k; ++i) out *= double(n + i);
  return out;
}

void check_not_pole(const JumpSpec& jumps, double theta) {
  struct Visitor {
    double theta;
    void operator()(const NoJumps&) const {}
    void operator()(const ExponentialJumps& e) const {
      if (theta == -e.rate) throw PoleError("theta hits the claim-transform pole");
    }
    void operator()(const ErlangJumps& e) const {
      if (theta == -e.rate) throw PoleError("theta hits the claim-transform pole");
    }
    void operator()(const HyperExponentialJumps& h) const {
      for (double r : h.rates)
        if (theta == -r) throw PoleError("theta hits a claim-transform pole");
    }
  };
  std::visit(Visitor{theta}, jumps.law);
}

}  // namespace

double claim_moment(const JumpSpec& jumps, int k) {
  struct Visitor {
    int k;
    double operator()(const NoJumps&) const { return 0.0; }
    double operator()(const ExponentialJumps& e) const {
      double out = 1.0;
      for (int i = 1; i <= k; ++i) out *= double(i) / e.rate;
      return out;
    }
    double operator()(const ErlangJumps& e) const {
      return rising(e.shape, k) / pow_int(e.rate, k);
    }
    double operator()(const HyperExponentialJumps& h) const {
      double out = 0.0;
      double fact = 1.0;
      for (int i = 1; i <= k; ++i) fact *= double(i);
      for (std::size_t i = 0; i < h.rates.size(); ++i)
        out += h.weights[i] * fact / pow_int(h.rates[i], k);
      return out;
    }
  };
  return std::visit(Visitor{k}, jumps.law);
}

double claim_density_at_zero(const JumpSpec& jumps) {
  struct Visitor {
    double operator()(const NoJumps&) const { return 0.0; }
    double operator()(const ExponentialJumps& e) const { return e.rate; }
    double operator()(const ErlangJumps& e) const { return e.shape == 1 ? e.rate : 0.0; }
    double operator()(const HyperExponentialJumps& h) const {
      double out = 0.0;
      for (std::size_t i = 0; i < h.rates.size(); ++i) out += h.weights[i] * h.rates[i];
      return out;
    }
  };
  return std::visit(Visitor{}, jumps.law);
}

double claim_pole(const JumpSpec& jumps) {
  struct Visitor {
    double operator()(const NoJumps&) const { return std::numeric_limits<double>::infinity(); }
    double operator()(const ExponentialJumps& e) const { return e.rate; }
    double operator()(const ErlangJumps& e) const { return e.rate; }
    double operator()(const HyperExponentialJumps& h) const {
      return *std::min_element(h.rates.begin(), h.rates.end());
    }
  };
  return std::visit(Visitor{}, jumps.law);
}

void LevyModel::validate() const {
  if (sigma < 0.0) throw ConfigError("sigma must be nonnegative");
  if (jumps.lambda < 0.0) throw ConfigError("jump intensity must be nonnegative");
  struct Visitor {
    void operator()(const NoJumps&) const {}
    void operator()(const ExponentialJumps& e) const {
      if (e.rate <= 0.0) throw ConfigError("exponential claim rate must be positive");
    }
    void operator()(const ErlangJumps& e) const {
      if (e.rate <= 0.0 || e.shape < 1) throw ConfigError("invalid Erlang claim parameters");
    }
    void operator()(const HyperExponentialJumps& h) const {
      if (h.weights.size() != h.rates.size() || h.weights.empty())
        throw ConfigError("hyperexponential weights/rates mismatch");
      double sum = std::accumulate(h.weights.begin(), h.weights.end(), 0.0);
      if (std::abs(sum - 1.0) > 1e-12) throw ConfigError("hyperexponential weights must sum to 1");
      for (std::size_t i = 0; i < h.rates.size(); ++i)
        if (h.rates[i] <= 0.0 || h.weights[i] < 0.0)
          throw ConfigError("hyperexponential rates must be positive, weights nonnegative");
    }
  };
  std::visit(Visitor{}, jumps.law);
  if (bounded_variation() && drift <= 0.0)
    throw ConfigError("bounded-variation model requires positive premium rate");
}

double kappa_derivative(const LevyModel& m, double theta, int order) {
  if (order < 1 || order > 3) throw ConfigError("kappa_derivative supports orders 1..3");
  check_not_pole(m.jumps, theta);

  double out = 0.0;
  if (order == 1) out = m.sigma * m.sigma * theta + m.drift;
  if (order == 2) out = m.sigma * m.sigma;

  if (m.jumps.empty()) return out;

  // d^k/ds^k of E[e^{-sC}] evaluated termwise for each exponential component:
  // d^k/ds^k [mu^n / (mu+s)^n] = (-1)^k n(n+1)..(n+k-1) mu^n / (mu+s)^{n+k}.
  struct Visitor {
    double theta;
    int k;
    double operator()(const NoJumps&) const { return 0.0; }
    double operator()(const ExponentialJumps& e) const {
      double sign = (k % 2 == 0) ? 1.0 : -1.0;
      return sign * rising(1, k) * e.rate / pow_int(e.rate + theta, 1 + k);
    }
    double operator()(const ErlangJumps& e) const {
      double sign = (k % 2 == 0) ? 1.0 : -1.0;
      return sign * rising(e.shape, k) * pow_int(e.rate, e.shape) /
             pow_int(e.rate + theta, e.shape + k);
    }
    double operator()(const HyperExponentialJumps& h) const {
      double sign = (k % 2 == 0) ? 1.0 : -1.0;
      double sum = 0.0;
      for (std::size_t i = 0; i < h.rates.size(); ++i)
        sum += h.weights[i] * h.rates[i] / pow_int(h.rates[i] + theta, 1 + k);
      return sign * rising(1, k) * sum;
    }
  };
  out += m.jumps.lambda * std::visit(Visitor{theta, order}, m.jumps.law);
  return out;
}

double phi(const LevyModel& m, double delta) {
  if (delta < 0.0) throw DomainError("phi requires delta >= 0");
  const double p = profit_rate(m);
  if (delta == 0.0 && p >= 0.0) return 0.0;

  auto f = [&](double s) { return laplace_exponent(m, s) - delta; };

  // Bracket [lo, hi] with f(lo) < 0 < f(hi); kappa is convex on [0, inf) so
  // the root right of 0 is unique.
  double lo = 0.0;
  if (delta == 0.0) {
    // kappa(0) = 0 exactly; step right until kappa < 0.
    lo = 1e-8;
    int guard = 0;
    while (f(lo) >= 0.0) {
      lo *= 0.5;
      if (++guard > 200) throw ConvergenceError("phi: cannot step off the zero root");
    }
  }
  double hi = std::max(1.0, 2.0 * lo);
  int guard = 0;
  while (f(hi) <= 0.0) {
    hi *= 2.0;
    if (++guard > 200) throw ConvergenceError("phi: bracketing failed");
  }

  // Brent's method.
  double a = lo, b = hi, fa = f(a), fb = f(b);
  double c = a, fc = fa, d = b - a, e = d;
  for (int it = 0; it < 200; ++it) {
    if (std::abs(fc) < std::abs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    double tol = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) + 1e-15;
    double mid = 0.5 * (c - b);
    if (std::abs(mid) <= tol || fb == 0.0) break;
    if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
      double s = fb / fa, pq, q;
      if (a == c) {
        pq = 2.0 * mid * s;
        q = 1.0 - s;
      } else {
        double qq = fa / fc, r = fb / fc;
        pq = s * (2.0 * mid * qq * (qq - r) - (b - a) * (r - 1.0));
        q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (pq > 0.0) q = -q;
      pq = std::abs(pq);
      if (2.0 * pq < std::min(3.0 * mid * q - std::abs(tol * q), std::abs(e * q))) {
        e = d; d = pq / q;
      } else {
        d = mid; e = d;
      }
    } else {
      d = mid; e = d;
    }
    a = b; fa = fb;
    b += (std::abs(d) > tol) ? d : (mid > 0 ? tol : -tol);
    fb = f(b);
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a; fc = fa; d = b - a; e = d;
    }
  }

  // Newton polish.
  double s = b;
  for (int it = 0; it < 8; ++it) {
    double fs = f(s), dfs = kappa_derivative(m, s, 1);
    if (dfs == 0.0) break;
    double step = fs / dfs;
    s -= step;
    if (std::abs(step) < 1e-16 * std::max(1.0, std::abs(s))) break;
  }
  if (std::abs(f(s)) > 1e-12 * std::max(1.0, delta))
    throw ConvergenceError("phi: residual tolerance not met");
  return s;
}

LevyModel esscher_shift(const LevyModel& m, double p) {
  if (p == 0.0) return m;
  if (!m.jumps.empty() && p <= -claim_pole(m.jumps))
    throw PoleError("esscher_shift: tilt outside analyticity domain");

  LevyModel out;
  out.sigma = m.sigma;
  out.drift = m.drift + m.sigma * m.sigma * p;
  out.description = m.description;

  // Tilting multiplies the Levy measure of -X by e^{-p z}; each exponential
  // component stays exponential with shifted rate and reweighted intensity.
  struct Visitor {
    double p, lambda;
    JumpSpec operator()(const NoJumps&) const { return JumpSpec{}; }
    JumpSpec operator()(const ExponentialJumps& e) const {
      JumpSpec js;
      js.law = ExponentialJumps{e.rate + p};
      js.lambda = lambda * e.rate / (e.rate + p);
      return js;
    }
    JumpSpec operator()(const ErlangJumps& e) const {
      JumpSpec js;
      js.law = ErlangJumps{e.shape, e.rate + p};
      double factor = 1.0;
      for (int i = 0; i < e.shape; ++i) factor *= e.rate / (e.rate + p);
      js.lambda = lambda * factor;
      return js;
    }
    JumpSpec operator()(const HyperExponentialJumps& h) const {
      HyperExponentialJumps out;
      double total = 0.0;
      for (std::size_t i = 0; i < h.rates.size(); ++i) {
        double mass = h.weights[i] * h.rates[i] / (h.rates[i] + p);
        out.weights.push_back(mass);
        out.rates.push_back(h.rates[i] + p);
        total += mass;
      }
      for (double& w : out.weights) w /= total;
      JumpSpec js;
      js.law = out;
      js.lambda = lambda * total;
      return js;
    }
  };
  out.jumps = m.jumps.empty() ? JumpSpec{} : std::visit(Visitor{p, m.jumps.lambda}, m.jumps.law);
  return out;
}

}  // namespace scalekit
