#include "scalekit/rational.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

namespace scalekit {

namespace {

using Poly = std::vector<double>;  // coefficients, ascending powers

Poly mul(const Poly& a, const Poly& b) {
  Poly out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

Poly add(Poly a, const Poly& b) {
  if (b.size() > a.size()) a.resize(b.size(), 0.0);
  for (std::size_t i = 0; i < b.size(); ++i) a[i] += b[i];
  return a;
}

Poly scale(Poly a, double c) {
  for (double& v : a) v *= c;
  return a;
}

Poly pow_poly(const Poly& a, int n) {
  Poly out{1.0};
  for (int i = 0; i < n; ++i) out = mul(out, a);
  return out;
}

// Numerator and denominator polynomials of the claim transform fhat = N/D.
void claim_fraction(const JumpSpec& jumps, Poly& num, Poly& den) {
  struct Visitor {
    Poly* num;
    Poly* den;
    void operator()(const NoJumps&) const {
      *num = {1.0};
      *den = {1.0};
    }
    void operator()(const ExponentialJumps& e) const {
      *num = {e.rate};
      *den = {e.rate, 1.0};
    }
    void operator()(const ErlangJumps& e) const {
      double mun = 1.0;
      for (int i = 0; i < e.shape; ++i) mun *= e.rate;
      *num = {mun};
      *den = pow_poly({e.rate, 1.0}, e.shape);
    }
    void operator()(const HyperExponentialJumps& h) const {
      *den = {1.0};
      for (double r : h.rates) *den = mul(*den, {r, 1.0});
      *num = {0.0};
      for (std::size_t i = 0; i < h.rates.size(); ++i) {
        Poly term{h.weights[i] * h.rates[i]};
        for (std::size_t j = 0; j < h.rates.size(); ++j)
          if (j != i) term = mul(term, {h.rates[j], 1.0});
        *num = add(*num, term);
      }
    }
  };
  std::visit(Visitor{&num, &den}, jumps.law);
}

// Eigenvalues of the companion matrix of a monic-normalized polynomial.
std::vector<std::complex<double>> poly_roots(const Poly& p) {
  int deg = int(p.size()) - 1;
  while (deg > 0 && p[deg] == 0.0) --deg;
  if (deg < 1) return {};
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(deg, deg);
  for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -p[i] / p[deg];
  for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(comp, /*computeEigenvectors=*/false);
  std::vector<std::complex<double>> out;
  for (int i = 0; i < deg; ++i) out.push_back(solver.eigenvalues()[i]);
  return out;
}

}  // namespace

double partial_fraction_value(const RationalExponent& r, double s) {
  double out = 0.0;
  if (r.zero_double_root) out += r.a2 / (s * s) + r.a1 / s;
  for (std::size_t i = 0; i < r.roots.size(); ++i) out += r.weights[i] / (s - r.roots[i]);
  return out;
}

RationalExponent rational_factorization(const LevyModel& m, double delta) {
  if (delta < 0.0) throw DomainError("rational_factorization requires delta >= 0");
  m.validate();

  // Clear denominators:  kappa(s) - delta = P(s) / D(s)  with
  //   P(s) = (sigma^2/2 s^2 + c s - (lambda + delta)) D(s) + lambda N(s).
  Poly num, den;
  claim_fraction(m.jumps, num, den);
  const double lambda = m.jumps.empty() ? 0.0 : m.jumps.lambda;
  Poly base{-(lambda + delta), m.drift, m.sigma * m.sigma / 2.0};
  while (!base.empty() && base.back() == 0.0) base.pop_back();
  Poly P = add(mul(base, den), scale(num, lambda));
  while (P.size() > 1 && P.back() == 0.0) P.pop_back();

  RationalExponent out;
  out.delta = delta;

  // At delta = 0 the exponent always vanishes at s = 0: deflate explicitly so
  // the eigen-solve never has to resolve a root sitting exactly at zero.
  int zero_multiplicity = 0;
  if (delta == 0.0) {
    const double dp = kappa_derivative(m, 0.0, 1);
    const double drift_scale = std::abs(m.drift) + m.jumps.lambda * claim_moment(m.jumps, 1);
    zero_multiplicity = (std::abs(dp) < 1e-12 * std::max(1.0, drift_scale)) ? 2 : 1;
    P.erase(P.begin(), P.begin() + zero_multiplicity);
    if (zero_multiplicity == 1) {
      out.zero_simple_root = true;
    } else {
      out.zero_double_root = true;
      const double k2 = kappa_derivative(m, 0.0, 2);
      const double k3 = kappa_derivative(m, 0.0, 3);
      out.a2 = 2.0 / k2;
      out.a1 = -2.0 * k3 / (3.0 * k2 * k2);
    }
  }

  std::vector<std::complex<double>> raw = poly_roots(P);

  // Newton-polish on the exact exponent (complex arithmetic), then classify.
  std::vector<double> real_roots;
  std::vector<std::complex<double>> complex_roots;
  for (std::complex<double> z : raw) {
    for (int it = 0; it < 60; ++it) {
      std::complex<double> f = laplace_exponent(m, z) - delta;
      std::complex<double> df =
          laplace_exponent(m, z + std::complex<double>(1e-7, 0)) -
          laplace_exponent(m, z - std::complex<double>(1e-7, 0));
      df /= 2e-7;
      if (std::abs(df) == 0.0) break;
      std::complex<double> step = f / df;
      z -= step;
      if (std::abs(step) < 1e-15 * (1.0 + std::abs(z))) break;
    }
    if (std::abs(z.imag()) < 1e-7 * (1.0 + std::abs(z))) {
      double s = z.real();
      // Final real Newton polish with the analytic derivative.
      for (int it = 0; it < 8; ++it) {
        double f = laplace_exponent(m, s) - delta;
        double df = kappa_derivative(m, s, 1);
        if (df == 0.0) break;
        s -= f / df;
      }
      real_roots.push_back(s);
    } else {
      complex_roots.push_back(z);
    }
  }

  if (!complex_roots.empty()) {
    std::ostringstream msg;
    msg << "complex conjugate roots of kappa(s)=" << delta << ":";
    for (const auto& z : complex_roots) msg << " (" << z.real() << (z.imag() >= 0 ? "+" : "")
                                            << z.imag() << "i)";
    throw ComplexRootError(msg.str());
  }

  if (out.zero_simple_root) real_roots.push_back(0.0);
  std::sort(real_roots.begin(), real_roots.end(), std::greater<double>());

  for (std::size_t i = 1; i < real_roots.size(); ++i)
    if (real_roots[i - 1] - real_roots[i] < 1e-8)
      throw RepeatedRootError("roots of kappa(s)=delta closer than 1e-8");

  out.roots = real_roots;
  for (double zeta : real_roots) out.weights.push_back(1.0 / kappa_derivative(m, zeta, 1));

  // Reconstruction residual check against 1/(kappa(s)-delta).
  const double top = out.roots.empty() ? 0.0 : out.roots.front();
  for (int i = 1; i <= 10; ++i) {
    double s = top + 0.5 * i;
    double exact = 1.0 / (laplace_exponent(m, s) - delta);
    double rec = partial_fraction_value(out, s);
    if (std::abs(rec - exact) > 1e-10 * std::max(1.0, std::abs(exact)))
      throw ConvergenceError("partial-fraction reconstruction residual exceeds 1e-10");
  }
  return out;
}

}  // namespace scalekit
