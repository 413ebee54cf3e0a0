#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <variant>
#include <vector>

#include "scalekit/errors.hpp"

namespace scalekit {

// ---------------------------------------------------------------------------
// Claim-size laws. All claims are positive; the Levy measure of -X is
// Pi(dz) = lambda * F(dz) on (0, infinity).
// ---------------------------------------------------------------------------

struct NoJumps {};

struct ExponentialJumps {
  double rate;  // density rate * exp(-rate * z)
};

struct ErlangJumps {
  int shape;
  double rate;
};

struct HyperExponentialJumps {
  std::vector<double> weights;  // sum to 1
  std::vector<double> rates;
};

using ClaimLaw = std::variant<NoJumps, ExponentialJumps, ErlangJumps, HyperExponentialJumps>;

/// Compound-Poisson jump specification: claims of law `law` at intensity `lambda`.
struct JumpSpec {
  ClaimLaw law{NoJumps{}};
  double lambda{0.0};

  bool empty() const {
    return lambda == 0.0 || std::holds_alternative<NoJumps>(law);
  }
};

/// Raw moment E[C^k] of the claim size, k = 1, 2, 3.
double claim_moment(const JumpSpec& jumps, int k);

/// Claim density at 0+.
double claim_density_at_zero(const JumpSpec& jumps);

/// Smallest claim-transform pole magnitude: the transform E[e^{-sC}] has its
/// first singularity at s = -rate_min.
double claim_pole(const JumpSpec& jumps);

/// E[e^{-s C}] for the claim law; analytic except at the poles s = -rate.
template <class Scalar>
Scalar claim_transform(const JumpSpec& jumps, Scalar s);

// ---------------------------------------------------------------------------
// Spectrally negative Levy process
//
//   X(t) = x + c t + sigma B(t) - sum_{i<=N_lambda(t)} C_i
//
// with Laplace exponent kappa(th) = sigma^2 th^2 / 2 + c th + lambda (fhat(th) - 1).
// ---------------------------------------------------------------------------
struct LevyModel {
  double sigma{0.0};  // Gaussian coefficient, >= 0
  double drift{0.0};  // premium rate c
  JumpSpec jumps{};
  std::string description{};

  /// Bounded variation iff there is no Gaussian part (jumps have finite
  /// intensity by construction). Requires drift > 0 in that case.
  bool bounded_variation() const { return sigma == 0.0; }

  /// Throws if the parameter set is not a valid spectrally negative model.
  void validate() const;
};

/// kappa(theta); Scalar may be double or std::complex<double>.
template <class Scalar>
Scalar laplace_exponent(const LevyModel& m, Scalar theta);

/// Analytic derivative kappa^(order)(theta), order in {1, 2, 3}.
double kappa_derivative(const LevyModel& m, double theta, int order);

/// Profit rate p = kappa'(0+).
inline double profit_rate(const LevyModel& m) { return kappa_derivative(m, 0.0, 1); }

/// Largest nonnegative root of kappa(s) = delta.
double phi(const LevyModel& m, double delta);

/// Exponentially tilted model with exponent kappa(s + p) - kappa(p).
LevyModel esscher_shift(const LevyModel& m, double p);

// -- inline/template definitions --------------------------------------------

template <class Scalar>
Scalar claim_transform(const JumpSpec& jumps, Scalar s) {
  struct Visitor {
    Scalar s;
    Scalar safe_div(Scalar num, Scalar den) const {
      if (std::abs(den) == 0.0) throw PoleError("theta hits a claim-transform pole");
      return num / den;
    }
    Scalar operator()(const NoJumps&) const { return Scalar(1); }
    Scalar operator()(const ExponentialJumps& e) const {
      return safe_div(Scalar(e.rate), Scalar(e.rate) + s);
    }
    Scalar operator()(const ErlangJumps& e) const {
      Scalar base = safe_div(Scalar(e.rate), Scalar(e.rate) + s);
      Scalar out = Scalar(1);
      for (int i = 0; i < e.shape; ++i) out *= base;
      return out;
    }
    Scalar operator()(const HyperExponentialJumps& h) const {
      Scalar out = Scalar(0);
      for (std::size_t i = 0; i < h.rates.size(); ++i)
        out += Scalar(h.weights[i]) * safe_div(Scalar(h.rates[i]), Scalar(h.rates[i]) + s);
      return out;
    }
  };
  return std::visit(Visitor{s}, jumps.law);
}

template <class Scalar>
Scalar laplace_exponent(const LevyModel& m, Scalar theta) {
  Scalar out = Scalar(m.sigma * m.sigma / 2.0) * theta * theta + Scalar(m.drift) * theta;
  if (!m.jumps.empty())
    out += Scalar(m.jumps.lambda) * (claim_transform(m.jumps, theta) - Scalar(1));
  return out;
}

}  // namespace scalekit
