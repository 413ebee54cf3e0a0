#pragma once

#include "scalekit/levy_model.hpp"

namespace testmodels {

inline scalekit::LevyModel bm(double sigma, double mu) {
  scalekit::LevyModel m;
  m.sigma = sigma;
  m.drift = mu;
  m.description = "Brownian motion with drift";
  return m;
}

inline scalekit::LevyModel cl_exp(double c, double lambda, double mu) {
  scalekit::LevyModel m;
  m.drift = c;
  m.jumps.lambda = lambda;
  m.jumps.law = scalekit::ExponentialJumps{mu};
  m.description = "Cramer-Lundberg, exponential claims";
  return m;
}

inline scalekit::LevyModel bm_cl_exp(double sigma, double c, double lambda, double mu) {
  scalekit::LevyModel m = cl_exp(c, lambda, mu);
  m.sigma = sigma;
  return m;
}

inline scalekit::LevyModel hyperexp(double c, double lambda, std::vector<double> w,
                                    std::vector<double> r, double sigma = 0.0) {
  scalekit::LevyModel m;
  m.sigma = sigma;
  m.drift = c;
  m.jumps.lambda = lambda;
  m.jumps.law = scalekit::HyperExponentialJumps{std::move(w), std::move(r)};
  m.description = "hyperexponential claims";
  return m;
}

/// Erlang(2,1) claims with a Gaussian part; the worked dividend example.
inline scalekit::LevyModel azcue(double sigma) {
  scalekit::LevyModel m;
  m.sigma = sigma;
  m.drift = 107.0 / 5.0;
  m.jumps.lambda = 10.0;
  m.jumps.law = scalekit::ErlangJumps{2, 1.0};
  m.description = "Erlang(2,1) claims, Gaussian perturbation";
  return m;
}

inline scalekit::LevyModel erlang3(double sigma, double c, double lambda, double mu) {
  scalekit::LevyModel m;
  m.sigma = sigma;
  m.drift = c;
  m.jumps.lambda = lambda;
  m.jumps.law = scalekit::ErlangJumps{3, mu};
  return m;
}

}  // namespace testmodels
