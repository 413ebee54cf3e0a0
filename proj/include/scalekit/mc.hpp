#pragma once

#include <cmath>
#include <cstdint>
#include <variant>
#include <vector>

#include "scalekit/levy_model.hpp"

namespace scalekit {

struct SimConfig {
  double dt{1e-3};        // Euler substep for the Brownian part
  double horizon{0.0};    // <= 0: chosen per functional
  long n_paths{10000};
  std::uint64_t seed{1};
  bool antithetic{false};

  void validate() const {
    if (dt <= 0.0 || n_paths < 100) throw ConfigError("need dt > 0 and n_paths >= 100");
    if (horizon < 0.0) throw ConfigError("horizon must be nonnegative");
  }
};

// -- path dynamics -----------------------------------------------------------

struct Free {};
struct ReflectBelow0 {};
struct ReflectAt {
  double b;
};
struct DoublyReflect {
  double b;
};
struct Taxed {
  double gamma;
  double b_start;  // taxation applies once the taxed process exceeds b_start
};
struct ParisianObserved {
  double r;
};

using Dynamics = std::variant<Free, ReflectBelow0, ReflectAt, DoublyReflect, Taxed,
                              ParisianObserved>;

/// Lazy handle: paths are regenerated deterministically per functional from
/// counter-based per-path seeds, so estimates are reproducible bit-for-bit
/// for a fixed config regardless of evaluation order.
struct PathEnsemble {
  LevyModel model;
  SimConfig config;
  Dynamics dynamics;
};

inline PathEnsemble simulate(const LevyModel& m, const SimConfig& config,
                             const Dynamics& dynamics) {
  config.validate();
  m.validate();
  return PathEnsemble{m, config, dynamics};
}

// -- functionals -------------------------------------------------------------

struct RuinProb {
  double x;
};
struct KilledExitUp {
  double delta, x, b;
};
struct RuinTransform {
  double delta, x, theta;
};
struct KilledHitting {  // e^{-delta tau_{0}}, hitting of the level 0
  double delta, x;
};
struct HittingMean {  // E_x[tau_{0}; tau_{0} < inf]
  double x;
};
struct MeanExitTime {  // E_x[min(tau_0^-, tau_b^+)]
  double x, b;
};
struct MaximalSeverityFreq {  // P_x[ruin and infimum before recovery > -u]
  double x, u;
};
struct CapitalInjection {  // E_x[e^{-delta tau_b - theta R_*(tau_b)}], reflected below
  double delta, x, b, theta;
};
struct ParisianRuinProb {  // P_x[Parisian ruin observed]
  double x;
};
struct DiscountedDividends {
  double delta, x, b;
  bool until_ruin;  // false: infinite horizon, doubly reflected
};
struct DiscountedInjections {
  double delta, x, b;
  bool until_tau_b;  // false: infinite horizon, doubly reflected
};
struct OccupationBelow0LT {  // E_x[e^{-r * total time below 0}]
  double x, r;
};
struct OccupationPositiveLT {  // (1/delta) E_x[e^{-r L_+(E_delta)}]
  double delta, x, r;
};
struct OccupationJointLT {  // (1/delta) E_x[e^{-rm L_- - rp L_+}; X(E_delta) in [lo, hi]]
  double delta, x, rm, rp;
  double lo{-kJointInf}, hi{kJointInf};
  static constexpr double kJointInf = 1e300;
};
struct DrawdownDeficitMC {  // E_x[e^{-delta sigma_d - theta (D(sigma_d)-d)}]
  double delta, x, d, theta;
};
struct TaxedExit {  // E_u[e^{-delta tau_a^+}; tau_a^+ < affine drawdown]
  double delta, u, a, xi, d, gamma;
};

using Functional =
    std::variant<RuinProb, KilledExitUp, RuinTransform, KilledHitting, HittingMean, MeanExitTime,
                 MaximalSeverityFreq, CapitalInjection, ParisianRuinProb, DiscountedDividends,
                 DiscountedInjections, OccupationBelow0LT, OccupationPositiveLT,
                 OccupationJointLT, DrawdownDeficitMC, TaxedExit>;

struct PathEstimate {
  double mean{0.0};
  double std_error{0.0};
  long n_effective{0};
  long ruin_count{0};
  long exit_count{0};
  long drawdown_count{0};
  long parisian_ruin_count{0};

  bool within(double analytic, double k_sigma) const {
    return std::abs(mean - analytic) <= k_sigma * std_error;
  }
};

/// Monte Carlo estimate of the functional on the ensemble. Compound-Poisson
/// paths (sigma = 0) are simulated exactly; a Gaussian part uses Euler
/// substeps with Brownian-bridge extremes to correct crossing bias.
PathEstimate estimate(const PathEnsemble& ensemble, const Functional& functional);

/// Terminal samples at fixed t for the reflection duality check:
/// columns (max, max - X, X - min, -min) per path, started at 0.
struct TerminalSamples {
  std::vector<double> running_max;
  std::vector<double> drawdown;
  std::vector<double> drawup;
  std::vector<double> neg_infimum;
};
TerminalSamples simulate_terminal_samples(const LevyModel& m, const SimConfig& config, double t);

/// Samples of the top regulator R at an independent exponential time for the
/// process reflected at b, started at x.
std::vector<double> sample_reflected_dividends(const LevyModel& m, const SimConfig& config,
                                               double x, double b, double delta);

}  // namespace scalekit
