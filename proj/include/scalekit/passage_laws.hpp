#pragma once

#include <limits>
#include <variant>

#include "scalekit/scale_set.hpp"

namespace scalekit {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class UpperMode { Absorb, Reflect, None };

/// E_x[e^{-delta tau_b^+}; tau_b^+ < tau_0^-] = W(x)/W(b)
double two_sided_exit_up(const ScaleSet& set, double x, double b);

/// Joint transform of the passage time below 0 and the deficit there,
/// E_x[e^{-delta tau_0^- + theta X(tau_0^-)}; ...], with the upper level b
/// absorbing, reflecting, or absent (b = kInf).
double gerber_shiu_exit(const ScaleSet& set, double x, double b, UpperMode mode,
                        double theta = 0.0);

/// E_x[e^{-delta tau_{0}}; tau_{0} < inf] = e^{Phi x} - kappa'(Phi) W(x), x real.
double hitting_time_transform(const ScaleSet& set, double x);

/// Killed hitting of level i before leaving (a, b).
double three_level_hitting(const ScaleSet& set, double x, double i, double a, double b);

/// E_x[e^{-delta tau_0^-}; X(tau_0^-) = 0] = sigma^2/2 (W'(x) - Phi W(x)).
double creeping_probability(const ScaleSet& set, double x);

/// P_x[-inf X before recovery < u, ruin occurs] = (W(x+u) - W(x))/W(u), delta = 0.
double maximal_severity(const ScaleSet& set, double x, double u);

struct ResolventValue {
  double density{0.0};
  double atom_at_b{0.0};  // reflecting upper boundary only
};

/// Resolvent density of the process killed at a (below) with the upper
/// boundary absorbing, reflecting, or absent (b = kInf).
ResolventValue resolvent_density(const ScaleSet& set, double x, double y, double a, double b,
                                 UpperMode mode);

/// E_x[e^{-delta tau}] for tau = min(tau_0^-, tau_b^+).
double exit_time_transform(const ScaleSet& set, double x, double b);

/// E_x[e^{-delta tau_b - theta R_*(tau_b)}] for the process reflected at 0;
/// theta = kInf degenerates to W(x)/W(b).
double capital_injection_transform(const ScaleSet& set, double x, double b, double theta);

/// Joint density in the maximum m of (drawdown time, deficit beyond d):
/// e^{-(m-x)_+ nu(d)} nu(d) Delta^{ ZW}(d, theta) / W'(d).
double drawdown_deficit_joint_density(const ScaleSet& set, double x, double m, double d,
                                      double theta);

/// E_x[e^{-delta tau_0^- + theta X(tau_0^-)} | tau_0^- < tau_x^+].
double drawdown_deficit_no_recovery(const ScaleSet& set, double x, double theta);

/// Z(x,theta) W'(x) - Z'(x,theta) W(x).
double delta_zw(const ScaleSet& set, double x, double theta);

enum class BailoutVariant {
  BeforeTauB,      // E^{[0}_x[e^{-theta R_*(E_delta)}; E_delta < tau_b]
  UpToMin,         // E^{[0}_x[e^{-theta R_*(E_delta ^ tau_b)}]
  DoublyReflected  // E^{[0,b]}_x[e^{-theta R_*(E_delta)}]
};

double bailout_exponential_time(const ScaleSet& set, double x, double b, double theta,
                                BailoutVariant variant);

/// Dividends-penalty transform Z(x,theta) - W(x) H_DP(b),
/// H_DP(b) = (Z'(b,theta) + vartheta Z(b,theta)) / (W'(b) + vartheta W(b)).
double dividends_penalty_transform(const ScaleSet& set, double x, double b, double theta,
                                   double vartheta);

/// Joint dividends-bailouts transform for the doubly reflected process.
double joint_dividends_bailouts(const ScaleSet& set, double x, double b, double theta,
                                double vartheta);

enum class RuinTimeVariant { NegativeDrift, PositiveDriftConditional, ReflectedAtB };

/// Expected (possibly conditional) ruin times at delta = 0.
double expected_ruin_time(const ScaleSet& set, double x, RuinTimeVariant variant, double b = 0.0);

/// E_x[tau_{0}; tau_{0} < inf] at delta = 0.
double expected_hitting_time(const ScaleSet& set, double x);

enum class Horizon { UntilRuin, Infinite };

/// Expected discounted dividends: W(x)/W'(b) until ruin, Z(x)/Z'(b) for the
/// doubly reflected process over an infinite horizon.
double expected_dividends(const ScaleSet& set, double x, double b, Horizon horizon);

enum class BailoutHorizon { UntilTauB, Infinite };

/// Expected discounted capital injections with G(x) = Zbar(x) + kappa'(0+)/delta.
double expected_bailouts(const ScaleSet& set, double x, double b, BailoutHorizon horizon);

struct ExponentialPenalty {
  double theta;
};
struct LinearPenalty {
  double k;
  double K;
};
using Penalty = std::variant<ExponentialPenalty, LinearPenalty>;

/// Smooth Gerber-Shiu function fitting the boundary data of the penalty:
/// Z(x,theta) for e^{theta x}, k Z_1(x) - K Z(x) for k x - K.
double smooth_gerber_shiu(const ScaleSet& set, const Penalty& penalty, double x);

}  // namespace scalekit
