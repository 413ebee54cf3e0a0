#pragma once

#include <functional>
#include <variant>
#include <vector>

#include "scalekit/scale_set.hpp"

namespace scalekit {

// ---------------------------------------------------------------------------
// Barrier objectives. Every objective carries a barrier function H(b); the
// candidate optimal barrier is the LAST global maximum of H. For the
// DividendsPenalty and DividendsTime objectives the underlying transform
// Z - W H(b) is *minimized* over b, which is the same thing as maximizing H.
// ---------------------------------------------------------------------------

struct DeFinetti {};

/// Ruin penalty w(x) = k x - K folded into the barrier function.
struct DeFinettiPenalty {
  double K{0.0};  // fixed cost at ruin
  double k{0.0};  // proportional deficit cost
};

/// Dividends minus k * capital injections over an infinite horizon; k >= 1.
struct Slg {
  double k{1.0};
};

/// Exponential-utility objective with deficit tilt theta <= 0 and dividend
/// tilt vartheta >= 0.
struct DividendsPenalty {
  double theta{0.0};
  double vartheta{0.0};
};

struct DividendsTime {
  double vartheta{0.0};
};

/// Taxed process with affine drawdown stopping; tax rate gamma in [0,1),
/// drawdown line xi * max - d.
struct TaxedDrawdown {
  double xi{0.0};
  double d{0.0};
  double gamma{0.0};
};

using BarrierObjective =
    std::variant<DeFinetti, DeFinettiPenalty, Slg, DividendsPenalty, DividendsTime, TaxedDrawdown>;

struct ScanParams {
  double b_max{0.0};       // <= 0: 10 * max(1, 1/Phi or 1/decay)
  double coarse_step{0.0};  // <= 0: b_max / 2000
};

struct BarrierResult {
  double b_star{0.0};
  double h_star{0.0};
  std::vector<double> local_maxima;         // all interior/boundary local maxima, ascending b
  std::vector<double> local_maxima_values;  // H at each
  bool multimodal{false};  // >= 2 local maxima within 1e-9 relative of the max

  /// V(x, b_star) for the objective the optimizer ran on.
  std::function<double(double)> value_at;
};

/// H(b) for the given objective.
double barrier_function(const BarrierObjective& objective, const ScaleSet& set, double b);

/// Analytic boundary values H(0+) and H(infinity).
double barrier_limit_at_zero(const BarrierObjective& objective, const ScaleSet& set);
double barrier_limit_at_infinity(const BarrierObjective& objective, const ScaleSet& set);

/// Coarse scan plus golden-section refinement; returns the last global
/// maximizer and every local maximum found on the range.
BarrierResult optimize_barrier(const BarrierObjective& objective, const ScaleSet& set,
                               ScanParams scan = {});

/// Value V(x, b) of running the barrier-b strategy under the objective.
double value_function(const BarrierObjective& objective, const ScaleSet& set, double x, double b);

struct SlgClassification {
  bool decreasing{false};          // barrier function decreasing on [0, inf): b* = 0
  double interior_maximum{0.0};    // root of k Delta^{ZW}(b)/W'(b) = 1 otherwise
};

/// Shape of the SLG barrier function: decreasing iff sigma = 0 and
/// k <= 1 + delta/Pi(0,inf); otherwise a unique interior maximum.
SlgClassification slg_monotonicity_test(const ScaleSet& set, double k);

/// Lagrange cost K(b) = W''(b) / (delta Delta(b)) that makes the barrier b
/// optimal for the fixed-cost objective, b past the last maximum of 1/W'.
double lagrange_cost(const ScaleSet& set, double b);

/// (W')^2 - W W'' >= 0.
double curvature_defect(const ScaleSet& set, double b);

// ---------------------------------------------------------------------------
// Taxed process with affine drawdown stopping
// ---------------------------------------------------------------------------

/// E_u[e^{-delta tau_a^+}; up-crossing of a before the affine drawdown], the
/// power of the two-sided exit ratio with exponent 1/((1-xi)(1-gamma)).
double taxed_drawdown_exit(const ScaleSet& set, double u, double a, double xi, double d,
                           double gamma);

/// Present value of tax payments until the drawdown time, a may be kInf.
double taxed_drawdown_dividends(const ScaleSet& set, double u, double a, double xi, double d,
                                double gamma);

struct TaxedDelayResult {
  double b_star{0.0};
  double influence_at_b_star{0.0};
  std::vector<double> scan_b;
  std::vector<double> scan_value;
};

/// Optimal taxation delay point: maximize f(b) = W(xi(b))^{-1/(1-xi)} v_gamma(b).
TaxedDelayResult taxed_delay_optimize(const ScaleSet& set, double xi, double d, double gamma,
                                      ScanParams scan = {});

enum class DiscriminantReading { PremiumRate, ProfitRate };

/// Sign discriminant deciding b* > 0 for the de Finetti problem with
/// exponential claims: (delta + lambda)^2 - p * lambda * mu with p read as
/// the premium rate c (the reading consistent with W''(0+)) or as the profit
/// rate kappa'(0+).
double cl_definetti_discriminant(const LevyModel& m, double delta,
                                 DiscriminantReading reading = DiscriminantReading::PremiumRate);

}  // namespace scalekit
