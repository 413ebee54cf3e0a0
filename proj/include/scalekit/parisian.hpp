#pragma once

#include "scalekit/scale_set.hpp"

namespace scalekit {

struct ParisianScales {
  double w;  // W_{delta,r}(x) = Z_delta(x, Phi_{delta+r})
  double z;  // Z_{delta,r}(x, theta)
};

/// Scale functions under Poissonian observation at rate r below 0; set_hi is
/// the bundle at killing delta + r. theta at the removable singularity
/// kappa(theta) = delta + r is resolved by a symmetric difference.
ParisianScales parisian_scales(const ScaleSet& set, const ScaleSet& set_hi, double x,
                               double theta);

/// P_x[Parisian ruin never observed] = p Phi_r Z(x, Phi_r)/r for a profitable
/// model (delta = 0), with Z at delta = 0.
double parisian_survival(const ScaleSet& zero_set, double x, double r);

/// The two-rate auxiliary function: killing rate r below level a and delta
/// above; set_r and set_delta are the bundles at the two rates.
double occupation_auxiliary(const ScaleSet& set_r, const ScaleSet& set_delta, double x, double a);

/// Occupation-time laws. All take the model through prebuilt scale sets.
///
/// Joint transform density of time below/above 0:
///   int_0^inf e^{-delta t} E_x[e^{-rm L-(t) - rp L+(t)}, X(t) in dy] dt / dy,
/// with set_dm at delta + rm and set_dp at delta + rp.
double occupation_joint_density(const ScaleSet& set_dm, const ScaleSet& set_dp, double x,
                                double y);

/// int_0^inf e^{-delta t} E_0[e^{-r L+(t)}] dt = Phi_delta / (delta Phi_{delta+r}).
double occupation_positive_lt(const LevyModel& m, double delta, double r);

/// Same transform for the time in [0, b] of the process reflected at b,
/// started at 0; needs a positive-drift model (Phi_0 = 0). set_total carries
/// the full in-band killing rate delta + r; its b -> inf limit recovers the
/// half-line transform.
double occupation_reflected_band(const ScaleSet& set_total, double delta, double b);

/// Large-deviations normalizing constant (1/p) Z_r(b) / (r W_r(b)).
double occupation_ld_rate(const ScaleSet& set_r, double b);

}  // namespace scalekit
