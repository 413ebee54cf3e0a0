#pragma once

#include <complex>
#include <functional>

#include "scalekit/errors.hpp"

namespace scalekit {

using ComplexTransform = std::function<std::complex<double>(std::complex<double>)>;
using RealTransform = std::function<double(double)>;

/// Fixed-Talbot inversion of F at t > 0 with M contour nodes. The transform
/// must be analytic right of the contour; singularities on the negative real
/// axis (or at 0) are fine.
double invert_talbot(const ComplexTransform& F, double t, int nodes = 32);

/// Gaver-Stehfest inversion with `terms` (even) weights. Needs F on the real
/// axis only; accuracy is limited by double precision cancellation, so this
/// is the cross-check route, not the primary one.
double invert_gaver_stehfest(const RealTransform& F, double t, int terms = 14);

}  // namespace scalekit
