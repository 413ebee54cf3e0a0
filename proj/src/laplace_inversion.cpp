#include "scalekit/laplace_inversion.hpp"

#include <cmath>
#include <vector>

namespace scalekit {

double invert_talbot(const ComplexTransform& F, double t, int nodes) {
  if (t <= 0.0) throw InversionError("talbot inversion needs t > 0");
  if (nodes < 8) throw InversionError("talbot needs at least 8 nodes");
  const double r = 2.0 * nodes / (5.0 * t);
  const double pi = 3.14159265358979323846;

  std::complex<double> f0 = F(std::complex<double>(r, 0.0));
  if (!std::isfinite(f0.real())) throw InversionError("transform not finite on the contour");
  double acc = 0.5 * std::exp(r * t) * f0.real();
  for (int k = 1; k < nodes; ++k) {
    double th = k * pi / nodes;
    double cot = std::cos(th) / std::sin(th);
    std::complex<double> s(r * th * cot, r * th);
    double sigma = th + (th * cot - 1.0) * cot;
    std::complex<double> val = F(s);
    if (!std::isfinite(val.real()) || !std::isfinite(val.imag()))
      throw InversionError("transform not finite on the contour");
    std::complex<double> term = std::exp(t * s) * val * std::complex<double>(1.0, sigma);
    acc += term.real();
  }
  return acc * r / nodes;
}

double invert_gaver_stehfest(const RealTransform& F, double t, int terms) {
  if (t <= 0.0) throw InversionError("gaver-stehfest inversion needs t > 0");
  if (terms % 2 != 0 || terms < 2 || terms > 18)
    throw InversionError("gaver-stehfest term count must be even and moderate");
  const double ln2 = std::log(2.0);

  auto fact = [](int n) {
    double out = 1.0;
    for (int i = 2; i <= n; ++i) out *= i;
    return out;
  };

  double out = 0.0;
  const int half = terms / 2;
  for (int k = 1; k <= terms; ++k) {
    double vk = 0.0;
    int j0 = (k + 1) / 2;
    for (int j = j0; j <= std::min(k, half); ++j) {
      double num = std::pow(double(j), half) * fact(2 * j);
      double den = fact(half - j) * fact(j) * fact(j - 1) * fact(k - j) * fact(2 * j - k);
      vk += num / den;
    }
    if ((k + half) % 2 != 0) vk = -vk;
    out += vk * F(k * ln2 / t);
  }
  return out * ln2 / t;
}

}  // namespace scalekit
