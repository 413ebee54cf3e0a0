#include <doctest.h>

#include <cmath>
#include <vector>

#include "scalekit/grid.hpp"
#include "scalekit/laplace_inversion.hpp"
#include "scalekit/rational.hpp"
#include "scalekit/scale_set.hpp"
#include "test_models.hpp"

using namespace scalekit;
using namespace testmodels;

TEST_CASE("laplace inversion primitives") {
  auto F1 = [](std::complex<double> s) { return 1.0 / (s + 1.0); };
  auto F2 = [](std::complex<double> s) { return 1.0 / (s * s); };
  for (double t : {0.3, 1.0, 4.0}) {
    CHECK(invert_talbot(F1, t) == doctest::Approx(std::exp(-t)).epsilon(1e-10));
    CHECK(invert_talbot(F2, t) == doctest::Approx(t).epsilon(1e-10));
    CHECK(std::abs(invert_gaver_stehfest([](double s) { return 1.0 / (s + 1.0); }, t) -
                   std::exp(-t)) < 5e-5);
  }
}

TEST_CASE("rational backend closed forms") {
  // BM(sqrt 2, 1), delta = 0: W(x) = 1 - e^{-x}
  ScaleSet set = build_rational(bm(std::sqrt(2.0), 1.0), 0.0);
  for (double x = 0.0; x <= 5.0; x += 0.5)
    CHECK(set.w(x) == doctest::Approx(1.0 - std::exp(-x)).epsilon(1e-13));

  // exponential claims, delta > 0: two-term exponential sum
  double c = 1.0, lam = 1.0, mu = 2.0, delta = 0.1;
  ScaleSet cl = build_rational(cl_exp(c, lam, mu), delta);
  auto fr = rational_factorization(cl_exp(c, lam, mu), delta);
  double z1 = fr.roots[0], z2 = fr.roots[1];
  double A1 = (mu + z1) / (c * (z1 - z2)), A2 = -(mu + z2) / (c * (z1 - z2));
  for (double x = 0.0; x <= 6.0; x += 0.75)
    CHECK(cl.w(x) ==
          doctest::Approx(A1 * std::exp(z1 * x) + A2 * std::exp(z2 * x)).epsilon(1e-12));

  // support and boundary behaviour
  CHECK(cl.w(-1.0) == 0.0);
  CHECK(cl.w(0.0) == doctest::Approx(1.0 / c).epsilon(1e-12));
  CHECK(cl.w(0.0, 1) == doctest::Approx((delta + lam) / (c * c)).epsilon(1e-10));
  double wpp0 = (std::pow(lam / c + delta / c, 2) - (lam / c) * mu) / c;
  CHECK(cl.w(0.0, 2) == doctest::Approx(wpp0).epsilon(1e-9));

  ScaleSet b = build_rational(bm(1.4, 0.6), 0.2);
  CHECK(b.w(0.0) == 0.0);
  CHECK(b.w(0.0, 1) == doctest::Approx(2.0 / (1.4 * 1.4)).epsilon(1e-12));
  CHECK(b.w(0.0, 2) == doctest::Approx(-0.6 * std::pow(2.0 / (1.4 * 1.4), 2)).epsilon(1e-9));

  // Erlang perturbed model derivatives at zero follow the transform tails
  ScaleSet az = build_rational(azcue(1.4), 0.1);
  CHECK(az.w(0.0, 1) == doctest::Approx(2.0 / (1.4 * 1.4)).epsilon(1e-10));
  CHECK(az.w(0.0, 2) ==
        doctest::Approx(-21.4 * std::pow(2.0 / (1.4 * 1.4), 2)).epsilon(1e-9));
}

TEST_CASE("two-argument Z and relatives") {
  for (double delta : {0.0, 0.15}) {
    ScaleSet set = build_rational(cl_exp(1.0, 1.0, 2.0), delta);
    double ph = set.phi();
    for (double x = 0.0; x <= 5.0; x += 0.25)
      CHECK(set.z(x, ph) == doctest::Approx(std::exp(ph * x)).epsilon(1e-10));

    // continuation below zero
    CHECK(set.z(-0.7, 0.9) == doctest::Approx(std::exp(-0.7 * 0.9)).epsilon(1e-14));
    CHECK(set.z(-0.7) == 1.0);
    CHECK(set.z(0.0, 1.3) == doctest::Approx(1.0).epsilon(1e-14));

    // Z(x) = 1 + delta Wbar
    for (double x : {0.5, 2.0}) CHECK(set.z(x) == doctest::Approx(1.0 + delta * set.wbar(x)));

    // Z1 against a central theta-difference of Z(x, theta)
    for (double x : {0.8, 2.5}) {
      double h = 1e-5;
      double num = (set.z(x, h) - set.z(x, -h)) / (2.0 * h);
      CHECK(set.z1(x) == doctest::Approx(num).epsilon(1e-6));
    }

    // spatial derivative identity, checked against a central difference
    for (double x : {0.6, 1.7}) {
      for (double th : {-0.4, 0.0, 0.8}) {
        double h = 1e-6;
        double num = (set.z(x + h, th) - set.z(x - h, th)) / (2.0 * h);
        CHECK(set.z_prime(x, th) == doctest::Approx(num).epsilon(1e-7));
      }
    }
  }
}

TEST_CASE("excursion rate") {
  ScaleSet set = build_rational(bm(std::sqrt(2.0), 0.0), 0.3);
  double last = 1e300;
  for (double x = 0.1; x <= 6.0; x += 0.1) {
    double nu = set.excursion_rate(x);
    CHECK(nu > 0.0);
    CHECK(nu <= last + 1e-12);
    last = nu;
  }
  // tail limit is Phi_delta
  CHECK(set.excursion_rate(40.0) == doctest::Approx(set.phi()).epsilon(1e-8));
  CHECK_THROWS_AS(set.excursion_rate(0.0), DomainError);

  // the two-sided exit ratio equals exp(-int_x^b nu) by quadrature
  ScaleSet cl = build_rational(cl_exp(1.0, 1.0, 2.0), 0.1);
  double x = 1.0, bb = 3.0;
  double integral = integrate([&](double h) { return cl.excursion_rate(h); }, x, bb, 1e-10);
  CHECK(cl.w(x) / cl.w(bb) == doctest::Approx(std::exp(-integral)).epsilon(1e-6));
}

TEST_CASE("transform identity and shape inequalities") {
  std::vector<std::pair<LevyModel, double>> cases = {
      {cl_exp(1.0, 1.0, 2.0), 0.1},
      {bm(std::sqrt(2.0), 1.0), 0.05},
      {azcue(1.4), 0.1},
      {hyperexp(1.0, 1.0, {0.4, 0.6}, {1.0, 3.0}), 0.3}};
  for (const auto& [m, delta] : cases) {
    ScaleSet set = build_rational(m, delta);
    double ph = set.phi();
    double kp = kappa_derivative(m, ph, 1);

    // numeric Laplace transform with an analytic exponential tail
    double x_max = 30.0;
    for (double ds : {0.5, 1.0, 2.0}) {
      double s = ph + ds;
      double head = integrate([&](double xx) { return std::exp(-s * xx) * set.w(xx); }, 0.0,
                              x_max, 1e-12);
      double tail = std::exp(-(s - ph) * x_max) / (kp * (s - ph));
      double exact = 1.0 / (laplace_exponent(m, s) - delta);
      CHECK(head + tail == doctest::Approx(exact).epsilon(1e-6));
    }

    // W' Wbar / W^2 < 1 and the curvature defect is nonnegative
    for (double x = 0.1; x <= 5.0; x += 0.2) {
      CHECK(set.w(x, 1) * set.wbar(x) / (set.w(x) * set.w(x)) < 1.0);
      double defect = set.w(x, 1) * set.w(x, 1) - set.w(x) * set.w(x, 2);
      CHECK(defect >= -1e-10);
    }

    // Esscher-normalized W is nondecreasing and bounded by 1/kappa'(Phi)
    double prev = 0.0;
    for (double x = 0.0; x <= 8.0; x += 0.25) {
      double v = std::exp(-ph * x) * set.w(x);
      CHECK(v >= prev - 1e-12);
      CHECK(v <= 1.0 / kp + 1e-10);
      prev = v;
    }
  }
}

TEST_CASE("series backend") {
  // delta = 0: the series is the single closed-form term
  ScaleSet s0 = build_series(cl_exp(1.0, 1.0, 2.0), 0.0, GridSpec{1.0 / 128.0, 6.0});
  ScaleSet r0 = build_rational(cl_exp(1.0, 1.0, 2.0), 0.0);
  for (double x = 0.0; x <= 5.0; x += 0.37)
    CHECK(s0.w(x) == doctest::Approx(r0.w(x)).epsilon(1e-10));

  // exponential claims, delta = 0.1: sup error below 1e-8 at h = 1/512
  ScaleSet sr = build_rational(cl_exp(1.0, 1.0, 2.0), 0.1);
  ScaleSet ss = build_series(cl_exp(1.0, 1.0, 2.0), 0.1, GridSpec{1.0 / 512.0, 5.5});
  double sup = 0.0;
  for (double x = 0.0; x <= 5.0; x += 0.01) sup = std::max(sup, std::abs(ss.w(x) - sr.w(x)));
  CHECK(sup < 1e-8);

  // Brownian case
  ScaleSet br = build_rational(bm(std::sqrt(2.0), 1.0), 0.05);
  ScaleSet bs = build_series(bm(std::sqrt(2.0), 1.0), 0.05, GridSpec{1.0 / 512.0, 5.5});
  sup = 0.0;
  for (double x = 0.0; x <= 5.0; x += 0.01) sup = std::max(sup, std::abs(bs.w(x) - br.w(x)));
  CHECK(sup < 1e-8);

  // Z and Z(.,theta) inherit the accuracy
  for (double x : {0.5, 2.3, 4.9}) {
    CHECK(ss.z(x) == doctest::Approx(sr.z(x)).epsilon(1e-8));
    CHECK(ss.z(x, 0.7) == doctest::Approx(sr.z(x, 0.7)).epsilon(1e-8));
  }

  // derivatives from stencils; second derivative unavailable at the edges
  for (double x : {0.5, 2.0}) {
    CHECK(ss.w(x, 1) == doctest::Approx(sr.w(x, 1)).epsilon(1e-7));
    CHECK(ss.w(x, 2) == doctest::Approx(sr.w(x, 2)).epsilon(1e-5));
  }
  CHECK_THROWS_AS(ss.w(5.5, 2), DerivativeUnavailable);
  CHECK_THROWS_AS(build_series(cl_exp(1.0, 1.0, 2.0), 0.1, GridSpec{-1.0, 5.0}), GridError);

  // a very large killing rate exhausts the 200-term cap and flags it
  ScaleSet slow = build_series(cl_exp(1.0, 1.0, 2.0), 40.0, GridSpec{1.0 / 64.0, 4.0});
  CHECK(slow.series_truncation_hit());
  CHECK(!ss.series_truncation_hit());
}

TEST_CASE("inversion backend") {
  LevyModel m = cl_exp(1.0, 1.0, 2.0);
  ScaleSet rat = build_rational(m, 0.1);
  ScaleSet inv = build_inversion(m, 0.1);
  for (double x = 0.0; x <= 10.0; x += 0.5) {
    CHECK(std::abs(inv.w(x) - rat.w(x)) < 1e-7);
    CHECK(std::abs(inv.wbar(x) - rat.wbar(x)) < 1e-7);
  }
  CHECK(inv.w(0.0) == doctest::Approx(1.0).epsilon(1e-14));  // 1/c for bounded variation

  ScaleSet binv = build_inversion(bm(1.2, 0.7), 0.2);
  CHECK(binv.w(0.0) == 0.0);
  CHECK(binv.w(0.0, 1) == doctest::Approx(2.0 / (1.2 * 1.2)).epsilon(1e-14));
  ScaleSet brat = build_rational(bm(1.2, 0.7), 0.2);
  for (double x : {0.5, 2.0, 6.0}) {
    CHECK(std::abs(binv.w(x) - brat.w(x)) < 1e-8);
    CHECK(std::abs(binv.w(x, 1) - brat.w(x, 1)) < 1e-7);
    CHECK(std::abs(binv.z(x, 0.4) - brat.z(x, 0.4)) < 1e-6);
  }

  // deeper antiderivatives and the self-convolution go through the same
  // shifted transforms
  for (double x : {0.8, 3.0}) {
    CHECK(std::abs(inv.wbarbar(x) - rat.wbarbar(x)) < 1e-7);
    CHECK(std::abs(inv.w_conv_w(x) - rat.w_conv_w(x)) < 1e-6);
    CHECK(std::abs(inv.z1(x) - rat.z1(x)) < 1e-7);
    CHECK(std::abs(inv.zbar(x) - rat.zbar(x)) < 1e-7);
  }

  // Gaver-Stehfest cross-check mode is coarser but consistent
  InversionParams gs;
  gs.method = InversionMethod::GaverStehfest;
  ScaleSet invgs = build_inversion(m, 0.1, gs);
  for (double x : {0.5, 2.0, 5.0})
    CHECK(std::abs(invgs.w(x) - rat.w(x)) < 5e-5 * std::max(1.0, rat.w(x)));
}

TEST_CASE("inversion covers models the closed forms refuse") {
  // Erlang(3) claims with these parameters have complex conjugate roots:
  // the exponential-sum backend refuses, the transform inversion does not
  LevyModel m = erlang3(1.0, 1.0, 5.0, 3.0);
  CHECK_THROWS_AS(build_rational(m, 0.3), ComplexRootError);
  ScaleSet inv = build_inversion(m, 0.3);
  double kp = kappa_derivative(m, inv.phi(), 1);
  for (double ds : {0.5, 1.5}) {
    double sVal = inv.phi() + ds;
    double head = integrate([&](double xx) { return std::exp(-sVal * xx) * inv.w(xx); }, 0.0,
                            30.0, 1e-11);
    double tail = std::exp(-(sVal - inv.phi()) * 30.0) / (kp * (sVal - inv.phi()));
    double exact = 1.0 / (laplace_exponent(m, sVal) - 0.3);
    CHECK(head + tail == doctest::Approx(exact).epsilon(1e-5));
  }
}

TEST_CASE("zero drift at zero killing uses the polynomial part") {
  // BM without drift: W(x) = 2x/sigma^2
  ScaleSet set = build_rational(bm(1.5, 0.0), 0.0);
  for (double x : {0.2, 1.0, 3.0})
    CHECK(set.w(x) == doctest::Approx(2.0 * x / (1.5 * 1.5)).epsilon(1e-12));

  // compound Poisson with zero profit rate: W(x) = x + 1 for c = lam = mu = 1
  ScaleSet cp = build_rational(cl_exp(1.0, 1.0, 1.0), 0.0);
  for (double x : {0.0, 0.7, 2.5}) CHECK(cp.w(x) == doctest::Approx(x + 1.0).epsilon(1e-12));

  // the series builder seeds its convolutions from this polynomial branch
  ScaleSet srs = build_series(bm(1.5, 0.0), 0.1, GridSpec{1.0 / 512.0, 4.5});
  ScaleSet ref = build_rational(bm(1.5, 0.0), 0.1);
  for (double x : {0.5, 2.0, 4.0}) CHECK(srs.w(x) == doctest::Approx(ref.w(x)).epsilon(1e-8));
}
