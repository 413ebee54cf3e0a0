#include <doctest.h>
#include <vector>
#include <tuple>

#include <cmath>
#include <random>

#include "scalekit/levy_model.hpp"
#include "scalekit/model_json.hpp"
#include "scalekit/rational.hpp"
#include "test_models.hpp"

using namespace scalekit;
using namespace testmodels;

TEST_CASE("laplace exponent closed forms") {
  CHECK(laplace_exponent(bm(std::sqrt(2.0), 0.0), 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(laplace_exponent(cl_exp(1.0, 1.0, 2.0), 0.0) == doctest::Approx(0.0).epsilon(1e-15));

  // Erlang(2,1) model with sigma = 1.4: kappa(th) = c th - lam + lam/(1+th)^2 + sig^2 th^2/2
  LevyModel m = azcue(1.4);
  double th = 1.0;
  double hand = 21.4 * th - 10.0 + 10.0 * std::pow(1.0 / (1.0 + th), 2) + 1.4 * 1.4 * th * th / 2;
  CHECK(laplace_exponent(m, th) == doctest::Approx(hand).epsilon(1e-12));

  // complex evaluation agrees with the real one on the real axis
  std::complex<double> kc = laplace_exponent(m, std::complex<double>(0.7, 0.0));
  CHECK(kc.real() == doctest::Approx(laplace_exponent(m, 0.7)).epsilon(1e-14));
  CHECK(kc.imag() == doctest::Approx(0.0).epsilon(1e-14));

  CHECK_THROWS_AS(laplace_exponent(cl_exp(1.0, 1.0, 2.0), -2.0), PoleError);
  CHECK_THROWS_AS(kappa_derivative(cl_exp(1.0, 1.0, 2.0), -2.0, 1), PoleError);
}

TEST_CASE("phi solves the killed exponent equation") {
  CHECK(phi(bm(std::sqrt(2.0), 0.0), 1.0) == doctest::Approx(1.0).epsilon(1e-12));

  const std::vector<std::tuple<double, double, double>> cases = {
      {1.0, 0.5, 0.3}, {2.0, -1.0, 0.7}, {0.7, 1.5, 0.05}};
  for (auto [sigma, mu, delta] : cases) {
    double closed = (-mu + std::sqrt(mu * mu + 2.0 * delta * sigma * sigma)) / (sigma * sigma);
    CHECK(phi(bm(sigma, mu), delta) == doctest::Approx(closed).epsilon(1e-12));
  }

  CHECK(phi(cl_exp(1.0, 1.0, 2.0), 0.0) == 0.0);  // kappa'(0) = 1/2 > 0

  // negative profit: Phi_0 > 0
  LevyModel loss = cl_exp(0.4, 1.0, 2.0);
  double p0 = phi(loss, 0.0);
  CHECK(p0 > 0.0);
  CHECK(std::abs(laplace_exponent(loss, p0)) < 1e-12);

  // residual and monotonicity in delta
  LevyModel m = azcue(1.4);
  double prev = 0.0;
  for (double delta : {0.0, 0.05, 0.1, 0.5, 1.0, 3.0}) {
    double ph = phi(m, delta);
    CHECK(std::abs(laplace_exponent(m, ph) - delta) <= 1e-12 * std::max(1.0, delta));
    CHECK(ph >= prev);
    prev = ph;
  }
}

TEST_CASE("kappa derivatives") {
  LevyModel b = bm(1.3, 0.4);
  CHECK(kappa_derivative(b, 0.0, 1) == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(kappa_derivative(b, 0.0, 2) == doctest::Approx(1.3 * 1.3).epsilon(1e-14));

  LevyModel m = cl_exp(1.0, 1.0, 2.0);
  CHECK(kappa_derivative(m, 0.0, 1) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(kappa_derivative(m, 0.0, 2) == doctest::Approx(0.5).epsilon(1e-14));

  // independent check: central differences of kappa at several points
  for (const LevyModel& mod : {azcue(1.4), hyperexp(1.0, 2.0, {0.3, 0.7}, {1.0, 3.0}, 0.5)}) {
    for (double th : {0.0, 0.35, 1.2}) {
      double h = 1e-5;
      double d1 = (laplace_exponent(mod, th + h) - laplace_exponent(mod, th - h)) / (2 * h);
      double d2 = (laplace_exponent(mod, th + h) - 2 * laplace_exponent(mod, th) +
                   laplace_exponent(mod, th - h)) / (h * h);
      CHECK(kappa_derivative(mod, th, 1) == doctest::Approx(d1).epsilon(1e-7));
      CHECK(kappa_derivative(mod, th, 2) == doctest::Approx(d2).epsilon(1e-5));
    }
  }

  // strict convexity of kappa on the nonnegative axis
  for (double th = 0.0; th <= 5.0; th += 0.25) CHECK(kappa_derivative(azcue(2.0), th, 2) > 0.0);
}

TEST_CASE("esscher shift") {
  LevyModel m = cl_exp(1.0, 1.0, 2.0);
  LevyModel same = esscher_shift(m, 0.0);
  for (double th : {0.1, 0.9, 3.0})
    CHECK(laplace_exponent(same, th) == doctest::Approx(laplace_exponent(m, th)).epsilon(1e-14));

  // BM(sigma, mu) tilted by p has drift mu + sigma^2 p
  LevyModel b = bm(1.5, 0.7);
  LevyModel bt = esscher_shift(b, 0.4);
  CHECK(bt.drift == doctest::Approx(0.7 + 1.5 * 1.5 * 0.4).epsilon(1e-14));
  for (double s : {0.2, 1.0})
    CHECK(laplace_exponent(bt, s) ==
          doctest::Approx(laplace_exponent(b, s + 0.4) - laplace_exponent(b, 0.4))
              .epsilon(1e-13));

  // tilted exponent identity kappa^(p)(s) = kappa(s+p) - kappa(p) for jump models
  for (const LevyModel& mod :
       {azcue(1.4), hyperexp(1.5, 2.0, {0.25, 0.75}, {2.0, 5.0}), cl_exp(1.0, 1.0, 2.0)}) {
    LevyModel t = esscher_shift(mod, 0.6);
    for (double s : {0.1, 0.8, 2.2})
      CHECK(laplace_exponent(t, s) ==
            doctest::Approx(laplace_exponent(mod, s + 0.6) - laplace_exponent(mod, 0.6))
                .epsilon(1e-12));
    CHECK(laplace_exponent(t, 0.0) == doctest::Approx(0.0).epsilon(1e-14));
  }

  // tilting by Phi_delta turns the drift positive
  LevyModel m2 = cl_exp(1.0, 1.0, 2.0);
  double ph = phi(m2, 0.3);
  LevyModel tilted = esscher_shift(m2, ph);
  CHECK(kappa_derivative(tilted, 0.0, 1) ==
        doctest::Approx(kappa_derivative(m2, ph, 1)).epsilon(1e-12));
  CHECK(kappa_derivative(tilted, 0.0, 1) > 0.0);

  // Phi relation under tilting: Phi^{(p)}(delta - kappa(p)) = Phi(delta) - p
  for (double delta : {0.5, 1.0}) {
    double p = 0.25;
    double kp = laplace_exponent(m2, p);
    REQUIRE(delta >= kp);
    CHECK(phi(esscher_shift(m2, p), delta - kp) ==
          doctest::Approx(phi(m2, delta) - p).epsilon(1e-10));
  }
}

TEST_CASE("model JSON round trip") {
  for (const LevyModel& m :
       {azcue(1.4), cl_exp(1.0, 1.0, 2.0), bm(1.3, -0.4),
        hyperexp(1.0, 2.0, {0.3, 0.7}, {1.0, 3.0}, 0.5)}) {
    LevyModel back = model_from_json(model_to_json(m));
    for (double th : {0.0, 0.4, 1.7})
      CHECK(laplace_exponent(back, th) ==
            doctest::Approx(laplace_exponent(m, th)).epsilon(1e-14));
    CHECK(back.description == m.description);
  }
  CHECK_THROWS_AS(model_from_json("{not json"), ConfigError);
  CHECK_THROWS_AS(model_from_json("{\"sigma\": -1}"), ConfigError);
  CHECK_THROWS_AS(
      model_from_json("{\"drift\": 1, \"jumps\": {\"kind\": \"cauchy\", \"lambda\": 1}}"),
      ConfigError);
}

TEST_CASE("rational factorization") {
  // exponential claims: the two quadratic roots
  double c = 1.0, lam = 1.0, mu = 2.0, delta = 0.4;
  auto fr = rational_factorization(cl_exp(c, lam, mu), delta);
  REQUIRE(fr.roots.size() == 2);
  double disc = std::sqrt(std::pow(mu * c - lam - delta, 2) + 4.0 * mu * delta * c);
  CHECK(fr.roots[0] == doctest::Approx((-(mu * c - lam - delta) + disc) / (2 * c)).epsilon(1e-12));
  CHECK(fr.roots[1] == doctest::Approx((-(mu * c - lam - delta) - disc) / (2 * c)).epsilon(1e-12));

  // BM: (-mu +/- sqrt(mu^2 + 2 delta sigma^2)) / sigma^2
  auto fb = rational_factorization(bm(1.2, 0.8), 0.5);
  double D = std::sqrt(0.8 * 0.8 + 2 * 0.5 * 1.2 * 1.2);
  REQUIRE(fb.roots.size() == 2);
  CHECK(fb.roots[0] == doctest::Approx((-0.8 + D) / (1.2 * 1.2)).epsilon(1e-12));
  CHECK(fb.roots[1] == doctest::Approx((-0.8 - D) / (1.2 * 1.2)).epsilon(1e-12));

  // quartic with four distinct real roots and tight reconstruction
  auto fa = rational_factorization(azcue(1.4), 0.1);
  CHECK(fa.roots.size() == 4);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.5, 5.0);
  for (int i = 0; i < 20; ++i) {
    double s = fa.roots.front() + u(rng);
    double exact = 1.0 / (laplace_exponent(azcue(1.4), s) - 0.1);
    CHECK(partial_fraction_value(fa, s) == doctest::Approx(exact).epsilon(1e-9));
  }

  // weights are 1/kappa'(zeta)
  for (std::size_t i = 0; i < fa.roots.size(); ++i)
    CHECK(fa.weights[i] ==
          doctest::Approx(1.0 / kappa_derivative(azcue(1.4), fa.roots[i], 1)).epsilon(1e-12));

  // delta = 0 with positive profit keeps zero as a root
  auto f0 = rational_factorization(cl_exp(1.0, 1.0, 2.0), 0.0);
  CHECK(f0.zero_simple_root);
  CHECK(f0.roots[0] == 0.0);

  // zero drift at delta = 0: double root handled through the polynomial part
  auto fd = rational_factorization(cl_exp(1.0, 1.0, 1.0), 0.0);
  CHECK(fd.zero_double_root);
  CHECK(fd.a2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fd.a1 == doctest::Approx(1.0).epsilon(1e-12));

  // Erlang(3) with these parameters has a complex conjugate pair
  CHECK_THROWS_AS(rational_factorization(erlang3(1.0, 1.0, 5.0, 3.0), 0.3), ComplexRootError);
}
