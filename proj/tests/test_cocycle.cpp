#include <doctest.h>

#include <cmath>
#include <random>

#include "captive/cocycle.hpp"
#include "oracles.hpp"

using namespace captive;
using oracle::kPi;

TEST_CASE("roof derivative") {
  const RoofFunction tau(TrigPoly::sine(1, 1 / (2 * kPi)));
  CHECK(tau.derivative(0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(tau.derivative(0.5) == doctest::Approx(-1.0).epsilon(1e-15));
  const RoofFunction c(TrigPoly::constant(0.7));
  CHECK(c.derivative(0.3) == 0.0);
  CHECK(c.sup_deriv() == 0.0);
}

TEST_CASE("theta") {
  const Theta a = theta(1.0, 2.0, 2.0);
  CHECK(a.theta_tau == 1.0);
  CHECK(a.theta_R == 2.0);
  const Theta b = theta(RoofFunction(TrigPoly::constant(0.4)), 2.0, 1.0);
  CHECK(b.theta_tau == 0.0);
  CHECK(b.theta_R == 1.0);
  const Theta c = theta(1.0, 1.5, 3.0);
  CHECK(c.theta_tau == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(c.theta_R == doctest::Approx(6.0).epsilon(1e-15));

  CHECK_THROWS_AS(theta(1.0, 2.0, 1.0), InvalidConeRadius);
  CHECK_THROWS_AS(theta(1.0, 2.0, 0.5), InvalidConeRadius);
  CHECK_THROWS_AS(theta(0.0, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("coboundary_from") {
  const CircleMap doubling = CircleMap::linear(2);
  const RoofFunction flat = coboundary_from(TrigPoly(), 0.3, doubling);
  CHECK(flat(0.42) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(flat.derivative(0.42) == 0.0);

  const RoofFunction cob = coboundary_from(TrigPoly::sine(1, 0.1), 0.0, doubling);
  CHECK(std::abs(cob(0.0)) <= 1e-15);
  CHECK(cob.derivative(0.0) == doctest::Approx(0.2 * kPi).epsilon(1e-14));
  CHECK(cob.has_coboundary_part());

  // against the chain rule on a perturbed map
  const CircleMap m(2, TrigPoly(0.0, {0.05}, {}));
  const TrigPoly phi(0.0, {0.1, 0.02}, {0.03});
  const RoofFunction t = coboundary_from(phi, 0.25, m);
  for (double x : {0.1, 0.45, 0.8}) {
    CHECK(t(x) == doctest::Approx(phi(m.eval(x)) - phi(x) + 0.25).epsilon(1e-14));
    CHECK(t.derivative(x) ==
          doctest::Approx(m.derivative(x) * phi.derivative(m.eval(x)) - phi.derivative(x)).epsilon(1e-13));
  }
}

TEST_CASE("apply_params") {
  const PerturbationFamily zero_base{RoofFunction(), {TrigPoly::sine(1)}};
  Eigen::VectorXd t(1);
  t << 2.0;
  const RoofFunction two = apply_params(zero_base, t);
  for (double x : {0.1, 0.3}) CHECK(two(x) == doctest::Approx(2 * std::sin(2 * kPi * x)).epsilon(1e-14));

  const PerturbationFamily fam{RoofFunction(TrigPoly::sine(1)), {TrigPoly::cosine(1)}};
  t << 0.0;
  const RoofFunction base = apply_params(fam, t);
  for (double x : {0.2, 0.7}) CHECK(base(x) == doctest::Approx(std::sin(2 * kPi * x)).epsilon(1e-14));
  t << 1.0;
  const RoofFunction summed = apply_params(fam, t);
  CHECK(summed.sup_deriv() <= 2 * kPi * std::sqrt(2.0) + 1e-12);
  CHECK(summed.sup_deriv() >= 2 * kPi * std::sqrt(2.0) - 1e-9);
}

TEST_CASE("apply_params is affine") {
  const PerturbationFamily fam = fourier_family(RoofFunction(TrigPoly::sine(1, 0.2)), 4, 0.1);
  REQUIRE(fam.size() == 8);
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd a(8), b(8);
    for (int i = 0; i < 8; ++i) {
      a(i) = u(gen);
      b(i) = u(gen);
    }
    const RoofFunction ta = apply_params(fam, a), tb = apply_params(fam, b),
                       tab = apply_params(fam, a + b);
    for (int i = 0; i < 64; ++i) {
      const double x = i / 64.0;
      CHECK(std::abs(ta(x) + tb(x) - fam.base(x) - tab(x)) <= 1e-12);
    }
    CHECK(ta.sup_deriv() <= fam.uniform_derivative_bound() + 1e-12);
  }
}

TEST_CASE("sup_deriv bounds tau' on a dense sample") {
  const CircleMap m(2, TrigPoly(0.0, {0.05, -0.01}, {0.02, -0.02}));
  const RoofFunction roofs[] = {
      RoofFunction(TrigPoly(0.1, {0.3, 0.1}, {-0.2})),
      coboundary_from(TrigPoly(0.0, {0.1}, {0.05}), 0.2, m),
      RoofFunction::coboundary(TrigPoly::sine(2, 0.05), 0.0, m, TrigPoly::cosine(1, 0.1))};
  for (const auto& tau : roofs) {
    double worst = 0.0;
    for (int i = 0; i < 100000; ++i) worst = std::max(worst, std::abs(tau.derivative(i / 1e5)));
    CHECK(worst <= tau.sup_deriv());
    CHECK(tau.sup_deriv() <= 1.5 * worst + 1e-12);
  }
}

TEST_CASE("plus keeps the coboundary part") {
  const CircleMap m = CircleMap::linear(2);
  const RoofFunction cob = coboundary_from(TrigPoly::sine(1, 0.1), 0.0, m);
  const RoofFunction shifted = cob.plus(TrigPoly::cosine(1, 0.2));
  CHECK(shifted.has_coboundary_part());
  for (double x : {0.1, 0.6})
    CHECK(shifted(x) == doctest::Approx(cob(x) + 0.2 * std::cos(2 * kPi * x)).epsilon(1e-14));
}
