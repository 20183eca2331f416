#include <doctest.h>

#include <cmath>

#include "vohedge/payoff.hpp"

using namespace vohedge;

namespace {
const QuadratureSettings kQs{};
}

TEST_CASE("call reconstruction, both representations") {
  const double strike = 100.0;
  const auto above = call_representation(strike, CallVariant::abscissa_above_one, 1.5);
  const auto strip = call_representation(strike, CallVariant::abscissa_in_unit_strip, 0.5);
  for (double s : {0.5 * strike, 0.8 * strike, strike, 1.2 * strike, 2.0 * strike}) {
    const double exact = std::max(s - strike, 0.0);
    CHECK(std::fabs(above.reconstruct(s, kQs) - exact) < 1e-6 * strike);
    CHECK(std::fabs(strip.reconstruct(s, kQs) - exact) < 1e-6 * strike);
    // variant agreement
    CHECK(std::fabs(above.reconstruct(s, kQs) - strip.reconstruct(s, kQs)) <
          2e-6 * strike);
  }
  // spec examples
  CHECK(std::fabs(above.reconstruct(2.0 * strike, kQs) - strike) < 1e-6 * strike);
  const auto k99 = call_representation(99.0, CallVariant::abscissa_above_one, 1.5);
  CHECK(std::fabs(k99.reconstruct(100.0, kQs) - 1.0) < 1e-6);
}

TEST_CASE("put reconstruction") {
  const double strike = 100.0;
  const auto put = put_representation(strike, -1.0);
  for (double s : {0.5 * strike, 0.8 * strike, strike, 1.2 * strike, 2.0 * strike}) {
    const double exact = std::max(strike - s, 0.0);
    CHECK(std::fabs(put.reconstruct(s, kQs) - exact) < 1e-6 * strike);
  }
  CHECK(std::fabs(put.reconstruct(1e-6 * strike, kQs) - strike) < 1e-4 * strike);
  CHECK(std::fabs(put.reconstruct(2.0 * strike, kQs)) < 1e-6 * strike);
}

TEST_CASE("invalid abscissae are rejected") {
  CHECK_THROWS_AS(call_representation(100.0, CallVariant::abscissa_above_one, 0.9),
                  InvalidAbscissa);
  CHECK_THROWS_AS(call_representation(100.0, CallVariant::abscissa_in_unit_strip, 1.2),
                  InvalidAbscissa);
  CHECK_THROWS_AS(put_representation(100.0, 0.5), InvalidAbscissa);
  CHECK_THROWS_AS(put_representation(-1.0, -1.0), InvalidArgument);
}

TEST_CASE("identity atom reconstructs the spot exactly") {
  const PayoffMeasure forward({PayoffAtom{Complex(1, 0), Complex(1, 0)}}, {},
                              "forward");
  for (double s : {1.0, 37.5, 250.0})
    CHECK(forward.reconstruct(s, kQs) == doctest::Approx(s).epsilon(1e-14));
}

TEST_CASE("integrate_contour examples") {
  // atoms-only measure delta_{z=2} with integrand z^2
  const PayoffMeasure atom2({PayoffAtom{Complex(2, 0), Complex(1, 0)}}, {}, "s^2");
  const Complex got =
      atom2.integrate([](Complex z) { return z * z; }, kQs, true);
  CHECK(got.real() == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(got.imag() == 0.0);

  // integrand identically 1 equals the payoff at s = 1: (1 - K)_+ = 0 for K > 1
  const auto call = call_representation(100.0, CallVariant::abscissa_above_one, 1.5);
  const Complex unit = call.integrate([](Complex) { return Complex(1, 0); }, kQs, true);
  CHECK(std::fabs(unit.real() - call.reconstruct(1.0, kQs)) < 1e-6);
  CHECK(std::fabs(unit.real()) < 1e-6);

  // integrand s^z recovers reconstruct(s); the plain path truncates the tail
  // instead of correcting it analytically, so agreement is at quadrature level
  const double s = 118.0;
  const double x = std::log(s);
  const Complex via_integrate =
      call.integrate([x](Complex z) { return std::exp(z * x); }, kQs, true);
  CHECK(via_integrate.real() ==
        doctest::Approx(call.reconstruct(s, kQs)).epsilon(2e-5));
}

TEST_CASE("self-convergence under panel doubling") {
  const auto call = call_representation(100.0, CallVariant::abscissa_above_one, 1.5);
  QuadratureSettings fine = kQs;
  fine.log2_panels += 1;
  for (double s : {80.0, 100.0, 125.0}) {
    const double a = call.reconstruct(s, kQs);
    const double b = call.reconstruct(s, fine);
    CHECK(std::fabs(a - b) <= 1e-7 * (1.0 + std::fabs(b)));
  }
}

TEST_CASE("digital asset-or-nothing payoff") {
  const double barrier = 100.0;
  const auto dig = digital_asset_or_nothing(barrier);
  CHECK(dig.needs_damping());
  CHECK(dig.decay_class() == DecayClass::l1);
  const double below = std::log(barrier) - 1.0;
  const double above = std::log(barrier) + 1.0;
  CHECK(std::fabs(dig.reconstruct(below, kQs) - barrier / std::exp(1.0)) <
        1e-4 * barrier);
  CHECK(std::fabs(dig.reconstruct(above, kQs)) < 1e-4 * barrier);
  // f_hat(0) = B
  CHECK(std::abs(dig.density()(0.0) - Complex(barrier, 0)) < 1e-12 * barrier);
}

TEST_CASE("self-quanto put payoff") {
  const double strike = 100.0;
  const auto sq = self_quanto_put(strike);
  CHECK_FALSE(sq.needs_damping());
  CHECK(std::fabs(sq.reconstruct(std::log(strike), kQs)) < 1e-5 * strike * strike);
  const double x = std::log(strike / 2.0);
  CHECK(std::fabs(sq.reconstruct(x, kQs) - strike * strike / 4.0) <
        1e-5 * strike * strike);
  CHECK(std::abs(sq.density()(0.0) - Complex(strike * strike / 2.0, 0)) <
        1e-10 * strike * strike);
}

TEST_CASE("fourier atoms integrate exactly") {
  const FourierMeasure point(nullptr, {FourierAtom{0.7, Complex(1, 0)}}, "e^{0.7iu}");
  const Complex v = point.integrate(
      [](double u) { return Complex(u * u, 0.0); }, kQs, false);
  CHECK(v.real() == doctest::Approx(0.49).epsilon(1e-14));
  CHECK(point.decay_class() == DecayClass::l1_with_u2);
}

TEST_CASE("kernel conjugate symmetry is asserted at construction") {
  CHECK_THROWS_AS(
      PayoffMeasure({},
                    {ContourLine{1.5,
                                 [](Complex z) {
                                   return Complex(0, 1) / (z * z * std::conj(z));
                                 },
                                 Complex(1, 0), true, {}}},
                    "broken"),
      InvalidArgument);
}

TEST_CASE("tail divergence is detected at construction") {
  CHECK_THROWS_AS(
      PayoffMeasure({},
                    {ContourLine{1.5, [](Complex z) { return 1.0 / z; },
                                 Complex(1, 0), true, {}}},
                    "slow tail"),
      TailDivergence);
}
