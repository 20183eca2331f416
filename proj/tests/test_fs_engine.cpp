#include <doctest.h>

#include <cmath>
#include <memory>

#include "vohedge/fs_engine.hpp"

using namespace vohedge;

namespace {

const QuadratureSettings kQs{};

std::shared_ptr<const PiiModel> make_tcb(double horizon) {
  return std::make_shared<PiiModel>(PiiModel::time_changed_brownian(
      TimeTable({0.0, horizon}, {0.0, horizon}), horizon));
}

std::shared_ptr<const PiiModel> make_levy(LevyModel driver, double horizon) {
  return std::make_shared<PiiModel>(
      PiiModel::levy_homogeneous(std::move(driver), horizon));
}

std::shared_ptr<const PiiModel> make_two_factor(LevyModel driver, double sigma_s,
                                                double lambda_mr, double sigma_l,
                                                double horizon, int grid = 256) {
  return std::make_shared<PiiModel>(PiiModel::two_factor_electricity(
      std::move(driver), sigma_s, lambda_mr, sigma_l, std::nullopt, horizon,
      horizon, grid));
}

const LevyModel kNig = LevyModel::nig(38.46, -3.85, 6.40, 0.64);

PayoffMeasure forward_measure() {
  return PayoffMeasure({PayoffAtom{Complex(1, 0), Complex(1, 0)}}, {}, "forward");
}

}  // namespace

TEST_CASE("time-changed Brownian coefficients are the closed forms") {
  FsCoefficients coeffs(make_tcb(1.0), 100.0);
  for (double t : {0.1, 0.5, 0.9}) {
    const Complex z(1.7, 2.3);
    CHECK(std::abs(coeffs.gamma(z, t) - z) == 0.0);
    CHECK(coeffs.lambda(t) == 0.5);
  }
  // eta(z, t1, t2) = (psi(t2) - psi(t1)) (z^2 - z) / 2 with psi(t) = t
  const Complex z(2.0, 0.0);
  const Complex eta = coeffs.eta_integral(z, 0.25, 0.75);
  CHECK(std::abs(eta - Complex(0.5, 0.0)) <= 1e-14);
  CHECK(coeffs.mvt_K(0.8) == doctest::Approx(0.2).epsilon(1e-13));
}

TEST_CASE("Poisson gamma is (e^z - 1)/(e - 1) and K(1) = 1 at unit intensity") {
  FsCoefficients coeffs(make_levy(LevyModel::poisson(1.0), 1.0), 100.0);
  const double e1 = std::exp(1.0) - 1.0;
  for (Complex z : {Complex(0.5, 0.0), Complex(1.5, 3.0)}) {
    const Complex expected = (std::exp(z) - 1.0) / e1;
    CHECK(std::abs(coeffs.gamma(z, 0.3) - expected) <= 1e-13 * std::abs(expected));
  }
  CHECK(coeffs.mvt_K(1.0) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("martingale Gaussian driver: lambda = 0, gamma = z, eta = kappa") {
  const double sigma = 0.4;
  FsCoefficients coeffs(
      make_levy(LevyModel::brownian_drift(sigma, -0.5 * sigma * sigma), 0.25),
      100.0);
  CHECK(coeffs.lambda(0.1) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(coeffs.mvt_K(0.25) == doctest::Approx(0.0).epsilon(1e-14));
  const Complex z(1.3, 2.0);
  CHECK(std::abs(coeffs.gamma(z, 0.1) - z) <= 1e-12);
  const Complex kz = -0.5 * sigma * sigma * z + 0.5 * sigma * sigma * z * z;
  CHECK(std::abs(coeffs.eta_integral(z, 0.0, 0.25) - 0.25 * kz) <= 1e-12);
}

TEST_CASE("gamma and eta endpoint identities hold exactly") {
  for (const auto& model :
       {make_levy(kNig, 0.25), make_tcb(0.5),
        make_two_factor(kNig, 0.5747, 3.0, 0.1, 0.25)}) {
    FsCoefficients coeffs(model, 100.0);
    for (double t : {0.05, 0.2}) {
      CHECK(coeffs.gamma(Complex(1, 0), t) == Complex(1, 0));
      CHECK(coeffs.gamma(Complex(0, 0), t) == Complex(0, 0));
      CHECK(coeffs.eta_integral(Complex(1, 0), 0.0, t) == Complex(0, 0));
      CHECK(coeffs.eta_integral(Complex(0, 0), 0.0, t) == Complex(0, 0));
    }
  }
}

TEST_CASE("K identity: the Remark integral matches the Levy closed form") {
  for (const auto& driver : {LevyModel::poisson(1.3), kNig}) {
    const auto model = make_levy(driver, 0.5);
    FsCoefficients coeffs(model, 100.0);
    for (double t : {0.2, 0.5}) {
      const double by_integral = model->integrate_time(
          [&](double s) {
            const auto d = model->densities(s);
            return d.dkappa1_drho * d.dkappa1_drho * d.drho_dt;
          },
          0.0, t);
      CHECK(std::fabs(coeffs.mvt_K(t) - by_integral) <= 1e-10);
    }
  }
}

TEST_CASE("Black-Scholes limit: price and delta of the martingale Gaussian") {
  const double sigma = 0.4, T = 0.25, s0 = 100.0, strike = 100.0;
  FsCoefficients coeffs(
      make_levy(LevyModel::brownian_drift(sigma, -0.08), T), s0);
  const auto call = call_representation(strike, CallVariant::abscissa_above_one, 1.5);
  const double price = price_process(coeffs, call, 0.0, s0, kQs);
  const double delta = pure_hedge(coeffs, call, 0.0, s0, kQs);
  CHECK(price == doctest::Approx(black_scholes_call(s0, strike, sigma, T))
                     .epsilon(1e-6));
  CHECK(delta ==
        doctest::Approx(black_scholes_call_delta(s0, strike, sigma, T))
            .epsilon(1e-6));
  // ATM identities from the closed form
  CHECK(price == doctest::Approx(s0 * (2.0 * normal_cdf(0.5 * sigma * std::sqrt(T)) - 1.0))
                     .epsilon(1e-6));
  CHECK(delta == doctest::Approx(normal_cdf(0.5 * sigma * std::sqrt(T))).epsilon(1e-6));
}

TEST_CASE("forward contract: H = s and xi = 1 exactly") {
  FsCoefficients coeffs(make_levy(kNig, 0.25), 100.0);
  const auto fwd = forward_measure();
  for (double t : {0.0, 0.1}) {
    for (double s : {60.0, 100.0, 170.0}) {
      CHECK(price_process(coeffs, fwd, t, s, kQs) == doctest::Approx(s).epsilon(1e-14));
      CHECK(pure_hedge(coeffs, fwd, t, s, kQs) == doctest::Approx(1.0).epsilon(1e-14));
    }
  }
}

TEST_CASE("terminal consistency: price at T equals the payoff") {
  FsCoefficients coeffs(make_levy(kNig, 0.25), 100.0);
  const auto call = call_representation(99.0, CallVariant::abscissa_above_one, 1.5);
  CHECK(std::fabs(price_process(coeffs, call, 0.25, 100.0, kQs) - 1.0) < 1e-6);
  for (double s : {50.0, 99.0, 150.0})
    CHECK(std::fabs(price_process(coeffs, call, 0.25, s, kQs) -
                    std::max(s - 99.0, 0.0)) < 1e-4);
}

TEST_CASE("time-changed Brownian hedge of the s^2 claim") {
  FsCoefficients coeffs(make_tcb(1.0), 100.0);
  const PayoffMeasure sq({PayoffAtom{Complex(2, 0), Complex(1, 0)}}, {}, "s^2");
  for (double t : {0.0, 0.4}) {
    const double s = 91.0;
    // xi_t = 2 e^{psi(T) - psi(t)} s from gamma(2) = 2, eta(2, t, T) = psi diff
    const double expected = 2.0 * std::exp(1.0 - t) * s;
    CHECK(pure_hedge(coeffs, sq, t, s, kQs) ==
          doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("representation invariance for prices and hedges") {
  FsCoefficients coeffs(make_levy(kNig, 0.25), 100.0);
  for (double strike : {60.0, 99.0, 150.0}) {
    const auto above =
        call_representation(strike, CallVariant::abscissa_above_one, 1.5);
    const auto strip =
        call_representation(strike, CallVariant::abscissa_in_unit_strip, 0.5);
    const double pa = price_process(coeffs, above, 0.0, 100.0, kQs);
    const double ps = price_process(coeffs, strip, 0.0, 100.0, kQs);
    CHECK(std::fabs(pa - ps) < 2e-6 * strike);
    const double ha = pure_hedge(coeffs, above, 0.0, 100.0, kQs);
    const double hs = pure_hedge(coeffs, strip, 0.0, 100.0, kQs);
    CHECK(std::fabs(ha - hs) < 2e-6);
  }
}

TEST_CASE("martingale-case delta equals the finite-difference of the price") {
  const double sigma = 0.4;
  FsCoefficients coeffs(
      make_levy(LevyModel::brownian_drift(sigma, -0.5 * sigma * sigma), 0.25),
      100.0);
  const auto call = call_representation(99.0, CallVariant::abscissa_above_one, 1.5);
  for (double s : {85.0, 100.0, 120.0}) {
    const double h = 1e-3 * s;
    const double fd = (price_process(coeffs, call, 0.1, s + h, kQs) -
                       price_process(coeffs, call, 0.1, s - h, kQs)) /
                      (2.0 * h);
    const double xi = pure_hedge(coeffs, call, 0.1, s, kQs);
    CHECK(std::fabs(xi - fd) <= 1e-4 * std::max(1.0, std::fabs(fd)));
  }
}

TEST_CASE("gamma magnitude bound |gamma|^2 <= d rho_t(z) / d rho_t") {
  for (const auto& model :
       {make_levy(kNig, 0.25),
        make_two_factor(kNig, 0.5747, 3.0, 0.1, 0.25)}) {
    FsCoefficients coeffs(model, 100.0);
    for (double t : {0.05, 0.15, 0.24}) {
      const auto d = model->densities(t);
      for (double re : {-0.5, 0.5, 1.5}) {
        for (double im : {0.0, 2.0, 17.0}) {
          const Complex z(re, im);
          const double lhs = std::norm(coeffs.gamma(z, t));
          const double rhs = d.dkappaz_drho(Complex(2.0 * re, 0.0)).real() -
                             2.0 * d.dkappaz_drho(z).real();
          CHECK(lhs <= rhs * (1.0 + 1e-9) + 1e-12);
        }
      }
    }
  }
}

TEST_CASE("beta density vanishing cases") {
  FsCoefficients poisson(make_levy(LevyModel::poisson(1.0), 1.0), 100.0);
  for (double t : {0.2, 0.8}) {
    CHECK(std::abs(poisson.beta_density(Complex(0.7, 1.0), Complex(1.2, -2.0), t)) <
          1e-12);
    CHECK(std::abs(poisson.beta_density(Complex(0, 0), Complex(1.5, 3.0), t)) <
          1e-14);
  }
  FsCoefficients tcb(make_tcb(1.0), 100.0);
  CHECK(std::abs(tcb.beta_density(Complex(2, 0), Complex(2, 0), 0.5)) < 1e-13);
}

TEST_CASE("quadratic error vanishes for complete markets") {
  const double s0 = 100.0;
  const auto call = call_representation(99.0, CallVariant::abscissa_above_one, 1.5);
  FsCoefficients poisson(make_levy(LevyModel::poisson(1.0), 0.25), s0);
  CHECK(std::fabs(quadratic_error(poisson, call, kQs, {}, 2)) <= 1e-8 * s0 * s0);
  FsCoefficients tcb(make_tcb(0.25), s0);
  CHECK(std::fabs(quadratic_error(tcb, call, kQs, {}, 2)) <= 1e-8 * s0 * s0);
}

TEST_CASE("quadratic error is strictly positive for the calibrated NIG model") {
  FsCoefficients coeffs(make_levy(kNig, 0.25), 100.0);
  const auto call = call_representation(99.0, CallVariant::abscissa_above_one, 1.5);
  const double j0 = quadratic_error(coeffs, call, kQs, {}, 2);
  CHECK(j0 > 0.0);
  CHECK(j0 < 100.0 * 100.0);  // sanity: bounded by the payoff scale
  // representation invariance of the error itself
  const auto strip = call_representation(99.0, CallVariant::abscissa_in_unit_strip, 0.5);
  const double j0b = quadratic_error(coeffs, strip, kQs, {}, 2);
  CHECK(j0b == doctest::Approx(j0).epsilon(5e-4));
}

TEST_CASE("hedge evaluator matches the direct price and hedge") {
  for (const auto& model :
       {make_levy(kNig, 0.25),
        make_two_factor(kNig, 0.5747, 3.0, 0.0, 0.25, 64)}) {
    FsCoefficients coeffs(model, 100.0);
    const auto call = call_representation(99.0, CallVariant::abscissa_above_one, 1.5);
    const std::vector<double> dates = {0.0, 0.125, 0.22};
    ExponentialHedgeEvaluator eval(coeffs, call, dates, kQs, 2);
    for (std::size_t i = 0; i < dates.size(); ++i) {
      for (double s : {80.0, 100.0, 130.0}) {
        const auto v = eval.value_and_hedge(i, s);
        const double p = price_process(coeffs, call, dates[i], s, kQs);
        const double h = pure_hedge(coeffs, call, dates[i], s, kQs);
        CHECK(v.price == doctest::Approx(p).epsilon(2e-5));
        CHECK(v.hedge == doctest::Approx(h).epsilon(2e-5));
      }
      CHECK(eval.lambda(i) == doctest::Approx(coeffs.lambda(dates[i])).epsilon(1e-12));
    }
  }
}

TEST_CASE("degenerate models are rejected at build time") {
  CHECK_THROWS_AS(
      FsCoefficients(make_levy(LevyModel::brownian_drift(0.0, 0.1), 1.0), 100.0),
      DegenerateModel);
}

TEST_CASE("support outside the strip raises a domain violation") {
  // narrow NIG strip: upper end alpha - beta = 3, call needs [R, 2R] = [1.5, 3]
  auto narrow = make_levy(LevyModel::nig(4.0, 1.0, 1.0, 0.0), 0.25);
  FsCoefficients coeffs(narrow, 100.0);
  const auto call = call_representation(99.0, CallVariant::abscissa_above_one, 1.5);
  CHECK_THROWS_AS(price_process(coeffs, call, 0.0, 100.0, kQs), DomainViolation);
}
