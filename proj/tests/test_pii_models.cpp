#include <doctest.h>

#include <cmath>
#include <complex>

#include "vohedge/pii_models.hpp"

using namespace vohedge;

namespace {

TimeTable identity_psi(double horizon) {
  return TimeTable({0.0, horizon}, {0.0, horizon});
}

TimeTable exp_kernel_table(double sigma_s, double lambda, double delivery,
                           double horizon, int knots) {
  std::vector<double> t(knots + 1), v(knots + 1);
  for (int i = 0; i <= knots; ++i) {
    t[i] = horizon * i / knots;
    v[i] = sigma_s * std::exp(-lambda * (delivery - t[i]));
  }
  return TimeTable(std::move(t), std::move(v));
}

const LevyModel kNig = LevyModel::nig(38.46, -3.85, 6.40, 0.64);

}  // namespace

TEST_CASE("homogeneous kappa is linear in t") {
  const auto m = PiiModel::levy_homogeneous(LevyModel::poisson(1.0), 2.5);
  const Complex v = m.kappa(2.0, Complex(1.0, 0.0));
  CHECK(v.real() == doctest::Approx(2.0 * (std::exp(1.0) - 1.0)).epsilon(1e-14));
  CHECK(m.kappa(0.0, Complex(1.0, 0.0)) == Complex(0.0, 0.0));
}

TEST_CASE("time-changed Brownian kappa") {
  const auto m = PiiModel::time_changed_brownian(identity_psi(1.0), 1.0);
  CHECK(m.kappa(0.25, Complex(2.0, 0.0)).real() == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(m.rho(0.25) == doctest::Approx(0.25).epsilon(1e-13));
  CHECK(m.rho(0.0) == 0.0);
}

TEST_CASE("constant-kernel Wiener integral matches the scaled homogeneous model") {
  const double c = 0.7;
  const auto wiener = PiiModel::wiener_integral(
      kNig, TimeTable::constant(c, 0.0, 0.25), 0.25);
  const auto levy = PiiModel::levy_homogeneous(kNig, 0.25);
  for (double t : {0.05, 0.17, 0.25}) {
    for (Complex z : {Complex(1.5, 0.0), Complex(0.5, 8.0), Complex(-1.0, 2.0)}) {
      const Complex a = wiener.kappa(t, z);
      const Complex b = levy.kappa(t, z * c);
      CHECK(std::abs(a - b) <= 1e-10 * (1.0 + std::abs(b)));
    }
  }
}

TEST_CASE("rho closed forms") {
  const double lambda_p = 1.7;
  const auto poisson = PiiModel::levy_homogeneous(LevyModel::poisson(lambda_p), 2.0);
  const double e1 = std::exp(1.0) - 1.0;
  for (double t : {0.3, 1.0, 2.0})
    CHECK(poisson.rho(t) == doctest::Approx(lambda_p * t * e1 * e1).epsilon(1e-13));
  CHECK(poisson.rho(0.0) == 0.0);
}

TEST_CASE("rho_bilinear closed forms and symmetry") {
  const double lambda_p = 0.9;
  const auto poisson = PiiModel::levy_homogeneous(LevyModel::poisson(lambda_p), 1.0);
  const Complex y(0.8, 1.3), z(-0.4, 2.0);
  const Complex expected = lambda_p * 0.75 * (std::exp(y) - 1.0) * (std::exp(z) - 1.0);
  const Complex got = poisson.rho_bilinear(0.75, y, z);
  CHECK(std::abs(got - expected) <= 1e-12 * (1.0 + std::abs(expected)));
  CHECK(std::abs(got - poisson.rho_bilinear(0.75, z, y)) <= 1e-14);
  CHECK(std::abs(poisson.rho_bilinear(0.75, Complex(0, 0), z)) == 0.0);
  CHECK(poisson.rho_bilinear(0.6, Complex(1, 0), Complex(1, 0)).real() ==
        doctest::Approx(poisson.rho(0.6)).epsilon(1e-13));

  const auto tcb = PiiModel::time_changed_brownian(identity_psi(1.0), 1.0);
  const Complex got_tcb = tcb.rho_bilinear(0.5, y, z);
  const Complex expected_tcb = y * z * 0.5;  // yz psi(t), derived from (y+z)^2-y^2-z^2
  CHECK(std::abs(got_tcb - expected_tcb) <= 1e-13);
}

TEST_CASE("rho densities per kind") {
  const auto tcb = PiiModel::time_changed_brownian(identity_psi(1.0), 1.0);
  CHECK(tcb.densities(0.4).dkappa1_drho == doctest::Approx(0.5).epsilon(1e-14));

  const auto poisson = PiiModel::levy_homogeneous(LevyModel::poisson(2.3), 1.0);
  CHECK(poisson.densities(0.4).dkappa1_drho ==
        doctest::Approx(1.0 / (std::exp(1.0) - 1.0)).epsilon(1e-13));

  const auto brown_only = PiiModel::two_factor_electricity(
      LevyModel::poisson(1.0), 0.0, 3.0, 0.3, std::nullopt, 0.25, 0.25);
  CHECK(brown_only.densities(0.1).dkappa1_drho == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("degenerate densities raise") {
  const auto det = PiiModel::levy_homogeneous(LevyModel::brownian_drift(0.0, 0.1), 1.0);
  CHECK_THROWS_AS(det.densities(0.5), DegenerateModel);
}

TEST_CASE("log-characteristic derivatives") {
  const double sigma = 0.4, m = -0.08;
  const auto bd = PiiModel::levy_homogeneous(LevyModel::brownian_drift(sigma, m), 1.0);
  for (double t : {0.2, 1.0}) {
    for (double u : {0.0, 0.7, 3.0}) {
      const auto d = bd.log_char_derivatives(t, u);
      const Complex expected = t * Complex(-u * sigma * sigma, m);
      CHECK(std::abs(d.dpsi_du - expected) <= 1e-13 * (1.0 + std::abs(expected)));
    }
    CHECK(std::abs(bd.log_char_derivatives(t, 0.0).psi) == 0.0);
    CHECK(bd.log_char_derivatives(t, 0.0).d2psi_du2_0.real() ==
          doctest::Approx(-t * sigma * sigma).epsilon(1e-13));
  }

  const double lp = 1.4;
  const auto poisson = PiiModel::levy_homogeneous(LevyModel::poisson(lp), 1.0);
  const auto d = poisson.log_char_derivatives(0.6, 0.9);
  const Complex expected = 0.6 * Complex(0, 1) * lp * std::exp(Complex(0, 0.9));
  CHECK(std::abs(d.dpsi_du - expected) <= 1e-13 * (1.0 + std::abs(expected)));
}

TEST_CASE("log-char derivatives agree with finite differences along iR") {
  const auto models = {
      PiiModel::levy_homogeneous(kNig, 0.25),
      PiiModel::wiener_integral(kNig, TimeTable::constant(0.5, 0.0, 0.25), 0.25),
      PiiModel::two_factor_electricity(kNig, 0.5747, 3.0, 0.1,
                                       TimeTable::constant(0.2, 0.0, 0.25), 0.25,
                                       0.25),
      PiiModel::time_changed_brownian(identity_psi(0.25), 0.25)};
  const double h = 1e-4;
  for (const auto& m : models) {
    for (double u : {0.0, 1.3, 6.0}) {
      const auto d = m.log_char_derivatives(0.2, u);
      const Complex fd =
          (m.kappa(0.2, Complex(0, u + h)) - m.kappa(0.2, Complex(0, u - h))) /
          (2.0 * h);
      CHECK(std::abs(d.dpsi_du - fd) <= 1e-5 * (1.0 + std::abs(fd)));
    }
    const Complex fd2 = (m.kappa(0.2, Complex(0, h)) - 2.0 * m.kappa(0.2, Complex(0, 0)) +
                         m.kappa(0.2, Complex(0, -h))) /
                        (h * h);
    CHECK(std::abs(m.log_char_derivatives(0.2, 0.0).d2psi_du2_0 - fd2) <=
          1e-5 * (1.0 + std::abs(fd2)));
  }
}

TEST_CASE("conjugate symmetry and rho monotonicity across kinds") {
  const auto models = {
      PiiModel::levy_homogeneous(kNig, 0.25),
      PiiModel::wiener_integral(kNig, TimeTable::constant(0.5, 0.0, 0.25), 0.25),
      PiiModel::two_factor_electricity(kNig, 0.5747, 3.0, 0.1, std::nullopt, 0.25,
                                       0.25),
      PiiModel::time_changed_brownian(identity_psi(0.25), 0.25)};
  for (const auto& m : models) {
    for (double x : {-0.5, 0.0, 1.0, 2.0}) {
      if (x != 0.0 && !m.effective_strip().contains_interior(x)) continue;
      for (double y : {0.0, 2.0, 40.0}) {
        const Complex z(x, y);
        const Complex a = m.kappa(0.2, z);
        const Complex b = m.kappa(0.2, std::conj(z));
        CHECK(std::abs(b - std::conj(a)) <= 1e-12 * (1.0 + std::abs(a)));
        if (y == 0.0) CHECK(a.imag() == 0.0);
      }
    }
    double prev = 0.0;
    for (int k = 1; k <= 64; ++k) {
      const double r = m.rho(0.25 * k / 64.0);
      CHECK(r > prev);
      prev = r;
    }
  }
}

TEST_CASE("density consistency: integral of dkappa1/drho drho reproduces kappa(t,1)") {
  const auto models = {
      PiiModel::levy_homogeneous(kNig, 0.25),
      PiiModel::wiener_integral(kNig, TimeTable::constant(0.5, 0.0, 0.25), 0.25),
      PiiModel::two_factor_electricity(kNig, 0.5747, 3.0, 0.1,
                                       TimeTable::constant(0.2, 0.0, 0.25), 0.25,
                                       0.25),
      PiiModel::time_changed_brownian(identity_psi(0.25), 0.25)};
  for (const auto& m : models) {
    for (double t : {0.1, 0.25}) {
      const double got = m.integrate_time(
          [&](double s) {
            const auto d = m.densities(s);
            return d.dkappa1_drho * d.drho_dt;
          },
          0.0, t);
      const double expected = m.kappa(t, Complex(1, 0)).real();
      CHECK(std::fabs(got - expected) <= 1e-6 * (1.0 + std::fabs(expected)));
    }
  }
}

TEST_CASE("two-factor with sigma_s = 0 degenerates to homogeneous Brownian") {
  const double sl = 0.3, mdot = 0.1;
  const auto two_factor = PiiModel::two_factor_electricity(
      LevyModel::poisson(1.0), 0.0, 3.0, sl, TimeTable::constant(mdot, 0.0, 0.5),
      0.5, 0.5);
  const auto brownian =
      PiiModel::levy_homogeneous(LevyModel::brownian_drift(sl, mdot), 0.5);
  for (double t : {0.1, 0.32, 0.5}) {
    for (Complex z : {Complex(1, 0), Complex(2, 0), Complex(0.7, 3.0)}) {
      const Complex a = two_factor.kappa(t, z);
      const Complex b = brownian.kappa(t, z);
      CHECK(std::abs(a - b) <= 1e-12 * (1.0 + std::abs(b)));
    }
  }
}

TEST_CASE("Wiener integral with exponential kernel matches the electricity kind") {
  const double sigma_s = 0.5747, lambda = 3.0, T = 0.25;
  const auto kernel = exp_kernel_table(sigma_s, lambda, T, T, 4096);
  const auto wiener = PiiModel::wiener_integral(kNig, kernel, T);
  const auto elec = PiiModel::two_factor_electricity(kNig, sigma_s, lambda, 0.0,
                                                     std::nullopt, T, T);
  for (double t : {0.1, 0.25}) {
    for (Complex z : {Complex(1, 0), Complex(2, 0), Complex(1.5, 5.0)}) {
      const Complex a = wiener.kappa(t, z);
      const Complex b = elec.kappa(t, z);
      CHECK(std::abs(a - b) <= 1e-8 * (1.0 + std::abs(b)));
    }
  }
}

TEST_CASE("validation reports") {
  const auto elec = PiiModel::two_factor_electricity(kNig, 0.5747, 3.0, 0.0,
                                                     std::nullopt, 0.25, 0.25);
  CHECK(elec.validate().pass);

  const auto det =
      PiiModel::levy_homogeneous(LevyModel::brownian_drift(0.0, 0.5), 1.0);
  CHECK_FALSE(det.validate().pass);

  const auto poisson = PiiModel::levy_homogeneous(LevyModel::poisson(3.0), 1.0);
  CHECK(poisson.validate().pass);
}

TEST_CASE("construction guards") {
  CHECK_THROWS_AS(PiiModel::wiener_integral(
                      kNig, TimeTable({0.0, 1.0}, {0.0, 0.5}), 1.0),
                  InvalidArgument);  // kernel touches zero
  CHECK_THROWS_AS(PiiModel::wiener_integral(
                      kNig, TimeTable::constant(30.0, 0.0, 1.0), 1.0),
                  DomainViolation);  // 2 sup l outside the strip
  CHECK_THROWS_AS(PiiModel::two_factor_electricity(kNig, 25.0, 3.0, 0.0,
                                                   std::nullopt, 0.25, 0.25),
                  DomainViolation);  // 2 sigma_s outside the strip
  CHECK_THROWS_AS(
      PiiModel::time_changed_brownian(TimeTable({0.0, 1.0}, {0.1, 1.0}), 1.0),
      InvalidArgument);  // psi(0) != 0
  CHECK_THROWS_AS(
      PiiModel::time_changed_brownian(TimeTable({0.0, 0.5, 1.0}, {0.0, 0.4, 0.4}),
                                      1.0),
      InvalidArgument);  // not strictly increasing
  CHECK_THROWS_AS(PiiModel::levy_homogeneous(kNig, -1.0), InvalidArgument);
}

TEST_CASE("domain violations surface from kappa") {
  const auto m = PiiModel::levy_homogeneous(kNig, 1.0);
  CHECK_THROWS_AS(m.kappa(0.5, Complex(60.0, 0.0)), DomainViolation);
  const auto w =
      PiiModel::wiener_integral(kNig, TimeTable::constant(2.0, 0.0, 1.0), 1.0);
  // effective strip shrinks by the kernel scale
  CHECK_THROWS_AS(w.kappa(0.5, Complex(25.0, 0.0)), DomainViolation);
  CHECK_NOTHROW(w.kappa(0.5, Complex(10.0, 0.0)));
}
