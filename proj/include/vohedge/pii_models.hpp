#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vohedge/cumulants.hpp"
#include "vohedge/numerics.hpp"

namespace vohedge {

enum class PiiKind {
  levy_homogeneous,
  wiener_integral,
  two_factor_electricity,
  time_changed_brownian,
};

// Radon-Nikodym data of the cumulant against the reference variance measure
// rho at a fixed time.
struct RhoDensities {
  double t = 0.0;
  double dkappa1_drho = 0.0;                       // d kappa_t(1) / d rho_t
  std::function<Complex(Complex)> dkappaz_drho;    // z -> d kappa_t(z) / d rho_t
  double drho_dt = 0.0;                            // density of rho against time
};

struct LogCharDerivatives {
  Complex psi;          // Psi_t(u) = kappa_t(iu)
  Complex dpsi_du;      // d/du Psi_t(u)
  Complex d2psi_du2_0;  // d^2/du^2 Psi_t at u = 0 (= -Var X_t)
};

struct ValidationReport {
  bool pass = true;
  std::vector<std::string> checks;
  std::vector<std::string> failures;
  void ok(std::string msg) { checks.push_back(std::move(msg)); }
  void fail(std::string msg) {
    pass = false;
    failures.push_back(std::move(msg));
  }
};

// Cumulant kappa_t(z) of the log-price process with independent increments,
// together with the reference variance measure rho_t = kappa_t(2) - 2 kappa_t(1)
// and its densities. Immutable after construction; every method is pure.
class PiiModel {
 public:
  static PiiModel levy_homogeneous(LevyModel driver, double horizon,
                                   int grid = 256);
  // kernel l(s) on [0, T]; must stay positive and bounded away from zero.
  static PiiModel wiener_integral(LevyModel driver, TimeTable kernel,
                                  double horizon, int grid = 256);
  // trend_density may be empty for a zero trend.
  static PiiModel two_factor_electricity(LevyModel driver, double sigma_s,
                                         double lambda_mr, double sigma_l,
                                         std::optional<TimeTable> trend_density,
                                         double delivery, double horizon,
                                         int grid = 256);
  static PiiModel time_changed_brownian(TimeTable psi, double horizon,
                                        int grid = 256);

  PiiKind kind() const noexcept { return kind_; }
  double horizon() const noexcept { return horizon_; }
  int grid() const noexcept { return grid_; }
  const LevyModel* driver() const noexcept {
    return driver_ ? &*driver_ : nullptr;
  }
  double sigma_s() const noexcept { return sigma_s_; }
  double lambda_mr() const noexcept { return lambda_mr_; }
  double sigma_l() const noexcept { return sigma_l_; }
  double delivery() const noexcept { return delivery_; }

  // Real strip of admissible Re(z) for kappa(t, .), all t in [0, T].
  DomainStrip effective_strip() const noexcept { return effective_strip_; }

  Complex kappa(double t, Complex z) const;
  double rho(double t) const;
  Complex rho_bilinear(double t, Complex y, Complex z) const;
  RhoDensities densities(double t) const;
  LogCharDerivatives log_char_derivatives(double t, double u) const;
  ValidationReport validate() const;

  // Driver scaling at time t: l_t for Wiener integrals, sigma_s e^{-l(Td-t)}
  // for the electricity kind, 1 for homogeneous models.
  double scaling(double t) const;
  // Trend density (two-factor kind), 0 otherwise.
  double trend_density(double t) const;
  double trend_integral(double t) const;
  // psi(t) for the time-changed kind.
  double psi(double t) const;

  // Integrates f over [t0, t1] with the composite Gauss-Legendre rule on the
  // model's panel grid.
  double integrate_time(const std::function<double(double)>& f, double t0,
                        double t1) const;
  Complex integrate_time_c(const std::function<Complex(double)>& f, double t0,
                           double t1) const;

 private:
  PiiModel() = default;
  void init_common();
  void check_domain(double re) const;

  PiiKind kind_ = PiiKind::levy_homogeneous;
  double horizon_ = 0.0;
  int grid_ = 256;
  std::optional<LevyModel> driver_;
  std::optional<TimeTable> kernel_;
  std::optional<TimeTable> trend_;   // density of the trend against time
  std::optional<TimeTable> psi_;
  double sigma_s_ = 0.0;
  double lambda_mr_ = 0.0;
  double sigma_l_ = 0.0;
  double delivery_ = 0.0;
  DomainStrip effective_strip_;
};

}  // namespace vohedge
