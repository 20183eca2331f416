#include "vohedge/pii_models.hpp"

#include <cmath>
#include <sstream>

namespace vohedge {

namespace {

double scaled_upper(const DomainStrip& strip, double scale_max) {
  return scale_max > 0.0 ? strip.upper / scale_max
                         : std::numeric_limits<double>::infinity();
}
double scaled_lower(const DomainStrip& strip, double scale_max) {
  return scale_max > 0.0 ? strip.lower / scale_max
                         : -std::numeric_limits<double>::infinity();
}

}  // namespace

PiiModel PiiModel::levy_homogeneous(LevyModel driver, double horizon, int grid) {
  PiiModel m;
  m.kind_ = PiiKind::levy_homogeneous;
  m.driver_ = std::move(driver);
  m.horizon_ = horizon;
  m.grid_ = grid;
  m.effective_strip_ = m.driver_->domain();
  m.init_common();
  return m;
}

PiiModel PiiModel::wiener_integral(LevyModel driver, TimeTable kernel,
                                   double horizon, int grid) {
  PiiModel m;
  m.kind_ = PiiKind::wiener_integral;
  m.driver_ = std::move(driver);
  m.kernel_ = std::move(kernel);
  m.horizon_ = horizon;
  m.grid_ = grid;
  if (!(m.kernel_->min_value() > 0.0))
    throw InvalidArgument("Wiener-integral kernel must be bounded away from 0");
  const double lmax = m.kernel_->max_value();
  if (!m.driver_->domain().contains_interior(2.0 * lmax))
    throw DomainViolation("2 sup(l) must lie inside the driver cumulant strip");
  m.effective_strip_ = DomainStrip{scaled_lower(m.driver_->domain(), lmax),
                                   scaled_upper(m.driver_->domain(), lmax)};
  m.init_common();
  return m;
}

PiiModel PiiModel::two_factor_electricity(LevyModel driver, double sigma_s,
                                          double lambda_mr, double sigma_l,
                                          std::optional<TimeTable> trend_density,
                                          double delivery, double horizon,
                                          int grid) {
  PiiModel m;
  m.kind_ = PiiKind::two_factor_electricity;
  m.driver_ = std::move(driver);
  m.sigma_s_ = sigma_s;
  m.lambda_mr_ = lambda_mr;
  m.sigma_l_ = sigma_l;
  m.trend_ = std::move(trend_density);
  m.delivery_ = delivery;
  m.horizon_ = horizon;
  m.grid_ = grid;
  if (sigma_s < 0.0 || lambda_mr < 0.0 || sigma_l < 0.0)
    throw InvalidArgument("two-factor volatilities and mean reversion must be >= 0");
  if (delivery < horizon)
    throw InvalidArgument("delivery date must not precede the horizon");
  if (sigma_s > 0.0) {
    if (!m.driver_->domain().contains_interior(2.0 * sigma_s))
      throw DomainViolation("2 sigma_s must lie inside the driver cumulant strip");
    // largest scaling over [0, T] is sigma_s e^{-lambda (Td - T)}
    const double smax = sigma_s * std::exp(-lambda_mr * (delivery - horizon));
    m.effective_strip_ = DomainStrip{scaled_lower(m.driver_->domain(), smax),
                                     scaled_upper(m.driver_->domain(), smax)};
  }
  m.init_common();
  return m;
}

PiiModel PiiModel::time_changed_brownian(TimeTable psi, double horizon, int grid) {
  PiiModel m;
  m.kind_ = PiiKind::time_changed_brownian;
  m.psi_ = std::move(psi);
  m.horizon_ = horizon;
  m.grid_ = grid;
  if (m.psi_->front_time() != 0.0 || m.psi_->values().front() != 0.0)
    throw InvalidArgument("psi must be tabulated from t = 0 with psi(0) = 0");
  if (!m.psi_->strictly_increasing_values())
    throw InvalidArgument("psi must be strictly increasing");
  if (m.psi_->back_time() < horizon)
    throw InvalidArgument("psi table must cover the horizon");
  m.init_common();
  return m;
}

void PiiModel::init_common() {
  if (!(horizon_ > 0.0)) throw InvalidArgument("horizon must be > 0");
  if (grid_ < 4) throw InvalidArgument("time grid resolution must be >= 4");

  // Quadrature convergence for the kinds that integrate the driver cumulant
  // in time: doubling the panel count must not move kappa_T(2), kappa_T(1).
  if (kind_ == PiiKind::wiener_integral ||
      (kind_ == PiiKind::two_factor_electricity && sigma_s_ > 0.0)) {
    for (double x : {1.0, 2.0}) {
      if (!effective_strip_.contains_interior(x)) continue;
      auto f = [&](double s) {
        return driver_->cumulant(Complex(x * scaling(s), 0.0)).real();
      };
      const int save = grid_;
      const double coarse = integrate_time(f, 0.0, horizon_);
      grid_ = 2 * save;
      const double fine = integrate_time(f, 0.0, horizon_);
      grid_ = save;
      if (std::fabs(fine - coarse) > 1e-9 * std::max(1.0, std::fabs(fine))) {
        std::ostringstream os;
        os << "time quadrature for kappa_T(" << x
           << ") did not converge at grid resolution " << grid_
           << " (coarse " << coarse << ", fine " << fine << ")";
        throw QuadratureFailure(os.str());
      }
    }
  }
}

double PiiModel::scaling(double t) const {
  switch (kind_) {
    case PiiKind::levy_homogeneous: return 1.0;
    case PiiKind::wiener_integral: return (*kernel_)(t);
    case PiiKind::two_factor_electricity:
      return sigma_s_ * std::exp(-lambda_mr_ * (delivery_ - t));
    case PiiKind::time_changed_brownian: return 1.0;
  }
  return 1.0;
}

double PiiModel::trend_density(double t) const {
  return trend_ ? (*trend_)(t) : 0.0;
}

double PiiModel::trend_integral(double t) const {
  return trend_ ? trend_->integral(t) : 0.0;
}

double PiiModel::psi(double t) const {
  if (kind_ != PiiKind::time_changed_brownian)
    throw InvalidArgument("psi is defined for the time-changed Brownian kind");
  return (*psi_)(t);
}

void PiiModel::check_domain(double re) const {
  if (re == 0.0) return;
  if (!effective_strip_.contains_interior(re)) {
    std::ostringstream os;
    os << "Re(z) = " << re << " outside the effective strip ("
       << effective_strip_.lower << ", " << effective_strip_.upper << ")";
    throw DomainViolation(os.str());
  }
}

double PiiModel::integrate_time(const std::function<double(double)>& f, double t0,
                                double t1) const {
  return integrate_time_c([&f](double s) { return Complex(f(s), 0.0); }, t0, t1)
      .real();
}

Complex PiiModel::integrate_time_c(const std::function<Complex(double)>& f,
                                   double t0, double t1) const {
  if (!(t1 > t0)) return Complex(0.0, 0.0);
  const double h = horizon_ / static_cast<double>(grid_);
  Complex acc(0.0, 0.0);
  std::size_t k0 = static_cast<std::size_t>(std::floor(t0 / h));
  for (std::size_t k = k0; k * h < t1; ++k) {
    const double a = std::max(t0, k * h);
    const double b = std::min(t1, (k + 1) * h);
    if (!(b > a)) continue;
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    Complex panel(0.0, 0.0);
    for (int i = 0; i < 8; ++i)
      panel += GaussLegendre8::weights[i] * f(mid + half * GaussLegendre8::nodes[i]);
    acc += half * panel;
  }
  return acc;
}

Complex PiiModel::kappa(double t, Complex z) const {
  if (t < 0.0 || t > horizon_ * (1.0 + 1e-12))
    throw InvalidArgument("time outside [0, T]");
  check_domain(z.real());
  switch (kind_) {
    case PiiKind::levy_homogeneous:
      return t * driver_->cumulant(z);
    case PiiKind::wiener_integral:
      return integrate_time_c(
          [&](double s) { return driver_->cumulant(z * scaling(s)); }, 0.0, t);
    case PiiKind::two_factor_electricity: {
      Complex acc = z * trend_integral(t) +
                    0.5 * z * z * (sigma_l_ * sigma_l_) * t;
      if (sigma_s_ > 0.0)
        acc += integrate_time_c(
            [&](double s) { return driver_->cumulant(z * scaling(s)); }, 0.0, t);
      return acc;
    }
    case PiiKind::time_changed_brownian:
      return 0.5 * z * z * psi(t);
  }
  throw InternalError("unreachable pii kind");
}

double PiiModel::rho(double t) const {
  return kappa(t, Complex(2.0, 0.0)).real() -
         2.0 * kappa(t, Complex(1.0, 0.0)).real();
}

Complex PiiModel::rho_bilinear(double t, Complex y, Complex z) const {
  return kappa(t, y + z) - kappa(t, y) - kappa(t, z);
}

RhoDensities PiiModel::densities(double t) const {
  if (!(t > 0.0) || t > horizon_)
    throw InvalidArgument("densities are defined on (0, T]");
  RhoDensities out;
  out.t = t;
  switch (kind_) {
    case PiiKind::levy_homogeneous: {
      const LevyModel drv = *driver_;
      const double denom = drv.cumulant(Complex(2, 0)).real() -
                           2.0 * drv.cumulant(Complex(1, 0)).real();
      if (!(denom > 0.0))
        throw DegenerateModel("kappa(2) - 2 kappa(1) must be positive");
      out.drho_dt = denom;
      out.dkappa1_drho = drv.cumulant(Complex(1, 0)).real() / denom;
      out.dkappaz_drho = [drv, denom](Complex z) { return drv.cumulant(z) / denom; };
      return out;
    }
    case PiiKind::wiener_integral:
    case PiiKind::two_factor_electricity: {
      const LevyModel drv = *driver_;
      const double lt = scaling(t);
      const double sl2 = sigma_l_ * sigma_l_;
      const double mdot = kind_ == PiiKind::two_factor_electricity
                              ? trend_density(t)
                              : 0.0;
      const double kl2 =
          lt > 0.0 ? drv.cumulant(Complex(2.0 * lt, 0)).real() : 0.0;
      const double kl1 = lt > 0.0 ? drv.cumulant(Complex(lt, 0)).real() : 0.0;
      const double denom = sl2 + kl2 - 2.0 * kl1;
      if (!(denom > 0.0))
        throw DegenerateModel("reference variance density must be positive");
      out.drho_dt = denom;
      out.dkappa1_drho = (mdot + 0.5 * sl2 + kl1) / denom;
      out.dkappaz_drho = [drv, lt, sl2, mdot, denom](Complex z) {
        Complex num = z * mdot + 0.5 * z * z * sl2;
        if (lt > 0.0) num += drv.cumulant(z * lt);
        return num / denom;
      };
      return out;
    }
    case PiiKind::time_changed_brownian: {
      // d kappa_t(z)/d rho_t = z^2 / 2 since rho_t = psi(t).
      const auto& tbl = *psi_;
      const auto& ts = tbl.times();
      // slope of the piecewise-linear psi at t
      double slope = 0.0;
      for (std::size_t i = 1; i < ts.size(); ++i) {
        if (t <= ts[i] || i + 1 == ts.size()) {
          slope = (tbl.values()[i] - tbl.values()[i - 1]) / (ts[i] - ts[i - 1]);
          break;
        }
      }
      if (!(slope > 0.0))
        throw DegenerateModel("psi must be strictly increasing at t");
      out.drho_dt = slope;
      out.dkappa1_drho = 0.5;
      out.dkappaz_drho = [](Complex z) { return 0.5 * z * z; };
      return out;
    }
  }
  throw InternalError("unreachable pii kind");
}

LogCharDerivatives PiiModel::log_char_derivatives(double t, double u) const {
  LogCharDerivatives out;
  const Complex iu(0.0, u);
  const Complex i(0.0, 1.0);
  switch (kind_) {
    case PiiKind::levy_homogeneous: {
      out.psi = t * driver_->cumulant(iu);
      out.dpsi_du = t * i * driver_->cumulant_prime(iu);
      out.d2psi_du2_0 = Complex(-t * driver_->derivatives_at_zero(2)[1], 0.0);
      return out;
    }
    case PiiKind::wiener_integral:
    case PiiKind::two_factor_electricity: {
      const double sl2 = sigma_l_ * sigma_l_;
      Complex psi_v(0, 0), dpsi(0, 0);
      double var = 0.0;
      if (kind_ == PiiKind::two_factor_electricity) {
        const double mt = trend_integral(t);
        psi_v += iu * mt - 0.5 * u * u * sl2 * t;
        dpsi += i * mt - u * sl2 * t;
        var += sl2 * t;
      }
      const bool has_jump = kind_ == PiiKind::wiener_integral || sigma_s_ > 0.0;
      if (has_jump) {
        psi_v += integrate_time_c(
            [&](double s) { return driver_->cumulant(iu * scaling(s)); }, 0.0, t);
        dpsi += integrate_time_c(
            [&](double s) {
              const double ls = scaling(s);
              return i * ls * driver_->cumulant_prime(iu * ls);
            },
            0.0, t);
        const double k2 = driver_->derivatives_at_zero(2)[1];
        var += k2 * integrate_time(
                        [&](double s) {
                          const double ls = scaling(s);
                          return ls * ls;
                        },
                        0.0, t);
      }
      out.psi = psi_v;
      out.dpsi_du = dpsi;
      out.d2psi_du2_0 = Complex(-var, 0.0);
      return out;
    }
    case PiiKind::time_changed_brownian: {
      const double p = psi(t);
      out.psi = Complex(-0.5 * u * u * p, 0.0);
      out.dpsi_du = Complex(-u * p, 0.0);
      out.d2psi_du2_0 = Complex(-p, 0.0);
      return out;
    }
  }
  throw InternalError("unreachable pii kind");
}

ValidationReport PiiModel::validate() const {
  ValidationReport rep;

  if (effective_strip_.contains_interior(2.0))
    rep.ok("2 lies inside the effective cumulant strip");
  else
    rep.fail("2 does not lie inside the effective cumulant strip");

  if (driver_ && driver_->is_deterministic() &&
      !(kind_ == PiiKind::two_factor_electricity && sigma_l_ > 0.0)) {
    rep.fail("driver has deterministic increments");
  }
  if (kind_ == PiiKind::two_factor_electricity && sigma_s_ == 0.0 &&
      sigma_l_ == 0.0)
    rep.fail("two-factor model with sigma_s = sigma_l = 0 is deterministic");

  if (rep.pass) {
    // rho must be strictly increasing; probe on a 64-point grid.
    bool increasing = true;
    double prev = 0.0;
    for (int k = 1; k <= 64; ++k) {
      const double t = horizon_ * k / 64.0;
      const double r = rho(t);
      if (!(r > prev)) {
        increasing = false;
        break;
      }
      prev = r;
    }
    if (increasing)
      rep.ok("rho is strictly increasing on the probe grid");
    else
      rep.fail("rho is not strictly increasing on the probe grid");
  }

  switch (kind_) {
    case PiiKind::levy_homogeneous:
      break;
    case PiiKind::wiener_integral:
      if (kernel_->min_value() > 0.0)
        rep.ok("kernel is bounded away from zero");
      else
        rep.fail("kernel is not bounded away from zero");
      break;
    case PiiKind::two_factor_electricity: {
      if (sigma_s_ > 0.0) {
        const auto report = validate_exponential_assumptions(*driver_, sigma_s_);
        if (report.two_scale_in_domain)
          rep.ok("2 sigma_s lies inside the driver strip");
        else
          rep.fail("2 sigma_s outside the driver strip");
        if (report.nig_criterion_checked) {
          if (report.nig_criterion_ok)
            rep.ok("NIG criterion sigma_s <= (alpha - beta)/2 holds");
          else
            rep.fail("NIG criterion sigma_s <= (alpha - beta)/2 fails");
        }
      }
      break;
    }
    case PiiKind::time_changed_brownian:
      if (psi_->strictly_increasing_values() && psi_->values().front() == 0.0)
        rep.ok("psi is strictly increasing with psi(0) = 0");
      else
        rep.fail("psi must be strictly increasing with psi(0) = 0");
      break;
  }
  return rep;
}

}  // namespace vohedge
