#include "vohedge/arithmetic_engine.hpp"

#include <cmath>
#include <sstream>

namespace vohedge {

namespace {

double checked_real(Complex v, const char* what) {
  if (std::abs(v.imag()) > 1e-8 * (1.0 + std::abs(v))) {
    std::ostringstream os;
    os << what << " has imaginary residue " << v.imag();
    throw QuadratureFailure(os.str());
  }
  return v.real();
}

}  // namespace

ArithmeticCoefficients::ArithmeticCoefficients(
    std::shared_ptr<const PiiModel> model)
    : model_(std::move(model)) {
  if (!model_) throw InvalidArgument("null model");
  // the variance density must stay positive on a probe grid
  const double T = model_->horizon();
  for (int k = 1; k <= 32; ++k) {
    const double t = T * (k - 0.5) / 32.0;
    if (!(densities_at(0.0, t).d2psi_0 < 0.0))
      throw DegenerateModel(
          "Psi''_t(0) must have strictly negative density on (0, T)");
  }
}

ArithmeticCoefficients::Densities ArithmeticCoefficients::densities_at(
    double u, double t) const {
  Densities out;
  const Complex i(0.0, 1.0);
  switch (model_->kind()) {
    case PiiKind::levy_homogeneous: {
      const LevyModel& drv = *model_->driver();
      out.dpsi_u = i * drv.cumulant_prime(Complex(0.0, u));
      out.dpsi_0 = i * drv.cumulant_prime(Complex(0.0, 0.0));
      out.d2psi_0 = -drv.derivatives_at_zero(2)[1];
      return out;
    }
    case PiiKind::wiener_integral:
    case PiiKind::two_factor_electricity: {
      const LevyModel& drv = *model_->driver();
      const double l = model_->scaling(t);
      const double mdot = model_->trend_density(t);
      const double sl2 = model_->sigma_l() * model_->sigma_l();
      out.dpsi_u = i * mdot - u * sl2;
      out.dpsi_0 = i * mdot;
      out.d2psi_0 = -sl2;
      if (l > 0.0) {
        out.dpsi_u += i * l * drv.cumulant_prime(Complex(0.0, u * l));
        out.dpsi_0 += i * l * drv.cumulant_prime(Complex(0.0, 0.0));
        out.d2psi_0 -= l * l * drv.derivatives_at_zero(2)[1];
      }
      return out;
    }
    case PiiKind::time_changed_brownian: {
      // against dpsi: Psi'_t(u) = -u psi(t)
      out.dpsi_u = Complex(-u, 0.0);
      out.dpsi_0 = Complex(0.0, 0.0);
      out.d2psi_0 = -1.0;
      return out;
    }
  }
  throw InternalError("unreachable pii kind");
}

double ArithmeticCoefficients::alpha(double t) const {
  const Densities d = densities_at(0.0, t);
  const Complex a = Complex(0, 1) * d.dpsi_0 / d.d2psi_0;
  return a.real();
}

Complex ArithmeticCoefficients::xi_density(double u, double t) const {
  const Densities d = densities_at(u, t);
  return Complex(0, 1) * (d.dpsi_u - d.dpsi_0) / d.d2psi_0;
}

Complex ArithmeticCoefficients::eta_integral(double u, double t1,
                                             double t2) const {
  if (u == 0.0) return Complex(0.0, 0.0);
  // The eta exponent that keeps H(u)_t a martingale-corrected price carries
  // the opposite sign of the raw quotient: in the complete Gaussian market it
  // must reproduce the drift-killed (risk-neutral) value e^{-u^2 sigma^2 T/2}.
  switch (model_->kind()) {
    case PiiKind::levy_homogeneous: {
      const Densities d = densities_at(u, 0.5 * model_->horizon());
      return -(t2 - t1) * (d.dpsi_u - d.dpsi_0) / d.d2psi_0 * d.dpsi_0;
    }
    case PiiKind::time_changed_brownian:
      return Complex(0.0, 0.0);  // dPsi'_t(0) = 0
    default:
      return model_->integrate_time_c(
          [&](double s) {
            const Densities d = densities_at(u, s);
            return -(d.dpsi_u - d.dpsi_0) / d.d2psi_0 * d.dpsi_0;
          },
          t1, t2);
  }
}

double ArithmeticCoefficients::sup_re_eta(
    const std::vector<double>& u_grid) const {
  double sup = 0.0;
  for (double u : u_grid)
    sup = std::max(sup, eta_integral(u, 0.0, model_->horizon()).real());
  return sup;
}

namespace {

Complex h_exponent(const ArithmeticCoefficients& coeffs, double u, double t) {
  const PiiModel& m = coeffs.model();
  const double T = m.horizon();
  return coeffs.eta_integral(u, t, T) + m.kappa(T, Complex(0.0, u)) -
         m.kappa(t, Complex(0.0, u));
}

}  // namespace

double arith_price_process(const ArithmeticCoefficients& coeffs,
                           const FourierMeasure& fourier, double t, double x,
                           const QuadratureSettings& qs) {
  const double T = coeffs.horizon();
  if (t < 0.0 || t > T * (1.0 + 1e-12)) throw InvalidArgument("time outside [0, T]");
  if (t >= T * (1.0 - 1e-12)) return fourier.reconstruct(x, qs);
  const Complex v = fourier.integrate(
      [&](double u) {
        return std::exp(h_exponent(coeffs, u, t) + Complex(0.0, u * x));
      },
      qs, /*conj_symmetric=*/true);
  return checked_real(v, "arithmetic price process");
}

double arith_pure_hedge(const ArithmeticCoefficients& coeffs,
                        const FourierMeasure& fourier, double t, double x,
                        const QuadratureSettings& qs) {
  const double T = coeffs.horizon();
  if (t < 0.0 || t >= T) throw InvalidArgument("hedge requires t in [0, T)");
  const Complex v = fourier.integrate(
      [&](double u) {
        return coeffs.xi_density(u, t) *
               std::exp(h_exponent(coeffs, u, t) + Complex(0.0, u * x));
      },
      qs, /*conj_symmetric=*/true);
  return checked_real(v, "arithmetic pure hedge");
}

ArithmeticHedgeEvaluator::ArithmeticHedgeEvaluator(
    const ArithmeticCoefficients& coeffs, const FourierMeasure& fourier,
    std::vector<double> dates, const QuadratureSettings& qs, int threads)
    : dates_(std::move(dates)) {
  const double T = coeffs.horizon();
  for (double t : dates_)
    if (t < 0.0 || t >= T)
      throw InvalidArgument("hedge evaluator dates must lie in [0, T)");

  const std::size_t half_panels = std::size_t{1} << (qs.log2_panels - 1);
  step_ = qs.u_max / static_cast<double>(half_panels);
  node_count_ = fourier.has_density() ? half_panels + 1 : 0;

  const std::size_t nd = dates_.size();
  price_w_.assign(nd, std::vector<Complex>(node_count_));
  hedge_w_.assign(nd, std::vector<Complex>(node_count_));
  cutoff_.assign(nd, node_count_);
  atom_terms_.assign(nd, {});
  alpha_.assign(nd, 0.0);

  parallel_for(std::max<std::size_t>(node_count_, 1), threads,
               [&](std::size_t lo, std::size_t hi) {
                 for (std::size_t j = lo; j < hi && j < node_count_; ++j) {
                   const double u = step_ * static_cast<double>(j);
                   const double c = (j == 0 || j + 1 == node_count_)
                                        ? 1.0
                                        : (j % 2 == 1 ? 4.0 : 2.0);
                   const Complex base_w =
                       fourier.density()(u) * (c * step_ / 3.0) / (2.0 * kPi);
                   for (std::size_t i = 0; i < nd; ++i) {
                     const Complex w =
                         base_w * std::exp(h_exponent(coeffs, u, dates_[i]));
                     price_w_[i][j] = w;
                     hedge_w_[i][j] = coeffs.xi_density(u, dates_[i]) * w;
                   }
                 }
               });

  for (std::size_t i = 0; i < nd; ++i) {
    alpha_[i] = coeffs.alpha(dates_[i]);
    if (node_count_ > 0) {
      double peak = 0.0;
      for (const auto& v : price_w_[i]) peak = std::max(peak, std::abs(v));
      std::size_t cut = node_count_;
      while (cut > 8 && std::abs(price_w_[i][cut - 1]) < 1e-16 * peak &&
             std::abs(hedge_w_[i][cut - 1]) < 1e-16 * peak)
        --cut;
      cutoff_[i] = cut;
    }
    for (const auto& atom : fourier.atoms()) {
      const Complex w =
          atom.weight * std::exp(h_exponent(coeffs, atom.u, dates_[i]));
      atom_terms_[i].push_back(
          {atom.u, w, coeffs.xi_density(atom.u, dates_[i]) * w});
    }
  }
}

ArithmeticHedgeEvaluator::Value ArithmeticHedgeEvaluator::value_and_hedge(
    std::size_t date_index, double x) const {
  Complex price_acc(0, 0), hedge_acc(0, 0);
  if (node_count_ > 0) {
    const auto& pw = price_w_[date_index];
    const auto& hw = hedge_w_[date_index];
    const std::size_t cut = cutoff_[date_index];
    const Complex stepper = std::exp(Complex(0.0, step_ * x));
    Complex e(1.0, 0.0);
    price_acc = pw[0];
    hedge_acc = hw[0];
    for (std::size_t j = 1; j < cut; ++j) {
      if ((j & 511) == 0)
        e = std::exp(Complex(0.0, step_ * static_cast<double>(j) * x));
      else
        e *= stepper;
      price_acc += pw[j] * e;
      hedge_acc += hw[j] * e;
    }
  }
  double price = 2.0 * price_acc.real();
  double hedge = 2.0 * hedge_acc.real();
  for (const auto& atom : atom_terms_[date_index]) {
    const Complex eiux = std::exp(Complex(0.0, atom.u * x));
    price += (atom.price_w * eiux).real();
    hedge += (atom.hedge_w * eiux).real();
  }
  return {price, hedge};
}

}  // namespace vohedge
