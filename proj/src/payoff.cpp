#include "vohedge/payoff.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace vohedge {

namespace {

// Composite Simpson over [a, b] with n panels (n even), fixed-order pairwise
// reduction of the weighted terms.
Complex simpson(const std::function<Complex(double)>& f, double a, double b,
                std::size_t panels) {
  const std::size_t n = panels;
  const double h = (b - a) / static_cast<double>(n);
  std::vector<Complex> terms(n + 1);
  for (std::size_t j = 0; j <= n; ++j) {
    double c = (j == 0 || j == n) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
    terms[j] = c * f(a + h * static_cast<double>(j));
  }
  return (h / 3.0) * pairwise_sum(terms);
}

// Integral of h over the full line [-U, U]; when h(-u) = conj(h(u)) only the
// non-negative half axis is evaluated and the real part doubled.
Complex line_pass(const std::function<Complex(double)>& h, double u_max,
                  std::size_t panels, bool conj_symmetric) {
  if (conj_symmetric) {
    const Complex half = simpson(h, 0.0, u_max, panels);
    return Complex(2.0 * half.real(), 0.0);
  }
  return simpson(h, -u_max, u_max, 2 * panels);
}

struct LineResult {
  Complex value;
  double abs_scale;  // crude integral of |h|, used as the convergence scale
};

// Adaptive line integral: double the panel count until the change falls under
// rel_tol, then double u_max once and require the tail to be equally small.
LineResult integrate_line(const std::function<Complex(double)>& h,
                          const QuadratureSettings& qs, bool conj_symmetric) {
  std::size_t panels = std::size_t{1} << qs.log2_panels;
  auto abs_h = [&h](double u) { return Complex(std::abs(h(u)), 0.0); };
  const double abs_scale =
      line_pass(abs_h, qs.u_max, std::size_t{1} << std::min(qs.log2_panels, 10),
                false)
          .real();

  Complex coarse = line_pass(h, qs.u_max, panels, conj_symmetric);
  Complex fine = coarse;
  bool converged = false;
  for (int r = 0; r < qs.max_refinements; ++r) {
    panels *= 2;
    fine = line_pass(h, qs.u_max, panels, conj_symmetric);
    const double change = std::abs(fine - coarse);
    if (change <= qs.rel_tol * std::max(std::abs(fine), 1e-2 * abs_scale)) {
      converged = true;
      break;
    }
    coarse = fine;
  }
  if (!converged) {
    std::ostringstream os;
    os << "line integral did not converge after " << qs.max_refinements
       << " panel doublings (last value " << std::abs(fine) << ")";
    throw QuadratureFailure(os.str());
  }

  // tail control: the [u_max, 2 u_max] continuation is added to the result and
  // must stay small relative to the integral scale
  Complex tail;
  if (conj_symmetric) {
    const Complex half = simpson(h, qs.u_max, 2.0 * qs.u_max, panels);
    tail = Complex(2.0 * half.real(), 0.0);
  } else {
    tail = simpson(h, qs.u_max, 2.0 * qs.u_max, panels) +
           simpson(h, -2.0 * qs.u_max, -qs.u_max, panels);
  }
  if (std::abs(tail) > qs.tail_tol * std::max(std::abs(fine), 1e-2 * abs_scale)) {
    std::ostringstream os;
    os << "tail beyond u_max = " << qs.u_max << " contributes " << std::abs(tail)
       << ", integral " << std::abs(fine);
    throw TailDivergence(os.str());
  }
  return {fine + tail, abs_scale};
}

double measured_tail_exponent(const std::function<double(double)>& magnitude,
                              double u_max) {
  const double u1 = 0.5 * u_max, u2 = u_max;
  const double m1 = magnitude(u1), m2 = magnitude(u2);
  if (m2 == 0.0) return std::numeric_limits<double>::infinity();
  if (m1 == 0.0) return 0.0;
  return std::log(m1 / m2) / std::log(u2 / u1);
}

double checked_real(Complex value, const char* what) {
  if (std::abs(value.imag()) > 1e-8 * (1.0 + std::abs(value))) {
    std::ostringstream os;
    os << what << " has imaginary residue " << value.imag() << " (value "
       << value.real() << ")";
    throw QuadratureFailure(os.str());
  }
  return value.real();
}

}  // namespace

PayoffMeasure::PayoffMeasure(std::vector<PayoffAtom> atoms,
                             std::vector<ContourLine> contours,
                             std::string description,
                             const QuadratureSettings& settings)
    : atoms_(std::move(atoms)),
      contours_(std::move(contours)),
      description_(std::move(description)) {
  for (const auto& line : contours_) {
    const double p = measured_tail_exponent(
        [&line](double u) {
          return std::abs(line.kernel(Complex(line.abscissa, u)));
        },
        settings.u_max);
    if (p < 1.9) {
      std::ostringstream os;
      os << "contour kernel at Re z = " << line.abscissa
         << " decays like |u|^-" << p << ", slower than |u|^-2";
      throw TailDivergence(os.str());
    }
    if (line.conj_symmetric) {
      // spot-check the symmetry that the fast paths rely on
      for (double u : {0.37 * settings.u_max, 0.83 * settings.u_max}) {
        const Complex a = line.kernel(Complex(line.abscissa, u));
        const Complex b = line.kernel(Complex(line.abscissa, -u));
        if (std::abs(b - std::conj(a)) > 1e-10 * (1.0 + std::abs(a)))
          throw InvalidArgument("contour kernel is not conjugate-symmetric");
      }
    }
  }
}

std::vector<double> PayoffMeasure::real_support() const {
  std::vector<double> xs;
  for (const auto& a : atoms_)
    if (a.z.imag() == 0.0) xs.push_back(a.z.real());
  for (const auto& c : contours_) xs.push_back(c.abscissa);
  std::sort(xs.begin(), xs.end());
  return xs;
}

std::pair<double, double> PayoffMeasure::support_interval() const {
  const auto xs = real_support();
  if (xs.empty()) throw InvalidArgument("payoff measure has empty real support");
  const double lo = xs.front(), hi = xs.back();
  return {std::min(lo, 2.0 * lo), std::max(2.0 * hi, hi + 1.0)};
}

Complex PayoffMeasure::integrate(const std::function<Complex(Complex)>& integrand,
                                 const QuadratureSettings& qs,
                                 bool conj_symmetric) const {
  std::vector<Complex> parts;
  parts.reserve(atoms_.size() + contours_.size());
  for (const auto& a : atoms_) parts.push_back(a.weight * integrand(a.z));
  for (const auto& line : contours_) {
    const double r = line.abscissa;
    auto h = [&](double u) {
      const Complex z(r, u);
      return line.kernel(z) * integrand(z);
    };
    const LineResult res =
        integrate_line(h, qs, conj_symmetric && line.conj_symmetric);
    // dz = i du along the vertical line
    parts.push_back(line.weight * Complex(0.0, 1.0) * res.value);
  }
  return pairwise_sum(parts);
}

double PayoffMeasure::reconstruct(double spot,
                                  const QuadratureSettings& qs) const {
  if (!(spot > 0.0)) throw InvalidArgument("spot must be > 0");
  const double x = std::log(spot);
  std::vector<Complex> parts;
  parts.reserve(atoms_.size() + contours_.size());
  for (const auto& a : atoms_) parts.push_back(a.weight * std::exp(a.z * x));
  for (const auto& line : contours_) {
    const double r = line.abscissa;
    if (line.strike_asymptote) {
      // Strike kernels only decay like u^-2 and oscillate slowly near the
      // money; integrate kernel minus its asymptote (u^-4 residual) and add
      // the asymptote's closed-form Bromwich value.
      const double b = x - line.strike_asymptote->log_strike;
      const double a = line.strike_asymptote->center;
      const double strike = std::exp(line.strike_asymptote->log_strike);
      auto h = [&](double u) {
        const Complex z(r, u);
        const Complex za = z - a;
        const Complex sub = strike * std::exp(z * b) *
                            (1.0 / (za * za) + (1.0 - 2.0 * a) / (za * za * za));
        return line.kernel(z) * std::exp(z * x) - sub;
      };
      const LineResult res = integrate_line(h, qs, line.conj_symmetric);
      parts.push_back(line.weight * Complex(0.0, 1.0) * res.value);
      if (b > 0.0) {
        const double closed =
            strike * std::exp(a * b) * (b + 0.5 * (1.0 - 2.0 * a) * b * b);
        parts.push_back(line.weight * Complex(0.0, 2.0 * kPi) * closed);
      }
    } else {
      auto h = [&](double u) {
        const Complex z(r, u);
        return line.kernel(z) * std::exp(z * x);
      };
      const LineResult res = integrate_line(h, qs, line.conj_symmetric);
      parts.push_back(line.weight * Complex(0.0, 1.0) * res.value);
    }
  }
  return checked_real(pairwise_sum(parts), "payoff reconstruction");
}

namespace {

ContourLine strike_kernel_line(double strike, double abscissa) {
  const double log_k = std::log(strike);
  return ContourLine{
      abscissa,
      [strike, log_k](Complex z) {
        return std::exp((1.0 - z) * log_k) / (z * (z - 1.0));
      },
      Complex(0.0, -1.0 / (2.0 * kPi)),  // 1 / (2 pi i)
      true,
      StrikeAsymptote{log_k, abscissa - 2.0}};
}

}  // namespace

PayoffMeasure call_representation(double strike, CallVariant variant,
                                  double abscissa) {
  if (!(strike > 0.0)) throw InvalidArgument("strike must be > 0");
  std::ostringstream os;
  if (variant == CallVariant::abscissa_above_one) {
    if (!(abscissa > 1.0))
      throw InvalidAbscissa("call representation needs R > 1 for this variant");
    os << "call K=" << strike << " (contour R=" << abscissa << ")";
    return PayoffMeasure({}, {strike_kernel_line(strike, abscissa)}, os.str());
  }
  if (!(abscissa > 0.0 && abscissa < 1.0))
    throw InvalidAbscissa("call representation needs 0 < R < 1 for this variant");
  os << "call K=" << strike << " (contour R=" << abscissa << " plus forward)";
  return PayoffMeasure({PayoffAtom{Complex(1.0, 0.0), Complex(1.0, 0.0)}},
                       {strike_kernel_line(strike, abscissa)}, os.str());
}

PayoffMeasure put_representation(double strike, double abscissa) {
  if (!(strike > 0.0)) throw InvalidArgument("strike must be > 0");
  if (!(abscissa < 0.0))
    throw InvalidAbscissa("put representation needs R < 0");
  std::ostringstream os;
  os << "put K=" << strike << " (contour R=" << abscissa << ")";
  return PayoffMeasure({}, {strike_kernel_line(strike, abscissa)}, os.str());
}

FourierMeasure::FourierMeasure(std::function<Complex(double)> density,
                               std::vector<FourierAtom> atoms,
                               std::string description,
                               const QuadratureSettings& settings,
                               std::optional<FourierAsymptote> asymptote)
    : density_(std::move(density)),
      atoms_(std::move(atoms)),
      description_(std::move(description)),
      asymptote_(asymptote) {
  if (density_) {
    tail_exponent_ = measured_tail_exponent(
        [this](double u) { return std::abs(density_(u)); }, settings.u_max);
    if (tail_exponent_ < 0.9)
      throw TailDivergence("Fourier density must decay at least like |u|^-1");
    needs_damping_ = tail_exponent_ < 1.5;
    decay_class_ = tail_exponent_ > 3.1 ? DecayClass::l1_with_u2 : DecayClass::l1;
  } else {
    tail_exponent_ = std::numeric_limits<double>::infinity();
    decay_class_ = DecayClass::l1_with_u2;
  }
}

Complex FourierMeasure::integrate(const std::function<Complex(double)>& f,
                                  const QuadratureSettings& qs,
                                  bool conj_symmetric) const {
  std::vector<Complex> parts;
  for (const auto& a : atoms_) parts.push_back(a.weight * f(a.u));
  if (density_) {
    if (!needs_damping_) {
      auto h = [&](double u) { return density_(u) * f(u); };
      parts.push_back(integrate_line(h, qs, conj_symmetric).value /
                      (2.0 * kPi));
    } else {
      // Conditionally convergent inversion: Gaussian damping e^{-eps u^2}
      // evaluated at eps, eps/2, eps/4 and extrapolated to eps -> 0 with the
      // quadratic Lagrange weights 1/3, -2, 8/3.
      const double eps0 = 1e-3;
      Complex v[3];
      for (int k = 0; k < 3; ++k) {
        const double eps = eps0 / (1 << k);
        auto h = [&](double u) {
          return density_(u) * f(u) * std::exp(-eps * u * u);
        };
        v[k] = integrate_line(h, qs, conj_symmetric).value / (2.0 * kPi);
      }
      parts.push_back(v[0] / 3.0 - 2.0 * v[1] + (8.0 / 3.0) * v[2]);
    }
  }
  return pairwise_sum(parts);
}

double FourierMeasure::reconstruct(double x, const QuadratureSettings& qs) const {
  if (!asymptote_ || !density_) {
    const Complex v = integrate(
        [x](double u) { return std::exp(Complex(0.0, u * x)); }, qs,
        /*conj_symmetric=*/true);
    return checked_real(v, "Fourier reconstruction");
  }
  const FourierAsymptote& as = *asymptote_;
  const double b = x - as.log_level;
  const double c = as.center;
  // subtraction coefficients matching r1/v + r2/v^2 + r3/v^3 at infinity
  const double s1 = -as.r1;
  const double s2 = as.r2 - c * as.r1;
  const double s3 = 2.0 * c * s2 - c * c * s1 - as.r3;
  auto h = [&](double u) {
    const Complex eiub = std::exp(Complex(0.0, u * b));
    const Complex cv(c, -u);  // c - iu
    const Complex sub =
        as.amplitude * eiub * (s1 / cv + s2 / (cv * cv) + s3 / (cv * cv * cv));
    return density_(u) * std::exp(Complex(0.0, u * x)) - sub;
  };
  const LineResult res = integrate_line(h, qs, /*conj_symmetric=*/true);
  std::vector<Complex> parts;
  for (const auto& a : atoms_)
    parts.push_back(a.weight * std::exp(Complex(0.0, a.u * x)));
  parts.push_back(res.value / (2.0 * kPi));
  if (b < 0.0) {
    const double closed =
        as.amplitude * (s1 - s2 * b + 0.5 * s3 * b * b) * std::exp(c * b);
    parts.push_back(Complex(closed, 0.0));
  }
  return checked_real(pairwise_sum(parts), "Fourier reconstruction");
}

// The factories store the density of mu under the convention
// f(x) = integral of e^{iux} mu(du), i.e. fhat(-u)/(2 pi) du for the forward
// transform fhat(u) = integral e^{iux} f(x) dx.

FourierMeasure digital_asset_or_nothing(double barrier) {
  if (!(barrier > 0.0)) throw InvalidArgument("barrier must be > 0");
  const double log_b = std::log(barrier);
  std::ostringstream os;
  os << "asset-or-nothing digital B=" << barrier;
  return FourierMeasure(
      [log_b](double u) {
        const Complex one_miu(1.0, -u);
        return std::exp(one_miu * log_b) / one_miu;
      },
      {}, os.str());
}

FourierMeasure self_quanto_put(double strike) {
  if (!(strike > 0.0)) throw InvalidArgument("strike must be > 0");
  const double log_k = std::log(strike);
  std::ostringstream os;
  os << "self-quanto put K=" << strike;
  // density amplitude K^2, R(v) = 1/((1-v)(2-v)) with Laurent tail
  // v^-2 + 3 v^-3 at infinity
  return FourierMeasure(
      [log_k](double u) {
        const Complex two_miu(2.0, -u);
        const Complex one_miu(1.0, -u);
        return std::exp(two_miu * log_k) / (one_miu * two_miu);
      },
      {}, os.str(), QuadratureSettings{},
      FourierAsymptote{log_k, strike * strike, 0.0, 1.0, 3.0, 4.0});
}

}  // namespace vohedge
