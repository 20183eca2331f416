#include "vohedge/fs_engine.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace vohedge {

namespace {

// (e^x - 1)/x with a series fallback near zero.
Complex phi1(Complex x) {
  if (std::abs(x) < 1e-6) return 1.0 + x * (0.5 + x * (1.0 / 6.0 + x / 24.0));
  return (std::exp(x) - 1.0) / x;
}

void check_support_in_domain(const PiiModel& model, const PayoffMeasure& measure) {
  const auto [lo, hi] = measure.support_interval();
  const DomainStrip strip = model.effective_strip();
  if (!strip.contains_interior(lo) || !strip.contains_interior(hi)) {
    std::ostringstream os;
    os << "payoff support interval [" << lo << ", " << hi
       << "] leaves the model strip (" << strip.lower << ", " << strip.upper
       << ")";
    throw DomainViolation(os.str());
  }
}

double checked_real(Complex v, const char* what) {
  if (std::abs(v.imag()) > 1e-8 * (1.0 + std::abs(v))) {
    std::ostringstream os;
    os << what << " has imaginary residue " << v.imag();
    throw QuadratureFailure(os.str());
  }
  return v.real();
}

// Gauss-Legendre sample points of the model's panel grid, shared by the
// cumulative-curve builders.
struct TimeSamples {
  std::vector<double> s;       // 8 * grid sample times
  std::vector<double> w;       // matching quadrature weights
  std::vector<double> scale;   // driver scaling l_s
  std::vector<double> mdot;    // trend density
  std::vector<double> n1;      // d kappa_s(1) / ds
  std::vector<double> d;       // d rho_s / ds
};

TimeSamples build_time_samples(const PiiModel& model) {
  const int n = model.grid();
  const double T = model.horizon();
  const LevyModel* drv = model.driver();
  const double sl2 = model.sigma_l() * model.sigma_l();
  TimeSamples out;
  out.s.reserve(8 * n);
  out.w.reserve(8 * n);
  for (int k = 0; k < n; ++k) {
    const double a = T * k / n, b = T * (k + 1) / n;
    for (int i = 0; i < 8; ++i) {
      out.s.push_back(0.5 * (a + b) + 0.5 * (b - a) * GaussLegendre8::nodes[i]);
      out.w.push_back(0.5 * (b - a) * GaussLegendre8::weights[i]);
    }
  }
  const std::size_t m = out.s.size();
  out.scale.resize(m);
  out.mdot.resize(m);
  out.n1.resize(m);
  out.d.resize(m);
  for (std::size_t q = 0; q < m; ++q) {
    const double l = model.scaling(out.s[q]);
    out.scale[q] = l;
    out.mdot[q] = model.trend_density(out.s[q]);
    double k1 = 0.0, k2 = 0.0;
    if (drv && l > 0.0) {
      k1 = drv->cumulant(Complex(l, 0)).real();
      k2 = drv->cumulant(Complex(2.0 * l, 0)).real();
    }
    out.n1[q] = out.mdot[q] + 0.5 * sl2 + k1;
    out.d[q] = sl2 + k2 - 2.0 * k1;
  }
  return out;
}

// instantaneous d kappa_t(x)/dt for inhomogeneous kinds
inline Complex n_of(const LevyModel& drv, double sl2, double mdot, double l,
                    Complex x) {
  Complex v = x * mdot + 0.5 * x * x * sl2;
  if (l > 0.0) v += drv.cumulant(x * l);
  return v;
}

// cumulative eta(z, [0, t]) for one z, sampled on the panel boundaries
UniformCurve<Complex> eta_curve(const PiiModel& model, const TimeSamples& ts,
                                Complex z) {
  const int n = model.grid();
  const LevyModel& drv = *model.driver();
  const double sl2 = model.sigma_l() * model.sigma_l();
  std::vector<Complex> nodes(static_cast<std::size_t>(n) + 1, Complex(0, 0));
  Complex acc(0, 0);
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < 8; ++i) {
      const std::size_t q = static_cast<std::size_t>(8 * k + i);
      const Complex nz = n_of(drv, sl2, ts.mdot[q], ts.scale[q], z);
      const Complex nz1 = n_of(drv, sl2, ts.mdot[q], ts.scale[q], z + 1.0);
      const Complex g = (nz1 - nz - ts.n1[q]) / ts.d[q];
      acc += ts.w[q] * (nz - g * ts.n1[q]);
    }
    nodes[static_cast<std::size_t>(k) + 1] = acc;
  }
  return UniformCurve<Complex>(model.horizon(), std::move(nodes));
}

// cumulative kappa_t(x) for one x, sampled on the panel boundaries
UniformCurve<Complex> kappa_curve(const PiiModel& model, const TimeSamples& ts,
                                  Complex x) {
  const int n = model.grid();
  const LevyModel& drv = *model.driver();
  const double sl2 = model.sigma_l() * model.sigma_l();
  std::vector<Complex> nodes(static_cast<std::size_t>(n) + 1, Complex(0, 0));
  Complex acc(0, 0);
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < 8; ++i) {
      const std::size_t q = static_cast<std::size_t>(8 * k + i);
      acc += ts.w[q] * n_of(drv, sl2, ts.mdot[q], ts.scale[q], x);
    }
    nodes[static_cast<std::size_t>(k) + 1] = acc;
  }
  return UniformCurve<Complex>(model.horizon(), std::move(nodes));
}

}  // namespace

FsCoefficients::FsCoefficients(std::shared_ptr<const PiiModel> model, double s0)
    : model_(std::move(model)), s0_(s0) {
  if (!model_) throw InvalidArgument("null model");
  if (!(s0_ > 0.0)) throw InvalidArgument("s0 must be > 0");
  const ValidationReport rep = model_->validate();
  if (!rep.pass) {
    std::string what = "model validation failed:";
    for (const auto& f : rep.failures) what += " " + f;
    throw DegenerateModel(what);
  }
  const PiiKind kind = model_->kind();
  k_closed_form_ = kind == PiiKind::levy_homogeneous ||
                   kind == PiiKind::time_changed_brownian;
  if (!k_closed_form_) {
    const TimeSamples ts = build_time_samples(*model_);
    const int n = model_->grid();
    std::vector<double> nodes(static_cast<std::size_t>(n) + 1, 0.0);
    double acc = 0.0;
    for (int k = 0; k < n; ++k) {
      for (int i = 0; i < 8; ++i) {
        const std::size_t q = static_cast<std::size_t>(8 * k + i);
        const double lam = ts.n1[q] / ts.d[q];
        acc += ts.w[q] * lam * lam * ts.d[q];
      }
      nodes[static_cast<std::size_t>(k) + 1] = acc;
    }
    k_curve_ = UniformCurve<double>(model_->horizon(), std::move(nodes));
  }
}

Complex FsCoefficients::gamma(Complex z, double t) const {
  if (z == Complex(1.0, 0.0)) return Complex(1.0, 0.0);
  if (z == Complex(0.0, 0.0)) return Complex(0.0, 0.0);
  if (model_->kind() == PiiKind::time_changed_brownian) return z;
  const auto d = model_->densities(t > 0.0 ? t : model_->horizon() * 1e-9);
  return d.dkappaz_drho(z + 1.0) - d.dkappaz_drho(z) -
         d.dkappaz_drho(Complex(1.0, 0.0));
}

Complex FsCoefficients::eta_density(Complex z, double t) const {
  if (z == Complex(1.0, 0.0) || z == Complex(0.0, 0.0)) return Complex(0.0, 0.0);
  const auto d = model_->densities(t > 0.0 ? t : model_->horizon() * 1e-9);
  const Complex one(1.0, 0.0);
  const Complex g =
      d.dkappaz_drho(z + 1.0) - d.dkappaz_drho(z) - d.dkappaz_drho(one);
  return (d.dkappaz_drho(z) - g * d.dkappa1_drho) * d.drho_dt;
}

Complex FsCoefficients::eta_integral(Complex z, double t1, double t2) const {
  if (z == Complex(1.0, 0.0) || z == Complex(0.0, 0.0)) return Complex(0.0, 0.0);
  switch (model_->kind()) {
    case PiiKind::levy_homogeneous: {
      const LevyModel& drv = *model_->driver();
      const Complex k1 = drv.cumulant(Complex(1, 0));
      const Complex k2 = drv.cumulant(Complex(2, 0));
      const Complex g =
          (drv.cumulant(z + 1.0) - drv.cumulant(z) - k1) / (k2 - 2.0 * k1);
      return (t2 - t1) * (drv.cumulant(z) - k1 * g);
    }
    case PiiKind::time_changed_brownian:
      return 0.5 * (model_->psi(t2) - model_->psi(t1)) * (z * z - z);
    default: {
      // inline eta density against the driver, avoiding per-sample closures
      const LevyModel& drv = *model_->driver();
      const double sl2 = model_->sigma_l() * model_->sigma_l();
      return model_->integrate_time_c(
          [&](double s) {
            const double l = model_->scaling(s);
            const double mdot = model_->trend_density(s);
            const double kl1 =
                l > 0 ? drv.cumulant(Complex(l, 0)).real() : 0.0;
            const double kl2 =
                l > 0 ? drv.cumulant(Complex(2.0 * l, 0)).real() : 0.0;
            const double n1 = mdot + 0.5 * sl2 + kl1;
            const double d = sl2 + kl2 - 2.0 * kl1;
            Complex nz = z * mdot + 0.5 * z * z * sl2;
            Complex nz1 = (z + 1.0) * mdot + 0.5 * (z + 1.0) * (z + 1.0) * sl2;
            if (l > 0.0) {
              nz += drv.cumulant(z * l);
              nz1 += drv.cumulant((z + 1.0) * l);
            }
            const Complex g = (nz1 - nz - n1) / d;
            return nz - g * n1;
          },
          t1, t2);
    }
  }
}

double FsCoefficients::lambda(double t) const {
  if (model_->kind() == PiiKind::time_changed_brownian) return 0.5;
  return model_->densities(t > 0.0 ? t : model_->horizon() * 1e-9).dkappa1_drho;
}

double FsCoefficients::mvt_K(double t) const {
  if (t <= 0.0) return 0.0;
  switch (model_->kind()) {
    case PiiKind::levy_homogeneous: {
      const LevyModel& drv = *model_->driver();
      const double k1 = drv.cumulant(Complex(1, 0)).real();
      const double k2 = drv.cumulant(Complex(2, 0)).real();
      return k1 * k1 * t / (k2 - 2.0 * k1);
    }
    case PiiKind::time_changed_brownian:
      return 0.25 * model_->psi(t);
    default:
      return k_curve_(t);
  }
}

Complex FsCoefficients::beta_density(Complex y, Complex z, double t) const {
  const auto d = model_->densities(t > 0.0 ? t : model_->horizon() * 1e-9);
  const Complex one(1.0, 0.0);
  // all densities against time: n(x) = d kappa_t(x) / dt
  auto n = [&d](Complex x) { return d.dkappaz_drho(x) * d.drho_dt; };
  const Complex n1 = n(one);
  const Complex gamma_z = (n(z + 1.0) - n(z) - n1) / d.drho_dt;
  return (n(y + z) - n(y) - n(z)) - gamma_z * (n(y + 1.0) - n(y) - n1);
}

double price_process(const FsCoefficients& coeffs, const PayoffMeasure& measure,
                     double t, double spot, const QuadratureSettings& qs) {
  if (!(spot > 0.0)) throw InvalidArgument("spot must be > 0");
  const double T = coeffs.horizon();
  if (t < 0.0 || t > T * (1.0 + 1e-12)) throw InvalidArgument("time outside [0, T]");
  check_support_in_domain(coeffs.model(), measure);
  if (t >= T * (1.0 - 1e-12)) return measure.reconstruct(spot, qs);
  const double x = std::log(spot);
  const Complex v = measure.integrate(
      [&](Complex z) { return std::exp(coeffs.eta_integral(z, t, T) + z * x); },
      qs, /*conj_symmetric=*/true);
  return checked_real(v, "price process");
}

double pure_hedge(const FsCoefficients& coeffs, const PayoffMeasure& measure,
                  double t, double spot_pre, const QuadratureSettings& qs) {
  if (!(spot_pre > 0.0)) throw InvalidArgument("spot must be > 0");
  const double T = coeffs.horizon();
  if (t < 0.0 || t >= T) throw InvalidArgument("hedge requires t in [0, T)");
  check_support_in_domain(coeffs.model(), measure);
  const double x = std::log(spot_pre);
  const Complex v = measure.integrate(
      [&](Complex z) {
        return coeffs.gamma(z, t) *
               std::exp(coeffs.eta_integral(z, t, T) + (z - 1.0) * x);
      },
      qs, /*conj_symmetric=*/true);
  return checked_real(v, "pure hedge");
}

namespace {

struct LineNodes {
  double abscissa;
  Complex line_weight;  // measure weight times i (from dz = i du)
  std::vector<double> u;
  std::vector<double> w;  // Simpson weights (h/3 * coefficient)
};

LineNodes build_line_nodes(const ContourLine& line, double u_max,
                           int log2_panels) {
  LineNodes out;
  out.abscissa = line.abscissa;
  out.line_weight = line.weight * Complex(0.0, 1.0);
  const std::size_t n = std::size_t{1} << log2_panels;
  const double h = 2.0 * u_max / static_cast<double>(n);
  out.u.resize(n + 1);
  out.w.resize(n + 1);
  for (std::size_t j = 0; j <= n; ++j) {
    out.u[j] = -u_max + h * static_cast<double>(j);
    const double c = (j == 0 || j == n) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
    out.w[j] = c * h / 3.0;
  }
  return out;
}

// J0 for homogeneous Levy models: the time integral has a closed form, so a
// (y, z) pair costs O(1).
double j0_levy(const FsCoefficients& coeffs, const PayoffMeasure& measure,
               const QuadratureSettings& qs, int threads, int log2_panels,
               Complex* imag_probe) {
  const LevyModel& drv = *coeffs.model().driver();
  const double T = coeffs.horizon();
  const double log_s0 = std::log(coeffs.s0());
  const Complex k1 = drv.cumulant(Complex(1, 0));
  const Complex k2 = drv.cumulant(Complex(2, 0));
  const double denom = (k2 - 2.0 * k1).real();
  const double k_dot = (k1 * k1).real() / denom;

  struct NodeData {
    std::vector<Complex> z, kappa, eta, rho1, kw;
  };
  std::vector<NodeData> data;
  for (const auto& a : measure.atoms()) {
    NodeData nd;
    nd.z = {a.z};
    nd.kw = {a.weight};
    data.push_back(std::move(nd));
  }
  for (const auto& contour : measure.contours()) {
    NodeData nd;
    const LineNodes line = build_line_nodes(contour, qs.u_max, log2_panels);
    const std::size_t n = line.u.size();
    nd.z.resize(n);
    nd.kw.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      nd.z[j] = Complex(line.abscissa, line.u[j]);
      nd.kw[j] = contour.kernel(nd.z[j]) * line.w[j] * line.line_weight;
    }
    data.push_back(std::move(nd));
  }
  for (auto& nd : data) {
    const std::size_t n = nd.z.size();
    nd.kappa.resize(n);
    nd.eta.resize(n);
    nd.rho1.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      const Complex z = nd.z[j];
      nd.kappa[j] = drv.cumulant(z);
      nd.rho1[j] = drv.cumulant(z + 1.0) - nd.kappa[j] - k1;
      nd.eta[j] = nd.kappa[j] - k1 * (nd.rho1[j] / denom);
    }
  }

  Complex total(0, 0);
  for (const auto& A : data) {    // y axis
    for (const auto& B : data) {  // z axis
      std::vector<Complex> rows(B.z.size(), Complex(0, 0));
      parallel_for(B.z.size(), threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t k = lo; k < hi; ++k) {
          const Complex z = B.z[k];
          const Complex gz = B.rho1[k] / denom;
          const Complex ez = B.eta[k];
          Complex acc(0, 0);
          for (std::size_t j = 0; j < A.z.size(); ++j) {
            const Complex yz = A.z[j] + z;
            const Complex a = drv.cumulant(yz);
            const Complex beta = (a - A.kappa[j] - B.kappa[k]) - gz * A.rho1[j];
            const Complex c = A.eta[j] + ez - k_dot;
            // (e^{aT} - e^{cT})/(a - c): both exponents have bounded real
            // parts above, so the difference form cannot overflow
            const Complex d = (a - c) * T;
            const Complex time_integral =
                std::abs(d) < 1e-6
                    ? T * std::exp(c * T) * phi1(d)
                    : (std::exp(a * T) - std::exp(c * T)) / (a - c);
            acc += A.kw[j] * (std::exp(yz * log_s0) * beta * time_integral);
          }
          rows[k] = acc * B.kw[k];
        }
      });
      total += pairwise_sum(rows);
    }
  }
  if (imag_probe) *imag_probe = total;
  return total.real();
}

// J0 for the Wiener-integral and electricity kinds: per-pair time quadrature
// against cached eta / kappa cumulative curves.
double j0_inhomogeneous(const FsCoefficients& coeffs, const PayoffMeasure& measure,
                        const QuadratureSettings& qs, const J0Settings& j0s,
                        int threads, int log2_panels, Complex* imag_probe) {
  const PiiModel& model = coeffs.model();
  const LevyModel& drv = *model.driver();
  const double T = model.horizon();
  const double log_s0 = std::log(coeffs.s0());
  const double sl2 = model.sigma_l() * model.sigma_l();

  if (measure.contours().size() != 1 || !measure.atoms().empty())
    throw InvalidArgument(
        "quadratic error for time-inhomogeneous kinds supports "
        "single-contour measures");
  const ContourLine& contour = measure.contours()[0];
  const LineNodes line = build_line_nodes(contour, qs.u_max, log2_panels);
  const std::size_t n_nodes = line.u.size();
  const double R = line.abscissa;

  const TimeSamples ts = build_time_samples(model);

  // outer time quadrature nodes
  const int tp = j0s.time_panels;
  std::vector<double> t_nodes, t_weights;
  for (int p = 0; p < tp; ++p) {
    const double a = T * p / tp, b = T * (p + 1) / tp;
    for (int i = 0; i < 8; ++i) {
      t_nodes.push_back(0.5 * (a + b) + 0.5 * (b - a) * GaussLegendre8::nodes[i]);
      t_weights.push_back(0.5 * (b - a) * GaussLegendre8::weights[i]);
    }
  }
  const std::size_t nt = t_nodes.size();

  std::vector<double> scale_t(nt), mdot_t(nt), n1_t(nt), d_t(nt), k_tail(nt);
  for (std::size_t i = 0; i < nt; ++i) {
    const double t = t_nodes[i];
    scale_t[i] = model.scaling(t);
    mdot_t[i] = model.trend_density(t);
    const double l = scale_t[i];
    const double kl1 = l > 0 ? drv.cumulant(Complex(l, 0)).real() : 0.0;
    const double kl2 = l > 0 ? drv.cumulant(Complex(2.0 * l, 0)).real() : 0.0;
    n1_t[i] = mdot_t[i] + 0.5 * sl2 + kl1;
    d_t[i] = sl2 + kl2 - 2.0 * kl1;
    k_tail[i] = coeffs.mvt_K(T) - coeffs.mvt_K(t);
  }

  // per-node caches
  std::vector<std::vector<Complex>> nz(n_nodes), nz1(n_nodes), eta_tail(n_nodes);
  std::vector<Complex> kernel_w(n_nodes);
  parallel_for(n_nodes, threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t j = lo; j < hi; ++j) {
      const Complex z(R, line.u[j]);
      kernel_w[j] = contour.kernel(z) * line.w[j] * line.line_weight;
      const UniformCurve<Complex> ec = eta_curve(model, ts, z);
      const Complex eta_T = ec(T);
      nz[j].resize(nt);
      nz1[j].resize(nt);
      eta_tail[j].resize(nt);
      for (std::size_t i = 0; i < nt; ++i) {
        nz[j][i] = n_of(drv, sl2, mdot_t[i], scale_t[i], z);
        nz1[j][i] = n_of(drv, sl2, mdot_t[i], scale_t[i], z + 1.0);
        eta_tail[j][i] = eta_T - ec(t_nodes[i]);
      }
    }
  });

  // y + z lattice
  const double h = line.u[1] - line.u[0];
  const std::size_t lat_n = 2 * (n_nodes - 1) + 1;
  std::vector<std::vector<Complex>> n_sum(lat_n), kappa_sum(lat_n);
  std::vector<Complex> s0_pow(lat_n);
  parallel_for(lat_n, threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t m = lo; m < hi; ++m) {
      const Complex w(2.0 * R, -2.0 * qs.u_max + h * static_cast<double>(m));
      s0_pow[m] = std::exp(w * log_s0);
      const UniformCurve<Complex> kc = kappa_curve(model, ts, w);
      n_sum[m].resize(nt);
      kappa_sum[m].resize(nt);
      for (std::size_t i = 0; i < nt; ++i) {
        n_sum[m][i] = n_of(drv, sl2, mdot_t[i], scale_t[i], w);
        kappa_sum[m][i] = kc(t_nodes[i]);
      }
    }
  });

  // fold the z axis over v >= 0
  const std::size_t mid = (n_nodes - 1) / 2;
  std::vector<Complex> row(n_nodes - mid, Complex(0, 0));
  parallel_for(n_nodes - mid, threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t kk = lo; kk < hi; ++kk) {
      const std::size_t k = mid + kk;
      Complex acc(0, 0);
      for (std::size_t j = 0; j < n_nodes; ++j) {
        const std::size_t m = j + k;
        Complex ti(0, 0);
        for (std::size_t i = 0; i < nt; ++i) {
          const double n1c = n1_t[i];
          const Complex gz = (nz1[k][i] - nz[k][i] - n1c) / d_t[i];
          const Complex beta = (n_sum[m][i] - nz[j][i] - nz[k][i]) -
                               gz * (nz1[j][i] - nz[j][i] - n1c);
          const Complex expo =
              kappa_sum[m][i] + eta_tail[j][i] + eta_tail[k][i] - k_tail[i];
          ti += t_weights[i] * beta * std::exp(expo);
        }
        acc += kernel_w[j] * s0_pow[m] * ti;
      }
      row[kk] = acc * kernel_w[k];
    }
  });
  const Complex v0_row = row[0];
  const Complex half =
      pairwise_sum(std::span<const Complex>(row).subspan(1));
  const Complex total = v0_row + half + std::conj(half);
  if (imag_probe) *imag_probe = total;
  return total.real();
}

}  // namespace

double quadratic_error(const FsCoefficients& coeffs, const PayoffMeasure& measure,
                       const QuadratureSettings& qs, const J0Settings& j0s,
                       int threads) {
  check_support_in_domain(coeffs.model(), measure);
  {
    const auto xs = measure.real_support();
    const double lo = 2.0 * xs.front(), hi = 2.0 * xs.back();
    const DomainStrip strip = coeffs.model().effective_strip();
    if (!strip.contains_interior(lo) || !strip.contains_interior(hi))
      throw DomainViolation("y + z leaves the model strip on supp Pi x supp Pi");
  }

  const PiiKind kind = coeffs.model().kind();
  if (kind == PiiKind::time_changed_brownian) {
    // gamma(z, t) = z makes beta(y, z, dt) = (yz - zy) dpsi vanish identically
    return 0.0;
  }

  const double scale = coeffs.s0() * coeffs.s0();
  auto run = [&](int log2_panels) {
    Complex probe;
    const double v =
        kind == PiiKind::levy_homogeneous
            ? j0_levy(coeffs, measure, qs, threads, log2_panels, &probe)
            : j0_inhomogeneous(coeffs, measure, qs, j0s, threads, log2_panels,
                               &probe);
    if (std::abs(probe.imag()) > 1e-8 * (std::abs(probe) + 1e-10 * scale))
      throw QuadratureFailure("quadratic error has an imaginary residue");
    return v;
  };
  const double coarse = run(j0s.log2_panels);
  const double fine = run(j0s.log2_panels + 1);
  if (std::fabs(fine - coarse) >
      j0s.rel_tol * std::max(std::fabs(fine), 1e-9 * scale)) {
    std::ostringstream os;
    os << "quadratic error did not converge under panel doubling (" << coarse
       << " -> " << fine << ")";
    throw QuadratureFailure(os.str());
  }
  if (fine < -1e-10 * scale) {
    std::ostringstream os;
    os << "quadratic error " << fine << " below the negativity tolerance";
    throw QuadratureFailure(os.str());
  }
  return std::max(fine, 0.0);
}

ExponentialHedgeEvaluator::ExponentialHedgeEvaluator(
    const FsCoefficients& coeffs, const PayoffMeasure& measure,
    std::vector<double> dates, const QuadratureSettings& qs, int threads)
    : dates_(std::move(dates)) {
  const double T = coeffs.horizon();
  for (double t : dates_)
    if (t < 0.0 || t >= T)
      throw InvalidArgument("hedge evaluator dates must lie in [0, T)");
  check_support_in_domain(coeffs.model(), measure);
  if (measure.contours().size() != 1)
    throw InvalidArgument("hedge evaluator expects a single contour");
  const ContourLine& contour = measure.contours()[0];
  if (!contour.conj_symmetric)
    throw InvalidArgument("hedge evaluator needs a conjugate-symmetric kernel");

  const PiiModel& model = coeffs.model();
  abscissa_ = contour.abscissa;
  const std::size_t half_panels = std::size_t{1} << (qs.log2_panels - 1);
  step_ = qs.u_max / static_cast<double>(half_panels);
  node_count_ = half_panels + 1;

  const std::size_t nd = dates_.size();
  price_w_.assign(nd, std::vector<Complex>(node_count_));
  hedge_w_.assign(nd, std::vector<Complex>(node_count_));
  cutoff_.assign(nd, node_count_);
  atom_terms_.assign(nd, {});
  lambda_.assign(nd, 0.0);
  const Complex line_w = contour.weight * Complex(0.0, 1.0);

  const bool closed_eta = model.kind() == PiiKind::levy_homogeneous ||
                          model.kind() == PiiKind::time_changed_brownian;

  // instantaneous densities at the dates (shared by gamma below)
  std::vector<double> scale_d(nd), mdot_d(nd), n1_d(nd), d_d(nd);
  const LevyModel* drv = model.driver();
  const double sl2 = model.sigma_l() * model.sigma_l();
  if (!closed_eta) {
    for (std::size_t i = 0; i < nd; ++i) {
      const double t = dates_[i];
      scale_d[i] = model.scaling(t);
      mdot_d[i] = model.trend_density(t);
      const double l = scale_d[i];
      const double kl1 = l > 0 ? drv->cumulant(Complex(l, 0)).real() : 0.0;
      const double kl2 = l > 0 ? drv->cumulant(Complex(2.0 * l, 0)).real() : 0.0;
      n1_d[i] = mdot_d[i] + 0.5 * sl2 + kl1;
      d_d[i] = sl2 + kl2 - 2.0 * kl1;
    }
    const TimeSamples ts = build_time_samples(model);
    parallel_for(node_count_, threads, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t j = lo; j < hi; ++j) {
        const Complex z(abscissa_, step_ * static_cast<double>(j));
        const double c =
            (j == 0 || j + 1 == node_count_) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
        const Complex kwj = contour.kernel(z) * (c * step_ / 3.0) * line_w;
        const UniformCurve<Complex> ec = eta_curve(model, ts, z);
        const Complex eta_T = ec(T);
        for (std::size_t i = 0; i < nd; ++i) {
          const Complex base = kwj * std::exp(eta_T - ec(dates_[i]));
          const Complex nz = n_of(*drv, sl2, mdot_d[i], scale_d[i], z);
          const Complex nz1 = n_of(*drv, sl2, mdot_d[i], scale_d[i], z + 1.0);
          const Complex g = (nz1 - nz - n1_d[i]) / d_d[i];
          price_w_[i][j] = base;
          hedge_w_[i][j] = g * base;
        }
      }
    });
  } else {
    parallel_for(node_count_, threads, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t j = lo; j < hi; ++j) {
        const Complex z(abscissa_, step_ * static_cast<double>(j));
        const double c =
            (j == 0 || j + 1 == node_count_) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
        const Complex kwj = contour.kernel(z) * (c * step_ / 3.0) * line_w;
        for (std::size_t i = 0; i < nd; ++i) {
          const Complex base =
              kwj * std::exp(coeffs.eta_integral(z, dates_[i], T));
          price_w_[i][j] = base;
          hedge_w_[i][j] = coeffs.gamma(z, dates_[i]) * base;
        }
      }
    });
  }

  for (std::size_t i = 0; i < nd; ++i) {
    lambda_[i] = coeffs.lambda(dates_[i]);
    double peak = 0.0;
    for (const auto& v : price_w_[i]) peak = std::max(peak, std::abs(v));
    std::size_t cut = node_count_;
    while (cut > 8 && std::abs(price_w_[i][cut - 1]) < 1e-16 * peak &&
           std::abs(hedge_w_[i][cut - 1]) < 1e-16 * peak)
      --cut;
    cutoff_[i] = cut;
    for (const auto& atom : measure.atoms()) {
      const Complex w =
          atom.weight * std::exp(coeffs.eta_integral(atom.z, dates_[i], T));
      atom_terms_[i].push_back({atom.z, w, coeffs.gamma(atom.z, dates_[i]) * w});
    }
  }
}

ExponentialHedgeEvaluator::Value ExponentialHedgeEvaluator::value_and_hedge(
    std::size_t date_index, double spot) const {
  const double x = std::log(spot);
  const auto& pw = price_w_[date_index];
  const auto& hw = hedge_w_[date_index];
  const std::size_t cut = cutoff_[date_index];

  const Complex stepper = std::exp(Complex(0.0, step_ * x));
  Complex e(std::exp(abscissa_ * x), 0.0);
  Complex price_acc = pw[0] * e;
  Complex hedge_acc = hw[0] * e;
  for (std::size_t j = 1; j < cut; ++j) {
    if ((j & 511) == 0)
      e = std::exp(Complex(abscissa_ * x, step_ * static_cast<double>(j) * x));
    else
      e *= stepper;
    price_acc += pw[j] * e;
    hedge_acc += hw[j] * e;
  }
  double price = 2.0 * price_acc.real();
  double hedge = 2.0 * hedge_acc.real() / spot;
  for (const auto& atom : atom_terms_[date_index]) {
    const Complex sz = std::exp(atom.z * x);
    price += (atom.price_w * sz).real();
    hedge += (atom.hedge_w * sz).real() / spot;
  }
  return {price, hedge};
}

}  // namespace vohedge
