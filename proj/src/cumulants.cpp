#include "vohedge/cumulants.hpp"

#include <cmath>
#include <sstream>

#include "vohedge/numerics.hpp"

namespace vohedge {

namespace {

DomainStrip strip_for(const LevyModel::Params& p) {
  return std::visit(
      [](const auto& v) -> DomainStrip {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, PoissonParams> ||
                      std::is_same_v<T, BrownianDriftParams>) {
          return DomainStrip{};
        } else if constexpr (std::is_same_v<T, NigParams>) {
          return DomainStrip{-v.alpha - v.beta, v.alpha - v.beta};
        } else {
          const double root = std::sqrt(v.beta * v.beta + 2.0 * v.alpha);
          return DomainStrip{-v.beta - root, -v.beta + root};
        }
      },
      p);
}

void validate(const LevyModel::Params& p) {
  std::visit(
      [](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, PoissonParams>) {
          if (!(v.intensity > 0.0))
            throw InvalidArgument("Poisson intensity must be > 0");
        } else if constexpr (std::is_same_v<T, NigParams>) {
          const bool ok = (v.alpha > std::fabs(v.beta) && v.beta != 0.0) ||
                          (v.alpha > 0.0 && v.beta == 0.0);
          if (!ok) throw InvalidArgument("NIG requires alpha > |beta| (or beta = 0, alpha > 0)");
          if (!(v.delta > 0.0)) throw InvalidArgument("NIG requires delta > 0");
        } else if constexpr (std::is_same_v<T, VgParams>) {
          if (!(v.alpha > 0.0)) throw InvalidArgument("VG requires alpha > 0");
          if (v.delta == 0.0) throw InvalidArgument("VG requires delta != 0");
        } else {
          if (!(v.sigma >= 0.0))
            throw InvalidArgument("Brownian sigma must be >= 0");
        }
      },
      p);
}

}  // namespace

LevyModel::LevyModel(Params params) : params_(std::move(params)) {
  validate(params_);
  strip_ = strip_for(params_);
}

LevyKind LevyModel::kind() const noexcept {
  switch (params_.index()) {
    case 0: return LevyKind::poisson;
    case 1: return LevyKind::nig;
    case 2: return LevyKind::vg;
    default: return LevyKind::brownian_drift;
  }
}

std::string LevyModel::describe() const {
  std::ostringstream os;
  std::visit(
      [&os](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, PoissonParams>) {
          os << "Poisson(lambda_p=" << v.intensity << ")";
        } else if constexpr (std::is_same_v<T, NigParams>) {
          os << "NIG(alpha=" << v.alpha << ", beta=" << v.beta
             << ", delta=" << v.delta << ", mu=" << v.mu << ")";
        } else if constexpr (std::is_same_v<T, VgParams>) {
          os << "VG(alpha=" << v.alpha << ", beta=" << v.beta
             << ", delta=" << v.delta << ", mu=" << v.mu << ")";
        } else {
          os << "BrownianDrift(sigma=" << v.sigma << ", m=" << v.drift << ")";
        }
      },
      params_);
  return os.str();
}

void LevyModel::check_real_part(double re) const {
  if (re == 0.0) return;  // kappa(0) = 0 must always be evaluable
  if (!strip_.contains_interior(re)) {
    std::ostringstream os;
    os << "Re(z) = " << re << " outside the cumulant strip (" << strip_.lower
       << ", " << strip_.upper << ") of " << describe();
    throw DomainViolation(os.str());
  }
}

Complex LevyModel::cumulant(Complex z) const {
  check_real_part(z.real());
  return std::visit(
      [z](const auto& v) -> Complex {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, PoissonParams>) {
          return v.intensity * (std::exp(z) - 1.0);
        } else if constexpr (std::is_same_v<T, NigParams>) {
          // gamma0 - gamma_z written as z(2 beta + z)/(gamma0 + gamma_z), which
          // avoids the cancellation of the direct difference near z = 0.
          const Complex w = v.beta + z;
          const double gamma0 = std::sqrt(v.alpha * v.alpha - v.beta * v.beta);
          const Complex gz = std::sqrt(v.alpha * v.alpha - w * w);
          return v.mu * z + v.delta * z * (2.0 * v.beta + z) / (gamma0 + gz);
        } else if constexpr (std::is_same_v<T, VgParams>) {
          const Complex q = v.alpha - v.beta * z - 0.5 * z * z;
          // Inside the strip the log argument keeps a positive real part, so
          // the principal branch never crosses its cut.
          if (!(q.real() > 0.0))
            throw InternalError("VG log argument left the principal branch");
          return v.mu * z + v.delta * std::log(v.alpha / q);
        } else {
          return v.drift * z + 0.5 * v.sigma * v.sigma * z * z;
        }
      },
      params_);
}

Complex LevyModel::cumulant_prime(Complex z) const {
  check_real_part(z.real());
  return std::visit(
      [z](const auto& v) -> Complex {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, PoissonParams>) {
          return v.intensity * std::exp(z);
        } else if constexpr (std::is_same_v<T, NigParams>) {
          const Complex w = v.beta + z;
          const Complex gz = std::sqrt(v.alpha * v.alpha - w * w);
          return v.mu + v.delta * w / gz;
        } else if constexpr (std::is_same_v<T, VgParams>) {
          const Complex q = v.alpha - v.beta * z - 0.5 * z * z;
          if (!(q.real() > 0.0))
            throw InternalError("VG log argument left the principal branch");
          return v.mu + v.delta * (v.beta + z) / q;
        } else {
          return v.drift + v.sigma * v.sigma * z;
        }
      },
      params_);
}

std::vector<double> LevyModel::derivatives_at_zero(int order) const {
  if (order < 1 || order > 4)
    throw InvalidArgument("cumulant derivative order must be in 1..4");
  if (!strip_.contains_interior(0.0, 0.0))
    throw DomainViolation("0 is not interior to the cumulant domain");
  std::vector<double> d(4, 0.0);
  std::visit(
      [&d](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, PoissonParams>) {
          d = {v.intensity, v.intensity, v.intensity, v.intensity};
        } else if constexpr (std::is_same_v<T, NigParams>) {
          const double a2 = v.alpha * v.alpha;
          const double g0 = std::sqrt(a2 - v.beta * v.beta);
          const double g3 = g0 * g0 * g0;
          const double g5 = g3 * g0 * g0;
          const double g7 = g5 * g0 * g0;
          d[0] = v.mu + v.delta * v.beta / g0;
          d[1] = v.delta * a2 / g3;
          d[2] = 3.0 * v.delta * a2 * v.beta / g5;
          d[3] = 3.0 * v.delta * a2 * (a2 + 4.0 * v.beta * v.beta) / g7;
        } else if constexpr (std::is_same_v<T, VgParams>) {
          // q(z) = alpha - beta z - z^2/2; kappa' = mu + delta (beta+z)/q.
          const double a = v.alpha;
          const double b = v.beta;
          d[0] = v.mu + v.delta * b / a;
          d[1] = v.delta * (a + b * b) / (a * a);
          d[2] = v.delta * b * (3.0 * a + 2.0 * b * b) / (a * a * a);
          d[3] = v.delta * (3.0 * a * a + 12.0 * a * b * b + 6.0 * b * b * b * b) /
                 (a * a * a * a);
        } else {
          d[0] = v.drift;
          d[1] = v.sigma * v.sigma;
          d[2] = 0.0;
          d[3] = 0.0;
        }
      },
      params_);
  d.resize(static_cast<std::size_t>(order));
  return d;
}

bool LevyModel::is_deterministic() const noexcept {
  if (const auto* bd = get_if<BrownianDriftParams>()) return bd->sigma == 0.0;
  return false;
}

namespace {

// First three cumulants of a NIG model as functions of (alpha, beta, delta, mu).
struct NigCumulants {
  double c1, c2, c3;
};

NigCumulants nig_cumulants(double alpha, double beta, double delta, double mu) {
  const double a2 = alpha * alpha;
  const double g0 = std::sqrt(a2 - beta * beta);
  const double g3 = g0 * g0 * g0;
  const double g5 = g3 * g0 * g0;
  return {mu + delta * beta / g0, delta * a2 / g3, 3.0 * delta * a2 * beta / g5};
}

}  // namespace

LevyModel reparametrize_moment_matched(const LevyModel& model, double alpha_scale) {
  const auto* nig = model.get_if<NigParams>();
  if (!nig) throw InvalidArgument("moment matching is defined for NIG models only");
  if (!(alpha_scale > 0.0)) throw InvalidArgument("alpha scale C must be > 0");

  const double alpha_new = alpha_scale * nig->alpha;
  const auto target = nig_cumulants(nig->alpha, nig->beta, nig->delta, nig->mu);

  // Damped Newton in (beta', delta') on the variance/third-cumulant equations;
  // the spec's raw initial guess beta/C can land outside (-alpha', alpha'),
  // so it is clamped into the strip.
  double b = nig->beta / alpha_scale;
  const double b_cap = 0.9 * alpha_new;
  if (b > b_cap) b = b_cap;
  if (b < -b_cap) b = -b_cap;
  double dl = nig->delta * alpha_scale;
  if (!(dl > 0.0)) dl = nig->delta;

  const int max_iter = 100;
  bool converged = false;
  for (int it = 0; it < max_iter; ++it) {
    const double a2 = alpha_new * alpha_new;
    const double g2 = a2 - b * b;
    if (!(g2 > 0.0)) throw NoSolution("moment matching left the NIG domain");
    const double g0 = std::sqrt(g2);
    const double g3 = g0 * g2;
    const double g5 = g3 * g2;
    const double f1 = dl * a2 / g3 - target.c2;
    const double f2 = 3.0 * dl * a2 * b / g5 - target.c3;

    if (std::fabs(f1) < 1e-14 * std::max(1.0, std::fabs(target.c2)) &&
        std::fabs(f2) < 1e-14 * std::max(1.0, std::fabs(target.c2))) {
      converged = true;
      break;
    }

    // Jacobian of (c2, c3) w.r.t. (beta, delta).
    const double dc2_db = 3.0 * dl * a2 * b / g5;
    const double dc2_dd = a2 / g3;
    const double dc3_db = 3.0 * dl * a2 * (g2 + 5.0 * b * b) / (g5 * g2);
    const double dc3_dd = 3.0 * a2 * b / g5;
    const double det = dc2_db * dc3_dd - dc2_dd * dc3_db;
    if (det == 0.0) throw NoSolution("singular Jacobian in moment matching");

    double step_b = -(f1 * dc3_dd - f2 * dc2_dd) / det;
    double step_d = -(dc2_db * f2 - dc3_db * f1) / det;

    double damp = 1.0;
    while (damp > 1e-6) {
      const double nb = b + damp * step_b;
      const double nd = dl + damp * step_d;
      if (std::fabs(nb) < alpha_new && nd > 0.0) break;
      damp *= 0.5;
    }
    if (damp <= 1e-6) throw NoSolution("moment matching step could not stay feasible");
    b += damp * step_b;
    dl += damp * step_d;
  }
  if (!converged) {
    // final residual check before giving up
    const auto got = nig_cumulants(alpha_new, b, dl, 0.0);
    if (std::fabs(got.c2 - target.c2) > 1e-10 || std::fabs(got.c3 - target.c3) > 1e-10)
      throw NoSolution("moment matching did not converge in the iteration budget");
  }

  const double g0 = std::sqrt(alpha_new * alpha_new - b * b);
  const double mu_new = target.c1 - dl * b / g0;
  return LevyModel::nig(alpha_new, b, dl, mu_new);
}

ExponentialAssumptionReport validate_exponential_assumptions(
    const LevyModel& model, double scale) {
  ExponentialAssumptionReport rep;
  rep.scale = scale;
  const DomainStrip strip = model.domain();
  rep.two_scale_in_domain = strip.contains_interior(2.0 * scale) &&
                            strip.contains_interior(scale);
  std::ostringstream os;
  if (rep.two_scale_in_domain) {
    const double k2 = model.cumulant(Complex(2.0 * scale, 0.0)).real();
    const double k1 = model.cumulant(Complex(scale, 0.0)).real();
    rep.excess = k2 - 2.0 * k1;
    rep.excess_positive = rep.excess > 0.0;
  } else {
    os << "2*scale = " << 2.0 * scale << " not inside the cumulant strip ("
       << strip.lower << ", " << strip.upper << "); ";
  }
  if (const auto* nig = model.get_if<NigParams>()) {
    rep.nig_criterion_checked = true;
    rep.nig_criterion_ok = scale <= 0.5 * (nig->alpha - nig->beta);
    if (!rep.nig_criterion_ok)
      os << "NIG criterion scale <= (alpha-beta)/2 fails; ";
  }
  rep.valid = rep.two_scale_in_domain && rep.excess_positive &&
              (!rep.nig_criterion_checked || rep.nig_criterion_ok);
  if (!rep.excess_positive && rep.two_scale_in_domain)
    os << "kappa(2s) - 2 kappa(s) = " << rep.excess << " is not positive; ";
  rep.detail = os.str();
  return rep;
}

}  // namespace vohedge
