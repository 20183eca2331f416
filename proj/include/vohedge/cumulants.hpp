#pragma once

#include <complex>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "vohedge/errors.hpp"

namespace vohedge {

using Complex = std::complex<double>;

enum class LevyKind { poisson, nig, vg, brownian_drift };

// Real strip I such that the cumulant domain is D = I + i*R.
struct DomainStrip {
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();

  // Strict interior with a margin that keeps evaluations away from the
  // branch-point endpoints.
  bool contains_interior(double x, double margin = 1e-9) const noexcept {
    return x > lower + margin && x < upper - margin;
  }
  bool contains(double x) const noexcept { return x >= lower && x <= upper; }
};

struct PoissonParams {
  double intensity;  // lambda_p > 0
};
struct NigParams {
  double alpha, beta, delta, mu;
};
struct VgParams {
  double alpha, beta, delta, mu;
};
struct BrownianDriftParams {
  double sigma;  // >= 0
  double drift;
};

// A Levy driver described by its cumulant function kappa(z) = log E[e^{z X_1}]
// on the strip D. Immutable value type; all evaluations are pure.
class LevyModel {
 public:
  using Params =
      std::variant<PoissonParams, NigParams, VgParams, BrownianDriftParams>;

  explicit LevyModel(Params params);

  static LevyModel poisson(double intensity) {
    return LevyModel(PoissonParams{intensity});
  }
  static LevyModel nig(double alpha, double beta, double delta, double mu) {
    return LevyModel(NigParams{alpha, beta, delta, mu});
  }
  static LevyModel vg(double alpha, double beta, double delta, double mu) {
    return LevyModel(VgParams{alpha, beta, delta, mu});
  }
  static LevyModel brownian_drift(double sigma, double drift) {
    return LevyModel(BrownianDriftParams{sigma, drift});
  }

  LevyKind kind() const noexcept;
  const Params& params() const noexcept { return params_; }
  DomainStrip domain() const noexcept { return strip_; }
  std::string describe() const;

  // kappa(z); requires Re(z) strictly inside the strip.
  Complex cumulant(Complex z) const;
  // d kappa / dz at complex z, same domain requirement.
  Complex cumulant_prime(Complex z) const;

  // (kappa', kappa'', kappa''', kappa'''') at zero, truncated to `order`
  // entries (order in 1..4).
  std::vector<double> derivatives_at_zero(int order) const;

  // True when the process has deterministic increments (zero variance).
  bool is_deterministic() const noexcept;

  template <typename T>
  const T* get_if() const noexcept {
    return std::get_if<T>(&params_);
  }

 private:
  void check_real_part(double re) const;

  Params params_;
  DomainStrip strip_;
};

// NIG with alpha scaled by `alpha_scale` and (beta, delta, mu) adjusted so the
// first three cumulants at zero are unchanged. Damped-Newton root find in
// (beta', delta'); throws NoSolution if the iteration fails to converge.
LevyModel reparametrize_moment_matched(const LevyModel& model, double alpha_scale);

struct ExponentialAssumptionReport {
  double scale = 1.0;
  bool two_scale_in_domain = false;
  double excess = std::numeric_limits<double>::quiet_NaN();  // k(2s) - 2k(s)
  bool excess_positive = false;
  bool nig_criterion_checked = false;
  bool nig_criterion_ok = false;  // scale <= (alpha - beta) / 2
  bool valid = false;
  std::string detail;
};

// Checks the hypotheses needed by the exponential engine for a driver scaled
// by `scale` (2*scale in the domain, positive variance proxy, and the NIG
// closed-form criterion when applicable). Reports, never throws.
ExponentialAssumptionReport validate_exponential_assumptions(
    const LevyModel& model, double scale);

}  // namespace vohedge
