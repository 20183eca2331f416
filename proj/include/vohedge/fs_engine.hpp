#pragma once

#include <memory>
#include <vector>

#include "vohedge/payoff.hpp"
#include "vohedge/pii_models.hpp"

namespace vohedge {

// Foellmer-Schweizer coefficients of the exponential engine: gamma(z, t),
// eta(z, dt), the structure-condition density lambda(t) and the mean-variance
// tradeoff process K(t). Immutable after construction; evaluations are pure.
class FsCoefficients {
 public:
  FsCoefficients(std::shared_ptr<const PiiModel> model, double s0);

  const PiiModel& model() const noexcept { return *model_; }
  std::shared_ptr<const PiiModel> model_ptr() const noexcept { return model_; }
  double s0() const noexcept { return s0_; }
  double horizon() const noexcept { return model_->horizon(); }

  Complex gamma(Complex z, double t) const;
  // density of eta(z, dt) against Lebesgue time
  Complex eta_density(Complex z, double t) const;
  Complex eta_integral(Complex z, double t1, double t2) const;
  double lambda(double t) const;
  double mvt_K(double t) const;

  // density of beta(y, z, dt) against Lebesgue time
  Complex beta_density(Complex y, Complex z, double t) const;

 private:
  std::shared_ptr<const PiiModel> model_;
  double s0_ = 0.0;
  UniformCurve<double> k_curve_;  // cumulative K on the model grid
  bool k_closed_form_ = false;
};

// Variance-optimal price process H_t(s); at t = T this is the payoff itself.
double price_process(const FsCoefficients& coeffs, const PayoffMeasure& measure,
                     double t, double spot, const QuadratureSettings& qs);

// Pure hedge xi_t(s) of the FS decomposition.
double pure_hedge(const FsCoefficients& coeffs, const PayoffMeasure& measure,
                  double t, double spot_pre, const QuadratureSettings& qs);

struct J0Settings {
  int log2_panels = 11;   // per-axis Simpson panels for the double integral
  double rel_tol = 1e-6;  // doubling self-check
  int time_panels = 16;   // composite GL panels for the inner time integral
};

// Closed-form variance of the residual hedging error, the double contour
// integral of J0(y, z) against Pi x Pi. Nonnegative; tiny negative quadrature
// noise is clamped to zero.
double quadratic_error(const FsCoefficients& coeffs, const PayoffMeasure& measure,
                       const QuadratureSettings& qs,
                       const J0Settings& j0 = J0Settings{}, int threads = 1);

// Precomputed per-date node weights for fast repeated evaluation of the price
// and pure hedge along simulated paths. Dates must lie in [0, T).
class ExponentialHedgeEvaluator {
 public:
  ExponentialHedgeEvaluator(const FsCoefficients& coeffs,
                            const PayoffMeasure& measure,
                            std::vector<double> dates,
                            const QuadratureSettings& qs, int threads = 1);

  struct Value {
    double price;
    double hedge;
  };
  Value value_and_hedge(std::size_t date_index, double spot) const;
  double lambda(std::size_t date_index) const {
    return lambda_[date_index];
  }
  std::size_t date_count() const noexcept { return dates_.size(); }

 private:
  std::vector<double> dates_;
  double abscissa_ = 0.0;
  double step_ = 0.0;
  std::size_t node_count_ = 0;
  // per date: price weights P and hedge weights Q on the half-line nodes
  std::vector<std::vector<Complex>> price_w_;
  std::vector<std::vector<Complex>> hedge_w_;
  std::vector<std::size_t> cutoff_;
  struct AtomTerm {
    Complex z;
    Complex price_w;
    Complex hedge_w;
  };
  std::vector<std::vector<AtomTerm>> atom_terms_;
  std::vector<double> lambda_;
};

}  // namespace vohedge
