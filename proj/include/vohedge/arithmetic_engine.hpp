#pragma once

#include <memory>
#include <vector>

#include "vohedge/payoff.hpp"
#include "vohedge/pii_models.hpp"

namespace vohedge {

// Foellmer-Schweizer coefficients when the hedged claim is f(X_T) on the PII
// itself: the hedge density xi(u, t), the drift/variance ratio alpha_t and the
// exponent correction eta(u, t). Immutable; evaluations are pure.
class ArithmeticCoefficients {
 public:
  explicit ArithmeticCoefficients(std::shared_ptr<const PiiModel> model);

  const PiiModel& model() const noexcept { return *model_; }
  std::shared_ptr<const PiiModel> model_ptr() const noexcept { return model_; }
  double horizon() const noexcept { return model_->horizon(); }

  // alpha_t = i dPsi'_t(0) / dPsi''_t(0); real-valued
  double alpha(double t) const;
  // i d(Psi'_t(u) - Psi'_t(0)) / dPsi''_t(0)
  Complex xi_density(double u, double t) const;
  // eta(u, [t1, t2]); eta(0, .) = 0
  Complex eta_integral(double u, double t1, double t2) const;
  // Assumption probe: sup over a u-grid of Re eta(u, [0, T])
  double sup_re_eta(const std::vector<double>& u_grid) const;

 private:
  struct Densities {  // instantaneous time densities at t
    Complex dpsi_u;   // d_t Psi'_t(u)
    Complex dpsi_0;   // d_t Psi'_t(0)
    double d2psi_0;   // d_t Psi''_t(0), negative
  };
  Densities densities_at(double u, double t) const;

  std::shared_ptr<const PiiModel> model_;
};

// H_t evaluated at log-level x; at t = T this is the payoff itself.
double arith_price_process(const ArithmeticCoefficients& coeffs,
                           const FourierMeasure& fourier, double t, double x,
                           const QuadratureSettings& qs);

double arith_pure_hedge(const ArithmeticCoefficients& coeffs,
                        const FourierMeasure& fourier, double t, double x,
                        const QuadratureSettings& qs);

// Fast per-date evaluator mirroring ExponentialHedgeEvaluator; operates on the
// log-level x directly.
class ArithmeticHedgeEvaluator {
 public:
  ArithmeticHedgeEvaluator(const ArithmeticCoefficients& coeffs,
                           const FourierMeasure& fourier,
                           std::vector<double> dates,
                           const QuadratureSettings& qs, int threads = 1);

  struct Value {
    double price;
    double hedge;
  };
  Value value_and_hedge(std::size_t date_index, double x) const;
  double alpha(std::size_t date_index) const { return alpha_[date_index]; }
  std::size_t date_count() const noexcept { return dates_.size(); }

 private:
  std::vector<double> dates_;
  double step_ = 0.0;
  std::size_t node_count_ = 0;
  std::vector<std::vector<Complex>> price_w_;
  std::vector<std::vector<Complex>> hedge_w_;
  std::vector<std::size_t> cutoff_;
  struct AtomTerm {
    double u;
    Complex price_w;
    Complex hedge_w;
  };
  std::vector<std::vector<AtomTerm>> atom_terms_;
  std::vector<double> alpha_;
};

}  // namespace vohedge
