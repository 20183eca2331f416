#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "vohedge/arithmetic_engine.hpp"
#include "vohedge/fs_engine.hpp"
#include "vohedge/pii_models.hpp"

namespace vohedge {

// xoshiro256++ seeded through splitmix64 from (seed, stream). Every simulated
// path owns one stream, so results cannot depend on scheduling.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();
  double uniform();  // (0, 1)
  double normal();
  double gamma(double shape, double scale);
  // mean/shape parametrization; Michael-Schucany-Haas transform with rejection
  double inverse_gaussian(double mean, double shape);
  long poisson(double mean);

 private:
  long poisson_small(double mean);
  std::uint64_t s_[4];
};

// Exact-in-law increment X_{t1} - X_{t0}; integral kinds sum the driver over
// `substeps` left-endpoint subintervals.
double sample_increment(const PiiModel& model, double t0, double t1, Rng& rng,
                        int substeps = 1);

enum class Strategy { variance_optimal, black_scholes, vo_with_bs_capital };

const char* strategy_name(Strategy s);

struct MomentBlock {
  double mean = 0.0;
  double std = 0.0;
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  double se_mean = 0.0;
  double se_std = 0.0;
  double se_skew = 0.0;
  double se_kurt = 0.0;
  bool higher_moments_defined = true;
};

// Unbiased mean/std, moment skewness and excess kurtosis, asymptotic
// Monte-Carlo standard errors. Throws InsufficientSamples below two samples.
MomentBlock error_statistics(const std::vector<double>& errors);

// Closed-form Black-Scholes benchmark leg (zero rates), volatility matched to
// the model variance over the horizon.
struct BsBenchmark {
  enum class Kind { call, put };
  Kind kind = Kind::call;
  double strike = 0.0;
  double sigma = 0.0;
  double s0 = 0.0;
  double horizon = 0.0;
  double capital = 0.0;

  double delta(double spot, double time_to_maturity) const;
};

BsBenchmark make_bs_benchmark(const PiiModel& model, double s0,
                              BsBenchmark::Kind kind, double strike);

// Uniform per-date strategy interface over the traded price: the arithmetic
// engine trades X itself, the exponential engine trades s0 e^X.
class HedgingEngine {
 public:
  virtual ~HedgingEngine() = default;
  virtual double v0() const = 0;
  virtual void value_hedge(std::size_t date_idx, double price, double* h,
                           double* xi) const = 0;
  // multiplier of (H - c - G) in the feedback recursion: lambda_t / S for the
  // exponential engine, alpha_t for the arithmetic one
  virtual double feedback(std::size_t date_idx, double price) const = 0;
  virtual double price_from_x(double x) const = 0;
  virtual double payoff(double terminal_price) const = 0;
};

class ExponentialStrategyEngine : public HedgingEngine {
 public:
  ExponentialStrategyEngine(const FsCoefficients& coeffs,
                            const PayoffMeasure& measure,
                            std::function<double(double)> payoff_fn,
                            std::vector<double> dates,
                            const QuadratureSettings& qs, int threads = 1);
  double v0() const override { return v0_; }
  void value_hedge(std::size_t i, double price, double* h,
                   double* xi) const override;
  double feedback(std::size_t i, double price) const override {
    return evaluator_.lambda(i) / price;
  }
  double price_from_x(double x) const override { return s0_ * std::exp(x); }
  double payoff(double terminal_price) const override {
    return payoff_fn_(terminal_price);
  }

 private:
  ExponentialHedgeEvaluator evaluator_;
  std::function<double(double)> payoff_fn_;
  double s0_;
  double v0_;
};

class ArithmeticStrategyEngine : public HedgingEngine {
 public:
  ArithmeticStrategyEngine(const ArithmeticCoefficients& coeffs,
                           const FourierMeasure& fourier,
                           std::function<double(double)> payoff_fn,
                           std::vector<double> dates,
                           const QuadratureSettings& qs, int threads = 1);
  double v0() const override { return v0_; }
  void value_hedge(std::size_t i, double price, double* h,
                   double* xi) const override;
  double feedback(std::size_t i, double /*price*/) const override {
    return evaluator_.alpha(i);
  }
  double price_from_x(double x) const override { return x; }
  double payoff(double terminal_price) const override {
    return payoff_fn_(terminal_price);
  }

 private:
  ArithmeticHedgeEvaluator evaluator_;
  std::function<double(double)> payoff_fn_;
  double v0_;
};

struct BacktestConfig {
  int n_rebalances = 12;
  int n_paths = 5000;
  std::uint64_t seed = 1;
  int substeps_per_interval = 64;
  std::vector<Strategy> strategies = {Strategy::variance_optimal};
  int threads = 1;
  bool keep_errors = false;
};

struct BacktestReport {
  Strategy strategy = Strategy::variance_optimal;
  int n_rebalances = 0;
  int n_paths = 0;
  std::uint64_t seed = 0;
  double v0_used = 0.0;
  MomentBlock stats;
  std::vector<double> errors;  // populated when keep_errors is set
};

// Simulates one path set and evaluates every requested strategy on it
// (common random numbers). Deterministic given (seed, config) for any thread
// count. `bs` is required when a Black-Scholes-based strategy is requested.
std::vector<BacktestReport> run_backtest(const PiiModel& model,
                                         const HedgingEngine& engine,
                                         const BsBenchmark* bs,
                                         const BacktestConfig& config);

}  // namespace vohedge
