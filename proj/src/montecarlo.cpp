#include "vohedge/montecarlo.hpp"

#include <cmath>
#include <sstream>

namespace vohedge {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t state = seed ^ (0xD2B74407B1CE6E93ULL * (stream + 1));
  for (auto& s : s_) s = splitmix64(state);
  if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
}

std::uint64_t Rng::next_u64() {
  const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform() {
  const std::uint64_t bits = next_u64() >> 11;
  const double u = static_cast<double>(bits) * 0x1.0p-53;
  return u > 0.0 ? u : 0x1.0p-53;
}

double Rng::normal() {
  // Marsaglia polar method without a spare, keeping the stream draw pattern
  // simple and reproducible
  for (;;) {
    const double a = 2.0 * uniform() - 1.0;
    const double b = 2.0 * uniform() - 1.0;
    const double r = a * a + b * b;
    if (r < 1.0 && r > 0.0) return a * std::sqrt(-2.0 * std::log(r) / r);
  }
}

double Rng::gamma(double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0))
    throw InvalidArgument("gamma needs positive shape and scale");
  if (shape < 1.0) {
    // boost: G(shape) = G(shape + 1) U^{1/shape}
    const double u = uniform();
    return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
  }
  // Marsaglia-Tsang squeeze
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    const double x = normal();
    const double t = 1.0 + c * x;
    if (t <= 0.0) continue;
    const double v = t * t * t;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
      return d * v * scale;
  }
}

double Rng::inverse_gaussian(double mean, double shape) {
  if (!(mean > 0.0) || !(shape > 0.0))
    throw InvalidArgument("inverse Gaussian needs positive mean and shape");
  const double n = normal();
  const double y = n * n;
  const double x =
      mean + mean * mean * y / (2.0 * shape) -
      mean / (2.0 * shape) *
          std::sqrt(4.0 * mean * shape * y + mean * mean * y * y);
  const double u = uniform();
  return u <= mean / (mean + x) ? x : mean * mean / x;
}

long Rng::poisson_small(double mean) {
  if (mean <= 0.0) return 0;
  const double limit = std::exp(-mean);
  long k = 0;
  double p = 1.0;
  do {
    ++k;
    p *= uniform();
  } while (p > limit);
  return k - 1;
}

long Rng::poisson(double mean) {
  if (!(mean >= 0.0)) throw InvalidArgument("Poisson mean must be >= 0");
  long acc = 0;
  // additivity keeps the inversion loop short for large means
  while (mean > 30.0) {
    acc += poisson_small(30.0);
    mean -= 30.0;
  }
  return acc + poisson_small(mean);
}

double BsBenchmark::delta(double spot, double time_to_maturity) const {
  const double d = black_scholes_call_delta(spot, strike, sigma, time_to_maturity);
  return kind == Kind::call ? d : d - 1.0;
}

BsBenchmark make_bs_benchmark(const PiiModel& model, double s0,
                              BsBenchmark::Kind kind, double strike) {
  BsBenchmark out;
  out.kind = kind;
  out.strike = strike;
  out.s0 = s0;
  out.horizon = model.horizon();
  const double variance =
      -model.log_char_derivatives(out.horizon, 0.0).d2psi_du2_0.real();
  out.sigma = std::sqrt(variance / out.horizon);
  out.capital = kind == BsBenchmark::Kind::call
                    ? black_scholes_call(s0, strike, out.sigma, out.horizon)
                    : black_scholes_put(s0, strike, out.sigma, out.horizon);
  return out;
}

namespace {

double driver_increment(const LevyModel& driver, double dt, Rng& rng) {
  if (dt <= 0.0) return 0.0;
  switch (driver.kind()) {
    case LevyKind::poisson:
      return static_cast<double>(
          rng.poisson(driver.get_if<PoissonParams>()->intensity * dt));
    case LevyKind::brownian_drift: {
      const auto* p = driver.get_if<BrownianDriftParams>();
      return p->drift * dt + p->sigma * std::sqrt(dt) * rng.normal();
    }
    case LevyKind::nig: {
      const auto* p = driver.get_if<NigParams>();
      const double gamma0 = std::sqrt(p->alpha * p->alpha - p->beta * p->beta);
      const double a = p->delta * dt;  // IG(a, gamma0) in the (a, b) form
      const double z = rng.inverse_gaussian(a / gamma0, a * a);
      return p->mu * dt + p->beta * z + std::sqrt(z) * rng.normal();
    }
    case LevyKind::vg: {
      const auto* p = driver.get_if<VgParams>();
      if (!(p->delta > 0.0))
        throw InvalidArgument("VG sampling requires delta > 0");
      const double g = rng.gamma(p->delta * dt, 1.0 / p->alpha);
      return p->mu * dt + p->beta * g + std::sqrt(g) * rng.normal();
    }
  }
  throw InternalError("unreachable driver kind");
}

}  // namespace

double sample_increment(const PiiModel& model, double t0, double t1, Rng& rng,
                        int substeps) {
  if (!(t1 > t0)) throw InvalidArgument("sample_increment needs t0 < t1");
  switch (model.kind()) {
    case PiiKind::levy_homogeneous:
      return driver_increment(*model.driver(), t1 - t0, rng);
    case PiiKind::time_changed_brownian: {
      const double var = model.psi(t1) - model.psi(t0);
      return std::sqrt(var) * rng.normal();
    }
    case PiiKind::wiener_integral:
    case PiiKind::two_factor_electricity: {
      const int m = std::max(1, substeps);
      const double dt = (t1 - t0) / m;
      double acc = 0.0;
      for (int j = 0; j < m; ++j) {
        const double s = t0 + j * dt;  // left endpoint
        acc += model.scaling(s) * driver_increment(*model.driver(), dt, rng);
      }
      if (model.kind() == PiiKind::two_factor_electricity) {
        acc += model.trend_integral(t1) - model.trend_integral(t0);
        const double sl = model.sigma_l();
        if (sl > 0.0) acc += sl * std::sqrt(t1 - t0) * rng.normal();
      }
      return acc;
    }
  }
  throw InternalError("unreachable pii kind");
}

const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::variance_optimal: return "vo";
    case Strategy::black_scholes: return "bs";
    case Strategy::vo_with_bs_capital: return "vo_bs_capital";
  }
  return "?";
}

MomentBlock error_statistics(const std::vector<double>& errors) {
  const std::size_t n = errors.size();
  if (n < 2) throw InsufficientSamples("error statistics need >= 2 samples");
  const double nd = static_cast<double>(n);
  const double mean = pairwise_sum(errors) / nd;

  std::vector<double> d2(n), d3(n), d4(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = errors[i] - mean;
    d2[i] = d * d;
    d3[i] = d2[i] * d;
    d4[i] = d2[i] * d2[i];
  }
  const double m2 = pairwise_sum(d2) / nd;
  const double m3 = pairwise_sum(d3) / nd;
  const double m4 = pairwise_sum(d4) / nd;

  MomentBlock out;
  out.mean = mean;
  out.std = std::sqrt(m2 * nd / (nd - 1.0));
  out.se_mean = out.std / std::sqrt(nd);
  if (m2 > 0.0) {
    out.skewness = m3 / std::pow(m2, 1.5);
    out.excess_kurtosis = m4 / (m2 * m2) - 3.0;
    out.se_std = std::sqrt(std::max(m4 - m2 * m2, 0.0) / (4.0 * m2 * nd));
    out.se_skew = std::sqrt(6.0 / nd);
    out.se_kurt = std::sqrt(24.0 / nd);
  } else {
    out.higher_moments_defined = false;
    out.skewness = std::numeric_limits<double>::quiet_NaN();
    out.excess_kurtosis = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

ExponentialStrategyEngine::ExponentialStrategyEngine(
    const FsCoefficients& coeffs, const PayoffMeasure& measure,
    std::function<double(double)> payoff_fn, std::vector<double> dates,
    const QuadratureSettings& qs, int threads)
    : evaluator_(coeffs, measure, std::move(dates), qs, threads),
      payoff_fn_(std::move(payoff_fn)),
      s0_(coeffs.s0()),
      v0_(0.0) {
  v0_ = evaluator_.value_and_hedge(0, s0_).price;
}

void ExponentialStrategyEngine::value_hedge(std::size_t i, double price,
                                            double* h, double* xi) const {
  const auto v = evaluator_.value_and_hedge(i, price);
  *h = v.price;
  *xi = v.hedge;
}

ArithmeticStrategyEngine::ArithmeticStrategyEngine(
    const ArithmeticCoefficients& coeffs, const FourierMeasure& fourier,
    std::function<double(double)> payoff_fn, std::vector<double> dates,
    const QuadratureSettings& qs, int threads)
    : evaluator_(coeffs, fourier, std::move(dates), qs, threads),
      payoff_fn_(std::move(payoff_fn)),
      v0_(0.0) {
  v0_ = evaluator_.value_and_hedge(0, 0.0).price;
}

void ArithmeticStrategyEngine::value_hedge(std::size_t i, double price,
                                           double* h, double* xi) const {
  const auto v = evaluator_.value_and_hedge(i, price);
  *h = v.price;
  *xi = v.hedge;
}

std::vector<BacktestReport> run_backtest(const PiiModel& model,
                                         const HedgingEngine& engine,
                                         const BsBenchmark* bs,
                                         const BacktestConfig& config) {
  if (config.n_rebalances < 1) throw InvalidArgument("need at least one rebalance");
  if (config.n_paths < 2) throw InsufficientSamples("need at least two paths");
  if (config.strategies.empty()) throw InvalidArgument("no strategies requested");
  for (Strategy s : config.strategies)
    if (s != Strategy::variance_optimal && bs == nullptr)
      throw InvalidArgument("Black-Scholes benchmark required for this strategy");

  const int n = config.n_rebalances;
  const double T = model.horizon();
  std::vector<double> dates(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) dates[static_cast<std::size_t>(i)] = T * i / n;

  const std::size_t n_strategies = config.strategies.size();
  std::vector<std::vector<double>> errors(
      n_strategies, std::vector<double>(static_cast<std::size_t>(config.n_paths)));

  parallel_for(
      static_cast<std::size_t>(config.n_paths), config.threads,
      [&](std::size_t lo, std::size_t hi) {
        std::vector<double> prices(static_cast<std::size_t>(n) + 1);
        std::vector<double> gains(n_strategies);
        for (std::size_t p = lo; p < hi; ++p) {
          Rng rng(config.seed, p);
          double x = 0.0;
          prices[0] = engine.price_from_x(0.0);
          for (int i = 0; i < n; ++i) {
            x += sample_increment(model, dates[i], dates[i + 1], rng,
                                  config.substeps_per_interval);
            prices[static_cast<std::size_t>(i) + 1] = engine.price_from_x(x);
          }
          std::fill(gains.begin(), gains.end(), 0.0);
          for (int i = 0; i < n; ++i) {
            const double s_now = prices[static_cast<std::size_t>(i)];
            const double ds = prices[static_cast<std::size_t>(i) + 1] - s_now;
            double h = 0.0, xi = 0.0;
            bool have_vo = false;
            for (std::size_t k = 0; k < n_strategies; ++k) {
              const Strategy strat = config.strategies[k];
              double position = 0.0;
              if (strat == Strategy::black_scholes) {
                position = bs->delta(s_now, T - dates[static_cast<std::size_t>(i)]);
              } else {
                if (!have_vo) {
                  engine.value_hedge(static_cast<std::size_t>(i), s_now, &h, &xi);
                  have_vo = true;
                }
                const double capital = strat == Strategy::variance_optimal
                                           ? engine.v0()
                                           : bs->capital;
                position =
                    xi + engine.feedback(static_cast<std::size_t>(i), s_now) *
                             (h - capital - gains[k]);
              }
              gains[k] += position * ds;
            }
          }
          const double payoff = engine.payoff(prices.back());
          for (std::size_t k = 0; k < n_strategies; ++k) {
            const double capital = config.strategies[k] == Strategy::variance_optimal
                                       ? engine.v0()
                                       : bs->capital;
            errors[k][p] = capital + gains[k] - payoff;
          }
        }
      });

  std::vector<BacktestReport> reports;
  reports.reserve(n_strategies);
  for (std::size_t k = 0; k < n_strategies; ++k) {
    BacktestReport rep;
    rep.strategy = config.strategies[k];
    rep.n_rebalances = n;
    rep.n_paths = config.n_paths;
    rep.seed = config.seed;
    rep.v0_used = config.strategies[k] == Strategy::variance_optimal
                      ? engine.v0()
                      : bs->capital;
    rep.stats = error_statistics(errors[k]);
    if (config.keep_errors) rep.errors = std::move(errors[k]);
    reports.push_back(std::move(rep));
  }
  return reports;
}

}  // namespace vohedge
