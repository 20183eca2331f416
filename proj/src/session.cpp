#include "vohedge/session.hpp"

#include <cmath>
#include <thread>

namespace vohedge {

Session::Session(RunConfig config) : config_(std::move(config)) {
  threads_ = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (config_.engine == EngineKind::exponential)
    fs_.emplace(config_.pii, config_.s0);
  else
    arith_.emplace(config_.pii);
}

Session Session::from_text(const std::string& text) {
  return Session(parse_run_config(text));
}

Session Session::from_file(const std::string& path) {
  return Session(parse_run_config_file(path));
}

void Session::set_threads(int threads) {
  if (threads < 1) throw InvalidArgument("thread count must be >= 1");
  threads_ = threads;
}

std::vector<double> Session::strike_grid() const {
  if (!config_.report_strikes.empty()) return config_.report_strikes;
  if (config_.payoff.has_strike()) return {config_.payoff.strike};
  return {0.0};  // single row with the configured payoff
}

std::vector<double> Session::spot_grid() const {
  if (!config_.report_spots.empty()) return config_.report_spots;
  const PayoffSpec& p = config_.payoff;
  switch (p.kind) {
    case PayoffKind::call:
    case PayoffKind::put:
    case PayoffKind::self_quanto:
      return {0.5 * p.strike, 0.8 * p.strike, p.strike, 1.2 * p.strike,
              2.0 * p.strike};
    case PayoffKind::digital:
      // the jump at s = B is excluded: the inversion converges to the midpoint
      return {0.5 * p.barrier, 0.8 * p.barrier, 0.95 * p.barrier,
              1.2 * p.barrier, 2.0 * p.barrier};
    case PayoffKind::custom: {
      const double base = config_.engine == EngineKind::exponential ? config_.s0 : 1.0;
      return {0.5 * base, 0.8 * base, base, 1.25 * base, 2.0 * base};
    }
  }
  return {1.0};
}

std::optional<BsBenchmark::Kind> Session::bs_kind() const {
  if (config_.engine != EngineKind::exponential) return std::nullopt;
  if (config_.payoff.kind == PayoffKind::call) return BsBenchmark::Kind::call;
  if (config_.payoff.kind == PayoffKind::put) return BsBenchmark::Kind::put;
  return std::nullopt;
}

std::vector<Session::PriceRow> Session::price() {
  std::vector<PriceRow> rows;
  for (double k : strike_grid()) {
    PriceRow row{k, 0.0, std::numeric_limits<double>::quiet_NaN()};
    if (config_.engine == EngineKind::exponential) {
      const auto measure = config_.payoff.build_measure(k);
      row.v0 = price_process(*fs_, measure, 0.0, config_.s0, config_.quadrature);
      if (const auto kind = bs_kind()) {
        const double strike = k > 0.0 ? k : config_.payoff.strike;
        row.bs_capital =
            make_bs_benchmark(*config_.pii, config_.s0, *kind, strike).capital;
      }
    } else {
      const auto fourier = config_.payoff.build_fourier(k);
      row.v0 = arith_price_process(*arith_, fourier, 0.0, 0.0, config_.quadrature);
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<Session::HedgeRow> Session::hedge() {
  std::vector<HedgeRow> rows;
  for (double k : strike_grid()) {
    HedgeRow row{k, 0.0, std::numeric_limits<double>::quiet_NaN()};
    if (config_.engine == EngineKind::exponential) {
      const auto measure = config_.payoff.build_measure(k);
      row.xi0 = pure_hedge(*fs_, measure, 0.0, config_.s0, config_.quadrature);
      if (const auto kind = bs_kind()) {
        const double strike = k > 0.0 ? k : config_.payoff.strike;
        const auto bs =
            make_bs_benchmark(*config_.pii, config_.s0, *kind, strike);
        row.bs_delta = bs.delta(config_.s0, config_.pii->horizon());
      }
    } else {
      const auto fourier = config_.payoff.build_fourier(k);
      row.xi0 = arith_pure_hedge(*arith_, fourier, 0.0, 0.0, config_.quadrature);
    }
    rows.push_back(row);
  }
  return rows;
}

double Session::variance_j0() {
  if (config_.engine != EngineKind::exponential)
    throw InvalidArgument(
        "the closed-form quadratic error is defined for the exponential engine");
  const auto measure = config_.payoff.build_measure();
  return quadratic_error(*fs_, measure, config_.quadrature, config_.j0, threads_);
}

std::vector<BacktestReport> Session::backtest() {
  std::vector<BacktestReport> all;
  const double T = config_.pii->horizon();
  const bool needs_bs = [&] {
    for (Strategy s : config_.strategies)
      if (s != Strategy::variance_optimal) return true;
    return false;
  }();
  std::optional<BsBenchmark> bs;
  if (needs_bs) {
    const auto kind = bs_kind();
    if (!kind)
      throw InvalidArgument(
          "Black-Scholes benchmark strategies need a call or put payoff on the "
          "exponential engine");
    bs = make_bs_benchmark(*config_.pii, config_.s0, *kind, config_.payoff.strike);
  }

  for (int n : config_.backtest_n) {
    std::vector<double> dates(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) dates[static_cast<std::size_t>(i)] = T * i / n;

    BacktestConfig bc;
    bc.n_rebalances = n;
    bc.n_paths = config_.n_paths;
    bc.seed = config_.seed;
    bc.substeps_per_interval = config_.substeps;
    bc.strategies = config_.strategies;
    bc.threads = threads_;
    bc.keep_errors = config_.dump_errors;

    std::vector<BacktestReport> reports;
    if (config_.engine == EngineKind::exponential) {
      const auto measure = config_.payoff.build_measure();
      ExponentialStrategyEngine engine(
          *fs_, measure, config_.payoff.payoff_on_price(EngineKind::exponential),
          dates, config_.quadrature, threads_);
      reports = run_backtest(*config_.pii, engine, bs ? &*bs : nullptr, bc);
    } else {
      const auto fourier = config_.payoff.build_fourier();
      ArithmeticStrategyEngine engine(
          *arith_, fourier, config_.payoff.payoff_on_price(EngineKind::arithmetic),
          dates, config_.quadrature, threads_);
      reports = run_backtest(*config_.pii, engine, bs ? &*bs : nullptr, bc);
    }
    for (auto& r : reports) all.push_back(std::move(r));
  }
  return all;
}

std::vector<Session::PayoffRow> Session::payoff_check() {
  std::vector<PayoffRow> rows;
  if (config_.engine == EngineKind::exponential) {
    const auto measure = config_.payoff.build_measure();
    const auto exact = config_.payoff.payoff_on_price(EngineKind::exponential);
    for (double s : spot_grid())
      rows.push_back({s, measure.reconstruct(s, config_.quadrature), exact(s)});
  } else {
    const auto fourier = config_.payoff.build_fourier();
    const auto exact = config_.payoff.payoff_on_price(EngineKind::arithmetic);
    for (double s : spot_grid()) {
      const double x = std::log(s);
      rows.push_back({s, fourier.reconstruct(x, config_.quadrature), exact(x)});
    }
  }
  return rows;
}

}  // namespace vohedge
