#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vohedge/arithmetic_engine.hpp"
#include "vohedge/config.hpp"

namespace vohedge {

// One parsed configuration plus the engine built from it; the unit of work
// behind the C API and the CLI.
class Session {
 public:
  explicit Session(RunConfig config);
  static Session from_text(const std::string& text);
  static Session from_file(const std::string& path);

  void set_seed(std::uint64_t seed) { config_.seed = seed; }
  void set_threads(int threads);
  int threads() const noexcept { return threads_; }
  const RunConfig& config() const noexcept { return config_; }

  struct PriceRow {
    double strike;
    double v0;
    double bs_capital;  // NaN when no closed-form benchmark exists
  };
  std::vector<PriceRow> price();

  struct HedgeRow {
    double strike;
    double xi0;
    double bs_delta;
  };
  std::vector<HedgeRow> hedge();

  double variance_j0();

  std::vector<BacktestReport> backtest();

  struct PayoffRow {
    double spot;
    double reconstructed;
    double exact;
  };
  std::vector<PayoffRow> payoff_check();

 private:
  std::vector<double> strike_grid() const;
  std::vector<double> spot_grid() const;
  std::optional<BsBenchmark::Kind> bs_kind() const;

  RunConfig config_;
  int threads_ = 1;
  std::optional<FsCoefficients> fs_;
  std::optional<ArithmeticCoefficients> arith_;
};

}  // namespace vohedge
