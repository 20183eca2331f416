#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vohedge/fs_engine.hpp"
#include "vohedge/montecarlo.hpp"

namespace vohedge {

enum class EngineKind { exponential, arithmetic };
enum class PayoffKind { call, put, digital, self_quanto, custom };

struct PayoffSpec {
  PayoffKind kind = PayoffKind::call;
  double strike = 100.0;
  double barrier = 100.0;
  double abscissa = 1.5;
  CallVariant variant = CallVariant::abscissa_above_one;
  std::vector<PayoffAtom> atoms;                // custom, exponential engine
  std::vector<FourierAtom> fourier_atoms;       // custom, arithmetic engine

  bool has_strike() const {
    return kind == PayoffKind::call || kind == PayoffKind::put ||
           kind == PayoffKind::self_quanto;
  }
  // strike_override <= 0 keeps the configured strike
  PayoffMeasure build_measure(double strike_override = 0.0) const;
  FourierMeasure build_fourier(double strike_override = 0.0) const;
  // closed-form payoff as a function of the traded price (spot for the
  // exponential engine, the log level itself for the arithmetic one)
  std::function<double(double)> payoff_on_price(EngineKind engine,
                                                double strike_override = 0.0) const;
};

struct RunConfig {
  EngineKind engine = EngineKind::exponential;
  std::shared_ptr<const PiiModel> pii;
  double s0 = 100.0;
  PayoffSpec payoff;
  QuadratureSettings quadrature;
  J0Settings j0;

  std::vector<int> backtest_n = {12};
  int n_paths = 5000;
  std::uint64_t seed = 1;
  int substeps = 64;
  std::vector<Strategy> strategies = {Strategy::variance_optimal};
  bool dump_errors = false;

  std::vector<double> report_strikes;  // price/hedge grids; empty = payoff strike
  std::vector<double> report_spots;    // payoff-check grid; empty = default
};

// Parses the flat dotted key-value format. Unknown keys, keys that the
// selected kinds do not accept, and malformed values are reported with their
// line numbers.
RunConfig parse_run_config(const std::string& text);
RunConfig parse_run_config_file(const std::string& path);

}  // namespace vohedge
