#include <doctest.h>

#include <cmath>

#include "vohedge/config.hpp"
#include "vohedge/session.hpp"

using namespace vohedge;

namespace {

const char* kBasicConfig = R"(
# calibrated NIG call setup
engine = exponential
model.kind = nig
model.alpha = 38.46
model.beta = -3.85
model.delta = 6.40
model.mu = 0.64
pii.kind = levy
pii.T = 0.25
pii.s0 = 100
payoff.kind = call
payoff.K = 99
payoff.R = 1.5
backtest.n_rebalances = 12
backtest.n_paths = 500
backtest.seed = 42
backtest.strategies = vo,bs
)";

}  // namespace

TEST_CASE("a complete config parses into a runnable setup") {
  const RunConfig cfg = parse_run_config(kBasicConfig);
  CHECK(cfg.engine == EngineKind::exponential);
  CHECK(cfg.pii->kind() == PiiKind::levy_homogeneous);
  CHECK(cfg.pii->horizon() == 0.25);
  CHECK(cfg.s0 == 100.0);
  CHECK(cfg.payoff.kind == PayoffKind::call);
  CHECK(cfg.payoff.strike == 99.0);
  CHECK(cfg.backtest_n == std::vector<int>{12});
  CHECK(cfg.seed == 42);
  CHECK(cfg.strategies.size() == 2);
  CHECK(cfg.quadrature.log2_panels == 13);  // default
}

TEST_CASE("unknown keys are rejected with their location") {
  const std::string bad = std::string(kBasicConfig) + "model.typo = 1\n";
  CHECK_THROWS_WITH_AS(parse_run_config(bad),
                       doctest::Contains("model.typo"), ConfigError);
}

TEST_CASE("keys that the selected kind does not accept are rejected") {
  // lambda_p belongs to the Poisson kind, not NIG
  const std::string bad = std::string(kBasicConfig) + "model.lambda_p = 2\n";
  CHECK_THROWS_WITH_AS(parse_run_config(bad),
                       doctest::Contains("model.lambda_p"), ConfigError);
}

TEST_CASE("missing required keys are reported") {
  CHECK_THROWS_WITH_AS(parse_run_config("pii.T = 1\npii.s0 = 100\n"),
                       doctest::Contains("model.kind"), ConfigError);
  CHECK_THROWS_WITH_AS(
      parse_run_config("model.kind = poisson\nmodel.lambda_p = 1\npii.s0 = 1\n"),
      doctest::Contains("pii.T"), ConfigError);
}

TEST_CASE("malformed values carry line information") {
  const std::string bad = "model.kind = poisson\nmodel.lambda_p = abc\npii.T = 1\npii.s0 = 1\npayoff.kind = call\npayoff.K = 100\n";
  CHECK_THROWS_WITH_AS(parse_run_config(bad), doctest::Contains("line 2"),
                       ConfigError);
}

TEST_CASE("engine and payoff compatibility is enforced") {
  const std::string digital_exp = R"(
engine = exponential
model.kind = brownian
model.sigma = 0.4
model.m = 0
pii.T = 0.25
pii.s0 = 100
payoff.kind = digital
payoff.B = 100
)";
  CHECK_THROWS_AS(parse_run_config(digital_exp), ConfigError);

  const std::string call_arith = R"(
engine = arithmetic
model.kind = brownian
model.sigma = 0.4
model.m = 0
pii.T = 0.25
payoff.kind = call
payoff.K = 100
)";
  CHECK_THROWS_AS(parse_run_config(call_arith), ConfigError);
}

TEST_CASE("moment matching applies through the model block") {
  const std::string cfg_text = R"(
model.kind = nig
model.alpha = 38.46
model.beta = -3.85
model.delta = 6.40
model.mu = 0.64
model.moment_match_C = 0.08
pii.T = 0.25
pii.s0 = 100
payoff.kind = call
payoff.K = 99
)";
  const RunConfig cfg = parse_run_config(cfg_text);
  const auto* nig = cfg.pii->driver()->get_if<NigParams>();
  REQUIRE(nig != nullptr);
  CHECK(nig->alpha == doctest::Approx(3.0768).epsilon(1e-10));
}

TEST_CASE("tables parse into interpolants") {
  const std::string cfg_text = R"(
pii.kind = time_changed_brownian
pii.T = 1.0
pii.psi = 0:0, 0.5:0.6, 1:1.3
pii.s0 = 100
payoff.kind = call
payoff.K = 100
)";
  const RunConfig cfg = parse_run_config(cfg_text);
  CHECK(cfg.pii->psi(0.25) == doctest::Approx(0.3));
  CHECK(cfg.pii->psi(0.75) == doctest::Approx(0.95));
}

TEST_CASE("duplicate keys are rejected") {
  CHECK_THROWS_WITH_AS(parse_run_config("pii.T = 1\npii.T = 2\n"),
                       doctest::Contains("duplicate"), ConfigError);
}

TEST_CASE("session price/hedge/payoff-check round trip") {
  Session session = Session::from_text(kBasicConfig);
  session.set_threads(2);
  const auto prices = session.price();
  REQUIRE(prices.size() == 1);
  CHECK(prices[0].strike == 99.0);
  CHECK(prices[0].v0 > 0.0);
  CHECK(std::isfinite(prices[0].bs_capital));

  const auto hedges = session.hedge();
  CHECK(hedges[0].xi0 > 0.0);
  CHECK(hedges[0].xi0 < 1.0);

  const auto rows = session.payoff_check();
  REQUIRE(rows.size() == 5);
  for (const auto& r : rows) CHECK(std::fabs(r.reconstructed - r.exact) < 1e-6 * 99.0);

  const double j0 = session.variance_j0();
  CHECK(j0 > 0.0);
}

TEST_CASE("session backtest honors strategy and N lists") {
  std::string text = std::string(kBasicConfig);
  text += "backtest.substeps = 1\n";
  Session session = Session::from_text(text);
  session.set_threads(2);
  const auto reports = session.backtest();
  REQUIRE(reports.size() == 2);  // vo, bs at N = 12
  CHECK(reports[0].strategy == Strategy::variance_optimal);
  CHECK(reports[1].strategy == Strategy::black_scholes);
  CHECK(reports[0].n_paths == 500);
  CHECK(reports[0].stats.std > 0.0);
}
