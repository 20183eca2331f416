#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "vohedge.h"

namespace {

const char* kConfig = R"(
engine = exponential
model.kind = brownian
model.sigma = 0.4
model.m = -0.08
pii.kind = levy
pii.T = 0.25
pii.s0 = 100
payoff.kind = call
payoff.K = 100
payoff.R = 1.5
backtest.n_rebalances = 4
backtest.n_paths = 200
backtest.seed = 7
backtest.strategies = vo,bs
backtest.dump_errors = true
backtest.substeps = 1
)";

struct SessionGuard {
  vo_session* handle = nullptr;
  ~SessionGuard() { vo_session_destroy(handle); }
};

}  // namespace

TEST_CASE("create, price, hedge, destroy through the C surface") {
  SessionGuard g;
  char errbuf[512] = {0};
  REQUIRE(vo_session_create(kConfig, &g.handle, errbuf, sizeof(errbuf)) == VO_OK);
  REQUIRE(g.handle != nullptr);
  CHECK(std::string(vo_session_last_error(g.handle)).empty());

  double v0 = 0, bs = 0;
  REQUIRE(vo_price(g.handle, 100.0, &v0, &bs) == VO_OK);
  // martingale Gaussian: both legs price the same call
  CHECK(std::fabs(v0 - 7.9656) < 1e-3);
  CHECK(std::fabs(bs - v0) < 1e-4);

  double xi0 = 0, delta = 0;
  REQUIRE(vo_hedge(g.handle, 100.0, &xi0, &delta) == VO_OK);
  CHECK(std::fabs(xi0 - 0.5398) < 1e-3);
  CHECK(std::fabs(delta - xi0) < 1e-4);

  double j0 = 0;
  REQUIRE(vo_variance(g.handle, &j0) == VO_OK);
  CHECK(std::fabs(j0) < 1e-4);  // complete market

  double rec = 0, exact = 0;
  REQUIRE(vo_payoff_reconstruct(g.handle, 120.0, &rec, &exact) == VO_OK);
  CHECK(exact == 20.0);
  CHECK(std::fabs(rec - exact) < 1e-4);
}

TEST_CASE("config failures carry a code and a message") {
  vo_session* handle = nullptr;
  char errbuf[256] = {0};
  const vo_status st =
      vo_session_create("model.kind = nosuch\npii.T = 1\n", &handle, errbuf,
                        sizeof(errbuf));
  CHECK(st == VO_ERR_CONFIG);
  CHECK(handle == nullptr);
  CHECK(std::strlen(errbuf) > 0);
}

TEST_CASE("null arguments are rejected") {
  CHECK(vo_session_create(nullptr, nullptr, nullptr, 0) == VO_ERR_ARGUMENT);
  CHECK(vo_price(nullptr, 100.0, nullptr, nullptr) == VO_ERR_ARGUMENT);
  vo_session_destroy(nullptr);  // must be a no-op
}

TEST_CASE("backtest rows and per-path errors are exposed") {
  SessionGuard g;
  REQUIRE(vo_session_create(kConfig, &g.handle, nullptr, 0) == VO_OK);
  REQUIRE(vo_session_set_threads(g.handle, 2) == VO_OK);

  // rows are only available after a run
  size_t count = 0;
  CHECK(vo_backtest_row_count(g.handle, &count) == VO_ERR_ARGUMENT);
  REQUIRE(vo_backtest_run(g.handle) == VO_OK);
  REQUIRE(vo_backtest_row_count(g.handle, &count) == VO_OK);
  REQUIRE(count == 2);

  vo_backtest_row row;
  REQUIRE(vo_backtest_row_get(g.handle, 0, &row) == VO_OK);
  CHECK(std::string(row.strategy) == "vo");
  CHECK(row.n_rebalances == 4);
  CHECK(row.n_paths == 200);
  CHECK(row.seed == 7);
  CHECK(row.std_dev > 0.0);

  int32_t dump = 0;
  REQUIRE(vo_backtest_dump_enabled(g.handle, &dump) == VO_OK);
  CHECK(dump == 1);
  size_t len = 0;
  REQUIRE(vo_backtest_errors(g.handle, 0, nullptr, 0, &len) == VO_OK);
  REQUIRE(len == 200);
  std::vector<double> errors(len);
  REQUIRE(vo_backtest_errors(g.handle, 0, errors.data(), errors.size(), &len) ==
          VO_OK);
  double acc = 0;
  for (double e : errors) acc += e;
  CHECK(std::fabs(acc / 200.0 - row.mean) < 1e-12);

  CHECK(vo_backtest_row_get(g.handle, 5, &row) == VO_ERR_ARGUMENT);
}

TEST_CASE("seed changes flow into the next backtest run") {
  SessionGuard g;
  REQUIRE(vo_session_create(kConfig, &g.handle, nullptr, 0) == VO_OK);
  REQUIRE(vo_backtest_run(g.handle) == VO_OK);
  vo_backtest_row a;
  REQUIRE(vo_backtest_row_get(g.handle, 0, &a) == VO_OK);

  REQUIRE(vo_session_set_seed(g.handle, 12345) == VO_OK);
  REQUIRE(vo_backtest_run(g.handle) == VO_OK);
  vo_backtest_row b;
  REQUIRE(vo_backtest_row_get(g.handle, 0, &b) == VO_OK);
  CHECK(a.std_dev != b.std_dev);
  CHECK(b.seed == 12345);

  // and back again: bit-identical reproduction
  REQUIRE(vo_session_set_seed(g.handle, 7) == VO_OK);
  REQUIRE(vo_backtest_run(g.handle) == VO_OK);
  vo_backtest_row c;
  REQUIRE(vo_backtest_row_get(g.handle, 0, &c) == VO_OK);
  CHECK(c.std_dev == a.std_dev);
  CHECK(c.mean == a.mean);
}

TEST_CASE("strike grid round trip") {
  const std::string with_grid =
      std::string(kConfig) + "report.strikes = 60,99,150\n";
  SessionGuard g;
  REQUIRE(vo_session_create(with_grid.c_str(), &g.handle, nullptr, 0) == VO_OK);
  size_t len = 0;
  REQUIRE(vo_report_strikes(g.handle, nullptr, 0, &len) == VO_OK);
  REQUIRE(len == 3);
  double strikes[3];
  REQUIRE(vo_report_strikes(g.handle, strikes, 3, &len) == VO_OK);
  CHECK(strikes[0] == 60.0);
  CHECK(strikes[2] == 150.0);
}

TEST_CASE("version string is present") {
  CHECK(std::strlen(vo_version()) > 0);
}
