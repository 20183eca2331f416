// Batch front-end over the C API: parses a config, runs one command and
// writes CSV outputs. Files are written to a temporary name and renamed so a
// failing run never leaves a truncated CSV behind.
#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#include "vohedge.h"

namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

bool write_file(const std::string& dir, const std::string& name,
                const std::string& content, std::string* error) {
  const std::string path = dir + "/" + name;
  const std::string tmp = path + ".tmp";
  std::FILE* f = std::fopen(tmp.c_str(), "w");
  if (!f) {
    *error = "cannot open " + tmp + " for writing";
    return false;
  }
  const bool ok = std::fwrite(content.data(), 1, content.size(), f) ==
                  content.size();
  if (std::fclose(f) != 0 || !ok) {
    *error = "failed to write " + tmp;
    std::remove(tmp.c_str());
    return false;
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    *error = "failed to rename " + tmp + " to " + path;
    std::remove(tmp.c_str());
    return false;
  }
  return true;
}

int fail(vo_session* session, const char* what, vo_status status) {
  std::fprintf(stderr, "vohedge: %s failed: %s\n", what,
               session ? vo_session_last_error(session) : "invalid session");
  return static_cast<int>(status);
}

std::vector<double> fetch_grid(vo_session* session,
                               vo_status (*getter)(vo_session*, double*, size_t,
                                                   size_t*),
                               vo_status* status) {
  size_t len = 0;
  *status = getter(session, nullptr, 0, &len);
  if (*status != VO_OK) return {};
  std::vector<double> out(len);
  *status = getter(session, out.data(), out.size(), &len);
  out.resize(len);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"variance-optimal hedging engine"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 0;

  app.add_option("--config", config_path, "path to the run configuration")
      ->required();
  app.add_option("--out", out_dir, "output directory (default: .)");
  app.add_option("--seed", seed, "override backtest.seed")
      ->each([&](const std::string&) { seed_set = true; });
  app.add_option("--threads", threads,
                 "worker threads (default: VOHEDGE_THREADS or all cores)");

  auto* cmd_price = app.add_subcommand("price", "strike grid of V0 and the BS capital");
  auto* cmd_hedge = app.add_subcommand("hedge", "strike grid of xi0 and the BS delta");
  auto* cmd_variance = app.add_subcommand("variance", "closed-form hedging-error variance J0");
  auto* cmd_backtest = app.add_subcommand("backtest", "Monte-Carlo hedging backtests");
  auto* cmd_payoff = app.add_subcommand("payoff-check", "payoff reconstruction errors");
  for (auto* sub : {cmd_price, cmd_hedge, cmd_variance, cmd_backtest, cmd_payoff})
    sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  if (threads <= 0) {
    if (const char* env = std::getenv("VOHEDGE_THREADS")) threads = std::atoi(env);
  }

  char errbuf[1024] = {0};
  vo_session* session = nullptr;
  vo_status status =
      vo_session_create_from_file(config_path.c_str(), &session, errbuf,
                                  sizeof(errbuf));
  if (status != VO_OK) {
    std::fprintf(stderr, "vohedge: config error: %s\n", errbuf);
    return static_cast<int>(status);
  }
  if (seed_set && (status = vo_session_set_seed(session, seed)) != VO_OK)
    return fail(session, "set seed", status);
  if (threads > 0 && (status = vo_session_set_threads(session, threads)) != VO_OK)
    return fail(session, "set threads", status);

  int rc = 0;
  std::string io_error;

  if (cmd_price->parsed() || cmd_hedge->parsed()) {
    const bool price = cmd_price->parsed();
    const auto strikes = fetch_grid(session, vo_report_strikes, &status);
    if (status != VO_OK) return fail(session, "strike grid", status);
    std::string csv = price ? "K,V0_vo,IC_bs\n" : "K,xi0_vo,delta_bs\n";
    for (double k : strikes) {
      double a = 0, b = 0;
      status = price ? vo_price(session, k, &a, &b) : vo_hedge(session, k, &a, &b);
      if (status != VO_OK) return fail(session, price ? "price" : "hedge", status);
      csv += fmt(k) + "," + fmt(a) + "," + fmt(b) + "\n";
    }
    if (!write_file(out_dir, price ? "price.csv" : "hedge.csv", csv, &io_error))
      rc = VO_ERR_IO;
  } else if (cmd_variance->parsed()) {
    double j0 = 0;
    if ((status = vo_variance(session, &j0)) != VO_OK)
      return fail(session, "variance", status);
    if (!write_file(out_dir, "variance.csv", "quantity,value\nJ0," + fmt(j0) + "\n",
                    &io_error))
      rc = VO_ERR_IO;
  } else if (cmd_backtest->parsed()) {
    if ((status = vo_backtest_run(session)) != VO_OK)
      return fail(session, "backtest", status);
    size_t count = 0;
    if ((status = vo_backtest_row_count(session, &count)) != VO_OK)
      return fail(session, "backtest rows", status);
    std::string csv = "strategy,N,paths,seed,V0,mean,se_mean,std,se_std,skew,kurt\n";
    int32_t dump = 0;
    vo_backtest_dump_enabled(session, &dump);
    for (size_t i = 0; i < count && rc == 0; ++i) {
      vo_backtest_row row;
      if ((status = vo_backtest_row_get(session, i, &row)) != VO_OK)
        return fail(session, "backtest row", status);
      csv += std::string(row.strategy) + "," + std::to_string(row.n_rebalances) +
             "," + std::to_string(row.n_paths) + "," + std::to_string(row.seed) +
             "," + fmt(row.v0) + "," + fmt(row.mean) + "," + fmt(row.se_mean) +
             "," + fmt(row.std_dev) + "," + fmt(row.se_std) + "," +
             fmt(row.skewness) + "," + fmt(row.excess_kurtosis) + "\n";
      if (dump) {
        size_t len = 0;
        if ((status = vo_backtest_errors(session, i, nullptr, 0, &len)) != VO_OK)
          return fail(session, "backtest errors", status);
        std::vector<double> errors(len);
        if ((status = vo_backtest_errors(session, i, errors.data(), errors.size(),
                                         &len)) != VO_OK)
          return fail(session, "backtest errors", status);
        std::string dump_csv = "error\n";
        for (double e : errors) dump_csv += fmt(e) + "\n";
        const std::string name = std::string("errors_") + row.strategy + "_" +
                                 std::to_string(row.n_rebalances) + ".csv";
        if (!write_file(out_dir, name, dump_csv, &io_error)) rc = VO_ERR_IO;
      }
    }
    if (rc == 0 && !write_file(out_dir, "backtest.csv", csv, &io_error))
      rc = VO_ERR_IO;
  } else if (cmd_payoff->parsed()) {
    const auto spots = fetch_grid(session, vo_report_spots, &status);
    if (status != VO_OK) return fail(session, "spot grid", status);
    std::string csv = "s,reconstructed,exact,abs_error\n";
    for (double s : spots) {
      double rec = 0, exact = 0;
      if ((status = vo_payoff_reconstruct(session, s, &rec, &exact)) != VO_OK)
        return fail(session, "payoff reconstruction", status);
      csv += fmt(s) + "," + fmt(rec) + "," + fmt(exact) + "," +
             fmt(std::fabs(rec - exact)) + "\n";
    }
    if (!write_file(out_dir, "payoff_check.csv", csv, &io_error)) rc = VO_ERR_IO;
  }

  if (rc != 0) std::fprintf(stderr, "vohedge: %s\n", io_error.c_str());
  vo_session_destroy(session);
  return rc;
}
