#include "vohedge.h"

#include <cstring>
#include <new>
#include <string>
#include <vector>

#include "vohedge/session.hpp"

struct vo_session {
  vohedge::Session session;
  std::string last_error;
  std::vector<vohedge::BacktestReport> backtest;
  bool backtest_ran = false;
};

namespace {

vo_status status_of(vohedge::ErrorCode code) {
  using vohedge::ErrorCode;
  switch (code) {
    case ErrorCode::config: return VO_ERR_CONFIG;
    case ErrorCode::domain_violation: return VO_ERR_DOMAIN;
    case ErrorCode::quadrature_failure: return VO_ERR_QUADRATURE;
    case ErrorCode::tail_divergence: return VO_ERR_TAIL;
    case ErrorCode::degenerate_model: return VO_ERR_DEGENERATE;
    case ErrorCode::no_solution: return VO_ERR_NO_SOLUTION;
    case ErrorCode::invalid_abscissa: return VO_ERR_ABSCISSA;
    case ErrorCode::insufficient_samples: return VO_ERR_SAMPLES;
    case ErrorCode::io: return VO_ERR_IO;
    case ErrorCode::invalid_argument: return VO_ERR_ARGUMENT;
    case ErrorCode::internal: return VO_ERR_INTERNAL;
  }
  return VO_ERR_INTERNAL;
}

void copy_message(const std::string& msg, char* errbuf, size_t errbuf_len) {
  if (!errbuf || errbuf_len == 0) return;
  const size_t n = std::min(msg.size(), errbuf_len - 1);
  std::memcpy(errbuf, msg.c_str(), n);
  errbuf[n] = '\0';
}

template <typename Fn>
vo_status guarded(vo_session* session, Fn&& fn) {
  if (!session) return VO_ERR_ARGUMENT;
  session->last_error.clear();
  try {
    return fn();
  } catch (const vohedge::Error& e) {
    session->last_error = e.what();
    return status_of(e.code());
  } catch (const std::exception& e) {
    session->last_error = e.what();
    return VO_ERR_INTERNAL;
  }
}

template <typename Fn>
vo_status guarded_create(Fn&& fn, vo_session** out, char* errbuf,
                         size_t errbuf_len) {
  if (!out) return VO_ERR_ARGUMENT;
  *out = nullptr;
  try {
    *out = new vo_session{fn(), {}, {}, false};
    return VO_OK;
  } catch (const vohedge::Error& e) {
    copy_message(e.what(), errbuf, errbuf_len);
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    copy_message("out of memory", errbuf, errbuf_len);
    return VO_ERR_INTERNAL;
  } catch (const std::exception& e) {
    copy_message(e.what(), errbuf, errbuf_len);
    return VO_ERR_INTERNAL;
  }
}

vo_status fill_array(const std::vector<double>& values, double* buf, size_t cap,
                     size_t* len) {
  if (!len) return VO_ERR_ARGUMENT;
  *len = values.size();
  if (!buf) return VO_OK;  // capacity query
  if (cap < values.size()) return VO_ERR_ARGUMENT;
  std::memcpy(buf, values.data(), values.size() * sizeof(double));
  return VO_OK;
}

}  // namespace

extern "C" {

const char* vo_version(void) { return "1.0.0"; }

vo_status vo_session_create(const char* config_text, vo_session** out,
                            char* errbuf, size_t errbuf_len) {
  if (!config_text) return VO_ERR_ARGUMENT;
  return guarded_create(
      [&] { return vohedge::Session::from_text(config_text); }, out, errbuf,
      errbuf_len);
}

vo_status vo_session_create_from_file(const char* path, vo_session** out,
                                      char* errbuf, size_t errbuf_len) {
  if (!path) return VO_ERR_ARGUMENT;
  return guarded_create([&] { return vohedge::Session::from_file(path); }, out,
                        errbuf, errbuf_len);
}

void vo_session_destroy(vo_session* session) { delete session; }

const char* vo_session_last_error(const vo_session* session) {
  return session ? session->last_error.c_str() : "null session";
}

vo_status vo_session_set_seed(vo_session* session, uint64_t seed) {
  return guarded(session, [&] {
    session->session.set_seed(seed);
    return VO_OK;
  });
}

vo_status vo_session_set_threads(vo_session* session, int32_t threads) {
  return guarded(session, [&] {
    session->session.set_threads(threads);
    return VO_OK;
  });
}

vo_status vo_report_strikes(vo_session* session, double* buf, size_t cap,
                            size_t* len) {
  return guarded(session, [&] {
    std::vector<double> strikes = session->session.config().report_strikes;
    if (strikes.empty() && session->session.config().payoff.has_strike())
      strikes.push_back(session->session.config().payoff.strike);
    if (strikes.empty()) strikes.push_back(0.0);
    return fill_array(strikes, buf, cap, len);
  });
}

vo_status vo_report_spots(vo_session* session, double* buf, size_t cap,
                          size_t* len) {
  return guarded(session, [&] {
    const auto rows = session->session.payoff_check();
    std::vector<double> spots;
    spots.reserve(rows.size());
    for (const auto& r : rows) spots.push_back(r.spot);
    return fill_array(spots, buf, cap, len);
  });
}

vo_status vo_price(vo_session* session, double strike, double* v0,
                   double* bs_capital) {
  return guarded(session, [&] {
    if (!v0) return VO_ERR_ARGUMENT;
    auto& s = session->session;
    vohedge::RunConfig cfg = s.config();
    cfg.report_strikes = {strike};
    vohedge::Session one(cfg);
    one.set_threads(s.threads());
    const auto rows = one.price();
    *v0 = rows[0].v0;
    if (bs_capital) *bs_capital = rows[0].bs_capital;
    return VO_OK;
  });
}

vo_status vo_hedge(vo_session* session, double strike, double* xi0,
                   double* bs_delta) {
  return guarded(session, [&] {
    if (!xi0) return VO_ERR_ARGUMENT;
    auto& s = session->session;
    vohedge::RunConfig cfg = s.config();
    cfg.report_strikes = {strike};
    vohedge::Session one(cfg);
    one.set_threads(s.threads());
    const auto rows = one.hedge();
    *xi0 = rows[0].xi0;
    if (bs_delta) *bs_delta = rows[0].bs_delta;
    return VO_OK;
  });
}

vo_status vo_variance(vo_session* session, double* j0) {
  return guarded(session, [&] {
    if (!j0) return VO_ERR_ARGUMENT;
    *j0 = session->session.variance_j0();
    return VO_OK;
  });
}

vo_status vo_payoff_reconstruct(vo_session* session, double spot,
                                double* reconstructed, double* exact) {
  return guarded(session, [&] {
    if (!reconstructed) return VO_ERR_ARGUMENT;
    auto& s = session->session;
    vohedge::RunConfig cfg = s.config();
    cfg.report_spots = {spot};
    vohedge::Session one(cfg);
    one.set_threads(s.threads());
    const auto rows = one.payoff_check();
    *reconstructed = rows[0].reconstructed;
    if (exact) *exact = rows[0].exact;
    return VO_OK;
  });
}

vo_status vo_backtest_run(vo_session* session) {
  return guarded(session, [&] {
    session->backtest = session->session.backtest();
    session->backtest_ran = true;
    return VO_OK;
  });
}

vo_status vo_backtest_row_count(vo_session* session, size_t* count) {
  return guarded(session, [&] {
    if (!count) return VO_ERR_ARGUMENT;
    if (!session->backtest_ran)
      throw vohedge::InvalidArgument("run the backtest first");
    *count = session->backtest.size();
    return VO_OK;
  });
}

vo_status vo_backtest_row_get(vo_session* session, size_t index,
                              vo_backtest_row* out) {
  return guarded(session, [&] {
    if (!out) return VO_ERR_ARGUMENT;
    if (!session->backtest_ran || index >= session->backtest.size())
      throw vohedge::InvalidArgument("backtest row index out of range");
    const auto& r = session->backtest[index];
    std::memset(out, 0, sizeof(*out));
    std::strncpy(out->strategy, vohedge::strategy_name(r.strategy),
                 sizeof(out->strategy) - 1);
    out->n_rebalances = r.n_rebalances;
    out->n_paths = r.n_paths;
    out->seed = r.seed;
    out->v0 = r.v0_used;
    out->mean = r.stats.mean;
    out->se_mean = r.stats.se_mean;
    out->std_dev = r.stats.std;
    out->se_std = r.stats.se_std;
    out->skewness = r.stats.skewness;
    out->excess_kurtosis = r.stats.excess_kurtosis;
    out->higher_moments_defined = r.stats.higher_moments_defined ? 1 : 0;
    return VO_OK;
  });
}

vo_status vo_backtest_errors(vo_session* session, size_t index, double* buf,
                             size_t cap, size_t* len) {
  return guarded(session, [&] {
    if (!session->backtest_ran || index >= session->backtest.size())
      throw vohedge::InvalidArgument("backtest row index out of range");
    const auto& errors = session->backtest[index].errors;
    if (errors.empty())
      throw vohedge::InvalidArgument(
          "per-path errors were not kept; enable backtest.dump_errors");
    return fill_array(errors, buf, cap, len);
  });
}

vo_status vo_backtest_dump_enabled(vo_session* session, int32_t* enabled) {
  return guarded(session, [&] {
    if (!enabled) return VO_ERR_ARGUMENT;
    *enabled = session->session.config().dump_errors ? 1 : 0;
    return VO_OK;
  });
}

}  // extern "C"
