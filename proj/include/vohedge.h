/* C interface of the variance-optimal hedging engine.
 *
 * All entry points return vo_status; on failure the message is available via
 * vo_session_last_error (or the errbuf argument of the create functions).
 * Sessions are opaque handles, not thread-safe per handle; distinct handles
 * may be used concurrently.
 */
#ifndef VOHEDGE_H
#define VOHEDGE_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum vo_status {
  VO_OK = 0,
  VO_ERR_CONFIG = 1,
  VO_ERR_DOMAIN = 2,
  VO_ERR_QUADRATURE = 3,
  VO_ERR_TAIL = 4,
  VO_ERR_DEGENERATE = 5,
  VO_ERR_NO_SOLUTION = 6,
  VO_ERR_ABSCISSA = 7,
  VO_ERR_SAMPLES = 8,
  VO_ERR_IO = 9,
  VO_ERR_ARGUMENT = 10,
  VO_ERR_INTERNAL = 11
} vo_status;

typedef struct vo_session vo_session;

const char* vo_version(void);

/* Builds a session from config text (the flat `section.key = value` format).
 * errbuf may be NULL; when given it receives the failure message. */
vo_status vo_session_create(const char* config_text, vo_session** out,
                            char* errbuf, size_t errbuf_len);
vo_status vo_session_create_from_file(const char* path, vo_session** out,
                                      char* errbuf, size_t errbuf_len);
void vo_session_destroy(vo_session* session);

/* Message of the last failing call on this session; empty string if none. */
const char* vo_session_last_error(const vo_session* session);

vo_status vo_session_set_seed(vo_session* session, uint64_t seed);
vo_status vo_session_set_threads(vo_session* session, int32_t threads);

/* Grids configured for the report commands. Call with buf = NULL to query the
 * required capacity through len. */
vo_status vo_report_strikes(vo_session* session, double* buf, size_t cap,
                            size_t* len);
vo_status vo_report_spots(vo_session* session, double* buf, size_t cap,
                          size_t* len);

/* Variance-optimal capital and the Black-Scholes benchmark capital at one
 * strike; strike <= 0 uses the configured payoff unchanged. bs_capital /
 * bs_delta are NaN when no closed-form benchmark exists for the payoff. */
vo_status vo_price(vo_session* session, double strike, double* v0,
                   double* bs_capital);
vo_status vo_hedge(vo_session* session, double strike, double* xi0,
                   double* bs_delta);

/* Closed-form variance of the residual hedging error (exponential engine). */
vo_status vo_variance(vo_session* session, double* j0);

/* Payoff reconstruction from its integral representation at one spot. */
vo_status vo_payoff_reconstruct(vo_session* session, double spot,
                                double* reconstructed, double* exact);

typedef struct vo_backtest_row {
  char strategy[24];
  int32_t n_rebalances;
  int32_t n_paths;
  uint64_t seed;
  double v0;
  double mean;
  double se_mean;
  double std_dev;
  double se_std;
  double skewness;
  double excess_kurtosis;
  int32_t higher_moments_defined;
} vo_backtest_row;

/* Runs every configured (strategy, N) backtest; rows are then available until
 * the next run or destroy. */
vo_status vo_backtest_run(vo_session* session);
vo_status vo_backtest_row_count(vo_session* session, size_t* count);
vo_status vo_backtest_row_get(vo_session* session, size_t index,
                              vo_backtest_row* out);
/* Per-path terminal errors of one row; available when the config enables
 * backtest.dump_errors. */
vo_status vo_backtest_errors(vo_session* session, size_t index, double* buf,
                             size_t cap, size_t* len);
vo_status vo_backtest_dump_enabled(vo_session* session, int32_t* enabled);

#ifdef __cplusplus
}
#endif

#endif /* VOHEDGE_H */
