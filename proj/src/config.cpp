#include "vohedge/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace vohedge {

namespace {

struct Entry {
  std::string value;
  int line = 0;
  bool used = false;
};

class ConfigMap {
 public:
  explicit ConfigMap(const std::string& text) {
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
      ++line;
      const auto hash = raw.find('#');
      std::string s = hash == std::string::npos ? raw : raw.substr(0, hash);
      const auto notspace = s.find_first_not_of(" \t\r");
      if (notspace == std::string::npos) continue;
      const auto eq = s.find('=');
      if (eq == std::string::npos)
        fail(line, "expected 'key = value'");
      const std::string key = trim(s.substr(0, eq));
      const std::string value = trim(s.substr(eq + 1));
      if (key.empty()) fail(line, "empty key");
      if (entries_.count(key)) fail(line, "duplicate key '" + key + "'");
      entries_[key] = Entry{value, line, false};
    }
  }

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  std::optional<std::string> get(const std::string& key) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    it->second.used = true;
    return it->second.value;
  }

  std::string require(const std::string& key) {
    auto v = get(key);
    if (!v) throw ConfigError("missing required key '" + key + "'");
    return *v;
  }

  double get_double(const std::string& key, std::optional<double> fallback = {}) {
    auto v = get(key);
    if (!v) {
      if (fallback) return *fallback;
      throw ConfigError("missing required key '" + key + "'");
    }
    return parse_double(key, *v);
  }

  long get_long(const std::string& key, std::optional<long> fallback = {}) {
    auto v = get(key);
    if (!v) {
      if (fallback) return *fallback;
      throw ConfigError("missing required key '" + key + "'");
    }
    return parse_long(key, *v);
  }

  bool get_bool(const std::string& key, bool fallback) {
    auto v = get(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1") return true;
    if (*v == "false" || *v == "0") return false;
    fail_key(key, "expected true/false");
    return fallback;
  }

  void reject_unused() const {
    std::string msg;
    for (const auto& [key, entry] : entries_) {
      if (!entry.used) {
        if (!msg.empty()) msg += "; ";
        msg += "unknown or unused key '" + key + "' (line " +
               std::to_string(entry.line) + ")";
      }
    }
    if (!msg.empty()) throw ConfigError(msg);
  }

  [[noreturn]] void fail_key(const std::string& key, const std::string& what) const {
    const auto it = entries_.find(key);
    const int line = it == entries_.end() ? 0 : it->second.line;
    fail(line, "key '" + key + "': " + what);
  }

  double parse_double(const std::string& key, const std::string& v) const {
    try {
      std::size_t pos = 0;
      const double x = std::stod(v, &pos);
      if (pos != v.size()) throw std::invalid_argument(v);
      return x;
    } catch (const std::exception&) {
      fail_key(key, "cannot parse '" + v + "' as a number");
    }
  }

  long parse_long(const std::string& key, const std::string& v) const {
    try {
      std::size_t pos = 0;
      const long x = std::stol(v, &pos);
      if (pos != v.size()) throw std::invalid_argument(v);
      return x;
    } catch (const std::exception&) {
      fail_key(key, "cannot parse '" + v + "' as an integer");
    }
  }

  static std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
  }

 private:
  [[noreturn]] static void fail(int line, const std::string& what) {
    throw ConfigError("config line " + std::to_string(line) + ": " + what);
  }

  std::map<std::string, Entry> entries_;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(ConfigMap::trim(item));
  return out;
}

// "t0:v0, t1:v1, ..." -> TimeTable
TimeTable parse_table(ConfigMap& cfg, const std::string& key,
                      const std::string& text) {
  std::vector<double> t, v;
  for (const auto& pair : split(text, ',')) {
    const auto parts = split(pair, ':');
    if (parts.size() != 2) cfg.fail_key(key, "expected 't:value' pairs");
    t.push_back(cfg.parse_double(key, parts[0]));
    v.push_back(cfg.parse_double(key, parts[1]));
  }
  try {
    return TimeTable(std::move(t), std::move(v));
  } catch (const Error& e) {
    cfg.fail_key(key, e.what());
  }
}

std::vector<double> parse_list(ConfigMap& cfg, const std::string& key,
                               const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split(text, ','))
    out.push_back(cfg.parse_double(key, item));
  return out;
}

LevyModel parse_driver(ConfigMap& cfg) {
  const std::string kind = cfg.require("model.kind");
  try {
    if (kind == "poisson")
      return LevyModel::poisson(cfg.get_double("model.lambda_p"));
    if (kind == "nig" || kind == "vg") {
      const double alpha = cfg.get_double("model.alpha");
      const double beta = cfg.get_double("model.beta");
      const double delta = cfg.get_double("model.delta");
      const double mu = cfg.get_double("model.mu");
      LevyModel base = kind == "nig" ? LevyModel::nig(alpha, beta, delta, mu)
                                     : LevyModel::vg(alpha, beta, delta, mu);
      if (cfg.has("model.moment_match_C"))
        base = reparametrize_moment_matched(base,
                                            cfg.get_double("model.moment_match_C"));
      return base;
    }
    if (kind == "brownian")
      return LevyModel::brownian_drift(cfg.get_double("model.sigma"),
                                       cfg.get_double("model.m"));
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("model block: ") + e.what());
  }
  cfg.fail_key("model.kind", "unknown kind '" + kind + "'");
}

std::shared_ptr<const PiiModel> parse_pii(ConfigMap& cfg) {
  const std::string kind = cfg.get("pii.kind").value_or("levy");
  const double T = cfg.get_double("pii.T");
  const int grid = static_cast<int>(cfg.get_long("pii.grid", 256));
  try {
    if (kind == "levy")
      return std::make_shared<PiiModel>(
          PiiModel::levy_homogeneous(parse_driver(cfg), T, grid));
    if (kind == "wiener") {
      auto kernel = parse_table(cfg, "pii.kernel", cfg.require("pii.kernel"));
      return std::make_shared<PiiModel>(PiiModel::wiener_integral(
          parse_driver(cfg), std::move(kernel), T, grid));
    }
    if (kind == "two_factor") {
      const double sigma_s = cfg.get_double("pii.sigma_s");
      const double lambda_mr = cfg.get_double("pii.lambda_mr", 0.0);
      const double sigma_l = cfg.get_double("pii.sigma_l", 0.0);
      const double delivery = cfg.get_double("pii.delivery_Td", T);
      std::optional<TimeTable> trend;
      const std::string trend_text = cfg.get("pii.trend").value_or("zero");
      if (trend_text != "zero") trend = parse_table(cfg, "pii.trend", trend_text);
      return std::make_shared<PiiModel>(PiiModel::two_factor_electricity(
          parse_driver(cfg), sigma_s, lambda_mr, sigma_l, std::move(trend),
          delivery, T, grid));
    }
    if (kind == "time_changed_brownian") {
      auto psi = parse_table(cfg, "pii.psi", cfg.require("pii.psi"));
      return std::make_shared<PiiModel>(
          PiiModel::time_changed_brownian(std::move(psi), T, grid));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("pii block: ") + e.what());
  }
  cfg.fail_key("pii.kind", "unknown kind '" + kind + "'");
}

PayoffSpec parse_payoff(ConfigMap& cfg, EngineKind engine) {
  PayoffSpec spec;
  const std::string kind = cfg.get("payoff.kind").value_or("call");
  if (kind == "call") {
    spec.kind = PayoffKind::call;
    spec.strike = cfg.get_double("payoff.K");
    const std::string variant = cfg.get("payoff.variant").value_or("r_gt_1");
    if (variant == "r_gt_1") {
      spec.variant = CallVariant::abscissa_above_one;
      spec.abscissa = cfg.get_double("payoff.R", 1.5);
    } else if (variant == "r_in_0_1") {
      spec.variant = CallVariant::abscissa_in_unit_strip;
      spec.abscissa = cfg.get_double("payoff.R", 0.5);
    } else {
      cfg.fail_key("payoff.variant", "expected r_gt_1 or r_in_0_1");
    }
  } else if (kind == "put") {
    spec.kind = PayoffKind::put;
    spec.strike = cfg.get_double("payoff.K");
    spec.abscissa = cfg.get_double("payoff.R", -1.0);
  } else if (kind == "digital") {
    spec.kind = PayoffKind::digital;
    spec.barrier = cfg.get_double("payoff.B");
  } else if (kind == "self_quanto") {
    spec.kind = PayoffKind::self_quanto;
    spec.strike = cfg.get_double("payoff.K");
  } else if (kind == "custom") {
    spec.kind = PayoffKind::custom;
    if (engine == EngineKind::exponential) {
      const std::string text = cfg.require("payoff.atoms");
      for (const auto& item : split(text, ',')) {
        const auto parts = split(item, ':');
        if (parts.size() != 4)
          cfg.fail_key("payoff.atoms", "expected re:im:w_re:w_im items");
        spec.atoms.push_back(
            PayoffAtom{Complex(cfg.parse_double("payoff.atoms", parts[0]),
                               cfg.parse_double("payoff.atoms", parts[1])),
                       Complex(cfg.parse_double("payoff.atoms", parts[2]),
                               cfg.parse_double("payoff.atoms", parts[3]))});
      }
    } else {
      const std::string text = cfg.require("payoff.fourier_atoms");
      for (const auto& item : split(text, ',')) {
        const auto parts = split(item, ':');
        if (parts.size() != 3)
          cfg.fail_key("payoff.fourier_atoms", "expected u:w_re:w_im items");
        spec.fourier_atoms.push_back(
            FourierAtom{cfg.parse_double("payoff.fourier_atoms", parts[0]),
                        Complex(cfg.parse_double("payoff.fourier_atoms", parts[1]),
                                cfg.parse_double("payoff.fourier_atoms", parts[2]))});
      }
    }
  } else {
    cfg.fail_key("payoff.kind", "unknown kind '" + kind + "'");
  }

  // engine / payoff compatibility
  const bool fourier_kind =
      spec.kind == PayoffKind::digital || spec.kind == PayoffKind::self_quanto;
  if (engine == EngineKind::exponential && fourier_kind)
    throw ConfigError("payoff kind '" + kind +
                      "' is a Fourier payoff; use engine = arithmetic");
  if (engine == EngineKind::arithmetic &&
      (spec.kind == PayoffKind::call || spec.kind == PayoffKind::put))
    throw ConfigError("payoff kind '" + kind +
                      "' is a contour payoff; use engine = exponential");
  return spec;
}

}  // namespace

PayoffMeasure PayoffSpec::build_measure(double strike_override) const {
  const double k = strike_override > 0.0 ? strike_override : strike;
  switch (kind) {
    case PayoffKind::call:
      return call_representation(k, variant, abscissa);
    case PayoffKind::put:
      return put_representation(k, abscissa);
    case PayoffKind::custom:
      if (atoms.empty())
        throw InvalidArgument("custom exponential payoff needs atoms");
      return PayoffMeasure(atoms, {}, "custom atoms");
    default:
      throw InvalidArgument("payoff kind has no contour representation");
  }
}

FourierMeasure PayoffSpec::build_fourier(double strike_override) const {
  const double k = strike_override > 0.0 ? strike_override : strike;
  switch (kind) {
    case PayoffKind::digital:
      return digital_asset_or_nothing(barrier);
    case PayoffKind::self_quanto:
      return self_quanto_put(k);
    case PayoffKind::custom:
      if (fourier_atoms.empty())
        throw InvalidArgument("custom arithmetic payoff needs fourier atoms");
      return FourierMeasure(nullptr, fourier_atoms, "custom fourier atoms");
    default:
      throw InvalidArgument("payoff kind has no Fourier representation");
  }
}

std::function<double(double)> PayoffSpec::payoff_on_price(
    EngineKind engine, double strike_override) const {
  const double k = strike_override > 0.0 ? strike_override : strike;
  if (engine == EngineKind::exponential) {
    switch (kind) {
      case PayoffKind::call:
        return [k](double s) { return std::max(s - k, 0.0); };
      case PayoffKind::put:
        return [k](double s) { return std::max(k - s, 0.0); };
      case PayoffKind::custom: {
        const auto a = atoms;
        return [a](double s) {
          const double x = std::log(s);
          double acc = 0.0;
          for (const auto& atom : a) acc += (atom.weight * std::exp(atom.z * x)).real();
          return acc;
        };
      }
      default:
        throw InvalidArgument("payoff kind has no spot payoff");
    }
  }
  switch (kind) {
    case PayoffKind::digital: {
      const double b = barrier;
      return [b](double x) {
        const double ex = std::exp(x);
        return ex < b ? ex : 0.0;
      };
    }
    case PayoffKind::self_quanto:
      return [k](double x) {
        const double ex = std::exp(x);
        return ex * std::max(k - ex, 0.0);
      };
    case PayoffKind::custom: {
      const auto a = fourier_atoms;
      return [a](double x) {
        double acc = 0.0;
        for (const auto& atom : a)
          acc += (atom.weight * std::exp(Complex(0.0, atom.u * x))).real();
        return acc;
      };
    }
    default:
      throw InvalidArgument("payoff kind has no log-level payoff");
  }
}

RunConfig parse_run_config(const std::string& text) {
  ConfigMap cfg(text);
  RunConfig out;

  const std::string engine = cfg.get("engine").value_or("exponential");
  if (engine == "exponential")
    out.engine = EngineKind::exponential;
  else if (engine == "arithmetic")
    out.engine = EngineKind::arithmetic;
  else
    cfg.fail_key("engine", "expected exponential or arithmetic");

  out.pii = parse_pii(cfg);
  if (out.engine == EngineKind::exponential)
    out.s0 = cfg.get_double("pii.s0");
  else if (cfg.has("pii.s0"))
    cfg.fail_key("pii.s0", "the arithmetic engine trades the log level itself");

  out.payoff = parse_payoff(cfg, out.engine);

  out.quadrature.u_max = cfg.get_double("quadrature.umax", 400.0);
  out.quadrature.log2_panels =
      static_cast<int>(cfg.get_long("quadrature.log2_panels", 13));
  out.quadrature.rel_tol = cfg.get_double("quadrature.tol", 1e-7);
  if (out.quadrature.log2_panels < 4 || out.quadrature.log2_panels > 22)
    cfg.fail_key("quadrature.log2_panels", "expected a value in 4..22");

  out.j0.log2_panels = static_cast<int>(
      cfg.get_long("fs.j0_log2_panels", out.quadrature.log2_panels - 2));
  out.j0.rel_tol = cfg.get_double("fs.j0_tol", 1e-6);
  out.j0.time_panels = static_cast<int>(cfg.get_long("fs.j0_time_panels", 16));

  if (auto v = cfg.get("backtest.n_rebalances")) {
    out.backtest_n.clear();
    for (double x : parse_list(cfg, "backtest.n_rebalances", *v)) {
      if (x < 1 || x != std::floor(x))
        cfg.fail_key("backtest.n_rebalances", "expected positive integers");
      out.backtest_n.push_back(static_cast<int>(x));
    }
  }
  out.n_paths = static_cast<int>(cfg.get_long("backtest.n_paths", 5000));
  out.seed = static_cast<std::uint64_t>(cfg.get_long("backtest.seed", 1));
  out.substeps = static_cast<int>(cfg.get_long("backtest.substeps", 64));
  if (auto v = cfg.get("backtest.strategies")) {
    out.strategies.clear();
    for (const auto& name : split(*v, ',')) {
      if (name == "vo")
        out.strategies.push_back(Strategy::variance_optimal);
      else if (name == "bs")
        out.strategies.push_back(Strategy::black_scholes);
      else if (name == "vo_bs_capital")
        out.strategies.push_back(Strategy::vo_with_bs_capital);
      else
        cfg.fail_key("backtest.strategies", "unknown strategy '" + name + "'");
    }
  }
  out.dump_errors = cfg.get_bool("backtest.dump_errors", false);

  if (auto v = cfg.get("report.strikes"))
    out.report_strikes = parse_list(cfg, "report.strikes", *v);
  if (auto v = cfg.get("report.spots"))
    out.report_spots = parse_list(cfg, "report.spots", *v);

  cfg.reject_unused();
  return out;
}

RunConfig parse_run_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str());
}

}  // namespace vohedge
