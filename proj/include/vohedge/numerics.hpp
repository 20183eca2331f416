#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <thread>
#include <vector>

#include "vohedge/errors.hpp"

namespace vohedge {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// 8-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendre8 {
  static constexpr std::array<double, 8> nodes = {
      -0.9602898564975362316836, -0.7966664774136267395916,
      -0.5255324099163289858177, -0.1834346424956498049395,
      0.1834346424956498049395,  0.5255324099163289858177,
      0.7966664774136267395916,  0.9602898564975362316836};
  static constexpr std::array<double, 8> weights = {
      0.1012285362903762591525, 0.2223810344533744705444,
      0.3137066458778872873380, 0.3626837833783619829652,
      0.3626837833783619829652, 0.3137066458778872873380,
      0.2223810344533744705444, 0.1012285362903762591525};
};

// Fixed-order pairwise tree reduction; result is independent of the caller's
// thread count as long as the input order is fixed.
template <typename T>
T pairwise_sum(std::span<const T> values) {
  const std::size_t n = values.size();
  if (n == 0) return T{};
  if (n <= 8) {
    T acc = values[0];
    for (std::size_t i = 1; i < n; ++i) acc += values[i];
    return acc;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(values.subspan(0, half)) + pairwise_sum(values.subspan(half));
}

template <typename T>
T pairwise_sum(const std::vector<T>& values) {
  return pairwise_sum(std::span<const T>(values));
}

// Static partition of [0, count) over `threads` workers. Work items must be
// independent; results written by index stay deterministic across thread
// counts.
inline void parallel_for(std::size_t count, int threads,
                         const std::function<void(std::size_t, std::size_t)>& run) {
  if (threads <= 1 || count < 2) {
    run(0, count);
    return;
  }
  const std::size_t n = static_cast<std::size_t>(threads);
  std::vector<std::thread> pool;
  pool.reserve(n);
  const std::size_t chunk = (count + n - 1) / n;
  for (std::size_t w = 0; w < n; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&run, lo, hi] { run(lo, hi); });
  }
  for (auto& t : pool) t.join();
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

inline double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi);
}

// Black-Scholes call with zero rates on a spot martingale.
inline double black_scholes_call(double spot, double strike, double vol,
                                 double maturity) {
  if (maturity <= 0.0 || vol <= 0.0) return std::max(spot - strike, 0.0);
  const double sd = vol * std::sqrt(maturity);
  const double d1 = std::log(spot / strike) / sd + 0.5 * sd;
  return spot * normal_cdf(d1) - strike * normal_cdf(d1 - sd);
}

inline double black_scholes_call_delta(double spot, double strike, double vol,
                                       double maturity) {
  if (maturity <= 0.0 || vol <= 0.0) return spot > strike ? 1.0 : 0.0;
  const double sd = vol * std::sqrt(maturity);
  return normal_cdf(std::log(spot / strike) / sd + 0.5 * sd);
}

inline double black_scholes_put(double spot, double strike, double vol,
                                double maturity) {
  return black_scholes_call(spot, strike, vol, maturity) - spot + strike;
}

inline double black_scholes_put_delta(double spot, double strike, double vol,
                                      double maturity) {
  return black_scholes_call_delta(spot, strike, vol, maturity) - 1.0;
}

// Piecewise-linear tabulated function of time. Knots must be strictly
// increasing; evaluation outside the knot range clamps to the end values.
class TimeTable {
 public:
  TimeTable() = default;
  TimeTable(std::vector<double> t, std::vector<double> v) : t_(std::move(t)), v_(std::move(v)) {
    if (t_.size() != v_.size() || t_.size() < 2)
      throw InvalidArgument("TimeTable needs at least two (t, value) knots");
    for (std::size_t i = 1; i < t_.size(); ++i)
      if (!(t_[i] > t_[i - 1]))
        throw InvalidArgument("TimeTable knots must be strictly increasing in t");
  }

  static TimeTable constant(double value, double t0, double t1) {
    return TimeTable({t0, t1}, {value, value});
  }

  bool empty() const noexcept { return t_.empty(); }
  double front_time() const { return t_.front(); }
  double back_time() const { return t_.back(); }

  double operator()(double t) const {
    if (t <= t_.front()) return v_.front();
    if (t >= t_.back()) return v_.back();
    const auto it = std::upper_bound(t_.begin(), t_.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - t_.begin());
    const double w = (t - t_[i - 1]) / (t_[i] - t_[i - 1]);
    return v_[i - 1] + w * (v_[i] - v_[i - 1]);
  }

  // Exact integral of the interpolant over [0, t] (trapezoid on each segment).
  double integral(double t) const {
    double acc = 0.0;
    double prev_t = 0.0;
    double prev_v = (*this)(0.0);
    for (std::size_t i = 0; i < t_.size() && t_[i] < t; ++i) {
      if (t_[i] <= prev_t) continue;
      acc += 0.5 * (prev_v + v_[i]) * (t_[i] - prev_t);
      prev_t = t_[i];
      prev_v = v_[i];
    }
    if (t > prev_t) acc += 0.5 * (prev_v + (*this)(t)) * (t - prev_t);
    return acc;
  }

  double min_value() const {
    double m = v_.front();
    for (double x : v_) m = std::min(m, x);
    return m;
  }
  double max_value() const {
    double m = v_.front();
    for (double x : v_) m = std::max(m, x);
    return m;
  }
  bool strictly_increasing_values() const {
    for (std::size_t i = 1; i < v_.size(); ++i)
      if (!(v_[i] > v_[i - 1])) return false;
    return true;
  }

  const std::vector<double>& times() const noexcept { return t_; }
  const std::vector<double>& values() const noexcept { return v_; }

 private:
  std::vector<double> t_;
  std::vector<double> v_;
};

// Cumulative curve sampled on a uniform grid over [0, T]; queries between grid
// nodes use Catmull-Rom cubic interpolation (one-sided at the ends).
template <typename T>
class UniformCurve {
 public:
  UniformCurve() = default;
  UniformCurve(double horizon, std::vector<T> node_values)
      : horizon_(horizon), values_(std::move(node_values)) {
    if (values_.size() < 2) throw InternalError("UniformCurve needs >= 2 nodes");
    step_ = horizon_ / static_cast<double>(values_.size() - 1);
  }

  T operator()(double t) const {
    const std::size_t n = values_.size();
    if (t <= 0.0) return values_.front();
    if (t >= horizon_) return values_.back();
    const double x = t / step_;
    std::size_t i = static_cast<std::size_t>(x);
    if (i >= n - 1) i = n - 2;
    const double u = x - static_cast<double>(i);
    const T p1 = values_[i];
    const T p2 = values_[i + 1];
    const T p0 = i > 0 ? values_[i - 1] : 2.0 * p1 - p2;
    const T p3 = i + 2 < n ? values_[i + 2] : 2.0 * p2 - p1;
    const double u2 = u * u;
    const double u3 = u2 * u;
    return 0.5 * ((2.0 * p1) + (p2 - p0) * u +
                  (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * u2 +
                  (3.0 * p1 - 3.0 * p2 + p3 - p0) * u3);
  }

  double horizon() const noexcept { return horizon_; }
  const std::vector<T>& nodes() const noexcept { return values_; }

 private:
  double horizon_ = 0.0;
  double step_ = 0.0;
  std::vector<T> values_;
};

}  // namespace vohedge
