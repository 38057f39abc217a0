#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "ddopt/error.hpp"

namespace ddopt {

/// A value (price or portfolio level) series indexed 1..T conceptually;
/// stored 0-based.
using ValueSeries = std::vector<double>;

struct DrawdownSeries {
  std::vector<double> running_max;  // M_t: trailing-window maximum of the series
  std::vector<double> drawdown;     // d_t: percentage drop from running_max
  std::size_t lookback = 0;         // D: how many prior days the window scans

  double max_drawdown() const {
    return *std::max_element(drawdown.begin(), drawdown.end());
  }
  double mean_drawdown() const {
    double s = 0.0;
    for (double d : drawdown) s += d;
    return s / static_cast<double>(drawdown.size());
  }
};

/// Trailing-window drawdown of a positive value series.
///
/// For each t, M_t is the maximum of the series over the window
/// [max(0, t - lookback), t] (so the window spans at most lookback + 1
/// observations including t itself), and
/// d_t = 100 * (M_t - P_t) / M_t.
///
/// lookback == 0 gives d = 0 everywhere; a lookback spanning the whole
/// series gives the classical peak-to-date drawdown.
inline DrawdownSeries drawdown(const ValueSeries& values, std::size_t lookback) {
  if (values.empty()) throw ValidationError("drawdown: empty series");
  for (double v : values) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ValidationError("drawdown: series values must be positive and finite");
    }
  }
  DrawdownSeries out;
  out.lookback = lookback;
  const std::size_t T = values.size();
  out.running_max.resize(T);
  out.drawdown.resize(T);
  for (std::size_t t = 0; t < T; ++t) {
    const std::size_t first = t >= lookback ? t - lookback : 0;
    double m = values[t];
    for (std::size_t tau = first; tau <= t; ++tau) m = std::max(m, values[tau]);
    out.running_max[t] = m;
    out.drawdown[t] = 100.0 * (m - values[t]) / m;
  }
  return out;
}

inline double mean(const std::vector<double>& xs) {
  if (xs.empty()) throw ValidationError("mean: empty sample");
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

/// Sample (n-1 denominator) standard deviation.
inline double sample_stdev(const std::vector<double>& xs) {
  if (xs.size() < 2) throw ValidationError("sample_stdev: need at least 2 points");
  const double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

/// Daily log returns in percent, 100 * ln(P_t / P_{t-1}); length T-1.
inline std::vector<double> log_returns(const ValueSeries& values) {
  if (values.size() < 2) throw ValidationError("log_returns: need at least 2 points");
  std::vector<double> r;
  r.reserve(values.size() - 1);
  for (std::size_t t = 1; t < values.size(); ++t) {
    if (!(values[t] > 0.0) || !(values[t - 1] > 0.0)) {
      throw ValidationError("log_returns: series values must be positive");
    }
    r.push_back(100.0 * std::log(values[t] / values[t - 1]));
  }
  return r;
}

/// Annualised Sharpe ratio of a daily return sample against a zero risk-free
/// rate: (mean / sample stdev) * sqrt(days_per_year). Scale-free in the
/// return units (percent or raw).
inline double sharpe_annualised(const std::vector<double>& daily_returns,
                                std::size_t days_per_year = 252) {
  const double sd = sample_stdev(daily_returns);
  if (sd == 0.0) throw ValidationError("sharpe_annualised: zero return variance");
  return mean(daily_returns) / sd * std::sqrt(static_cast<double>(days_per_year));
}

/// Percentage of days on which `series` strictly exceeds `benchmark` after
/// both are normalised to 1 at the first observation. Day 1 (the
/// normalisation point) is included in the denominator and can never count
/// as an exceedance.
inline double exceedance_pct(const ValueSeries& series, const ValueSeries& benchmark) {
  if (series.size() != benchmark.size() || series.empty()) {
    throw ValidationError("exceedance_pct: series must be nonempty and equal length");
  }
  if (!(series[0] > 0.0) || !(benchmark[0] > 0.0)) {
    throw ValidationError("exceedance_pct: series must start positive");
  }
  std::size_t count = 0;
  for (std::size_t t = 0; t < series.size(); ++t) {
    if (series[t] / series[0] > benchmark[t] / benchmark[0]) ++count;
  }
  return 100.0 * static_cast<double>(count) / static_cast<double>(series.size());
}

}  // namespace ddopt
