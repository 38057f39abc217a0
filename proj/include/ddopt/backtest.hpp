#pragma once

// Rolling-rebalance evaluation of the drawdown-minimising portfolios.
//
// Protocol: the first portfolio is decided on day index T-1 from an all-cash
// start; it is then held unchanged for `rebalance_every` out-of-sample days,
// after which the process repeats with the previous portfolio as the initial
// holdings and the marked-to-market value as the new budget (self-financing).
// Out-of-sample segments are stitched by plain concatenation; holdings are
// repriced, never renormalised, so the stitched series is continuous in value.
//
// Conventions: assets that leave the investable window are liquidated into
// the budget at the next rebalance date (cost-free: the cost model applies
// only to assets the optimiser can trade). A rebalance whose solve fails
// (infeasible, or timed out without an incumbent) holds the previous
// portfolio unchanged — the only action that keeps the series self-financing.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ddopt/analytics.hpp"
#include "ddopt/error.hpp"
#include "ddopt/market_data.hpp"
#include "ddopt/model.hpp"
#include "ddopt/solver.hpp"

namespace ddopt {

struct BacktestConfig {
  std::size_t T = 30;                // in-sample window length, days
  std::size_t D = 20;                // drawdown lookback, days
  std::size_t rebalance_every = 10;  // out-of-sample days per decided portfolio
  double initial_cash = 1000.0;
  ModelSpec model;       // objective / caps / costs template; T, D, C, A set per window
  SolveOptions solver;
  std::size_t days_per_year = 252;  // Sharpe annualisation
};

struct RebalanceRecord {
  std::size_t end_index = 0;  // panel date index of the rebalance day
  std::string date;
  SolveStatus status = SolveStatus::Infeasible;
  bool adopted = false;  // false: the previous portfolio was held
  double gap = std::numeric_limits<double>::infinity();
  double wall_time = 0.0;
  long nodes = 0;
  double budget = 0.0;  // marked-to-market value available at this rebalance
  double in_avg_daily_return = 0.0;  // mean ln(P_t / P_{t-1}) over the window
  double in_max_dd = 0.0;            // % over the window, lookback D
  double in_avg_dd = 0.0;
  std::vector<std::string> assets;  // assets of the portfolio in force after this rebalance
  std::vector<double> units;        // parallel unit holdings
  std::vector<std::string> warnings;
};

struct BacktestSummary {
  // In-sample columns: averages across rebalances.
  double in_avg_daily_return = 0.0;
  double in_max_dd = 0.0;
  double in_avg_dd = 0.0;
  double avg_solve_seconds = 0.0;
  double pct_optimal = 0.0;
  // Out-of-sample columns: computed on the stitched series.
  double oos_avg_daily_return = 0.0;
  double oos_max_dd = 0.0;  // full-history drawdown
  double oos_avg_dd = 0.0;
  double oos_sharpe = 0.0;
};

struct IndexComparison {
  double exceedance_pct = 0.0;  // % of days the portfolio exceeds the index
  double avg_daily_return = 0.0;
  double max_dd = 0.0;
  double avg_dd = 0.0;
  double sharpe = 0.0;
};

struct BacktestReport {
  std::vector<RebalanceRecord> rebalances;
  std::vector<std::string> stitched_dates;
  ValueSeries stitched;  // out-of-sample portfolio values, one per day
  BacktestSummary summary;
  std::optional<IndexComparison> index;
  std::size_t days_per_year = 252;
  std::vector<std::string> warnings;
};

/// Portfolio state carried between rebalances: named unit holdings plus any
/// residual cash (nonzero only while no portfolio has ever been adopted).
struct HoldingsState {
  std::vector<std::string> assets;
  std::vector<double> units;
  double cash = 0.0;
};

/// Concatenates out-of-sample segments in order, no renormalisation.
inline ValueSeries stitch(const std::vector<ValueSeries>& segments) {
  if (segments.empty()) throw ValidationError("stitch: no segments");
  ValueSeries out;
  for (const auto& s : segments) out.insert(out.end(), s.begin(), s.end());
  return out;
}

namespace detail {

/// Values `held` at panel date `t`, carrying the last known price forward for
/// assets that have no quote that day (recorded once in `warnings`).
inline double holdings_value(const PricePanel& panel, const HoldingsState& held, std::size_t t,
                             std::vector<std::string>* warnings = nullptr) {
  double value = held.cash;
  for (std::size_t k = 0; k < held.assets.size(); ++k) {
    if (held.units[k] == 0.0) continue;
    // Panel assets are sorted, so a binary search would do; linear is fine
    // at these sizes and keeps the code obvious.
    std::size_t i = panel.num_assets();
    for (std::size_t j = 0; j < panel.num_assets(); ++j) {
      if (panel.assets()[j] == held.assets[k]) {
        i = j;
        break;
      }
    }
    if (i == panel.num_assets()) {
      if (warnings) warnings->push_back("holding in unknown asset " + held.assets[k]);
      continue;
    }
    std::size_t q = t;
    while (q > 0 && !panel.has_price(i, q)) --q;
    if (!panel.has_price(i, q)) {
      if (warnings) {
        warnings->push_back("no price history for held asset " + held.assets[k]);
      }
      continue;
    }
    if (q != t && warnings) {
      warnings->push_back("stale price used for " + held.assets[k] + " on " + panel.dates()[t]);
    }
    value += held.units[k] * panel.price(i, q);
  }
  return value;
}

/// Per-window model-spec vectors may be given empty (defaults), as a single
/// broadcast value, or sized to the full panel (subset-selected by name).
inline std::vector<double> fit_to_window(const std::vector<double>& v, const PricePanel& panel,
                                         const PricePanel& win, const char* what) {
  if (v.empty() || v.size() == win.num_assets()) return v;
  if (v.size() == 1) return std::vector<double>(win.num_assets(), v[0]);
  if (v.size() == panel.num_assets()) {
    std::vector<double> out(win.num_assets());
    for (std::size_t k = 0; k < win.num_assets(); ++k) {
      auto it = std::find(panel.assets().begin(), panel.assets().end(), win.assets()[k]);
      out[k] = v[static_cast<std::size_t>(it - panel.assets().begin())];
    }
    return out;
  }
  throw ValidationError(std::string("backtest: ") + what +
                        " must be empty, scalar, or sized to the panel");
}

inline ModelSpec window_spec(const BacktestConfig& cfg, const PricePanel& panel,
                             const PricePanel& win, const HoldingsState& held, double budget) {
  ModelSpec s = cfg.model;
  s.T = 0;  // take the window's length
  s.D = cfg.D;
  s.C = budget;
  s.delta = fit_to_window(s.delta, panel, win, "delta");
  s.buy_cost = fit_to_window(s.buy_cost, panel, win, "buy_cost");
  s.sell_cost = fit_to_window(s.sell_cost, panel, win, "sell_cost");
  if (s.shorting) {
    s.shorting->delta_long = fit_to_window(s.shorting->delta_long, panel, win, "delta_long");
    s.shorting->delta_short = fit_to_window(s.shorting->delta_short, panel, win, "delta_short");
  }
  s.current_holdings.assign(win.num_assets(), 0.0);
  for (std::size_t k = 0; k < held.assets.size(); ++k) {
    for (std::size_t j = 0; j < win.num_assets(); ++j) {
      if (win.assets()[j] == held.assets[k]) {
        s.current_holdings[j] = held.units[k];
        break;
      }
    }
  }
  return s;
}

/// Annualised Sharpe with a flat-series guard: a constant return stream has
/// zero variance (all-cash runs produce one), and the ratio is reported as
/// zero rather than propagating an error out of a summary statistic.
inline double sharpe_or_zero(const std::vector<double>& returns, double days_per_year) {
  if (returns.size() < 2) return 0.0;
  auto [mn, mx] = std::minmax_element(returns.begin(), returns.end());
  if (*mn == *mx) return 0.0;
  return sharpe_annualised(returns, days_per_year);
}

}  // namespace detail

/// Runs the rolling-rebalance protocol over the panel. When `index` is given
/// the report's comparison block is filled as well.
inline BacktestReport run_backtest(const PricePanel& panel, const BacktestConfig& cfg,
                                   const IndexSeries* index = nullptr);

/// Aligns the index to the stitched dates and computes the comparison block.
inline IndexComparison index_comparison(const BacktestReport& report, const IndexSeries& index) {
  std::vector<double> level;
  level.reserve(report.stitched_dates.size());
  for (const auto& date : report.stitched_dates) {
    auto it = std::find(index.dates.begin(), index.dates.end(), date);
    if (it == index.dates.end()) {
      throw ValidationError("index series is missing date " + date);
    }
    level.push_back(index.values[static_cast<std::size_t>(it - index.dates.begin())]);
  }
  IndexComparison cmp;
  cmp.exceedance_pct = exceedance_pct(report.stitched, level);
  if (level.size() >= 2) {
    double sum = 0.0;
    for (std::size_t t = 1; t < level.size(); ++t) sum += std::log(level[t] / level[t - 1]);
    cmp.avg_daily_return = sum / static_cast<double>(level.size() - 1);
    cmp.sharpe = detail::sharpe_or_zero(log_returns(level), report.days_per_year);
  }
  if (!level.empty()) {
    auto dd = drawdown(level, level.size());
    cmp.max_dd = dd.max_drawdown();
    cmp.avg_dd = dd.mean_drawdown();
  }
  return cmp;
}

inline BacktestReport run_backtest(const PricePanel& panel, const BacktestConfig& cfg,
                                   const IndexSeries* index) {
  if (cfg.rebalance_every == 0) throw ValidationError("backtest: rebalance_every must be >= 1");
  if (cfg.T == 0) throw ValidationError("backtest: window length T must be >= 1");
  if (panel.num_dates() < cfg.T + cfg.rebalance_every) {
    throw ValidationError("backtest: panel must span at least T + rebalance_every days");
  }
  BacktestReport report;
  report.days_per_year = cfg.days_per_year;
  if (cfg.T <= cfg.D) {
    report.warnings.push_back("lookback D is not smaller than the window T");
  }

  HoldingsState held;
  held.cash = cfg.initial_cash;  // all cash until a portfolio is first adopted
  std::vector<ValueSeries> segments;

  for (std::size_t e = cfg.T - 1; e + 1 < panel.num_dates(); e += cfg.rebalance_every) {
    RebalanceRecord rec;
    rec.end_index = e;
    rec.date = panel.dates()[e];
    rec.budget = detail::holdings_value(panel, held, e, &rec.warnings);

    std::vector<std::string> excluded;
    PricePanel win = window(panel, e, cfg.T, &excluded);
    for (const auto& name : excluded) {
      rec.warnings.push_back("asset " + name + " excluded for gappy history");
    }

    if (win.num_assets() == 0) {
      rec.status = SolveStatus::Infeasible;
      rec.warnings.push_back("no investable assets; holding previous portfolio");
    } else {
      ModelSpec spec = detail::window_spec(cfg, panel, win, held, rec.budget);
      ModelInstance inst = build(win, spec);
      SolveResult res = solve(inst, cfg.solver);
      rec.status = res.status;
      rec.gap = res.gap;
      rec.wall_time = res.wall_time;
      rec.nodes = res.nodes;
      rec.warnings.insert(rec.warnings.end(), res.warnings.begin(), res.warnings.end());
      if ((res.status == SolveStatus::ProvenOptimal ||
           res.status == SolveStatus::FeasibleWithGap) &&
          !res.x.empty()) {
        held.assets = win.assets();
        held.units = res.x;
        held.cash = 0.0;
        rec.adopted = true;
      } else {
        rec.warnings.push_back("solve failed; holding previous portfolio");
      }
    }
    rec.assets = held.assets;
    rec.units = held.units;

    // In-sample statistics of the portfolio actually in force, valued over
    // the window's date range (equals the solver's recomputed P series when
    // the solve was adopted).
    {
      ValueSeries P(cfg.T);
      for (std::size_t t = 0; t < cfg.T; ++t) {
        P[t] = detail::holdings_value(panel, held, e + 1 - cfg.T + t);
      }
      auto dd = drawdown(P, cfg.D);
      rec.in_max_dd = dd.max_drawdown();
      rec.in_avg_dd = dd.mean_drawdown();
      double sum = 0.0;
      for (std::size_t t = 1; t < cfg.T; ++t) sum += std::log(P[t] / P[t - 1]);
      rec.in_avg_daily_return = cfg.T > 1 ? sum / static_cast<double>(cfg.T - 1) : 0.0;
    }

    // Out-of-sample segment: hold and reprice daily.
    const std::size_t last = std::min(e + cfg.rebalance_every, panel.num_dates() - 1);
    ValueSeries seg;
    for (std::size_t t = e + 1; t <= last; ++t) {
      seg.push_back(detail::holdings_value(panel, held, t, &rec.warnings));
      report.stitched_dates.push_back(panel.dates()[t]);
    }
    segments.push_back(std::move(seg));
    report.rebalances.push_back(std::move(rec));
  }

  report.stitched = stitch(segments);

  // Summary: in-sample columns average across rebalances.
  BacktestSummary& s = report.summary;
  const double n = static_cast<double>(report.rebalances.size());
  long optimal = 0;
  for (const auto& rec : report.rebalances) {
    s.in_avg_daily_return += rec.in_avg_daily_return / n;
    s.in_max_dd += rec.in_max_dd / n;
    s.in_avg_dd += rec.in_avg_dd / n;
    s.avg_solve_seconds += rec.wall_time / n;
    if (rec.status == SolveStatus::ProvenOptimal) ++optimal;
  }
  s.pct_optimal = 100.0 * static_cast<double>(optimal) / n;

  // Out-of-sample columns from the stitched series.
  if (report.stitched.size() >= 2) {
    double sum = 0.0;
    for (std::size_t t = 1; t < report.stitched.size(); ++t) {
      sum += std::log(report.stitched[t] / report.stitched[t - 1]);
    }
    s.oos_avg_daily_return = sum / static_cast<double>(report.stitched.size() - 1);
    s.oos_sharpe = detail::sharpe_or_zero(log_returns(report.stitched), cfg.days_per_year);
  }
  if (!report.stitched.empty()) {
    auto dd = drawdown(report.stitched, report.stitched.size());
    s.oos_max_dd = dd.max_drawdown();
    s.oos_avg_dd = dd.mean_drawdown();
  }

  if (index) report.index = index_comparison(report, *index);
  return report;
}

}  // namespace ddopt
