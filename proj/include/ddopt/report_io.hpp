#pragma once

// JSON and CSV serialisation for solver and backtest results.
//
// The JSON layouts are versioned; the matching schema documents live in
// schemas/ at the repository root. Serialisation is deterministic: key order
// is fixed, doubles use the shortest round-trip representation, and when
// `stable_output` is set every wall-clock field is zeroed so that two runs of
// the same deterministic configuration produce byte-identical files.

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ddopt/backtest.hpp"
#include "ddopt/error.hpp"
#include "ddopt/market_data.hpp"
#include "ddopt/model.hpp"
#include "ddopt/solver.hpp"

namespace ddopt {

inline constexpr const char* kSolveResultSchemaVersion = "1";
inline constexpr const char* kBacktestReportSchemaVersion = "1";

using Json = nlohmann::ordered_json;

namespace detail {

/// JSON has no inf/nan; report gaps on unsolved problems as null.
inline Json finite_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace detail

inline Json solve_result_json(const std::vector<std::string>& assets, const SolveResult& res,
                              const SolveOptions& opts, bool stable_output = false) {
  Json j;
  j["schema_version"] = kSolveResultSchemaVersion;
  j["status"] = to_string(res.status);
  j["method"] = res.method;
  j["objective"] = detail::finite_or_null(res.objective);
  j["lower_bound"] = res.lower_bound;
  j["gap"] = detail::finite_or_null(res.gap);
  j["nodes"] = res.nodes;
  j["wall_time_seconds"] = stable_output ? 0.0 : res.wall_time;
  j["total_costs"] = res.total_costs;
  j["assets"] = assets;
  j["holdings"] = Json{{"x", res.x}, {"xl", res.xl}, {"xs", res.xs}, {"costs", res.G}};
  j["series"] = Json{{"value", res.P}, {"peak", res.M}, {"drawdown", res.d}};
  j["options"] = Json{{"gap_tol", opts.gap_tol},
                      {"bisect_tol", opts.bisect_tol},
                      {"time_limit", opts.time_limit},
                      {"threads", opts.threads},
                      {"deterministic", opts.deterministic},
                      {"seed", opts.seed}};
  Json trace = Json::array();
  for (const auto& n : res.node_trace) {
    trace.push_back(Json{{"id", n.id},
                         {"lower", n.lower},
                         {"upper", detail::finite_or_null(n.upper)}});
  }
  j["node_trace"] = std::move(trace);
  j["warnings"] = res.warnings;
  return j;
}

inline Json summary_json(const BacktestSummary& s, bool stable_output) {
  return Json{{"in_avg_daily_return", s.in_avg_daily_return},
              {"in_max_dd", s.in_max_dd},
              {"in_avg_dd", s.in_avg_dd},
              {"avg_solve_seconds", stable_output ? 0.0 : s.avg_solve_seconds},
              {"pct_optimal", s.pct_optimal},
              {"oos_avg_daily_return", s.oos_avg_daily_return},
              {"oos_max_dd", s.oos_max_dd},
              {"oos_avg_dd", s.oos_avg_dd},
              {"oos_sharpe", s.oos_sharpe}};
}

inline Json backtest_report_json(const BacktestReport& report, const BacktestConfig& cfg,
                                 bool stable_output = false) {
  Json j;
  j["schema_version"] = kBacktestReportSchemaVersion;
  j["config"] = Json{{"T", cfg.T},
                     {"D", cfg.D},
                     {"rebalance_every", cfg.rebalance_every},
                     {"initial_cash", cfg.initial_cash},
                     {"days_per_year", cfg.days_per_year},
                     {"objective", to_string(cfg.model.objective)},
                     {"shorting", cfg.model.shorting.has_value()}};
  j["summary"] = summary_json(report.summary, stable_output);
  Json rebs = Json::array();
  for (const auto& r : report.rebalances) {
    rebs.push_back(Json{{"end_index", r.end_index},
                        {"date", r.date},
                        {"status", to_string(r.status)},
                        {"adopted", r.adopted},
                        {"gap", detail::finite_or_null(r.gap)},
                        {"wall_time_seconds", stable_output ? 0.0 : r.wall_time},
                        {"nodes", r.nodes},
                        {"budget", r.budget},
                        {"in_avg_daily_return", r.in_avg_daily_return},
                        {"in_max_dd", r.in_max_dd},
                        {"in_avg_dd", r.in_avg_dd},
                        {"assets", r.assets},
                        {"units", r.units},
                        {"warnings", r.warnings}});
  }
  j["rebalances"] = std::move(rebs);
  j["stitched"] = Json{{"dates", report.stitched_dates}, {"values", report.stitched}};
  if (report.index) {
    j["index"] = Json{{"exceedance_pct", report.index->exceedance_pct},
                      {"avg_daily_return", report.index->avg_daily_return},
                      {"max_dd", report.index->max_dd},
                      {"avg_dd", report.index->avg_dd},
                      {"sharpe", report.index->sharpe}};
  } else {
    j["index"] = nullptr;
  }
  j["warnings"] = report.warnings;
  return j;
}

/// One row per out-of-sample day, plot-ready.
inline std::string stitched_csv(const BacktestReport& report) {
  std::string out = "date,value\n";
  char buf[64];
  for (std::size_t t = 0; t < report.stitched.size(); ++t) {
    std::snprintf(buf, sizeof buf, "%.12g", report.stitched[t]);
    out += report.stitched_dates[t];
    out += ',';
    out += buf;
    out += '\n';
  }
  return out;
}

inline Json drawdown_report_json(const std::vector<std::string>& dates, const ValueSeries& values,
                                 std::size_t lookback) {
  auto dd = drawdown(values, lookback);
  auto rets = log_returns(values);
  Json j;
  j["lookback"] = lookback;
  j["dates"] = dates;
  j["values"] = values;
  j["running_max"] = dd.running_max;
  j["drawdown"] = dd.drawdown;
  j["max_drawdown"] = dd.max_drawdown();
  j["mean_drawdown"] = dd.mean_drawdown();
  j["return_mean_pct"] = rets.empty() ? 0.0 : 100.0 * mean(rets);
  j["return_stdev_pct"] = rets.size() < 2 ? 0.0 : 100.0 * sample_stdev(rets);
  return j;
}

/// Fixed-width analytics table for a value series: per-day value, trailing
/// peak, and percentage drawdown, followed by the summary statistics.
inline std::string drawdown_table(const std::vector<std::string>& dates, const ValueSeries& values,
                                  std::size_t lookback) {
  auto dd = drawdown(values, lookback);
  auto rets = log_returns(values);
  std::string out;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-12s %14s %14s %12s\n", "date", "value", "peak", "drawdown%");
  out += buf;
  for (std::size_t t = 0; t < values.size(); ++t) {
    std::snprintf(buf, sizeof buf, "%-12s %14.4f %14.4f %12.2f\n", dates[t].c_str(), values[t],
                  dd.running_max[t], dd.drawdown[t]);
    out += buf;
  }
  std::snprintf(buf, sizeof buf,
                "\nlookback %zu: mean drawdown %.2f%%, max drawdown %.2f%%\n"
                "log returns: mean %.2f%%, stdev %.2f%%\n",
                lookback, dd.mean_drawdown(), dd.max_drawdown(),
                rets.empty() ? 0.0 : 100.0 * mean(rets),
                rets.size() < 2 ? 0.0 : 100.0 * sample_stdev(rets));
  out += buf;
  return out;
}

/// The nine-column summary row (in-sample block then out-of-sample block),
/// prefixed by the objective tag; exceedance is appended when an index was
/// compared against.
inline std::string summary_row(const BacktestReport& report, const BacktestConfig& cfg) {
  const auto& s = report.summary;
  char buf[320];
  std::snprintf(buf, sizeof buf,
                "%-8s in[ret %.6f maxdd %.2f avgdd %.2f solve %.2fs opt %.1f%%] "
                "oos[ret %.6f maxdd %.2f avgdd %.2f sharpe %.4f]",
                to_string(cfg.model.objective), s.in_avg_daily_return, s.in_max_dd, s.in_avg_dd,
                s.avg_solve_seconds, s.pct_optimal, s.oos_avg_daily_return, s.oos_max_dd,
                s.oos_avg_dd, s.oos_sharpe);
  std::string out = buf;
  if (report.index) {
    std::snprintf(buf, sizeof buf, " exceed %.2f%%", report.index->exceedance_pct);
    out += buf;
  }
  return out;
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open output file: " + path);
  out << content;
  if (!out) throw ParseError("failed writing output file: " + path);
}

}  // namespace ddopt
