// ddopt: build, globally solve, and evaluate minimal-drawdown portfolios.
//
// Subcommands:
//   solve     one in-sample window -> solve_result.json
//   backtest  rolling-rebalance evaluation -> backtest_report.json + stitched.csv
//   drawdown  trailing-drawdown analytics for any date,value series
//
// Exit codes: 0 solved/completed; 1 infeasible or timed out; 2 a data file is
// missing or unreadable; 3 configuration or validation errors; 4 internal
// resource errors (numerical failure, limits).

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ddopt/backtest.hpp"
#include "ddopt/error.hpp"
#include "ddopt/market_data.hpp"
#include "ddopt/model.hpp"
#include "ddopt/report_io.hpp"
#include "ddopt/run_config.hpp"
#include "ddopt/solver.hpp"

namespace {

using namespace ddopt;

struct SharedFlags {
  std::string config_path;
  std::string out_dir;  // overrides the config's out_dir when set
  std::string objective;
  std::optional<double> lambda1, lambda2, delta, gamma, gap_tol, time_limit;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  bool enable_short = false;
  bool deterministic = false;
  bool stable_output = false;
};

void add_shared_flags(CLI::App* cmd, SharedFlags& f) {
  cmd->add_option("--config", f.config_path, "JSON run configuration")->required();
  cmd->add_option("--out", f.out_dir, "output directory (overrides the config)");
  cmd->add_option("--objective", f.objective, "minavg, minmax, or weighted")
      ->check(CLI::IsMember({"minavg", "minmax", "weighted"}));
  cmd->add_option("--lambda1", f.lambda1, "weight on the maximum drawdown (weighted objective)");
  cmd->add_option("--lambda2", f.lambda2, "weight on the average drawdown (weighted objective)");
  cmd->add_option("--delta", f.delta, "per-asset proportion cap, broadcast to all assets");
  cmd->add_option("--gamma", f.gamma, "transaction-cost cap as a fraction of the budget");
  cmd->add_option("--gap-tol", f.gap_tol, "relative optimality gap target");
  cmd->add_option("--time-limit", f.time_limit, "solver time limit in seconds per solve");
  cmd->add_option("--seed", f.seed, "seed recorded in outputs");
  cmd->add_option("--threads", f.threads, "worker threads for bounds tightening");
  cmd->add_flag("--short", f.enable_short, "enable shorting with default caps");
  cmd->add_flag("--deterministic", f.deterministic, "force the single-ordered search");
  cmd->add_flag("--stable-output", f.stable_output,
                "zero wall-clock fields in written files so reruns are byte-identical");
}

RunConfig load_and_override(const SharedFlags& f) {
  RunConfig cfg = load_run_config(f.config_path);
  if (!f.out_dir.empty()) cfg.out_dir = f.out_dir;
  auto& m = cfg.backtest.model;
  auto& s = cfg.backtest.solver;
  if (!f.objective.empty()) m.objective = parse_objective(f.objective);
  if (f.lambda1) m.lambda1 = *f.lambda1;
  if (f.lambda2) m.lambda2 = *f.lambda2;
  if (f.delta) m.delta = {*f.delta};
  if (f.gamma) m.gamma = *f.gamma;
  if (f.enable_short && !m.shorting) m.shorting = ShortingSpec{{0.1}, {0.1}, 1.1, 0.1};
  if (f.gap_tol) s.gap_tol = *f.gap_tol;
  if (f.time_limit) s.time_limit = *f.time_limit;
  if (f.seed) s.seed = *f.seed;
  if (f.threads) s.threads = *f.threads;
  if (f.deterministic) s.deterministic = true;
  return cfg;
}

PricePanel load_panel_or_exit(const std::string& path) {
  if (path.empty()) throw ValidationError("config: 'prices' is required for this command");
  return load_panel(path);  // ParseError from here maps to exit code 2
}

std::size_t resolve_end_index(const PricePanel& panel, const std::string& end_date) {
  if (end_date.empty()) return panel.num_dates() - 1;
  for (std::size_t t = 0; t < panel.num_dates(); ++t) {
    if (panel.dates()[t] == end_date) return t;
  }
  throw ValidationError("end date '" + end_date + "' is not in the price panel");
}

/// Human-readable row-major text rendering of the assembled program.
std::string render_program(const lp::LinearProgram& prog) {
  const std::size_t n = prog.num_variables(), m = prog.num_rows();
  std::vector<std::string> rows(m);
  char buf[128];
  for (std::size_t j = 0; j < n; ++j) {
    for (auto [k, v] : prog.column(static_cast<int>(j))) {
      std::snprintf(buf, sizeof buf, "%s%.12g %s", v < 0 ? "- " : "+ ", std::abs(v),
                    prog.variable_name(static_cast<int>(j)).c_str());
      auto& row = rows[static_cast<std::size_t>(k)];
      if (!row.empty()) row += ' ';
      row += buf;
    }
  }
  std::string out = "minimize\n";
  for (std::size_t j = 0; j < n; ++j) {
    if (prog.cost(static_cast<int>(j)) == 0.0) continue;
    std::snprintf(buf, sizeof buf, "  %s%.12g %s\n",
                  prog.cost(static_cast<int>(j)) < 0 ? "- " : "+ ",
                  std::abs(prog.cost(static_cast<int>(j))),
                  prog.variable_name(static_cast<int>(j)).c_str());
    out += buf;
  }
  out += "subject to\n";
  for (std::size_t k = 0; k < m; ++k) {
    const char* rel = "=";
    switch (prog.relation(static_cast<int>(k))) {
      case lp::Relation::LE: rel = "<="; break;
      case lp::Relation::GE: rel = ">="; break;
      case lp::Relation::EQ: rel = "="; break;
    }
    std::snprintf(buf, sizeof buf, " %s %.12g", rel, prog.rhs(static_cast<int>(k)));
    out += "  " + prog.row_name(static_cast<int>(k)) + ": " + rows[k] + buf + "\n";
  }
  out += "bounds\n";
  for (std::size_t j = 0; j < n; ++j) {
    std::snprintf(buf, sizeof buf, "  %.12g <= %s <= %.12g\n", prog.lower(static_cast<int>(j)),
                  prog.variable_name(static_cast<int>(j)).c_str(),
                  prog.upper(static_cast<int>(j)));
    out += buf;
  }
  return out;
}

int cmd_solve(const SharedFlags& f, const std::string& end_date, const std::string& dump_path) {
  RunConfig cfg = load_and_override(f);
  PricePanel panel = load_panel_or_exit(cfg.prices_path);
  std::size_t end_index = resolve_end_index(panel, end_date);
  std::vector<std::string> excluded;
  PricePanel win = window(panel, end_index, cfg.backtest.T, &excluded);

  HoldingsState held;  // a fresh solve starts from all cash
  held.cash = cfg.backtest.initial_cash;
  ModelSpec spec =
      detail::window_spec(cfg.backtest, panel, win, held, cfg.backtest.initial_cash);
  ModelInstance inst = build(win, spec);
  if (!dump_path.empty()) write_text_file(dump_path, render_program(inst.program));

  SolveResult res = solve(inst, cfg.backtest.solver);
  for (const auto& a : excluded) {
    res.warnings.push_back("asset " + a + " excluded from the window (incomplete history)");
  }

  std::filesystem::create_directories(cfg.out_dir);
  auto out_path = std::filesystem::path(cfg.out_dir) / "solve_result.json";
  write_text_file(out_path.string(),
                  solve_result_json(inst.assets, res, cfg.backtest.solver, f.stable_output)
                          .dump(2) +
                      "\n");

  std::printf("%s %s objective %.6f gap %.3g nodes %ld time %.2fs -> %s\n", res.method.c_str(),
              to_string(res.status), res.objective, res.gap, res.nodes, res.wall_time,
              out_path.string().c_str());
  bool solved =
      res.status == SolveStatus::ProvenOptimal || res.status == SolveStatus::FeasibleWithGap;
  return solved ? 0 : 1;
}

int cmd_backtest(const SharedFlags& f) {
  RunConfig cfg = load_and_override(f);
  PricePanel panel = load_panel_or_exit(cfg.prices_path);
  std::optional<IndexSeries> index;
  if (!cfg.index_path.empty()) index = load_index_series(cfg.index_path);

  BacktestReport report = run_backtest(panel, cfg.backtest, index ? &*index : nullptr);

  std::filesystem::create_directories(cfg.out_dir);
  auto json_path = std::filesystem::path(cfg.out_dir) / "backtest_report.json";
  auto csv_path = std::filesystem::path(cfg.out_dir) / "stitched.csv";
  write_text_file(json_path.string(),
                  backtest_report_json(report, cfg.backtest, f.stable_output).dump(2) + "\n");
  write_text_file(csv_path.string(), stitched_csv(report));

  std::printf("%s\n", summary_row(report, cfg.backtest).c_str());
  std::printf("wrote %s and %s\n", json_path.string().c_str(), csv_path.string().c_str());
  return 0;
}

int cmd_drawdown(const std::string& series_path, std::size_t lookback,
                 const std::string& out_dir) {
  IndexSeries series = load_index_series(series_path);
  if (lookback == 0) lookback = series.values.size();
  std::printf("%s", drawdown_table(series.dates, series.values, lookback).c_str());
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    auto path = std::filesystem::path(out_dir) / "drawdown_report.json";
    write_text_file(path.string(),
                    drawdown_report_json(series.dates, series.values, lookback).dump(2) + "\n");
    std::printf("wrote %s\n", path.string().c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"minimal-drawdown portfolio construction and evaluation"};
  app.require_subcommand(1);

  SharedFlags solve_flags, backtest_flags;
  std::string end_date, dump_path, series_path, dd_out;
  std::size_t lookback = 0;

  CLI::App* solve_cmd =
      app.add_subcommand("solve", "solve one in-sample window and write the result JSON");
  add_shared_flags(solve_cmd, solve_flags);
  solve_cmd->add_option("--end-date", end_date,
                        "window end date (default: the panel's last date)");
  solve_cmd->add_option("--dump-model", dump_path, "also write the assembled program as text");

  CLI::App* backtest_cmd =
      app.add_subcommand("backtest", "run the rolling-rebalance evaluation");
  add_shared_flags(backtest_cmd, backtest_flags);

  CLI::App* dd_cmd =
      app.add_subcommand("drawdown", "trailing-drawdown analytics for a date,value series");
  dd_cmd->add_option("--series", series_path, "CSV with header date,value")->required();
  dd_cmd->add_option("--lookback", lookback, "drawdown lookback in days (default: whole series)");
  dd_cmd->add_option("--out", dd_out, "directory for the JSON report (optional)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve_cmd->parsed()) return cmd_solve(solve_flags, end_date, dump_path);
    if (backtest_cmd->parsed()) return cmd_backtest(backtest_flags);
    return cmd_drawdown(series_path, lookback, dd_out);
  } catch (const ParseError& e) {
    std::string what = e.what();
    std::fprintf(stderr, "error: %s\n", what.c_str());
    // A missing or unreadable data file is an environment problem, not a
    // configuration problem; give it its own exit code.
    return what.find("cannot open") != std::string::npos ? 2 : 3;
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const ResourceError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  }
}
