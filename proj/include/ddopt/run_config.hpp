#pragma once

// Declarative run configuration: one JSON document covering data paths, the
// model template, the backtest protocol, and solver options.
//
// Parsing is strict: unknown keys are rejected at every level so that a typo
// (say "lamda1") fails loudly instead of silently running the defaults.
// Scalar-or-array convention: per-asset fields (delta, buy_cost, sell_cost,
// delta_long, delta_short) accept either a single number, broadcast across
// whatever assets a window ends up containing, or an array sized to the full
// price panel's asset list.

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ddopt/backtest.hpp"
#include "ddopt/error.hpp"
#include "ddopt/model.hpp"

namespace ddopt {

struct RunConfig {
  std::string prices_path;
  std::string index_path;  // empty: no benchmark comparison
  std::string out_dir = ".";
  BacktestConfig backtest;
};

inline Objective parse_objective(const std::string& s) {
  if (s == "minavg") return Objective::MinAvg;
  if (s == "minmax") return Objective::MinMax;
  if (s == "weighted") return Objective::Weighted;
  throw ValidationError("config: unknown objective '" + s +
                        "' (expected minavg, minmax, or weighted)");
}

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& j, const std::vector<std::string>& allowed,
                                const std::string& context) {
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const auto& a : allowed) {
      if (item.key() == a) {
        ok = true;
        break;
      }
    }
    if (!ok) throw ValidationError("config: unknown key '" + item.key() + "' in " + context);
  }
}

inline double as_number(const nlohmann::json& j, const std::string& key) {
  if (!j.is_number()) throw ValidationError("config: '" + key + "' must be a number");
  return j.get<double>();
}

inline std::size_t as_count(const nlohmann::json& j, const std::string& key) {
  if (!j.is_number_integer() || j.get<long long>() < 0) {
    throw ValidationError("config: '" + key + "' must be a nonnegative integer");
  }
  return static_cast<std::size_t>(j.get<long long>());
}

inline std::string as_string(const nlohmann::json& j, const std::string& key) {
  if (!j.is_string()) throw ValidationError("config: '" + key + "' must be a string");
  return j.get<std::string>();
}

inline bool as_bool(const nlohmann::json& j, const std::string& key) {
  if (!j.is_boolean()) throw ValidationError("config: '" + key + "' must be a boolean");
  return j.get<bool>();
}

/// A number broadcasts; an array is taken verbatim.
inline std::vector<double> as_number_or_array(const nlohmann::json& j, const std::string& key) {
  if (j.is_number()) return {j.get<double>()};
  if (j.is_array()) {
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto& v : j) {
      if (!v.is_number()) throw ValidationError("config: '" + key + "' must contain only numbers");
      out.push_back(v.get<double>());
    }
    if (out.empty()) throw ValidationError("config: '" + key + "' must not be an empty array");
    return out;
  }
  throw ValidationError("config: '" + key + "' must be a number or an array of numbers");
}

inline ShortingSpec parse_shorting(const nlohmann::json& j) {
  reject_unknown_keys(j, {"delta_long", "delta_short", "cap_long", "cap_short"}, "shorting");
  ShortingSpec s;
  s.delta_long = j.contains("delta_long")
                     ? as_number_or_array(j.at("delta_long"), "shorting.delta_long")
                     : std::vector<double>{0.1};
  s.delta_short = j.contains("delta_short")
                      ? as_number_or_array(j.at("delta_short"), "shorting.delta_short")
                      : std::vector<double>{0.1};
  if (j.contains("cap_long")) s.cap_long = as_number(j.at("cap_long"), "shorting.cap_long");
  if (j.contains("cap_short")) s.cap_short = as_number(j.at("cap_short"), "shorting.cap_short");
  return s;
}

inline void parse_solver(const nlohmann::json& j, SolveOptions& o) {
  reject_unknown_keys(j,
                      {"gap_tol", "bisect_tol", "time_limit", "threads", "deterministic", "seed",
                       "max_nodes", "record_nodes"},
                      "solver");
  if (j.contains("gap_tol")) o.gap_tol = as_number(j.at("gap_tol"), "solver.gap_tol");
  if (j.contains("bisect_tol")) o.bisect_tol = as_number(j.at("bisect_tol"), "solver.bisect_tol");
  if (j.contains("time_limit")) o.time_limit = as_number(j.at("time_limit"), "solver.time_limit");
  if (j.contains("threads")) {
    o.threads = static_cast<int>(as_count(j.at("threads"), "solver.threads"));
  }
  if (j.contains("deterministic")) {
    o.deterministic = as_bool(j.at("deterministic"), "solver.deterministic");
  }
  if (j.contains("seed")) o.seed = static_cast<std::uint64_t>(as_count(j.at("seed"), "solver.seed"));
  if (j.contains("max_nodes")) {
    o.max_nodes = static_cast<long>(as_count(j.at("max_nodes"), "solver.max_nodes"));
  }
  if (j.contains("record_nodes")) {
    o.record_nodes = as_bool(j.at("record_nodes"), "solver.record_nodes");
  }
}

}  // namespace detail

inline RunConfig parse_run_config(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("config: top level must be a JSON object");
  detail::reject_unknown_keys(
      j,
      {"prices", "index", "out_dir", "T", "D", "rebalance_every", "initial_cash", "days_per_year",
       "objective", "lambda1", "lambda2", "delta", "buy_cost", "sell_cost", "gamma", "shorting",
       "solver", "seed"},
      "the top level");
  RunConfig cfg;
  auto& bt = cfg.backtest;
  if (j.contains("prices")) cfg.prices_path = detail::as_string(j.at("prices"), "prices");
  if (j.contains("index")) cfg.index_path = detail::as_string(j.at("index"), "index");
  if (j.contains("out_dir")) cfg.out_dir = detail::as_string(j.at("out_dir"), "out_dir");
  if (j.contains("T")) bt.T = detail::as_count(j.at("T"), "T");
  if (j.contains("D")) bt.D = detail::as_count(j.at("D"), "D");
  if (j.contains("rebalance_every")) {
    bt.rebalance_every = detail::as_count(j.at("rebalance_every"), "rebalance_every");
  }
  if (j.contains("initial_cash")) {
    bt.initial_cash = detail::as_number(j.at("initial_cash"), "initial_cash");
  }
  if (j.contains("days_per_year")) {
    bt.days_per_year = detail::as_count(j.at("days_per_year"), "days_per_year");
  }
  if (j.contains("objective")) {
    bt.model.objective = parse_objective(detail::as_string(j.at("objective"), "objective"));
  }
  if (j.contains("lambda1")) bt.model.lambda1 = detail::as_number(j.at("lambda1"), "lambda1");
  if (j.contains("lambda2")) bt.model.lambda2 = detail::as_number(j.at("lambda2"), "lambda2");
  if (j.contains("delta")) bt.model.delta = detail::as_number_or_array(j.at("delta"), "delta");
  if (j.contains("buy_cost")) {
    bt.model.buy_cost = detail::as_number_or_array(j.at("buy_cost"), "buy_cost");
  }
  if (j.contains("sell_cost")) {
    bt.model.sell_cost = detail::as_number_or_array(j.at("sell_cost"), "sell_cost");
  }
  if (j.contains("gamma")) bt.model.gamma = detail::as_number(j.at("gamma"), "gamma");
  if (j.contains("shorting")) {
    const auto& s = j.at("shorting");
    if (s.is_boolean()) {
      if (s.get<bool>()) bt.model.shorting = ShortingSpec{{0.1}, {0.1}, 1.1, 0.1};
    } else if (s.is_object()) {
      bt.model.shorting = detail::parse_shorting(s);
    } else {
      throw ValidationError("config: 'shorting' must be a boolean or an object");
    }
  }
  if (j.contains("solver")) {
    if (!j.at("solver").is_object()) throw ValidationError("config: 'solver' must be an object");
    detail::parse_solver(j.at("solver"), bt.solver);
  }
  if (j.contains("seed")) {
    bt.solver.seed = static_cast<std::uint64_t>(detail::as_count(j.at("seed"), "seed"));
  }
  // The model template's C is set per window from the running budget; the
  // starting budget is the protocol-level initial_cash.
  bt.model.C = bt.initial_cash;
  return cfg;
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("config: " + std::string(e.what()));
  }
  return parse_run_config(j);
}

}  // namespace ddopt
