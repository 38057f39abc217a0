#pragma once

// Assembles the minimal-drawdown portfolio program over a price window.
//
// Decision variables (long-only): holdings x_i (units), transaction costs
// G_i, portfolio values P_t, trailing peaks M_t, drawdowns d_t (percent),
// and d_max for objectives that track the worst drawdown. With shorting,
// x_i splits into x_i = xl_i - xs_i.
//
// The linear rows are
//   value[t]     : sum_i V_it x_i - P_t = 0
//   prop[i]      : V_iT x_i <= delta_i P_T                  (long-only)
//   cost_sell[i] : G_i >= fs_i (A_i - x_i) V_iT
//   cost_buy[i]  : G_i >= fb_i (x_i - A_i) V_iT
//   cost_cap     : sum_i G_i <= gamma C
//   balance      : P_T + sum_i G_i = C
//   peak[t,tau]  : M_t >= P_tau   for tau in the lookback window of t
//   worst[t]     : d_max >= d_t                             (when tracked)
// plus, with shorting, link[i]: x_i - xl_i + xs_i = 0, per-asset caps on
// xl/xs, and aggregate long/short caps, all against P_T.
//
// What makes the program nonlinear is one record per day:
//   d_t * M_t >= 100 (M_t - P_t)
// kept symbolically in `bilinear` for the global solver to relax.
//
// The emitted objective is gamma_big * (drawdown objective) + sum_i G_i, so
// the drawdown term dominates and the cost term pins each G_i to the exact
// transaction cost instead of leaving it slack.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "ddopt/error.hpp"
#include "ddopt/lp.hpp"
#include "ddopt/market_data.hpp"

namespace ddopt {

enum class Objective { MinAvg, MinMax, Weighted };

inline const char* to_string(Objective o) {
  switch (o) {
    case Objective::MinAvg: return "minavg";
    case Objective::MinMax: return "minmax";
    case Objective::Weighted: return "weighted";
  }
  return "?";
}

struct ShortingSpec {
  std::vector<double> delta_long;   // per-asset long proportion caps
  std::vector<double> delta_short;  // per-asset short proportion caps
  double cap_long = 1.1;            // aggregate long cap (>= 1)
  double cap_short = 0.1;           // aggregate short cap (>= 0)
};

struct ModelSpec {
  std::size_t T = 0;  // window length; 0 means "use the window's length"
  std::size_t D = 1;  // drawdown lookback in days
  Objective objective = Objective::MinAvg;
  double lambda1 = 1.0;  // weight on d_max   (Weighted only)
  double lambda2 = 1.0;  // weight on average (Weighted only)
  double C = 1000.0;
  std::vector<double> current_holdings;  // A_i; empty means all zero
  std::vector<double> delta;             // proportion caps; empty means all 1
  std::vector<double> buy_cost;          // fb_i; empty means zero
  std::vector<double> sell_cost;         // fs_i; empty means zero
  double gamma = 0.0;       // cap on total costs as a fraction of C
  double gamma_big = 1e6;   // objective scaling constant
  std::optional<ShortingSpec> shorting;
};

struct BilinearRecord {
  std::size_t t;  // day index: d_t * M_t >= 100 (M_t - P_t)
};

struct ModelInstance {
  ModelSpec spec;           // normalised: all vectors sized N
  std::size_t N = 0, T = 0;
  std::vector<double> V;    // prices, N x T row-major
  std::vector<std::string> assets;
  lp::LinearProgram program;

  // Variable indices into `program`.
  std::vector<int> x, xl, xs, g, p, m, d;
  int dmax = -1;

  std::vector<BilinearRecord> bilinear;
  std::vector<std::size_t> lookback_first;  // per t: first day of its window
  std::vector<std::string> warnings;

  double price(std::size_t i, std::size_t t) const { return V[i * T + t]; }
  bool has_shorting() const { return spec.shorting.has_value(); }
};

namespace detail {

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline void normalise_spec(ModelSpec& s, std::size_t N) {
  auto fit = [&](std::vector<double>& v, double fill, const char* what) {
    if (v.empty()) v.assign(N, fill);
    if (v.size() != N) {
      throw ValidationError(std::string("model: ") + what + " must have one entry per asset");
    }
  };
  fit(s.current_holdings, 0.0, "current_holdings");
  fit(s.delta, 1.0, "delta");
  fit(s.buy_cost, 0.0, "buy_cost");
  fit(s.sell_cost, 0.0, "sell_cost");
  if (s.shorting) {
    fit(s.shorting->delta_long, 1.0, "delta_long");
    fit(s.shorting->delta_short, 1.0, "delta_short");
  }

  if (!(s.C > 0.0)) throw ValidationError("model: C must be positive");
  if (s.D < 1) throw ValidationError("model: lookback D must be >= 1");
  if (!(s.gamma >= 0.0 && s.gamma <= 1.0)) throw ValidationError("model: gamma must be in [0,1]");
  if (!(s.gamma_big > 0.0)) throw ValidationError("model: gamma_big must be positive");
  if (s.objective == Objective::Weighted && !(s.lambda1 > 0.0 && s.lambda2 > 0.0)) {
    throw ValidationError("model: weighted objective needs lambda1, lambda2 > 0");
  }
  for (double dd : s.delta) {
    if (!(dd >= 0.0 && dd <= 1.0)) throw ValidationError("model: delta entries must be in [0,1]");
  }
  for (double f : s.buy_cost) {
    if (!(f >= 0.0)) throw ValidationError("model: buy_cost entries must be >= 0");
  }
  for (double f : s.sell_cost) {
    if (!(f >= 0.0)) throw ValidationError("model: sell_cost entries must be >= 0");
  }
  if (s.shorting) {
    if (!(s.shorting->cap_long >= 1.0)) throw ValidationError("model: cap_long must be >= 1");
    if (!(s.shorting->cap_short >= 0.0)) throw ValidationError("model: cap_short must be >= 0");
    for (double dd : s.shorting->delta_long) {
      if (!(dd >= 0.0)) throw ValidationError("model: delta_long entries must be >= 0");
    }
    for (double dd : s.shorting->delta_short) {
      if (!(dd >= 0.0)) throw ValidationError("model: delta_short entries must be >= 0");
    }
  }
}

}  // namespace detail

/// Appends the long/short decomposition rows: the link x = xl - xs, the
/// per-asset caps against P_T, and the aggregate long/short caps. Called by
/// build() when the spec carries a ShortingSpec; expects x/xl/xs variables
/// to exist and the rows to be absent.
inline void build_shorting_constraints(ModelInstance& inst) {
  const auto& sh = *inst.spec.shorting;
  const std::size_t N = inst.N, T = inst.T;
  const int pT = inst.p[T - 1];
  for (std::size_t i = 0; i < N; ++i) {
    const double viT = inst.price(i, T - 1);
    inst.program.add_row(lp::Relation::EQ, 0.0,
                         {{inst.x[i], 1.0}, {inst.xl[i], -1.0}, {inst.xs[i], 1.0}},
                         "link[" + std::to_string(i) + "]");
    inst.program.add_row(lp::Relation::LE, 0.0,
                         {{inst.xl[i], viT}, {pT, -sh.delta_long[i]}},
                         "prop_long[" + std::to_string(i) + "]");
    inst.program.add_row(lp::Relation::LE, 0.0,
                         {{inst.xs[i], viT}, {pT, -sh.delta_short[i]}},
                         "prop_short[" + std::to_string(i) + "]");
  }
  std::vector<std::pair<int, double>> agg_long, agg_short;
  for (std::size_t i = 0; i < N; ++i) {
    agg_long.push_back({inst.xl[i], inst.price(i, T - 1)});
    agg_short.push_back({inst.xs[i], inst.price(i, T - 1)});
  }
  agg_long.push_back({pT, -sh.cap_long});
  agg_short.push_back({pT, -sh.cap_short});
  inst.program.add_row(lp::Relation::LE, 0.0, agg_long, "cap_long");
  inst.program.add_row(lp::Relation::LE, 0.0, agg_short, "cap_short");
}

/// Builds the full model over a price window. The window must have N >= 1
/// assets, all prices positive.
inline ModelInstance build(const PricePanel& window, const ModelSpec& spec_in) {
  ModelInstance inst;
  inst.N = window.num_assets();
  inst.T = window.num_dates();
  if (inst.N == 0) throw ValidationError("model: empty asset universe");
  if (inst.T == 0) throw ValidationError("model: empty window");
  inst.spec = spec_in;
  if (inst.spec.T == 0) inst.spec.T = inst.T;
  if (inst.spec.T != inst.T) {
    throw ValidationError("model: spec.T does not match the window length");
  }
  detail::normalise_spec(inst.spec, inst.N);

  const std::size_t N = inst.N, T = inst.T;
  inst.assets = window.assets();
  inst.V.resize(N * T);
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t t = 0; t < T; ++t) {
      double v = window.price(i, t);
      if (!std::isfinite(v) || !(v > 0.0)) {
        throw ValidationError("model: window contains a missing or nonpositive price for " +
                              inst.assets[i]);
      }
      inst.V[i * T + t] = v;
    }
  }

  const ModelSpec& s = inst.spec;
  const bool track_dmax = s.objective != Objective::MinAvg;
  const double gb = s.gamma_big;

  // Objective coefficients on the drawdown variables.
  double cost_d = 0.0, cost_dmax = 0.0;
  switch (s.objective) {
    case Objective::MinAvg: cost_d = gb / static_cast<double>(T); break;
    case Objective::MinMax: cost_dmax = gb; break;
    case Objective::Weighted:
      cost_dmax = gb * s.lambda1;
      cost_d = gb * s.lambda2 / static_cast<double>(T);
      break;
  }

  auto& prog = inst.program;
  const bool shorting = s.shorting.has_value();
  for (std::size_t i = 0; i < N; ++i) {
    double lo = shorting ? -lp::kInf : 0.0;
    inst.x.push_back(prog.add_variable(lo, lp::kInf, 0.0, "x_" + std::to_string(i)));
  }
  if (shorting) {
    for (std::size_t i = 0; i < N; ++i) {
      inst.xl.push_back(prog.add_variable(0.0, lp::kInf, 0.0, "xl_" + std::to_string(i)));
    }
    for (std::size_t i = 0; i < N; ++i) {
      inst.xs.push_back(prog.add_variable(0.0, lp::kInf, 0.0, "xs_" + std::to_string(i)));
    }
  }
  for (std::size_t i = 0; i < N; ++i) {
    inst.g.push_back(prog.add_variable(0.0, lp::kInf, 1.0, "G_" + std::to_string(i)));
  }
  for (std::size_t t = 0; t < T; ++t) {
    inst.p.push_back(prog.add_variable(0.0, lp::kInf, 0.0, "P_" + std::to_string(t)));
  }
  for (std::size_t t = 0; t < T; ++t) {
    inst.m.push_back(prog.add_variable(0.0, lp::kInf, 0.0, "M_" + std::to_string(t)));
  }
  for (std::size_t t = 0; t < T; ++t) {
    inst.d.push_back(prog.add_variable(0.0, 100.0, cost_d, "d_" + std::to_string(t)));
  }
  if (track_dmax) inst.dmax = prog.add_variable(0.0, 100.0, cost_dmax, "dmax");

  // value[t]: sum_i V_it x_i - P_t = 0
  for (std::size_t t = 0; t < T; ++t) {
    std::vector<std::pair<int, double>> row;
    for (std::size_t i = 0; i < N; ++i) row.push_back({inst.x[i], inst.price(i, t)});
    row.push_back({inst.p[t], -1.0});
    prog.add_row(lp::Relation::EQ, 0.0, row, "value[" + std::to_string(t) + "]");
  }

  const int pT = inst.p[T - 1];
  if (!shorting) {
    // prop[i]: V_iT x_i <= delta_i P_T
    for (std::size_t i = 0; i < N; ++i) {
      prog.add_row(lp::Relation::LE, 0.0,
                 {{inst.x[i], inst.price(i, T - 1)}, {pT, -s.delta[i]}},
                 "prop[" + std::to_string(i) + "]");
    }
    double delta_sum = 0.0;
    for (double dd : s.delta) delta_sum += dd;
    if (delta_sum < 1.0) {
      inst.warnings.push_back(
          "sum of delta caps is " + detail::fmt(delta_sum) +
          " < 1: the balance equation cannot be met; expect infeasibility");
    }
  } else {
    build_shorting_constraints(inst);
  }

  // cost_sell[i]: G_i + fs V_iT x_i >= fs A_i V_iT
  // cost_buy[i]:  G_i - fb V_iT x_i >= -fb A_i V_iT
  for (std::size_t i = 0; i < N; ++i) {
    const double viT = inst.price(i, T - 1);
    prog.add_row(lp::Relation::GE, s.sell_cost[i] * s.current_holdings[i] * viT,
               {{inst.g[i], 1.0}, {inst.x[i], s.sell_cost[i] * viT}},
               "cost_sell[" + std::to_string(i) + "]");
    prog.add_row(lp::Relation::GE, -s.buy_cost[i] * s.current_holdings[i] * viT,
               {{inst.g[i], 1.0}, {inst.x[i], -s.buy_cost[i] * viT}},
               "cost_buy[" + std::to_string(i) + "]");
  }

  // cost_cap: sum G_i <= gamma C; balance: P_T + sum G_i = C
  std::vector<std::pair<int, double>> cap, balance;
  for (std::size_t i = 0; i < N; ++i) cap.push_back({inst.g[i], 1.0});
  balance = cap;
  balance.push_back({pT, 1.0});
  prog.add_row(lp::Relation::LE, s.gamma * s.C, cap, "cost_cap");
  prog.add_row(lp::Relation::EQ, s.C, balance, "balance");

  // peak[t,tau]: M_t >= P_tau over the lookback window (tau = t included).
  inst.lookback_first.resize(T);
  for (std::size_t t = 0; t < T; ++t) {
    std::size_t first = t >= s.D ? t - s.D : 0;
    inst.lookback_first[t] = first;
    for (std::size_t tau = first; tau <= t; ++tau) {
      prog.add_row(lp::Relation::GE, 0.0, {{inst.m[t], 1.0}, {inst.p[tau], -1.0}},
                 "peak[" + std::to_string(t) + "," + std::to_string(tau) + "]");
    }
  }

  // worst[t]: dmax >= d_t
  if (track_dmax) {
    for (std::size_t t = 0; t < T; ++t) {
      prog.add_row(lp::Relation::GE, 0.0, {{inst.dmax, 1.0}, {inst.d[t], -1.0}},
                 "worst[" + std::to_string(t) + "]");
    }
  }

  // One bilinear record per day closes the drawdown definition.
  for (std::size_t t = 0; t < T; ++t) inst.bilinear.push_back({t});
  return inst;
}

/// Everything recomputed from holdings alone via the original recursion:
/// P from the value rows, M as the true window maximum, d from the
/// drawdown formula, costs from the exact max expression. Reporting from
/// here makes results independent of any slack the relaxation left in M or
/// d (alternative optima can decrease M_t artificially; recomputation
/// neutralises that).
struct Recomputed {
  std::vector<double> P, M, d, G;
  double max_drawdown = 0.0;       // max_t d_t
  double mean_drawdown = 0.0;      // sum_t d_t / T
  double drawdown_objective = 0.0; // per the configured objective
  double total_costs = 0.0;        // sum_i G_i
  double internal_objective = 0.0; // gamma_big * drawdown_objective + costs
};

inline Recomputed recompute_reported_solution(const ModelInstance& inst,
                                              const std::vector<double>& x) {
  if (x.size() != inst.N) throw ValidationError("recompute: holdings size mismatch");
  const std::size_t N = inst.N, T = inst.T;
  const ModelSpec& s = inst.spec;
  Recomputed r;
  r.P.resize(T);
  r.M.resize(T);
  r.d.resize(T);
  r.G.resize(N);
  for (std::size_t t = 0; t < T; ++t) {
    double v = 0.0;
    for (std::size_t i = 0; i < N; ++i) v += inst.price(i, t) * x[i];
    r.P[t] = v;
  }
  for (std::size_t t = 0; t < T; ++t) {
    std::size_t first = t >= s.D ? t - s.D : 0;
    double peak = r.P[t];
    for (std::size_t tau = first; tau <= t; ++tau) peak = std::max(peak, r.P[tau]);
    r.M[t] = peak;
    r.d[t] = peak > 0.0 ? 100.0 * (peak - r.P[t]) / peak : 0.0;
    r.max_drawdown = std::max(r.max_drawdown, r.d[t]);
    r.mean_drawdown += r.d[t] / static_cast<double>(T);
  }
  for (std::size_t i = 0; i < N; ++i) {
    const double viT = inst.price(i, T - 1);
    double sell = s.sell_cost[i] * (s.current_holdings[i] - x[i]) * viT;
    double buy = s.buy_cost[i] * (x[i] - s.current_holdings[i]) * viT;
    r.G[i] = std::max({sell, buy, 0.0});
    r.total_costs += r.G[i];
  }
  switch (s.objective) {
    case Objective::MinAvg: r.drawdown_objective = r.mean_drawdown; break;
    case Objective::MinMax: r.drawdown_objective = r.max_drawdown; break;
    case Objective::Weighted:
      r.drawdown_objective = s.lambda1 * r.max_drawdown + s.lambda2 * r.mean_drawdown;
      break;
  }
  r.internal_objective = s.gamma_big * r.drawdown_objective + r.total_costs;
  return r;
}

/// Plain-text dump of the instance (variables, bounds, rows, bilinear
/// records) for debugging. The format is informal and not a compatibility
/// promise.
inline std::string dump_instance(const ModelInstance& inst) {
  const auto& prog = inst.program;
  std::string out;
  out += "minimize\n ";
  for (std::size_t j = 0; j < prog.num_variables(); ++j) {
    double c = prog.cost(static_cast<int>(j));
    if (c == 0.0) continue;
    out += (c >= 0 ? " +" : " ") + detail::fmt(c) + " " + prog.variable_name(static_cast<int>(j));
  }
  out += "\nsubject to\n";
  // Rebuild rows from the column-wise storage.
  std::vector<std::string> rows(prog.num_rows());
  for (std::size_t j = 0; j < prog.num_variables(); ++j) {
    for (auto [k, v] : prog.column(static_cast<int>(j))) {
      rows[static_cast<std::size_t>(k)] +=
          (v >= 0 ? " +" : " ") + detail::fmt(v) + " " + prog.variable_name(static_cast<int>(j));
    }
  }
  for (std::size_t k = 0; k < prog.num_rows(); ++k) {
    const char* rel = "=";
    if (prog.relation(static_cast<int>(k)) == lp::Relation::LE) rel = "<=";
    if (prog.relation(static_cast<int>(k)) == lp::Relation::GE) rel = ">=";
    out += "  " + prog.row_name(static_cast<int>(k)) + ":" + rows[k] + " " + rel + " " +
           detail::fmt(prog.rhs(static_cast<int>(k))) + "\n";
  }
  out += "bounds\n";
  for (std::size_t j = 0; j < prog.num_variables(); ++j) {
    out += "  " + detail::fmt(prog.lower(static_cast<int>(j))) + " <= " +
           prog.variable_name(static_cast<int>(j)) + " <= " +
           detail::fmt(prog.upper(static_cast<int>(j))) + "\n";
  }
  out += "bilinear\n";
  for (const auto& b : inst.bilinear) {
    auto ts = std::to_string(b.t);
    out += "  d_" + ts + " * M_" + ts + " >= 100 (M_" + ts + " - P_" + ts + ")\n";
  }
  return out;
}

}  // namespace ddopt
