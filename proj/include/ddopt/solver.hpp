#pragma once

// Global solution of the minimal-drawdown program.
//
// Three layers:
//  1. tighten_bounds: 2T auxiliary LPs (min/max of each P_t over the linear
//     core) give finite boxes for P, M, d; holdings and cost caps follow in
//     closed form. The boxes are what make the bilinear relaxation usable.
//  2. solve_minmax_bisection: the worst-drawdown objective is solved by
//     bisecting the drawdown level d and probing LP feasibility of
//     { P_t >= (1 - d/100) P_tau } over each lookback window; feasibility is
//     monotone in d, so the bracket certifies optimality to the tolerance.
//  3. solve_spatial_bnb: average / weighted objectives run best-first
//     branch-and-bound. Each node relaxes w_t = d_t * M_t by the four
//     McCormick inequalities over the node's (d_t, M_t) box, branching on
//     the largest product violation, splitting M_t (fallback d_t) at the LP
//     value clamped into the middle 80% of the interval.
//
// All reported solutions are recomputed from holdings alone (true peaks,
// true drawdowns, exact transaction costs), so relaxation slack never leaks
// into what the caller sees. Incumbents are also rescaled so the budget
// identity P_T + sum G_i = C holds exactly: drawdowns are scale-invariant,
// so the rescale never worsens the objective.

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <queue>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "ddopt/error.hpp"
#include "ddopt/lp.hpp"
#include "ddopt/model.hpp"

namespace ddopt {

enum class SolveStatus { ProvenOptimal, FeasibleWithGap, Infeasible, TimedOut };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::ProvenOptimal: return "proven_optimal";
    case SolveStatus::FeasibleWithGap: return "feasible_with_gap";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::TimedOut: return "timed_out";
  }
  return "?";
}

struct SolveOptions {
  double gap_tol = 1e-5;     // branch-and-bound relative gap target
  double bisect_tol = 1e-4;  // bisection bracket width, percentage points
  double time_limit = -1.0;  // seconds; negative -> max(500, 7N); 0 -> immediate timeout
  bool deterministic = true; // kept for config compatibility; search is always ordered
  int threads = 1;           // parallelism for the bounds-tightening LPs
  std::uint64_t seed = 0;    // recorded in outputs; the search needs no randomness
  long max_nodes = 500000;
  bool record_nodes = true;  // keep the per-node bound trace in the result
  lp::Options lp_options{};
};

struct NodeRecord {
  long id = 0;
  double lower = 0.0;  // node lower bound, internal objective / gamma_big
  double upper = 0.0;  // incumbent value at the time, same scale
};

struct VariableBounds {
  bool feasible = true;            // false: the linear core admits no portfolio
  std::vector<double> x_upper;     // per-asset holding caps (net, long-only)
  std::vector<double> xl_upper, xs_upper;  // split caps when shorting
  double g_upper = 0.0;            // gamma * C
  std::vector<std::pair<double, double>> p_bounds, m_bounds, d_bounds;
};

struct SolveResult {
  SolveStatus status = SolveStatus::Infeasible;
  std::string method;  // "bisection" or "branch-and-bound"
  std::vector<double> x, xl, xs, G;
  std::vector<double> P, M, d;     // recomputed from holdings
  double objective = std::numeric_limits<double>::quiet_NaN();  // drawdown objective
  double total_costs = 0.0;
  double lower_bound = 0.0;  // bisection: drawdown units; bnb: internal / gamma_big
  double gap = std::numeric_limits<double>::infinity();
  long nodes = 0;            // probes (bisection) or processed nodes (bnb)
  double wall_time = 0.0;
  std::vector<NodeRecord> node_trace;
  std::vector<std::string> warnings;
};

namespace detail {

using Clock = std::chrono::steady_clock;

inline double elapsed_seconds(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

/// The "linear core": every row of the instance that touches only holdings,
/// costs, and portfolio values (no peaks or drawdowns). Variable bounds are
/// taken from the instance program, so tightened caps carry over.
inline lp::LinearProgram core_program(const ModelInstance& inst) {
  const auto& src = inst.program;
  const int n_core = inst.m.front();  // peak variables come right after the core block
  lp::LinearProgram core;
  for (int j = 0; j < n_core; ++j) {
    core.add_variable(src.lower(j), src.upper(j), 0.0, src.variable_name(j));
  }
  const std::size_t total = src.num_variables();
  std::vector<std::vector<std::pair<int, double>>> rows(src.num_rows());
  std::vector<char> keep(src.num_rows(), 1);
  for (std::size_t j = 0; j < total; ++j) {
    for (auto [k, v] : src.column(static_cast<int>(j))) {
      if (static_cast<int>(j) >= n_core) {
        keep[static_cast<std::size_t>(k)] = 0;
      } else {
        rows[static_cast<std::size_t>(k)].push_back({static_cast<int>(j), v});
      }
    }
  }
  for (std::size_t k = 0; k < src.num_rows(); ++k) {
    if (keep[k] && !rows[k].empty()) {
      core.add_row(src.relation(static_cast<int>(k)), src.rhs(static_cast<int>(k)), rows[k],
                   src.row_name(static_cast<int>(k)));
    }
  }
  return core;
}

/// Rescales holdings so that P_T + sum_i G_i(x) = C holds exactly with the
/// true (max-form) transaction costs. The scale factor solves a univariate
/// monotone equation; drawdowns are invariant under uniform scaling, so the
/// objective can only improve (costs shrink or stay).
inline double budget_scale(const ModelInstance& inst, std::vector<double>& x,
                           std::vector<double>* xlv, std::vector<double>* xsv) {
  const std::size_t N = inst.N, T = inst.T;
  const ModelSpec& s = inst.spec;
  double pT = 0.0;
  for (std::size_t i = 0; i < N; ++i) pT += inst.price(i, T - 1) * x[i];
  if (!(pT > 0.0)) return 1.0;

  auto excess = [&](double sc) {
    double v = sc * pT - s.C;
    for (std::size_t i = 0; i < N; ++i) {
      const double viT = inst.price(i, T - 1);
      double sell = s.sell_cost[i] * (s.current_holdings[i] - sc * x[i]) * viT;
      double buy = s.buy_cost[i] * (sc * x[i] - s.current_holdings[i]) * viT;
      v += std::max({sell, buy, 0.0});
    }
    return v;
  };

  double lo = 1.0, hi = 1.0;
  if (excess(1.0) <= 0.0) {
    while (excess(hi) < 0.0 && hi < 16.0) hi *= 1.25;
  } else {
    while (excess(lo) > 0.0 && lo > 1.0 / 16.0) lo /= 1.25;
  }
  if (excess(lo) > 0.0 || excess(hi) < 0.0) return 1.0;  // no clean root; leave as-is
  for (int it = 0; it < 100; ++it) {
    double mid = 0.5 * (lo + hi);
    if (excess(mid) <= 0.0) lo = mid;
    else hi = mid;
  }
  const double sc = lo;
  for (auto& v : x) v *= sc;
  if (xlv) for (auto& v : *xlv) v *= sc;
  if (xsv) for (auto& v : *xsv) v *= sc;
  return sc;
}

struct Incumbent {
  bool valid = false;
  std::vector<double> x, xl, xs;
  Recomputed rec;
  double internal = std::numeric_limits<double>::infinity();
};

/// Evaluates LP holdings as a candidate incumbent: rescale to the exact
/// budget, recompute everything from holdings, and price the internal
/// objective with the true costs.
inline Incumbent evaluate_candidate(const ModelInstance& inst, const lp::Solution& sol) {
  Incumbent inc;
  inc.x.resize(inst.N);
  for (std::size_t i = 0; i < inst.N; ++i) {
    inc.x[i] = sol.x[static_cast<std::size_t>(inst.x[i])];
  }
  if (inst.has_shorting()) {
    inc.xl.resize(inst.N);
    inc.xs.resize(inst.N);
    for (std::size_t i = 0; i < inst.N; ++i) {
      inc.xl[i] = sol.x[static_cast<std::size_t>(inst.xl[i])];
      inc.xs[i] = sol.x[static_cast<std::size_t>(inst.xs[i])];
    }
  }
  budget_scale(inst, inc.x, inst.has_shorting() ? &inc.xl : nullptr,
               inst.has_shorting() ? &inc.xs : nullptr);
  inc.rec = recompute_reported_solution(inst, inc.x);
  inc.internal = inc.rec.internal_objective;
  inc.valid = true;
  return inc;
}

inline void fill_result_from_incumbent(SolveResult& res, const ModelInstance& inst,
                                       const Incumbent& inc) {
  res.x = inc.x;
  res.xl = inc.xl;
  res.xs = inc.xs;
  res.G = inc.rec.G;
  res.P = inc.rec.P;
  res.M = inc.rec.M;
  res.d = inc.rec.d;
  res.objective = inc.rec.drawdown_objective;
  res.total_costs = inc.rec.total_costs;
  (void)inst;
}

}  // namespace detail

/// Computes valid finite boxes for every variable and installs them on the
/// instance's program. P bounds come from 2T LP solves over the linear core
/// (parallelised across `opts.threads`); M boxes are window maxima of the P
/// boxes; d boxes follow from the drawdown formula evaluated at the box
/// corners. Holding and cost caps are closed-form.
inline VariableBounds tighten_bounds(ModelInstance& inst, const SolveOptions& opts = {}) {
  const std::size_t N = inst.N, T = inst.T;
  const ModelSpec& s = inst.spec;
  VariableBounds vb;

  // Closed-form caps first so the P-bound LPs already benefit from them.
  vb.g_upper = s.gamma * s.C;
  for (std::size_t i = 0; i < N; ++i) {
    inst.program.set_bounds(inst.g[i], 0.0, vb.g_upper);
  }
  if (!inst.has_shorting()) {
    for (std::size_t i = 0; i < N; ++i) {
      double cap = s.delta[i] * s.C / inst.price(i, T - 1);
      vb.x_upper.push_back(cap);
      inst.program.set_bounds(inst.x[i], 0.0, cap);
    }
  } else {
    const auto& sh = *s.shorting;
    for (std::size_t i = 0; i < N; ++i) {
      const double viT = inst.price(i, T - 1);
      double lcap = std::min(sh.delta_long[i], sh.cap_long) * s.C / viT;
      double scap = std::min(sh.delta_short[i], sh.cap_short) * s.C / viT;
      vb.xl_upper.push_back(lcap);
      vb.xs_upper.push_back(scap);
      vb.x_upper.push_back(lcap);
      inst.program.set_bounds(inst.xl[i], 0.0, lcap);
      inst.program.set_bounds(inst.xs[i], 0.0, scap);
      inst.program.set_bounds(inst.x[i], -scap, lcap);
    }
  }

  // min / max of each P_t over the linear core.
  auto core = detail::core_program(inst);
  std::vector<double> pmin(T), pmax(T);
  std::vector<char> infeasible(2 * T, 0);
  auto job = [&](std::size_t k) {
    const std::size_t t = k / 2;
    const bool maximize = (k % 2) == 1;
    lp::LinearProgram prog = core;
    prog.set_cost(inst.p[t], 1.0);  // p indices equal the core's own indices
    prog.set_maximize(maximize);
    auto sol = lp::solve(prog, opts.lp_options);
    if (sol.status != lp::SolveStatus::Optimal) {
      infeasible[k] = 1;  // unbounded cannot happen: P is boxed by the balance row
      return;
    }
    (maximize ? pmax[t] : pmin[t]) = sol.objective;
  };
  const int workers = std::max(1, opts.threads);
  if (workers == 1) {
    for (std::size_t k = 0; k < 2 * T; ++k) job(k);
  } else {
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t k = next.fetch_add(1); k < 2 * T; k = next.fetch_add(1)) job(k);
      });
    }
    for (auto& th : pool) th.join();
  }
  for (char f : infeasible) {
    if (f) {
      vb.feasible = false;
      return vb;
    }
  }

  const double pad = 1e-9;
  const double eps_m = 1e-6 * s.C;
  vb.p_bounds.resize(T);
  vb.m_bounds.resize(T);
  vb.d_bounds.resize(T);
  for (std::size_t t = 0; t < T; ++t) {
    double lo = std::max(0.0, pmin[t] - pad * (1.0 + std::abs(pmin[t])));
    double hi = pmax[t] + pad * (1.0 + std::abs(pmax[t]));
    vb.p_bounds[t] = {lo, hi};
  }
  for (std::size_t t = 0; t < T; ++t) {
    double mlo = 0.0, mhi = 0.0;
    for (std::size_t tau = inst.lookback_first[t]; tau <= t; ++tau) {
      mlo = std::max(mlo, vb.p_bounds[tau].first);
      mhi = std::max(mhi, vb.p_bounds[tau].second);
    }
    mlo = std::max(mlo, eps_m);
    mhi = std::max(mhi, mlo);
    vb.m_bounds[t] = {mlo, mhi};
    double dlo = std::max(0.0, 100.0 * (1.0 - vb.p_bounds[t].second / mlo));
    double dhi = std::min(100.0, 100.0 * (1.0 - vb.p_bounds[t].first / mhi));
    dhi = std::max(dhi, dlo);
    vb.d_bounds[t] = {dlo, dhi};
  }
  for (std::size_t t = 0; t < T; ++t) {
    inst.program.set_bounds(inst.p[t], vb.p_bounds[t].first, vb.p_bounds[t].second);
    inst.program.set_bounds(inst.m[t], vb.m_bounds[t].first, vb.m_bounds[t].second);
    inst.program.set_bounds(inst.d[t], vb.d_bounds[t].first, vb.d_bounds[t].second);
  }
  return vb;
}

/// Bisection on the worst drawdown level. feasible(d) asks the linear core
/// plus { P_t >= (1 - d/100) P_tau : tau in lookback(t) } for a portfolio;
/// feasibility is monotone nondecreasing in d. Probes minimise total
/// transaction costs, which pins G and makes the probe deterministic.
inline SolveResult solve_minmax_bisection(const ModelInstance& inst, const VariableBounds& vb,
                                          const SolveOptions& opts = {}) {
  auto t0 = detail::Clock::now();
  SolveResult res;
  res.method = "bisection";
  if (!vb.feasible) {
    res.status = SolveStatus::Infeasible;
    res.wall_time = detail::elapsed_seconds(t0);
    return res;
  }
  const double limit = opts.time_limit;
  const std::size_t T = inst.T;
  auto core = detail::core_program(inst);
  for (std::size_t i = 0; i < inst.N; ++i) core.set_cost(inst.g[i], 1.0);

  detail::Incumbent best;
  auto probe = [&](double dval) -> bool {
    lp::LinearProgram prog = core;
    const double keep = 1.0 - dval / 100.0;
    for (std::size_t t = 0; t < T; ++t) {
      for (std::size_t tau = inst.lookback_first[t]; tau < t; ++tau) {
        prog.add_row(lp::Relation::GE, 0.0,
                     {{inst.p[t], 1.0}, {inst.p[tau], -keep}},
                     "hold[" + std::to_string(t) + "," + std::to_string(tau) + "]");
      }
    }
    auto sol = lp::solve(prog, opts.lp_options);
    ++res.nodes;
    if (sol.status == lp::SolveStatus::Optimal) {
      best = detail::evaluate_candidate(inst, sol);
      return true;
    }
    return false;
  };

  auto out_of_time = [&] { return limit >= 0.0 && detail::elapsed_seconds(t0) >= limit; };

  double lo = 0.0, hi = 100.0;
  if (out_of_time()) {
    res.status = SolveStatus::TimedOut;
    res.wall_time = detail::elapsed_seconds(t0);
    return res;
  }
  if (probe(0.0)) {
    hi = 0.0;  // nothing can beat a zero worst drawdown
  } else if (!probe(100.0)) {
    res.status = SolveStatus::Infeasible;
    res.wall_time = detail::elapsed_seconds(t0);
    return res;
  } else {
    while (hi - lo > opts.bisect_tol && !out_of_time()) {
      double mid = 0.5 * (lo + hi);
      if (probe(mid)) hi = mid;
      else lo = mid;
    }
  }

  detail::fill_result_from_incumbent(res, inst, best);
  res.lower_bound = lo;
  if (hi - lo > opts.bisect_tol && hi > 0.0) {
    // Interrupted by the clock before the bracket closed.
    res.status = SolveStatus::FeasibleWithGap;
    res.gap = (hi - lo) / std::max(hi, 1e-9);
  } else {
    res.status = SolveStatus::ProvenOptimal;
    res.gap = hi == 0.0 ? 0.0 : opts.bisect_tol / std::max(lo, opts.bisect_tol);
  }
  res.wall_time = detail::elapsed_seconds(t0);
  return res;
}

/// Best-first spatial branch-and-bound for the average / weighted drawdown
/// objectives.
inline SolveResult solve_spatial_bnb(const ModelInstance& inst, const VariableBounds& vb,
                                     const SolveOptions& opts = {}) {
  auto t0 = detail::Clock::now();
  SolveResult res;
  res.method = "branch-and-bound";
  if (!vb.feasible) {
    res.status = SolveStatus::Infeasible;
    res.wall_time = detail::elapsed_seconds(t0);
    return res;
  }
  const std::size_t T = inst.T;
  const double gb = inst.spec.gamma_big;
  const double limit = opts.time_limit;

  struct Box {
    double dlo, dhi, mlo, mhi;
  };
  struct Node {
    long id;
    double lb;  // internal objective lower bound inherited from the parent
    std::vector<Box> boxes;
  };
  struct NodeOrder {
    bool operator()(const Node& a, const Node& b) const {
      if (a.lb != b.lb) return a.lb > b.lb;  // min-heap on bound
      return a.id > b.id;                    // then oldest first
    }
  };

  // d-box refinement from the P box and an M sub-box (the drawdown formula
  // evaluated at the corners).
  auto refine_d = [&](std::size_t t, Box& b) -> bool {
    const auto [plo, phi] = vb.p_bounds[t];
    b.dlo = std::max(b.dlo, std::max(0.0, 100.0 * (1.0 - phi / b.mlo)));
    b.dhi = std::min(b.dhi, std::min(100.0, 100.0 * (1.0 - plo / b.mhi)));
    return b.dlo <= b.dhi + 1e-12;
  };

  auto solve_node = [&](const Node& node) {
    lp::LinearProgram prog = inst.program;
    for (std::size_t t = 0; t < T; ++t) {
      const Box& b = node.boxes[t];
      prog.set_bounds(inst.d[t], b.dlo, b.dhi);
      prog.set_bounds(inst.m[t], b.mlo, b.mhi);
      double corners[4] = {b.dlo * b.mlo, b.dlo * b.mhi, b.dhi * b.mlo, b.dhi * b.mhi};
      double wlo = *std::min_element(corners, corners + 4);
      double whi = *std::max_element(corners, corners + 4);
      int w = prog.add_variable(wlo, whi, 0.0, "w_" + std::to_string(t));
      auto ts = std::to_string(t);
      // w stands in for d*M: clearance of the drawdown definition ...
      prog.add_row(lp::Relation::GE, 0.0,
                   {{w, 1.0}, {inst.m[t], -100.0}, {inst.p[t], 100.0}}, "def[" + ts + "]");
      // ... and the four McCormick envelopes over the box.
      prog.add_row(lp::Relation::GE, -b.dlo * b.mlo,
                   {{w, 1.0}, {inst.m[t], -b.dlo}, {inst.d[t], -b.mlo}}, "mc1[" + ts + "]");
      prog.add_row(lp::Relation::GE, -b.dhi * b.mhi,
                   {{w, 1.0}, {inst.m[t], -b.dhi}, {inst.d[t], -b.mhi}}, "mc2[" + ts + "]");
      prog.add_row(lp::Relation::LE, -b.dhi * b.mlo,
                   {{w, 1.0}, {inst.m[t], -b.dhi}, {inst.d[t], -b.mlo}}, "mc3[" + ts + "]");
      prog.add_row(lp::Relation::LE, -b.dlo * b.mhi,
                   {{w, 1.0}, {inst.m[t], -b.dlo}, {inst.d[t], -b.mhi}}, "mc4[" + ts + "]");
    }
    return lp::solve(prog, opts.lp_options);
  };

  std::priority_queue<Node, std::vector<Node>, NodeOrder> queue;
  Node root;
  root.id = 0;
  root.lb = 0.0;  // objective variables are nonnegative with nonnegative costs
  root.boxes.resize(T);
  for (std::size_t t = 0; t < T; ++t) {
    root.boxes[t] = {vb.d_bounds[t].first, vb.d_bounds[t].second, vb.m_bounds[t].first,
                     vb.m_bounds[t].second};
  }
  queue.push(std::move(root));
  long next_id = 1;
  detail::Incumbent best;
  double dropped_floor = std::numeric_limits<double>::infinity();
  bool hit_limit = false;

  auto current_lower = [&]() {
    double lb = queue.empty() ? std::numeric_limits<double>::infinity() : queue.top().lb;
    lb = std::min(lb, dropped_floor);
    if (best.valid) lb = std::min(lb, best.internal);
    return lb;
  };
  auto rel_gap = [&](double ub, double lb) {
    if (!std::isfinite(ub)) return std::numeric_limits<double>::infinity();
    // Bounds are in internal units (drawdown part multiplied by gamma_big),
    // so the denominator floor has to live on the same scale.
    return std::max(0.0, ub - lb) / std::max(std::abs(ub), gb * 1e-9);
  };

  while (!queue.empty()) {
    if (limit >= 0.0 && detail::elapsed_seconds(t0) >= limit) {
      hit_limit = true;
      break;
    }
    if (res.nodes >= opts.max_nodes) {
      hit_limit = true;
      res.warnings.push_back("node limit reached");
      break;
    }
    double ub = best.valid ? best.internal : std::numeric_limits<double>::infinity();
    if (best.valid && rel_gap(ub, current_lower()) <= opts.gap_tol) break;

    Node node = queue.top();
    queue.pop();
    if (best.valid && node.lb >= ub - 1e-12 * std::max(1.0, std::abs(ub))) {
      // Best-first order: everything left is at least as bad.
      dropped_floor = std::min(dropped_floor, node.lb);
      break;
    }

    // Records the *global* bounds after this node has been expanded; the
    // trace is therefore a monotone bracket around the optimum.
    auto record = [&](long id) {
      if (opts.record_nodes) {
        double now_ub = best.valid ? best.internal : std::numeric_limits<double>::infinity();
        res.node_trace.push_back({id, current_lower() / gb, now_ub / gb});
      }
    };

    auto sol = solve_node(node);
    ++res.nodes;
    if (sol.status == lp::SolveStatus::Infeasible) {
      record(node.id);
      continue;
    }
    if (sol.status != lp::SolveStatus::Optimal) {
      throw ResourceError("bnb: node relaxation neither optimal nor infeasible");
    }
    // Relaxation objectives can dip a hair below zero from LP noise; zero is
    // a valid floor because every cost lands on a variable bounded below by 0.
    double node_lb = std::max({node.lb, sol.objective, 0.0});

    // Candidate incumbent from this node's holdings.
    auto cand = detail::evaluate_candidate(inst, sol);
    if (!best.valid || cand.internal < best.internal) best = std::move(cand);
    ub = best.internal;
    if (node_lb >= ub - 1e-12 * std::max(1.0, std::abs(ub))) {  // closed
      record(node.id);
      continue;
    }

    // Largest bilinear violation picks the branching day.
    std::size_t t_star = 0;
    double vmax = -1.0;
    for (std::size_t t = 0; t < T; ++t) {
      double dv = sol.x[static_cast<std::size_t>(inst.d[t])];
      double mv = sol.x[static_cast<std::size_t>(inst.m[t])];
      double wv = sol.x[static_cast<std::size_t>(inst.program.num_variables()) + t];
      double viol = std::abs(wv - dv * mv);
      if (viol > vmax + 1e-15) {
        vmax = viol;
        t_star = t;
      }
    }
    const Box& b = node.boxes[t_star];
    const double m_width = b.mhi - b.mlo;
    const double d_width = b.dhi - b.dlo;
    const double m_min_width = 1e-9 * (1.0 + b.mhi);
    const double d_min_width = 1e-9 * 100.0;

    auto push_child = [&](std::vector<Box> boxes, double lb) {
      bool ok = true;
      for (std::size_t t = 0; t < T; ++t) {
        if (!refine_d(t, boxes[t])) {
          ok = false;
          break;
        }
      }
      if (ok) queue.push(Node{next_id++, lb, std::move(boxes)});
    };

    if (m_width > m_min_width) {
      double mv = sol.x[static_cast<std::size_t>(inst.m[t_star])];
      double split = std::clamp(mv, b.mlo + 0.1 * m_width, b.mhi - 0.1 * m_width);
      auto lo_boxes = node.boxes;
      lo_boxes[t_star].mhi = split;
      auto hi_boxes = node.boxes;
      hi_boxes[t_star].mlo = split;
      push_child(std::move(lo_boxes), node_lb);
      push_child(std::move(hi_boxes), node_lb);
    } else if (d_width > d_min_width) {
      double dv = sol.x[static_cast<std::size_t>(inst.d[t_star])];
      double split = std::clamp(dv, b.dlo + 0.1 * d_width, b.dhi - 0.1 * d_width);
      auto lo_boxes = node.boxes;
      lo_boxes[t_star].dhi = split;
      auto hi_boxes = node.boxes;
      hi_boxes[t_star].dlo = split;
      push_child(std::move(lo_boxes), node_lb);
      push_child(std::move(hi_boxes), node_lb);
    } else {
      // The box is pointlike yet the product still shows violation: treat
      // the node's bound as final and move on.
      dropped_floor = std::min(dropped_floor, node_lb);
    }
    record(node.id);
  }

  double lb = current_lower();
  if (best.valid) {
    detail::fill_result_from_incumbent(res, inst, best);
    res.gap = rel_gap(best.internal, lb);
    res.lower_bound = lb / gb;
    res.status = (hit_limit && res.gap > opts.gap_tol) ? SolveStatus::FeasibleWithGap
                                                       : SolveStatus::ProvenOptimal;
    if (!hit_limit && res.gap > opts.gap_tol) {
      // Queue exhausted without closing the gap: the dropped-floor path.
      res.status = SolveStatus::FeasibleWithGap;
    }
  } else {
    res.status = hit_limit ? SolveStatus::TimedOut : SolveStatus::Infeasible;
  }
  res.wall_time = detail::elapsed_seconds(t0);
  return res;
}

/// Dispatch: tighten bounds, then route the objective to its method.
inline SolveResult solve(const ModelInstance& inst_in, SolveOptions opts = {}) {
  auto t0 = detail::Clock::now();
  ModelInstance inst = inst_in;  // tightening installs bounds on the program
  if (opts.time_limit < 0.0) {
    opts.time_limit = std::max(500.0, 7.0 * static_cast<double>(inst.N));
  }
  SolveResult res;
  if (opts.time_limit == 0.0) {
    res.status = SolveStatus::TimedOut;
    res.method = inst.spec.objective == Objective::MinMax ? "bisection" : "branch-and-bound";
    res.warnings = inst.warnings;
    return res;
  }
  auto vb = tighten_bounds(inst, opts);
  SolveOptions method_opts = opts;
  method_opts.time_limit = std::max(0.001, opts.time_limit - detail::elapsed_seconds(t0));
  if (inst.spec.objective == Objective::MinMax) {
    res = solve_minmax_bisection(inst, vb, method_opts);
  } else {
    res = solve_spatial_bnb(inst, vb, method_opts);
  }
  res.warnings.insert(res.warnings.begin(), inst.warnings.begin(), inst.warnings.end());
  res.wall_time = detail::elapsed_seconds(t0);
  return res;
}

}  // namespace ddopt
