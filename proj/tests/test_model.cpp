#include "ddopt/model.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <random>
#include <vector>

#include "ddopt/analytics.hpp"

using Catch::Approx;
namespace lp = ddopt::lp;

namespace {

// Builds an N-asset, T-day panel directly from a price matrix (row-major).
ddopt::PricePanel make_panel(std::size_t N, std::size_t T, std::vector<double> prices) {
  std::vector<std::string> assets, dates;
  for (std::size_t i = 0; i < N; ++i) assets.push_back("A" + std::to_string(i));
  for (std::size_t t = 0; t < T; ++t) {
    dates.push_back("2020-01-" + std::string(t + 1 < 10 ? "0" : "") + std::to_string(t + 1));
  }
  std::vector<std::uint8_t> member(N * T, 1);
  return ddopt::PricePanel(std::move(assets), std::move(dates), std::move(prices),
                           std::move(member));
}

}  // namespace

TEST_CASE("smallest instance has the expected shape") {
  auto panel = make_panel(1, 2, {10.0, 12.0});
  ddopt::ModelSpec spec;
  spec.D = 1;
  spec.objective = ddopt::Objective::MinAvg;
  spec.C = 1000.0;
  auto inst = ddopt::build(panel, spec);

  // Variables: x, G, P_0, P_1, M_0, M_1, d_0, d_1 (no dmax for MinAvg).
  CHECK(inst.program.num_variables() == 8);
  CHECK(inst.dmax == -1);
  CHECK(inst.bilinear.size() == 2);
  // Rows: 2 value, 1 prop, 2 cost, 1 cap, 1 balance, 3 peak (t=0: tau=0;
  // t=1: tau=0,1).
  CHECK(inst.program.num_rows() == 10);
  CHECK(inst.lookback_first == std::vector<std::size_t>{0, 0});
}

TEST_CASE("minmax and weighted objectives track dmax") {
  auto panel = make_panel(1, 3, {10, 11, 12});
  ddopt::ModelSpec spec;
  spec.D = 2;
  spec.objective = ddopt::Objective::MinMax;
  auto inst = ddopt::build(panel, spec);
  REQUIRE(inst.dmax >= 0);
  CHECK(inst.program.cost(inst.dmax) == spec.gamma_big);
  CHECK(inst.program.cost(inst.d[0]) == 0.0);

  spec.objective = ddopt::Objective::Weighted;
  spec.lambda1 = 2.0;
  spec.lambda2 = 0.5;
  auto w = ddopt::build(panel, spec);
  REQUIRE(w.dmax >= 0);
  CHECK(w.program.cost(w.dmax) == Approx(2.0 * spec.gamma_big));
  CHECK(w.program.cost(w.d[1]) == Approx(0.5 * spec.gamma_big / 3.0));
  // One worst[t] row per day beyond the MinAvg row count.
  auto base = spec;
  base.objective = ddopt::Objective::MinAvg;
  auto plain = ddopt::build(panel, base);
  CHECK(w.program.num_rows() == plain.program.num_rows() + 3);
}

TEST_CASE("zero cost cap pins the balance at C") {
  auto panel = make_panel(2, 3, {10, 12, 11, 20, 18, 19});
  ddopt::ModelSpec spec;
  spec.D = 2;
  spec.gamma = 0.0;  // no cost budget; buy/sell fees default to zero
  spec.C = 1000.0;
  auto inst = ddopt::build(panel, spec);
  auto sol = lp::solve(inst.program);
  REQUIRE(sol.status == lp::SolveStatus::Optimal);
  double sum_g = sol.x[static_cast<std::size_t>(inst.g[0])] +
                 sol.x[static_cast<std::size_t>(inst.g[1])];
  double p_final = sol.x[static_cast<std::size_t>(inst.p[2])];
  CHECK(sum_g == Approx(0.0).margin(1e-9));
  CHECK(p_final == Approx(1000.0).margin(1e-7));
}

TEST_CASE("shorting adds split variables, caps, and keeps P nonnegative") {
  auto panel = make_panel(2, 3, {10, 12, 11, 20, 18, 19});
  ddopt::ModelSpec spec;
  spec.D = 2;
  ddopt::ShortingSpec sh;
  sh.delta_long = {0.1, 0.1};
  sh.delta_short = {0.1, 0.1};
  sh.cap_long = 1.1;
  sh.cap_short = 0.1;
  spec.shorting = sh;
  auto inst = ddopt::build(panel, spec);

  REQUIRE(inst.xl.size() == 2);
  REQUIRE(inst.xs.size() == 2);
  CHECK(inst.program.lower(inst.x[0]) == -lp::kInf);  // net holdings are free
  CHECK(inst.program.lower(inst.xl[0]) == 0.0);
  CHECK(inst.program.lower(inst.xs[0]) == 0.0);
  for (int pt : inst.p) CHECK(inst.program.lower(pt) == 0.0);  // value floor kept

  // Long-only counterpart: same days, no split. Shorting adds 2 vars per
  // asset and 3 rows per asset + 2 aggregate rows - N prop rows.
  ddopt::ModelSpec plain_spec;
  plain_spec.D = 2;
  auto plain = ddopt::build(panel, plain_spec);
  CHECK(inst.program.num_variables() == plain.program.num_variables() + 4);
  CHECK(inst.program.num_rows() == plain.program.num_rows() - 2 + 6 + 2);
}

TEST_CASE("zero short cap reproduces the long-only polytope") {
  // Support-function comparison: for several objective directions over the
  // shared variables, the two feasible sets give identical optima.
  auto panel = make_panel(2, 4, {10, 12, 11, 13, 20, 18, 19, 17});
  ddopt::ModelSpec long_spec;
  long_spec.D = 3;
  long_spec.delta = {0.8, 0.8};
  long_spec.buy_cost = {0.005, 0.005};
  long_spec.sell_cost = {0.005, 0.005};
  long_spec.gamma = 0.05;

  ddopt::ModelSpec short_spec = long_spec;
  ddopt::ShortingSpec sh;
  sh.delta_long = {0.8, 0.8};
  sh.delta_short = {0.1, 0.1};
  sh.cap_long = 1.0;
  sh.cap_short = 0.0;  // shorting allowed by structure, forbidden by cap
  short_spec.shorting = sh;

  auto a = ddopt::build(panel, long_spec);
  auto b = ddopt::build(panel, short_spec);

  std::mt19937 rng(7);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  for (int trial = 0; trial < 6; ++trial) {
    // Random direction over x, G, P, d; nonnegative on M (M is unbounded
    // above, so a negative cost would be unbounded in both programs).
    auto set_costs = [&](ddopt::ModelInstance& inst, std::mt19937 r) {
      for (std::size_t i = 0; i < inst.N; ++i) {
        inst.program.set_cost(inst.x[i], coef(r));
        inst.program.set_cost(inst.g[i], coef(r));
      }
      for (std::size_t t = 0; t < inst.T; ++t) {
        inst.program.set_cost(inst.p[t], coef(r));
        inst.program.set_cost(inst.d[t], coef(r));
        inst.program.set_cost(inst.m[t], std::abs(coef(r)));
      }
    };
    std::mt19937 snapshot = rng;
    set_costs(a, snapshot);
    set_costs(b, snapshot);
    rng.discard(32);

    auto sa = lp::solve(a.program);
    auto sb = lp::solve(b.program);
    REQUIRE(sa.status == lp::SolveStatus::Optimal);
    REQUIRE(sb.status == lp::SolveStatus::Optimal);
    CHECK(sa.objective == Approx(sb.objective).margin(1e-6));
  }
}

TEST_CASE("recompute pins costs and matches the drawdown recursion") {
  auto panel = make_panel(2, 5, {10, 12, 9, 13, 11, 20, 18, 21, 17, 19});
  ddopt::ModelSpec spec;
  spec.D = 3;
  spec.current_holdings = {3.0, 2.0};
  spec.buy_cost = {0.01, 0.01};
  spec.sell_cost = {0.02, 0.02};
  spec.gamma = 0.05;
  auto inst = ddopt::build(panel, spec);

  SECTION("no trade means no cost") {
    auto r = ddopt::recompute_reported_solution(inst, {3.0, 2.0});
    CHECK(r.G[0] == 0.0);
    CHECK(r.G[1] == 0.0);
    CHECK(r.total_costs == 0.0);
  }

  SECTION("buy and sell legs use the correct fee") {
    auto r = ddopt::recompute_reported_solution(inst, {5.0, 1.0});
    // Asset 0: bought 2 units at final price 11 -> 0.01 * 2 * 11.
    CHECK(r.G[0] == Approx(0.01 * 2.0 * 11.0));
    // Asset 1: sold 1 unit at final price 19 -> 0.02 * 1 * 19.
    CHECK(r.G[1] == Approx(0.02 * 1.0 * 19.0));
  }

  SECTION("drawdowns equal the analytics recursion on the same P series") {
    std::vector<double> x{4.0, 1.5};
    auto r = ddopt::recompute_reported_solution(inst, x);
    auto dd = ddopt::drawdown(r.P, spec.D);
    for (std::size_t t = 0; t < 5; ++t) {
      CHECK(r.M[t] == Approx(dd.running_max[t]).epsilon(1e-14));
      CHECK(r.d[t] == Approx(dd.drawdown[t]).epsilon(1e-14));
    }
    CHECK(r.mean_drawdown == Approx(dd.mean_drawdown()).epsilon(1e-12));
    CHECK(r.max_drawdown == Approx(dd.max_drawdown()).epsilon(1e-12));
    CHECK(r.internal_objective ==
          Approx(spec.gamma_big * r.mean_drawdown + r.total_costs).epsilon(1e-12));
  }
}

TEST_CASE("undersized proportion caps trigger a warning and infeasibility") {
  auto panel = make_panel(2, 2, {10, 11, 20, 21});
  ddopt::ModelSpec spec;
  spec.D = 1;
  spec.delta = {0.3, 0.3};
  auto inst = ddopt::build(panel, spec);
  REQUIRE_FALSE(inst.warnings.empty());
  auto sol = lp::solve(inst.program);
  CHECK(sol.status == lp::SolveStatus::Infeasible);
}

TEST_CASE("build validation rejects inconsistent specs") {
  auto panel = make_panel(1, 2, {10, 11});
  ddopt::ModelSpec spec;
  spec.D = 1;

  SECTION("window length mismatch") {
    spec.T = 5;
    CHECK_THROWS_AS(ddopt::build(panel, spec), ddopt::ValidationError);
  }
  SECTION("zero lookback") {
    spec.D = 0;
    CHECK_THROWS_AS(ddopt::build(panel, spec), ddopt::ValidationError);
  }
  SECTION("nonpositive capital") {
    spec.C = 0.0;
    CHECK_THROWS_AS(ddopt::build(panel, spec), ddopt::ValidationError);
  }
  SECTION("delta outside [0,1]") {
    spec.delta = {1.5};
    CHECK_THROWS_AS(ddopt::build(panel, spec), ddopt::ValidationError);
  }
  SECTION("weighted requires positive weights") {
    spec.objective = ddopt::Objective::Weighted;
    spec.lambda1 = 0.0;
    CHECK_THROWS_AS(ddopt::build(panel, spec), ddopt::ValidationError);
  }
  SECTION("wrong-size vectors") {
    spec.delta = {0.5, 0.5};
    CHECK_THROWS_AS(ddopt::build(panel, spec), ddopt::ValidationError);
  }
  SECTION("shorting caps") {
    ddopt::ShortingSpec sh;
    sh.cap_long = 0.5;  // must be >= 1
    spec.shorting = sh;
    CHECK_THROWS_AS(ddopt::build(panel, spec), ddopt::ValidationError);
  }
  SECTION("gamma outside [0,1]") {
    spec.gamma = 1.5;
    CHECK_THROWS_AS(ddopt::build(panel, spec), ddopt::ValidationError);
  }
}

TEST_CASE("instance dump is deterministic and readable") {
  auto panel = make_panel(2, 2, {10, 11, 20, 21});
  ddopt::ModelSpec spec;
  spec.D = 1;
  auto a = ddopt::build(panel, spec);
  auto b = ddopt::build(panel, spec);
  auto dump = ddopt::dump_instance(a);
  CHECK(dump == ddopt::dump_instance(b));
  CHECK(dump.find("minimize") != std::string::npos);
  CHECK(dump.find("balance:") != std::string::npos);
  CHECK(dump.find("bilinear") != std::string::npos);
  CHECK(dump.find("d_1 * M_1 >= 100 (M_1 - P_1)") != std::string::npos);
  CHECK(dump.find("x_0") != std::string::npos);
}
