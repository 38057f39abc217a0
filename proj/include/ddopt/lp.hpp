#pragma once

// Bounded-variable revised simplex over dense basis inverses.
//
// Conventions:
//   minimize c.x  subject to  a_k.x {<=,>=,==} b_k,  lo <= x <= up
// Duals y are reported per row with the sign convention of the Lagrangian
// c - y A: at optimality y_k <= 0 for binding <= rows, y_k >= 0 for binding
// >= rows, free for == rows, and y_k == 0 for rows whose slack is strictly
// interior. Reduced costs d_j = c_j - y.A_j satisfy d_j >= 0 at lower bound,
// d_j <= 0 at upper bound, d_j == 0 basic, all up to opt_tol. Strong duality:
//   c.x* == y.b + sum over nonbasic structural j of d_j * x*_j.
//
// The pivot order is fully deterministic (largest violation, ties to the
// smallest index; Bland's rule after a stall), so identical inputs produce
// identical solutions.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "ddopt/error.hpp"

namespace ddopt::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Relation { LE, GE, EQ };

enum class SolveStatus { Optimal, Infeasible, Unbounded, IterationLimit };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::IterationLimit: return "iteration_limit";
  }
  return "?";
}

struct Options {
  double feas_tol = 1e-7;
  double opt_tol = 1e-7;
  int max_iterations = 0;  // 0: scale with problem size
  int refactor_every = 100;
};

class LinearProgram {
 public:
  int add_variable(double lo, double up, double cost, std::string name = {}) {
    if (std::isnan(lo) || std::isnan(up) || std::isnan(cost)) {
      throw ValidationError("lp: NaN in variable definition: " + name);
    }
    if (lo > up) throw ValidationError("lp: variable with lo > up: " + name);
    lo_.push_back(lo);
    up_.push_back(up);
    cost_.push_back(cost);
    names_.push_back(std::move(name));
    cols_.emplace_back();
    return static_cast<int>(lo_.size()) - 1;
  }

  /// Objective sense; the default is minimisation.
  void set_maximize(bool maximize) { maximize_ = maximize; }
  bool maximize() const { return maximize_; }

  void set_cost(int j, double c) { cost_.at(static_cast<std::size_t>(j)) = c; }
  void set_bounds(int j, double lo, double up) {
    if (lo > up) throw ValidationError("lp: variable with lo > up");
    lo_.at(static_cast<std::size_t>(j)) = lo;
    up_.at(static_cast<std::size_t>(j)) = up;
  }

  int add_row(Relation rel, double rhs, const std::vector<std::pair<int, double>>& coeffs,
              std::string name = {}) {
    if (std::isnan(rhs)) throw ValidationError("lp: NaN right-hand side: " + name);
    int row = static_cast<int>(rhs_.size());
    rel_.push_back(rel);
    rhs_.push_back(rhs);
    row_names_.push_back(std::move(name));
    for (auto [j, v] : coeffs) {
      if (j < 0 || j >= static_cast<int>(cols_.size())) {
        throw ValidationError("lp: row references unknown variable");
      }
      if (std::isnan(v)) throw ValidationError("lp: NaN coefficient: " + name);
      if (v != 0.0) cols_[static_cast<std::size_t>(j)].push_back({row, v});
    }
    return row;
  }

  std::size_t num_variables() const { return cols_.size(); }
  std::size_t num_rows() const { return rhs_.size(); }

  double lower(int j) const { return lo_[static_cast<std::size_t>(j)]; }
  double upper(int j) const { return up_[static_cast<std::size_t>(j)]; }
  double cost(int j) const { return cost_[static_cast<std::size_t>(j)]; }
  Relation relation(int k) const { return rel_[static_cast<std::size_t>(k)]; }
  double rhs(int k) const { return rhs_[static_cast<std::size_t>(k)]; }
  const std::string& variable_name(int j) const { return names_[static_cast<std::size_t>(j)]; }
  const std::string& row_name(int k) const { return row_names_[static_cast<std::size_t>(k)]; }
  const std::vector<std::pair<int, double>>& column(int j) const {
    return cols_[static_cast<std::size_t>(j)];
  }

 private:
  std::vector<double> lo_, up_, cost_;
  std::vector<std::string> names_;
  std::vector<std::vector<std::pair<int, double>>> cols_;  // (row, coeff) per variable
  std::vector<Relation> rel_;
  std::vector<double> rhs_;
  std::vector<std::string> row_names_;
  bool maximize_ = false;
};

struct Solution {
  SolveStatus status = SolveStatus::Infeasible;
  double objective = 0.0;
  std::vector<double> x;              // structural variables only
  std::vector<double> duals;          // y, one per row
  std::vector<double> reduced_costs;  // d_j per structural variable
  int iterations = 0;
  double max_violation = 0.0;      // worst primal residual at termination
  double infeasibility = 0.0;      // phase-1 objective when status == Infeasible
};

namespace detail {

enum class VStat : std::uint8_t { Basic, AtLower, AtUpper, FreeAtZero };

class Simplex {
 public:
  Simplex(const LinearProgram& lp, const Options& opt) : lp_(lp), opt_(opt) {
    n_struct_ = lp.num_variables();
    m_ = lp.num_rows();
    build();
  }

  Solution run() {
    Solution sol;
    if (m_ == 0) return solve_unconstrained();

    // Phase 1: minimise the total artificial mass.
    if (num_artificial_ > 0) {
      set_phase_costs(/*phase1=*/true);
      SolveStatus st = iterate(sol);
      if (st != SolveStatus::Optimal) {
        // A phase-1 objective is bounded below by zero, so an "unbounded"
        // report can only be numerical trouble.
        if (st == SolveStatus::Unbounded) throw ResourceError("lp: phase 1 unbounded");
        sol.status = st;
        return finish(sol);
      }
      double p1 = current_objective();
      if (p1 > 1e-7 * scale_) {
        sol.status = SolveStatus::Infeasible;
        sol.infeasibility = p1;
        return finish(sol);
      }
      // Freeze the artificials at zero so phase 2 cannot reuse them.
      for (std::size_t j = n_struct_ + m_; j < nv_; ++j) {
        lo2_[j] = 0.0;
        up2_[j] = 0.0;
        if (vstat_[j] != VStat::Basic) {
          vstat_[j] = VStat::AtLower;
          xval_[j] = 0.0;
        }
      }
    }

    set_phase_costs(/*phase1=*/false);
    SolveStatus st = iterate(sol);
    sol.status = st;
    return finish(sol);
  }

 private:
  const LinearProgram& lp_;
  Options opt_;
  std::size_t n_struct_ = 0, m_ = 0, nv_ = 0, num_artificial_ = 0;

  // Computational form: structural vars, then one slack per row, then
  // artificials. Slack bounds encode the relation.
  std::vector<std::vector<std::pair<int, double>>> cols_;
  std::vector<double> lo2_, up2_, cost2_, obj_cost_;
  std::vector<double> xval_;
  std::vector<VStat> vstat_;
  std::vector<int> basis_;  // variable basic in each row
  Eigen::MatrixXd binv_;
  Eigen::VectorXd b_;
  // Equilibration: the simplex runs on A' = R A C with R, C diagonal powers
  // of two (exact in binary floating point, so scaling introduces no rounding
  // of its own). Bounds, costs, and the rhs are transformed accordingly and
  // every published quantity is mapped back in finish().
  std::vector<double> row_scale_, col_scale_;
  double scale_ = 1.0;       // max |rhs| in scaled space
  double scale_orig_ = 1.0;  // max |rhs| in original space
  double sense_ = 1.0;  // -1 when maximizing; internals always minimise
  int iters_ = 0;
  int pivots_since_refactor_ = 0;
  int stall_ = 0;
  bool bland_ = false;
  double last_obj_ = kInf;

  void build() {
    nv_ = n_struct_ + m_;
    cols_.resize(nv_);
    lo2_.resize(nv_);
    up2_.resize(nv_);
    obj_cost_.assign(nv_, 0.0);
    b_.resize(static_cast<Eigen::Index>(m_));
    sense_ = lp_.maximize() ? -1.0 : 1.0;

    // Geometric-mean equilibration, two alternating sweeps, with every scale
    // rounded to a power of two so the scaled coefficients are bit-exact
    // transforms of the originals.
    row_scale_.assign(m_, 1.0);
    col_scale_.assign(n_struct_, 1.0);
    auto pow2_near = [](double s) {
      if (!(s > 0.0) || !std::isfinite(s)) return 1.0;
      return std::exp2(std::round(std::log2(s)));
    };
    for (int round = 0; round < 2; ++round) {
      std::vector<double> rmin(m_, kInf), rmax(m_, 0.0);
      for (std::size_t j = 0; j < n_struct_; ++j) {
        for (auto [k, v] : lp_.column(static_cast<int>(j))) {
          double a = std::abs(v) * col_scale_[j];
          if (a <= 0.0) continue;
          rmin[k] = std::min(rmin[k], a);
          rmax[k] = std::max(rmax[k], a);
        }
      }
      for (std::size_t k = 0; k < m_; ++k)
        if (rmax[k] > 0.0) row_scale_[k] = pow2_near(1.0 / std::sqrt(rmin[k] * rmax[k]));
      for (std::size_t j = 0; j < n_struct_; ++j) {
        double cmin = kInf, cmax = 0.0;
        for (auto [k, v] : lp_.column(static_cast<int>(j))) {
          double a = std::abs(v) * row_scale_[k];
          if (a <= 0.0) continue;
          cmin = std::min(cmin, a);
          cmax = std::max(cmax, a);
        }
        if (cmax > 0.0) col_scale_[j] = pow2_near(1.0 / std::sqrt(cmin * cmax));
      }
    }

    for (std::size_t j = 0; j < n_struct_; ++j) {
      cols_[j] = lp_.column(static_cast<int>(j));
      for (auto& [k, v] : cols_[j]) v *= row_scale_[k] * col_scale_[j];
      lo2_[j] = lp_.lower(static_cast<int>(j)) / col_scale_[j];
      up2_[j] = lp_.upper(static_cast<int>(j)) / col_scale_[j];
      obj_cost_[j] = sense_ * lp_.cost(static_cast<int>(j)) * col_scale_[j];
    }
    for (std::size_t k = 0; k < m_; ++k) {
      std::size_t j = n_struct_ + k;
      cols_[j] = {{static_cast<int>(k), 1.0}};
      switch (lp_.relation(static_cast<int>(k))) {
        case Relation::LE: lo2_[j] = 0.0; up2_[j] = kInf; break;
        case Relation::GE: lo2_[j] = -kInf; up2_[j] = 0.0; break;
        case Relation::EQ: lo2_[j] = 0.0; up2_[j] = 0.0; break;
      }
      b_(static_cast<Eigen::Index>(k)) = lp_.rhs(static_cast<int>(k)) * row_scale_[k];
    }
    scale_ = 1.0;
    scale_orig_ = 1.0;
    for (std::size_t k = 0; k < m_; ++k) {
      scale_ = std::max(scale_, std::abs(b_(static_cast<Eigen::Index>(k))));
      scale_orig_ = std::max(scale_orig_, std::abs(lp_.rhs(static_cast<int>(k))));
    }

    // Start every structural variable on its preferred bound and let the
    // slacks absorb the residual; rows whose slack cannot absorb it get an
    // artificial column instead.
    xval_.assign(nv_, 0.0);
    vstat_.assign(nv_, VStat::AtLower);
    for (std::size_t j = 0; j < n_struct_; ++j) {
      if (std::isfinite(lo2_[j])) {
        vstat_[j] = VStat::AtLower;
        xval_[j] = lo2_[j];
      } else if (std::isfinite(up2_[j])) {
        vstat_[j] = VStat::AtUpper;
        xval_[j] = up2_[j];
      } else {
        vstat_[j] = VStat::FreeAtZero;
        xval_[j] = 0.0;
      }
    }
    Eigen::VectorXd resid = b_;
    for (std::size_t j = 0; j < n_struct_; ++j) {
      if (xval_[j] == 0.0) continue;
      for (auto [k, v] : cols_[j]) resid(k) -= v * xval_[j];
    }
    basis_.assign(m_, -1);
    std::vector<double> art_sign;
    for (std::size_t k = 0; k < m_; ++k) {
      std::size_t s = n_struct_ + k;
      double r = resid(static_cast<Eigen::Index>(k));
      if (r >= lo2_[s] - 1e-12 * scale_ && r <= up2_[s] + 1e-12 * scale_) {
        basis_[k] = static_cast<int>(s);
        vstat_[s] = VStat::Basic;
        xval_[s] = std::clamp(r, lo2_[s], up2_[s]);
      } else {
        double clamped = std::clamp(r, lo2_[s], up2_[s]);
        vstat_[s] = (clamped == lo2_[s]) ? VStat::AtLower : VStat::AtUpper;
        xval_[s] = clamped;
        art_sign.push_back(r - clamped > 0 ? 1.0 : -1.0);
        basis_[k] = static_cast<int>(nv_ + art_sign.size() - 1);
      }
    }
    num_artificial_ = art_sign.size();
    std::size_t a = 0;
    for (std::size_t k = 0; k < m_; ++k) {
      if (basis_[k] < static_cast<int>(nv_)) continue;
      std::size_t j = nv_ + a;
      cols_.push_back({{static_cast<int>(k), art_sign[a]}});
      lo2_.push_back(0.0);
      up2_.push_back(kInf);
      obj_cost_.push_back(0.0);
      double r = resid(static_cast<Eigen::Index>(k)) - xval_[n_struct_ + k];
      xval_.push_back(std::abs(r));
      vstat_.push_back(VStat::Basic);
      basis_[k] = static_cast<int>(j);
      ++a;
    }
    nv_ += num_artificial_;
    cost2_.assign(nv_, 0.0);
    factorize();
  }

  void set_phase_costs(bool phase1) {
    for (std::size_t j = 0; j < nv_; ++j) {
      if (phase1) {
        cost2_[j] = (j >= nv_ - num_artificial_) ? 1.0 : 0.0;
      } else {
        cost2_[j] = (j < n_struct_) ? obj_cost_[j] : 0.0;
      }
    }
    bland_ = false;
    stall_ = 0;
    last_obj_ = kInf;
  }

  void factorize() {
    if (m_ == 0) return;
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m_),
                                              static_cast<Eigen::Index>(m_));
    for (std::size_t k = 0; k < m_; ++k) {
      for (auto [row, v] : cols_[static_cast<std::size_t>(basis_[k])]) {
        B(row, static_cast<Eigen::Index>(k)) = v;
      }
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
    binv_ = lu.inverse();
    double check = (B * binv_ - Eigen::MatrixXd::Identity(B.rows(), B.cols()))
                       .cwiseAbs()
                       .maxCoeff();
    if (!std::isfinite(check) || check > 1e-6) {
      throw ResourceError("lp: singular or ill-conditioned basis");
    }
    pivots_since_refactor_ = 0;
    recompute_basic_values();
  }

  void recompute_basic_values() {
    Eigen::VectorXd rhs = b_;
    for (std::size_t j = 0; j < nv_; ++j) {
      if (vstat_[j] == VStat::Basic || xval_[j] == 0.0) continue;
      for (auto [k, v] : cols_[j]) rhs(k) -= v * xval_[j];
    }
    Eigen::VectorXd xb = binv_ * rhs;
    for (std::size_t k = 0; k < m_; ++k) {
      xval_[static_cast<std::size_t>(basis_[k])] = xb(static_cast<Eigen::Index>(k));
    }
  }

  double current_objective() const {
    double o = 0.0;
    for (std::size_t j = 0; j < nv_; ++j) o += cost2_[j] * xval_[j];
    return o;
  }

  Eigen::VectorXd column_dense(std::size_t j) const {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m_));
    for (auto [k, v] : cols_[j]) a(k) = v;
    return a;
  }

  int max_iterations() const {
    if (opt_.max_iterations > 0) return opt_.max_iterations;
    return std::max<int>(20000, static_cast<int>(50 * (m_ + nv_)));
  }

  SolveStatus iterate(Solution& sol) {
    // Reduced-cost tolerance is per column: coefficients in one objective can
    // differ by many orders of magnitude, and a single global cutoff would
    // either ignore the small-coefficient columns or chatter on the large.
    auto dtol = [&](std::size_t j) {
      return opt_.opt_tol * std::max(1.0, std::abs(cost2_[j]));
    };

    while (true) {
      if (iters_ >= max_iterations()) return SolveStatus::IterationLimit;

      // Pricing: y = binv' c_B, then reduced costs on nonbasic columns.
      Eigen::VectorXd cb(static_cast<Eigen::Index>(m_));
      for (std::size_t k = 0; k < m_; ++k) cb(static_cast<Eigen::Index>(k)) = cost2_[static_cast<std::size_t>(basis_[k])];
      Eigen::VectorXd y = binv_.transpose() * cb;

      int enter = -1;
      double enter_dir = 1.0;
      double best = 0.0;
      for (std::size_t j = 0; j < nv_; ++j) {
        if (vstat_[j] == VStat::Basic) continue;
        if (lo2_[j] == up2_[j]) continue;  // fixed, never enters
        double d = cost2_[j];
        for (auto [k, v] : cols_[j]) d -= y(k) * v;
        const double tol_j = dtol(j);
        double viol = 0.0, dir = 1.0;
        switch (vstat_[j]) {
          case VStat::AtLower:
            if (d < -tol_j) { viol = -d; dir = 1.0; }
            break;
          case VStat::AtUpper:
            if (d > tol_j) { viol = d; dir = -1.0; }
            break;
          case VStat::FreeAtZero:
            if (std::abs(d) > tol_j) { viol = std::abs(d); dir = d > 0 ? -1.0 : 1.0; }
            break;
          case VStat::Basic: break;
        }
        if (viol <= 0.0) continue;
        if (bland_) { enter = static_cast<int>(j); enter_dir = dir; break; }
        if (viol > best) { best = viol; enter = static_cast<int>(j); enter_dir = dir; }
      }
      if (enter < 0) return SolveStatus::Optimal;  // no improving column

      const std::size_t e = static_cast<std::size_t>(enter);
      Eigen::VectorXd alpha = binv_ * column_dense(e);

      // Two-pass (Harris) ratio test. Pass one finds the tightest step after
      // letting each blocking variable borrow a feasibility-tolerance cushion;
      // pass two picks, among the rows that block within that relaxed step,
      // the one with the largest pivot. Degenerate steps then land on big
      // pivots instead of whichever near-zero entry happened to come first,
      // which is what keeps the eta updates stable. Bland mode drops the
      // cushion and takes the smallest variable index so the anti-cycling
      // guarantee is the textbook one.
      const double zero_eps = 1e-11;
      const double cushion = bland_ ? 0.0 : opt_.feas_tol;
      const double t_flip =
          std::isfinite(up2_[e] - lo2_[e]) ? up2_[e] - lo2_[e] : kInf;

      auto blocking = [&](std::size_t k, double& g, double& slack) {
        g = -alpha(static_cast<Eigen::Index>(k)) * enter_dir;  // d x_B(k) / d t
        std::size_t bj = static_cast<std::size_t>(basis_[k]);
        if (g < -zero_eps && std::isfinite(lo2_[bj])) {
          slack = std::max(xval_[bj] - lo2_[bj], 0.0);
        } else if (g > zero_eps && std::isfinite(up2_[bj])) {
          slack = std::max(up2_[bj] - xval_[bj], 0.0);
        } else {
          return false;
        }
        return true;
      };

      double t_rel = t_flip;
      for (std::size_t k = 0; k < m_; ++k) {
        double g, slack;
        if (!blocking(k, g, slack)) continue;
        t_rel = std::min(t_rel, (slack + cushion) / std::abs(g));
      }
      if (!std::isfinite(t_rel)) return SolveStatus::Unbounded;

      int leave_row = -1;
      bool leave_to_upper = false;
      double t_max = t_flip;
      double best_piv = 0.0;
      for (std::size_t k = 0; k < m_; ++k) {
        double g, slack;
        if (!blocking(k, g, slack)) continue;
        double t = slack / std::abs(g);
        if (t > t_rel) continue;
        bool better;
        if (bland_) {
          better = leave_row < 0 ||
                   basis_[k] < basis_[static_cast<std::size_t>(leave_row)];
        } else {
          better = std::abs(g) > best_piv + 1e-12 ||
                   (leave_row >= 0 && std::abs(std::abs(g) - best_piv) <= 1e-12 &&
                    basis_[k] < basis_[static_cast<std::size_t>(leave_row)]);
        }
        if (better) {
          leave_row = static_cast<int>(k);
          leave_to_upper = g > 0;
          t_max = t;
          best_piv = std::abs(g);
        }
      }
      if (leave_row < 0 && !std::isfinite(t_flip)) return SolveStatus::Unbounded;

      // A tiny chosen pivot under an aged inverse is more often accumulated
      // error than geometry. Rebuild the inverse and redo the iteration; if
      // the pivot is real it will be chosen again from clean data.
      if (leave_row >= 0 && best_piv < 1e-7 && pivots_since_refactor_ > 0) {
        factorize();
        continue;
      }

      // Apply the step.
      ++iters_;
      double step = t_max * enter_dir;
      xval_[e] += step;
      for (std::size_t k = 0; k < m_; ++k) {
        xval_[static_cast<std::size_t>(basis_[k])] -=
            alpha(static_cast<Eigen::Index>(k)) * step;
      }

      if (leave_row < 0) {
        // Bound flip: the entering variable just moved to its other bound.
        vstat_[e] = enter_dir > 0 ? VStat::AtUpper : VStat::AtLower;
        xval_[e] = enter_dir > 0 ? up2_[e] : lo2_[e];
      } else {
        std::size_t lv = static_cast<std::size_t>(basis_[static_cast<std::size_t>(leave_row)]);
        vstat_[lv] = leave_to_upper ? VStat::AtUpper : VStat::AtLower;
        xval_[lv] = leave_to_upper ? up2_[lv] : lo2_[lv];
        basis_[static_cast<std::size_t>(leave_row)] = enter;
        vstat_[e] = VStat::Basic;
        update_binv(alpha, leave_row);
        if (++pivots_since_refactor_ >= opt_.refactor_every) factorize();
      }

      // Stall detection drives the switch to Bland's rule.
      double obj = current_objective();
      if (obj < last_obj_ - 1e-12 * (1.0 + std::abs(last_obj_))) {
        last_obj_ = obj;
        stall_ = 0;
        bland_ = false;
      } else if (++stall_ > 100) {
        bland_ = true;
      }
      sol.iterations = iters_;
    }
  }

  void update_binv(const Eigen::VectorXd& alpha, int r) {
    double piv = alpha(r);
    if (std::abs(piv) < 1e-11) {
      factorize();  // pivot too small to update stably; rebuild instead
      return;
    }
    Eigen::RowVectorXd row_r = binv_.row(r) / piv;
    for (Eigen::Index i = 0; i < binv_.rows(); ++i) {
      if (i == r) continue;
      double a = alpha(i);
      if (a != 0.0) binv_.row(i) -= a * row_r;
    }
    binv_.row(r) = row_r;
  }

  Solution solve_unconstrained() {
    Solution sol;
    sol.x.resize(n_struct_);
    sol.reduced_costs.resize(n_struct_);
    for (std::size_t j = 0; j < n_struct_; ++j) {
      double c = obj_cost_[j];
      double v;
      if (c > 0) v = lo2_[j];
      else if (c < 0) v = up2_[j];
      else v = std::isfinite(lo2_[j]) ? lo2_[j] : (std::isfinite(up2_[j]) ? up2_[j] : 0.0);
      if (!std::isfinite(v)) {
        sol.status = SolveStatus::Unbounded;
        return sol;
      }
      sol.x[j] = v * col_scale_[j];
      sol.objective += lp_.cost(static_cast<int>(j)) * sol.x[j];
      sol.reduced_costs[j] = lp_.cost(static_cast<int>(j));
    }
    sol.status = SolveStatus::Optimal;
    return sol;
  }

  Solution finish(Solution& sol) {
    sol.iterations = iters_;
    sol.x.assign(n_struct_, 0.0);
    for (std::size_t j = 0; j < n_struct_; ++j) sol.x[j] = xval_[j] * col_scale_[j];
    sol.duals.assign(m_, 0.0);
    sol.reduced_costs.assign(n_struct_, 0.0);
    if (sol.status == SolveStatus::Optimal || sol.status == SolveStatus::IterationLimit) {
      Eigen::VectorXd cb(static_cast<Eigen::Index>(m_));
      for (std::size_t k = 0; k < m_; ++k) {
        cb(static_cast<Eigen::Index>(k)) = cost2_[static_cast<std::size_t>(basis_[k])];
      }
      // Duals and reduced costs are computed in scaled space and mapped back:
      // a row scaled by r has its dual multiplied by r, a column scaled by c
      // has its reduced cost divided by c.
      Eigen::VectorXd y = binv_.transpose() * cb;
      for (std::size_t k = 0; k < m_; ++k) {
        sol.duals[k] = sense_ * y(static_cast<Eigen::Index>(k)) * row_scale_[k];
      }
      for (std::size_t j = 0; j < n_struct_; ++j) {
        double d = cost2_[j];
        for (auto [k, v] : cols_[j]) d -= y(k) * v;
        sol.reduced_costs[j] = sense_ * d / col_scale_[j];
      }
      sol.objective = 0.0;
      for (std::size_t j = 0; j < n_struct_; ++j) {
        sol.objective += lp_.cost(static_cast<int>(j)) * sol.x[j];
      }
      // Primal residual diagnostics over the original (unscaled) rows.
      std::vector<double> act(m_, 0.0);
      for (std::size_t j = 0; j < n_struct_; ++j) {
        if (sol.x[j] == 0.0) continue;
        for (auto [k, v] : lp_.column(static_cast<int>(j))) {
          act[static_cast<std::size_t>(k)] += v * sol.x[j];
        }
      }
      double worst = 0.0;
      for (std::size_t k = 0; k < m_; ++k) {
        double r = act[k] - lp_.rhs(static_cast<int>(k));
        switch (lp_.relation(static_cast<int>(k))) {
          case Relation::LE: worst = std::max(worst, r); break;
          case Relation::GE: worst = std::max(worst, -r); break;
          case Relation::EQ: worst = std::max(worst, std::abs(r)); break;
        }
      }
      for (std::size_t j = 0; j < n_struct_; ++j) {
        double lo = lp_.lower(static_cast<int>(j));
        double up = lp_.upper(static_cast<int>(j));
        if (std::isfinite(lo)) worst = std::max(worst, lo - sol.x[j]);
        if (std::isfinite(up)) worst = std::max(worst, sol.x[j] - up);
      }
      sol.max_violation = worst;
      if (sol.status == SolveStatus::Optimal && worst > 1e-5 * scale_orig_) {
        throw ResourceError("lp: solution exceeds feasibility tolerance (residual " +
                            std::to_string(worst) + ", scale " + std::to_string(scale_orig_) + ")");
      }
    }
    return sol;
  }
};

}  // namespace detail

inline Solution solve(const LinearProgram& lp, const Options& opt = {}) {
  detail::Simplex s(lp, opt);
  return s.run();
}

}  // namespace ddopt::lp
