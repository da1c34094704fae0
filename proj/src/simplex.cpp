#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "mlio/errors.hpp"
#include "mlio/solvers.hpp"

namespace mlio {
namespace {

constexpr double kPivotEps = 1e-9;
constexpr double kRatioEps = 1e-11;
constexpr double kReducedCostEps = 1e-9;

// Standard-form solver: min c'u  s.t.  M u = rhs, u >= 0.  Dense tableau,
// two phases, Bland's rule for both entering and leaving choices so every
// solve is deterministic and cycle-free.  Final primal and dual values are
// recomputed from the original data through an LU solve on the final basis,
// which keeps certificate residuals at machine precision regardless of
// tableau drift.
struct StandardResult {
  LpStatus status = LpStatus::Infeasible;
  Eigen::VectorXd u;
  Eigen::VectorXd pi;        // duals for the input rows (phase 2)
  Eigen::VectorXd pi_infeas; // phase-1 duals when infeasible
  Eigen::VectorXd ray;       // structural ray when unbounded
  double objective = 0.0;
};

class StandardSimplex {
 public:
  StandardSimplex(const Eigen::MatrixXd& M, const Eigen::VectorXd& rhs, const Eigen::VectorXd& c,
                  double feas_tol)
      : m_(static_cast<int>(M.rows())),
        ns_(static_cast<int>(M.cols())),
        c_(c),
        feas_tol_(feas_tol) {
    const double entries = static_cast<double>(m_) * static_cast<double>(ns_ + m_ + 1);
    if (entries > 6e7)
      throw InstanceTooLarge("linear program too large for the dense solver (" +
                             std::to_string(m_) + " rows, " + std::to_string(ns_) + " columns)");
    sign_ = Eigen::VectorXd::Ones(m_);
    M0_ = M;
    rhs0_ = rhs;
    for (int i = 0; i < m_; ++i) {
      if (rhs0_(i) < 0.0) {
        sign_(i) = -1.0;
        M0_.row(i) = -M0_.row(i);
        rhs0_(i) = -rhs0_(i);
      }
    }
    tab_.resize(m_, ns_ + m_ + 1);
    tab_.leftCols(ns_) = M0_;
    tab_.block(0, ns_, m_, m_) = Eigen::MatrixXd::Identity(m_, m_);
    tab_.col(ns_ + m_) = rhs0_;
    basis_.resize(m_);
    for (int i = 0; i < m_; ++i) basis_[i] = ns_ + i;
  }

  StandardResult run() {
    StandardResult out;

    // Phase 1: drive the artificial variables to zero.
    Eigen::VectorXd c1 = Eigen::VectorXd::Zero(ns_ + m_);
    c1.tail(m_).setOnes();
    iterate(c1, ns_ + m_, nullptr);
    const double infeas = recompute_objective(c1);
    if (infeas > feas_tol_) {
      out.status = LpStatus::Infeasible;
      out.pi_infeas = recompute_duals(c1);
      return out;
    }
    drive_out_artificials();

    // Phase 2 over the structural columns only.
    Eigen::VectorXd c2 = Eigen::VectorXd::Zero(ns_ + m_);
    c2.head(ns_) = c_;
    int unbounded_col = -1;
    iterate(c2, ns_, &unbounded_col);
    if (unbounded_col >= 0) {
      out.status = LpStatus::Unbounded;
      out.u = recompute_primal();
      out.ray = extract_ray(unbounded_col);
      return out;
    }

    out.status = LpStatus::Optimal;
    out.u = recompute_primal();
    out.pi = recompute_duals(c2);
    out.objective = c_.dot(out.u.head(ns_).eval());
    return out;
  }

  // Sign flips applied to the input rows; callers map duals back with these.
  const Eigen::VectorXd& row_signs() const { return sign_; }

 private:
  void iterate(const Eigen::VectorXd& cost, int allowed_cols, int* unbounded_col) {
    const long cap = 2000L + 200L * (static_cast<long>(m_) + ns_);
    for (long it = 0; it < cap; ++it) {
      // Reduced costs under the current basis, Bland entering rule.
      Eigen::VectorXd cb(m_);
      for (int i = 0; i < m_; ++i) cb(i) = cost(basis_[i]);
      int enter = -1;
      for (int j = 0; j < allowed_cols; ++j) {
        if (is_basic(j)) continue;
        const double rc = cost(j) - cb.dot(tab_.col(j));
        if (rc < -kReducedCostEps) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return;

      int leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m_; ++i) {
        const double a = tab_(i, enter);
        if (a > kRatioEps) {
          const double ratio = tab_(i, ns_ + m_) / a;
          if (ratio < best_ratio - 1e-12 ||
              (ratio < best_ratio + 1e-12 && (leave < 0 || basis_[i] < basis_[leave]))) {
            best_ratio = ratio;
            leave = i;
          }
        }
      }
      if (leave < 0) {
        if (unbounded_col) {
          *unbounded_col = enter;
          return;
        }
        throw std::runtime_error("phase-1 subproblem reported unbounded");
      }
      pivot(leave, enter);
    }
    throw std::runtime_error("simplex iteration cap exceeded");
  }

  void pivot(int row, int col) {
    tab_.row(row) /= tab_(row, col);
    for (int i = 0; i < m_; ++i) {
      if (i == row) continue;
      const double factor = tab_(i, col);
      if (factor != 0.0) tab_.row(i) -= factor * tab_.row(row);
    }
    basis_[row] = col;
  }

  bool is_basic(int col) const {
    return std::find(basis_.begin(), basis_.end(), col) != basis_.end();
  }

  // Basic artificials at zero level are swapped for any structural column
  // with a usable pivot; rows with none are redundant and keep their
  // artificial (harmlessly basic at zero).
  void drive_out_artificials() {
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < ns_) continue;
      for (int j = 0; j < ns_; ++j) {
        if (!is_basic(j) && std::abs(tab_(i, j)) > 1e-7) {
          pivot(i, j);
          break;
        }
      }
    }
  }

  Eigen::MatrixXd basis_matrix() const {
    Eigen::MatrixXd B(m_, m_);
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < ns_)
        B.col(i) = M0_.col(basis_[i]);
      else
        B.col(i) = Eigen::VectorXd::Unit(m_, basis_[i] - ns_);
    }
    return B;
  }

  Eigen::VectorXd recompute_primal() const {
    const Eigen::VectorXd xb = basis_matrix().partialPivLu().solve(rhs0_);
    Eigen::VectorXd u = Eigen::VectorXd::Zero(ns_ + m_);
    for (int i = 0; i < m_; ++i) u(basis_[i]) = xb(i);
    return u;
  }

  double recompute_objective(const Eigen::VectorXd& cost) const {
    const Eigen::VectorXd u = recompute_primal();
    return cost.dot(u);
  }

  Eigen::VectorXd recompute_duals(const Eigen::VectorXd& cost) const {
    Eigen::VectorXd cb(m_);
    for (int i = 0; i < m_; ++i) cb(i) = cost(basis_[i]);
    Eigen::VectorXd pi = basis_matrix().transpose().partialPivLu().solve(cb);
    // Undo the rhs sign flips so the duals refer to the caller's rows.
    for (int i = 0; i < m_; ++i) pi(i) *= sign_(i);
    return pi;
  }

  Eigen::VectorXd extract_ray(int enter) const {
    Eigen::VectorXd d = Eigen::VectorXd::Zero(ns_ + m_);
    d(enter) = 1.0;
    for (int i = 0; i < m_; ++i) d(basis_[i]) = -tab_(i, enter);
    return d;
  }

  int m_;
  int ns_;
  Eigen::VectorXd c_;
  double feas_tol_;
  Eigen::MatrixXd M0_;
  Eigen::VectorXd rhs0_;
  Eigen::VectorXd sign_;
  Eigen::MatrixXd tab_;
  std::vector<int> basis_;
};

}  // namespace

GeneralLpSolution solve_lp_general(const Eigen::VectorXd& c, const Eigen::MatrixXd& A_in,
                                   const Eigen::VectorXd& b_in, const Eigen::MatrixXd& A_eq,
                                   const Eigen::VectorXd& b_eq, double tol) {
  const int n = static_cast<int>(c.size());
  const int m_in = static_cast<int>(A_in.rows());
  const int m_eq = static_cast<int>(A_eq.rows());
  if ((m_in > 0 && A_in.cols() != n) || (m_eq > 0 && A_eq.cols() != n) || b_in.size() != m_in ||
      b_eq.size() != m_eq)
    throw DimensionMismatch("solve_lp_general: inconsistent shapes");

  // u = (x+, x-, s) with A_in x - s = b_in, A_eq x = b_eq.
  const int m = m_in + m_eq;
  const int ns = 2 * n + m_in;
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, ns);
  Eigen::VectorXd rhs(m);
  if (m_in > 0) {
    M.block(0, 0, m_in, n) = A_in;
    M.block(0, n, m_in, n) = -A_in;
    M.block(0, 2 * n, m_in, m_in) = -Eigen::MatrixXd::Identity(m_in, m_in);
    rhs.head(m_in) = b_in;
  }
  if (m_eq > 0) {
    M.block(m_in, 0, m_eq, n) = A_eq;
    M.block(m_in, n, m_eq, n) = -A_eq;
    rhs.tail(m_eq) = b_eq;
  }
  Eigen::VectorXd cs = Eigen::VectorXd::Zero(ns);
  cs.head(n) = c;
  cs.segment(n, n) = -c;

  StandardSimplex simplex(M, rhs, cs, tol);
  StandardResult res = simplex.run();

  GeneralLpSolution out;
  out.status = res.status;
  if (res.status == LpStatus::Infeasible) {
    out.farkas = res.pi_infeas.head(m_in);
    out.farkas_eq = res.pi_infeas.tail(m_eq);
    return out;
  }
  out.x = res.u.head(n) - res.u.segment(n, n);
  if (res.status == LpStatus::Unbounded) {
    out.ray = res.ray.head(n) - res.ray.segment(n, n);
    return out;
  }
  out.objective = res.objective;
  out.dual = res.pi.head(m_in);
  out.dual_eq = res.pi.tail(m_eq);
  return out;
}

LpSolution solve_lp(const Eigen::VectorXd& c, const FeasibleSet& set, Sense sense) {
  if (c.size() != set.dim()) throw DimensionMismatch("solve_lp: objective length != set dimension");
  const Eigen::VectorXd c_int = (sense == Sense::Max) ? Eigen::VectorXd(-c) : c;
  GeneralLpSolution g = solve_lp_general(c_int, set.A(), set.b(), Eigen::MatrixXd(0, set.dim()),
                                         Eigen::VectorXd(0), set.tol());
  LpSolution out;
  out.status = g.status;
  if (g.status == LpStatus::Infeasible) return out;
  out.x = g.x;
  if (g.status == LpStatus::Unbounded) {
    out.ray = g.ray;
    return out;
  }
  out.objective = c.dot(g.x);
  out.dual = g.dual;
  for (int j = 0; j < set.rows(); ++j) {
    if (std::abs(set.A().row(j).dot(g.x) - set.b()(j)) <= set.tol()) out.tight_rows.push_back(j);
  }
  return out;
}

Phase1Result phase1_feasible(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, double tol) {
  const int n = static_cast<int>(A.cols());
  GeneralLpSolution g = solve_lp_general(Eigen::VectorXd::Zero(n), A, b,
                                         Eigen::MatrixXd(0, n), Eigen::VectorXd(0), tol);
  Phase1Result out;
  if (g.status == LpStatus::Infeasible) {
    out.feasible = false;
    out.farkas = g.farkas;
    return out;
  }
  out.feasible = true;
  out.point = g.x;
  return out;
}

}  // namespace mlio
