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

// Primal active-set method for min ||z - p||^2 over Az >= b, optionally with
// one row pinned to equality.  The working set W keeps independent rows; the
// equality-constrained step is z = p + A_W' mu with the Gram system
// (A_W A_W') mu = b_W - A_W p.  A most-negative multiplier on an inequality
// row releases that row; a blocking row joins W at the step's cutoff.
Projection project_impl(const Eigen::VectorXd& p, const FeasibleSet& set, int face) {
  const int n = set.dim();
  const int m = set.rows();
  if (p.size() != n) throw DimensionMismatch("projection: point length != set dimension");
  const Eigen::MatrixXd& A = set.A();
  const Eigen::VectorXd& b = set.b();

  Projection out;

  Eigen::VectorXd z;
  std::vector<int> working;
  if (face >= 0) {
    // Feasible start on the face via phase 1 over the stacked system.
    Eigen::MatrixXd As(m + 2, n);
    Eigen::VectorXd bs(m + 2);
    As.topRows(m) = A;
    bs.head(m) = b;
    As.row(m) = A.row(face);
    bs(m) = b(face);
    As.row(m + 1) = -A.row(face);
    bs(m + 1) = -b(face);
    const Phase1Result start = phase1_feasible(As, bs, set.tol());
    if (!start.feasible) {
      out.status = ProjectionStatus::FaceInfeasible;
      return out;
    }
    z = start.point;
    working.push_back(face);
  } else {
    if (set.contains(p)) {
      out.z = p;
      out.sq_distance = 0.0;
      return out;
    }
    z = set.witness();
  }

  const auto solve_working = [&](Eigen::VectorXd& z_eq, Eigen::VectorXd& mu) {
    const int w = static_cast<int>(working.size());
    if (w == 0) {
      z_eq = p;
      mu.resize(0);
      return;
    }
    Eigen::MatrixXd Aw(w, n);
    Eigen::VectorXd bw(w);
    for (int i = 0; i < w; ++i) {
      Aw.row(i) = A.row(working[static_cast<std::size_t>(i)]);
      bw(i) = b(working[static_cast<std::size_t>(i)]);
    }
    const Eigen::MatrixXd gram = Aw * Aw.transpose();
    mu = gram.ldlt().solve(bw - Aw * p);
    z_eq = p + Aw.transpose() * mu;
  };

  const int cap = 100 + 10 * m;
  for (int it = 0; it < cap; ++it) {
    Eigen::VectorXd z_eq, mu;
    solve_working(z_eq, mu);
    const Eigen::VectorXd d = z_eq - z;

    if (d.norm() <= 1e-11 * (1.0 + z.norm())) {
      // Stationary on W; check multiplier signs on the inequality rows.
      int drop = -1;
      double most_negative = -1e-9;
      for (int i = 0; i < static_cast<int>(working.size()); ++i) {
        if (working[static_cast<std::size_t>(i)] == face) continue;
        if (mu(i) < most_negative) {
          most_negative = mu(i);
          drop = i;
        }
      }
      if (drop < 0) {
        out.z = z_eq;
        out.sq_distance = (z_eq - p).squaredNorm();
        return out;
      }
      working.erase(working.begin() + drop);
      continue;
    }

    double alpha = 1.0;
    int blocking = -1;
    for (int i = 0; i < m; ++i) {
      if (std::find(working.begin(), working.end(), i) != working.end()) continue;
      const double rate = A.row(i).dot(d);
      if (rate < -1e-12) {
        const double slack = A.row(i).dot(z) - b(i);
        const double limit = std::max(0.0, -slack / rate);
        if (limit < alpha - 1e-14) {
          alpha = limit;
          blocking = i;
        }
      }
    }
    z += alpha * d;
    if (blocking >= 0)
      working.push_back(blocking);
    else
      z = z_eq;  // full step lands on the working-set minimizer exactly
  }
  throw std::runtime_error("projection active-set iteration cap exceeded");
}

}  // namespace

Projection project_onto_polytope(const Eigen::VectorXd& p, const FeasibleSet& set) {
  return project_impl(p, set, -1);
}

Projection project_onto_face(const Eigen::VectorXd& p, const FeasibleSet& set, int face) {
  if (face < 0 || face >= set.rows()) throw DimensionMismatch("projection: face index out of range");
  return project_impl(p, set, face);
}

}  // namespace mlio
