#pragma once

#include <Eigen/Dense>
#include <vector>

#include "mlio/polytope.hpp"

namespace mlio {

enum class Sense { Min, Max };
enum class LpStatus { Optimal, Unbounded, Infeasible };

// Result of optimizing c'x over a feasible set.  `objective` is reported in
// the requested sense; `dual` always certifies the internal minimization
// orientation: with c_int = c (Min) or -c (Max), an optimal solution carries
// y >= 0 with A'y = c_int and b'y = c_int'x* up to tolerance.  `tight_rows`
// lists the rows active at x*; an unbounded solve instead fills `ray` with a
// feasible direction of unbounded improvement.
struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  Eigen::VectorXd x;
  double objective = 0.0;
  Eigen::VectorXd dual;
  std::vector<int> tight_rows;
  Eigen::VectorXd ray;
};

LpSolution solve_lp(const Eigen::VectorXd& c, const FeasibleSet& set, Sense sense = Sense::Min);

// General form used internally: min c'x  s.t.  A_in x >= b_in, A_eq x = b_eq,
// x free.  `dual` holds multipliers for the inequality block (>= 0), `dual_eq`
// for the equality block (free sign).
struct GeneralLpSolution {
  LpStatus status = LpStatus::Infeasible;
  Eigen::VectorXd x;
  double objective = 0.0;
  Eigen::VectorXd dual;
  Eigen::VectorXd dual_eq;
  Eigen::VectorXd ray;
  // Meaningful only when infeasible: y >= 0, w free with A_in'y + A_eq'w = 0
  // and b_in'y + b_eq'w > 0.
  Eigen::VectorXd farkas;
  Eigen::VectorXd farkas_eq;
};

GeneralLpSolution solve_lp_general(const Eigen::VectorXd& c, const Eigen::MatrixXd& A_in,
                                   const Eigen::VectorXd& b_in, const Eigen::MatrixXd& A_eq,
                                   const Eigen::VectorXd& b_eq, double tol = 1e-8);

// Phase-1 check on a raw system Ax >= b.  Feasible: returns a witness point.
// Infeasible: returns a certificate y >= 0 with A'y = 0 and b'y > 0.
struct Phase1Result {
  bool feasible = false;
  Eigen::VectorXd point;
  Eigen::VectorXd farkas;
};

Phase1Result phase1_feasible(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, double tol = 1e-8);

enum class ProjectionStatus { Optimal, FaceInfeasible };

struct Projection {
  ProjectionStatus status = ProjectionStatus::Optimal;
  Eigen::VectorXd z;
  double sq_distance = 0.0;
};

// Euclidean projection of p onto the set, optionally restricted to one of its
// faces (row `face` held at equality).  Active-set method; FaceInfeasible
// signals a face with empty intersection.
Projection project_onto_polytope(const Eigen::VectorXd& p, const FeasibleSet& set);
Projection project_onto_face(const Eigen::VectorXd& p, const FeasibleSet& set, int face);

}  // namespace mlio
