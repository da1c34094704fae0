#pragma once

#include <Eigen/Dense>
#include <json.hpp>
#include <string>
#include <vector>

namespace mlio {

// One constraint row a'x >= beta of a feasible set, viewed as the candidate
// optimal face {x : a'x = beta}.
struct Face {
  int index;
  Eigen::VectorXd normal;
  double offset;
};

// Polyhedron {x : Ax >= b} in canonical form.  Construction validates shapes,
// rejects zero rows and proves nonemptiness (throwing EmptyFeasibleSet with an
// infeasibility certificate message otherwise), so downstream code can assume
// every instance is well posed.  Rows may be flagged as non-candidates: they
// still constrain the set but are skipped when scanning for an optimal face,
// which keeps bound-style rows (e.g. per-food nonnegativity) out of the
// recovered-utility search.
class FeasibleSet {
 public:
  FeasibleSet(Eigen::MatrixXd A, Eigen::VectorXd b, double tol = 1e-8);
  FeasibleSet(Eigen::MatrixXd A, Eigen::VectorXd b, std::vector<std::string> row_names,
              std::vector<std::string> var_names, std::vector<char> face_candidate,
              double tol = 1e-8);

  int rows() const { return static_cast<int>(A_.rows()); }
  int dim() const { return static_cast<int>(A_.cols()); }
  const Eigen::MatrixXd& A() const { return A_; }
  const Eigen::VectorXd& b() const { return b_; }
  double tol() const { return tol_; }
  const std::vector<std::string>& row_names() const { return row_names_; }
  const std::vector<std::string>& var_names() const { return var_names_; }
  bool face_candidate(int row) const { return face_candidate_[static_cast<std::size_t>(row)] != 0; }
  // A feasible point found while proving nonemptiness.
  const Eigen::VectorXd& witness() const { return witness_; }

  bool contains(const Eigen::VectorXd& x) const;

  // Distance from x to the boundary of the set: for feasible x the minimum
  // Euclidean point-to-hyperplane distance over all rows, for infeasible x the
  // Euclidean distance to the set itself.  Zero exactly on the boundary.
  double boundary_distance(const Eigen::VectorXd& x) const;

  Face face(int row) const;

  // All vertices (unique, lexicographically sorted).  Exact enumeration over
  // row subsets; guarded to dim <= 3 where it stays cheap.
  std::vector<Eigen::VectorXd> enumerate_vertices() const;

 private:
  void validate_and_prove_nonempty();

  Eigen::MatrixXd A_;
  Eigen::VectorXd b_;
  double tol_;
  std::vector<std::string> row_names_;
  std::vector<std::string> var_names_;
  std::vector<char> face_candidate_;
  Eigen::VectorXd witness_;
};

// Constraint files hold named rows with sparse coefficients and a sense of
// ">=", "<=" or "==".  Loading negates "<=" rows and splits "==" rows into a
// ">=" / "<=" pair so the in-memory form is always Ax >= b; an optional
// per-row "candidate": false keeps a row out of the optimal-face scan.
FeasibleSet load_constraints(const std::string& path);
FeasibleSet parse_constraints(const nlohmann::json& doc);
nlohmann::ordered_json constraints_to_json(const FeasibleSet& set);
void save_constraints(const FeasibleSet& set, const std::string& path);

}  // namespace mlio
