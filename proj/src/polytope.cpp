#include "mlio/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

#include "mlio/errors.hpp"
#include "mlio/solvers.hpp"

namespace mlio {

FeasibleSet::FeasibleSet(Eigen::MatrixXd A, Eigen::VectorXd b, double tol)
    : FeasibleSet(std::move(A), std::move(b), {}, {}, {}, tol) {}

FeasibleSet::FeasibleSet(Eigen::MatrixXd A, Eigen::VectorXd b, std::vector<std::string> row_names,
                         std::vector<std::string> var_names, std::vector<char> face_candidate,
                         double tol)
    : A_(std::move(A)),
      b_(std::move(b)),
      tol_(tol),
      row_names_(std::move(row_names)),
      var_names_(std::move(var_names)),
      face_candidate_(std::move(face_candidate)) {
  validate_and_prove_nonempty();
}

void FeasibleSet::validate_and_prove_nonempty() {
  const int m = static_cast<int>(A_.rows());
  const int n = static_cast<int>(A_.cols());
  if (m < 1 || n < 1) throw DimensionMismatch("feasible set needs at least one row and one column");
  if (b_.size() != m)
    throw DimensionMismatch("rhs length " + std::to_string(b_.size()) + " != row count " +
                            std::to_string(m));
  if (tol_ < 0.0) throw MalformedInput("feasibility tolerance must be nonnegative");
  if (!A_.allFinite() || !b_.allFinite()) throw MalformedInput("constraint data must be finite");
  for (int i = 0; i < m; ++i) {
    if (A_.row(i).cwiseAbs().maxCoeff() < 1e-14) throw ZeroRow(i);
  }

  if (row_names_.empty()) {
    row_names_.reserve(m);
    for (int i = 0; i < m; ++i) row_names_.push_back("row" + std::to_string(i));
  } else if (static_cast<int>(row_names_.size()) != m) {
    throw DimensionMismatch("row_names length != row count");
  }
  if (var_names_.empty()) {
    var_names_.reserve(n);
    for (int j = 0; j < n; ++j) var_names_.push_back("x" + std::to_string(j + 1));
  } else if (static_cast<int>(var_names_.size()) != n) {
    throw DimensionMismatch("var_names length != column count");
  }
  if (face_candidate_.empty()) {
    face_candidate_.assign(static_cast<std::size_t>(m), 1);
  } else if (static_cast<int>(face_candidate_.size()) != m) {
    throw DimensionMismatch("face_candidate length != row count");
  }

  Phase1Result feas = phase1_feasible(A_, b_, tol_);
  if (!feas.feasible) {
    std::ostringstream msg;
    msg << "feasible set is empty; infeasibility certificate y has b'y = "
        << b_.dot(feas.farkas);
    throw EmptyFeasibleSet(msg.str());
  }
  witness_ = feas.point;
}

bool FeasibleSet::contains(const Eigen::VectorXd& x) const {
  if (x.size() != dim()) throw DimensionMismatch("contains: point length != set dimension");
  return ((A_ * x - b_).array() >= -tol_).all();
}

double FeasibleSet::boundary_distance(const Eigen::VectorXd& x) const {
  if (x.size() != dim()) throw DimensionMismatch("boundary_distance: point length != set dimension");
  if (!contains(x)) {
    const Projection proj = project_onto_polytope(x, *this);
    return std::sqrt(proj.sq_distance);
  }
  double best = std::numeric_limits<double>::infinity();
  for (int j = 0; j < rows(); ++j) {
    const double dist = (A_.row(j).dot(x) - b_(j)) / A_.row(j).norm();
    best = std::min(best, dist);
  }
  return std::max(best, 0.0);
}

Face FeasibleSet::face(int row) const {
  if (row < 0 || row >= rows()) throw DimensionMismatch("face index out of range");
  return Face{row, A_.row(row).transpose(), b_(row)};
}

std::vector<Eigen::VectorXd> FeasibleSet::enumerate_vertices() const {
  const int n = dim();
  const int m = rows();
  if (n > 3) throw DimensionTooLarge("vertex enumeration supports dimension <= 3");

  std::vector<Eigen::VectorXd> verts;
  // All n-subsets of rows, solved as square systems, kept when feasible.
  const auto consider = [&](const std::vector<int>& rows_pick) {
    Eigen::MatrixXd B(n, n);
    Eigen::VectorXd r(n);
    for (int i = 0; i < n; ++i) {
      B.row(i) = A_.row(rows_pick[static_cast<std::size_t>(i)]);
      r(i) = b_(rows_pick[static_cast<std::size_t>(i)]);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(B);
    if (!lu.isInvertible()) return;
    const Eigen::VectorXd v = lu.solve(r);
    if (!contains(v)) return;
    for (const auto& seen : verts) {
      if ((seen - v).lpNorm<Eigen::Infinity>() <= 1e-7) return;
    }
    verts.push_back(v);
  };

  std::vector<int> idx(static_cast<std::size_t>(n));
  const std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == n) {
      consider(idx);
      return;
    }
    for (int j = start; j < m; ++j) {
      idx[static_cast<std::size_t>(depth)] = j;
      rec(j + 1, depth + 1);
    }
  };
  rec(0, 0);

  std::sort(verts.begin(), verts.end(), [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    for (int i = 0; i < a.size(); ++i) {
      if (a(i) != b(i)) return a(i) < b(i);
    }
    return false;
  });
  return verts;
}

namespace {

double require_finite(double v, const std::string& where) {
  if (!std::isfinite(v)) throw MalformedInput(where + " must be finite");
  return v;
}

}  // namespace

FeasibleSet parse_constraints(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("vars") || !doc.contains("rows"))
    throw MalformedInput("constraint file must carry 'vars' and 'rows'");
  std::vector<std::string> vars = doc.at("vars").get<std::vector<std::string>>();
  if (vars.empty()) throw MalformedInput("constraint file declares no variables");
  const int n = static_cast<int>(vars.size());

  struct PendingRow {
    std::string name;
    Eigen::VectorXd coeffs;
    double rhs;
    bool candidate;
  };
  std::vector<PendingRow> pending;

  for (const auto& row : doc.at("rows")) {
    const std::string name = row.at("name").get<std::string>();
    const std::string sense = row.at("sense").get<std::string>();
    const double rhs = require_finite(row.at("rhs").get<double>(), "rhs of '" + name + "'");
    const bool candidate = row.value("candidate", true);
    Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
    for (const auto& [var, value] : row.at("coeffs").items()) {
      const auto it = std::find(vars.begin(), vars.end(), var);
      if (it == vars.end())
        throw MalformedInput("row '" + name + "' references unknown variable '" + var + "'");
      a(static_cast<int>(it - vars.begin())) =
          require_finite(value.get<double>(), "coefficient of '" + var + "' in '" + name + "'");
    }
    if (sense == ">=") {
      pending.push_back({name, a, rhs, candidate});
    } else if (sense == "<=") {
      pending.push_back({name, -a, -rhs, candidate});
    } else if (sense == "==") {
      pending.push_back({name + ":ge", a, rhs, candidate});
      pending.push_back({name + ":le", -a, -rhs, candidate});
    } else {
      throw MalformedInput("row '" + name + "' has unknown sense '" + sense + "'");
    }
  }
  if (pending.empty()) throw MalformedInput("constraint file declares no rows");

  const int m = static_cast<int>(pending.size());
  Eigen::MatrixXd A(m, n);
  Eigen::VectorXd b(m);
  std::vector<std::string> row_names;
  std::vector<char> candidate_flags;
  row_names.reserve(pending.size());
  candidate_flags.reserve(pending.size());
  for (int i = 0; i < m; ++i) {
    A.row(i) = pending[static_cast<std::size_t>(i)].coeffs;
    b(i) = pending[static_cast<std::size_t>(i)].rhs;
    row_names.push_back(pending[static_cast<std::size_t>(i)].name);
    candidate_flags.push_back(pending[static_cast<std::size_t>(i)].candidate ? 1 : 0);
  }
  return FeasibleSet(std::move(A), std::move(b), std::move(row_names), vars,
                     std::move(candidate_flags));
}

FeasibleSet load_constraints(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MalformedInput("cannot open constraint file '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw MalformedInput("constraint file '" + path + "': " + e.what());
  }
  return parse_constraints(doc);
}

nlohmann::ordered_json constraints_to_json(const FeasibleSet& set) {
  nlohmann::ordered_json doc;
  doc["vars"] = set.var_names();
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (int i = 0; i < set.rows(); ++i) {
    nlohmann::ordered_json row;
    row["name"] = set.row_names()[static_cast<std::size_t>(i)];
    nlohmann::ordered_json coeffs = nlohmann::ordered_json::object();
    for (int j = 0; j < set.dim(); ++j) {
      if (set.A()(i, j) != 0.0) coeffs[set.var_names()[static_cast<std::size_t>(j)]] = set.A()(i, j);
    }
    row["coeffs"] = coeffs;
    row["sense"] = ">=";
    row["rhs"] = set.b()(i);
    if (!set.face_candidate(i)) row["candidate"] = false;
    rows.push_back(row);
  }
  doc["rows"] = rows;
  return doc;
}

void save_constraints(const FeasibleSet& set, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw MalformedInput("cannot write constraint file '" + path + "'");
  out << constraints_to_json(set).dump(2) << "\n";
}

}  // namespace mlio
