#include "mlio/inverse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mlio/errors.hpp"
#include "mlio/solvers.hpp"

namespace mlio {

double loss(const Eigen::VectorXd& z, const ObservationSet& X, const std::vector<int>& members,
            Metric metric) {
  double total = 0.0;
  for (int k : members) total += point_distance(z, X.point(k), metric);
  return total;
}

double CertifyReport::worst() const {
  return std::max(std::max(primal, duality), std::max(stationarity, normalization));
}

namespace {

ClusterModel finish_model(const ObservationSet& X, std::vector<int> members,
                          const FeasibleSet& set, Metric metric, int face, Eigen::VectorXd z) {
  ClusterModel model;
  model.members = std::move(members);
  model.face = face;
  model.z = std::move(z);
  const Eigen::VectorXd a = set.A().row(face).transpose();
  model.cost = -a / a.lpNorm<1>();
  model.y = Eigen::VectorXd::Zero(set.rows());
  model.y(face) = 1.0;
  model.perturbations.resize(X.dim(), static_cast<int>(model.members.size()));
  for (int i = 0; i < static_cast<int>(model.members.size()); ++i)
    model.perturbations.col(i) = X.point(model.members[static_cast<std::size_t>(i)]) - model.z;
  model.loss = loss(model.z, X, model.members, metric);
  model.gap = set.boundary_distance(model.z);
  return model;
}

// Best representative on one face under summed L1 distance, solved as an LP
// over (z, theta): theta_i is the epigraph of the per-coordinate piecewise
// function sum_k |v - z_i|, expressed as the max of its affine pieces.
struct FaceL1Fit {
  bool feasible = false;
  double loss = 0.0;
  Eigen::VectorXd z;
};

FaceL1Fit l1_face_fit(const ObservationSet& X, const std::vector<int>& members,
                      const FeasibleSet& set, int face) {
  const int n = set.dim();
  const int m = set.rows();
  const int count = static_cast<int>(members.size());

  std::vector<std::vector<double>> sorted_vals(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    auto& vals = sorted_vals[static_cast<std::size_t>(i)];
    vals.reserve(static_cast<std::size_t>(count));
    for (int k : members) vals.push_back(X.points(i, k));
    std::sort(vals.begin(), vals.end());
  }

  // Rows: set constraints over z, then per-coordinate epigraph pieces
  // theta_i - slope * z_i >= intercept.
  std::vector<Eigen::VectorXd> rows;
  std::vector<double> rhs;
  for (int i = 0; i < n; ++i) {
    const auto& vals = sorted_vals[static_cast<std::size_t>(i)];
    double below = 0.0;
    double above = std::accumulate(vals.begin(), vals.end(), 0.0);
    for (int r = 0; r <= count; ++r) {
      if (r > 0) {
        below += vals[static_cast<std::size_t>(r - 1)];
        above -= vals[static_cast<std::size_t>(r - 1)];
      }
      if (r > 0 && r < count &&
          vals[static_cast<std::size_t>(r)] == vals[static_cast<std::size_t>(r - 1)])
        continue;  // repeated breakpoint, identical piece
      const double slope = 2.0 * r - count;
      const double intercept = above - below;
      Eigen::VectorXd row = Eigen::VectorXd::Zero(2 * n);
      row(i) = -slope;
      row(n + i) = 1.0;
      rows.push_back(std::move(row));
      rhs.push_back(intercept);
    }
  }

  const int extra = static_cast<int>(rows.size());
  Eigen::MatrixXd A_in = Eigen::MatrixXd::Zero(m + extra, 2 * n);
  Eigen::VectorXd b_in(m + extra);
  A_in.topLeftCorner(m, n) = set.A();
  b_in.head(m) = set.b();
  for (int r = 0; r < extra; ++r) {
    A_in.row(m + r) = rows[static_cast<std::size_t>(r)];
    b_in(m + r) = rhs[static_cast<std::size_t>(r)];
  }
  Eigen::MatrixXd A_eq = Eigen::MatrixXd::Zero(1, 2 * n);
  A_eq.block(0, 0, 1, n) = set.A().row(face);
  Eigen::VectorXd b_eq(1);
  b_eq(0) = set.b()(face);

  Eigen::VectorXd c = Eigen::VectorXd::Zero(2 * n);
  c.tail(n).setOnes();

  const GeneralLpSolution sol = solve_lp_general(c, A_in, b_in, A_eq, b_eq, set.tol());
  FaceL1Fit fit;
  if (sol.status != LpStatus::Optimal) return fit;
  fit.feasible = true;
  fit.z = sol.x.head(n);
  fit.loss = sol.objective;
  return fit;
}

}  // namespace

ClusterModel io_solve(const ObservationSet& X, const std::vector<int>& members,
                      const FeasibleSet& set, Metric metric) {
  if (members.empty()) throw MalformedInput("io_solve: empty observation set");
  if (X.dim() != set.dim())
    throw DimensionMismatch("io_solve: observation dimension != set dimension");

  int best_face = -1;
  double best_loss = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_z;

  if (metric == Metric::SquaredEuclidean) {
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(X.dim());
    for (int k : members) mean += X.point(k);
    mean /= static_cast<double>(members.size());
    double spread = 0.0;
    for (int k : members) spread += (X.point(k) - mean).squaredNorm();

    for (int j = 0; j < set.rows(); ++j) {
      if (!set.face_candidate(j)) continue;
      const Projection proj = project_onto_face(mean, set, j);
      if (proj.status != ProjectionStatus::Optimal) continue;
      const double face_loss = static_cast<double>(members.size()) * proj.sq_distance + spread;
      if (face_loss < best_loss) {
        best_loss = face_loss;
        best_face = j;
        best_z = proj.z;
      }
    }
  } else {
    for (int j = 0; j < set.rows(); ++j) {
      if (!set.face_candidate(j)) continue;
      const FaceL1Fit fit = l1_face_fit(X, members, set, j);
      if (!fit.feasible) continue;
      if (fit.loss < best_loss) {
        best_loss = fit.loss;
        best_face = j;
        best_z = fit.z;
      }
    }
  }

  if (best_face < 0) throw MalformedInput("io_solve: no attainable candidate face");
  return finish_model(X, members, set, metric, best_face, std::move(best_z));
}

ClusterModel io_solve(const ObservationSet& X0, const FeasibleSet& set, Metric metric) {
  std::vector<int> all(static_cast<std::size_t>(X0.count()));
  std::iota(all.begin(), all.end(), 0);
  return io_solve(X0, all, set, metric);
}

CertifyReport certify(const ClusterModel& model, const FeasibleSet& set) {
  CertifyReport report;
  const Eigen::VectorXd residual = set.A() * model.z - set.b();
  report.primal = std::max(0.0, -residual.minCoeff());

  const Eigen::VectorXd c_internal = set.A().transpose() * model.y;
  report.duality = std::abs(c_internal.dot(model.z) - set.b().dot(model.y));

  // The reported cost must be the internal certificate cost, negated and
  // scaled to unit l1 norm.
  const double scale = c_internal.lpNorm<1>();
  report.stationarity = (c_internal + scale * model.cost).lpNorm<Eigen::Infinity>();

  report.normalization =
      std::abs(model.y.sum() - 1.0) + std::max(0.0, -model.y.minCoeff());
  return report;
}

}  // namespace mlio
