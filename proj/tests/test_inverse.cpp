#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "mlio/clustering.hpp"
#include "mlio/errors.hpp"
#include "mlio/inverse.hpp"
#include "mlio/polytope.hpp"
#include "mlio/rng.hpp"
#include "mlio/solvers.hpp"
#include "mlio/synthetic.hpp"

using namespace mlio;

namespace {

ObservationSet make_obs(const Eigen::MatrixXd& pts) {
  ObservationSet X;
  X.points = pts;
  for (int k = 0; k < pts.cols(); ++k) X.ids.push_back("p" + std::to_string(k + 1));
  for (int j = 0; j < pts.rows(); ++j) X.var_names.push_back("x" + std::to_string(j + 1));
  return X;
}

std::vector<int> all_of(const ObservationSet& X) {
  std::vector<int> m(static_cast<size_t>(X.count()));
  std::iota(m.begin(), m.end(), 0);
  return m;
}

// Exhaustive reference for 2-D instances: walk every candidate face segment
// with a fine grid, refined at the candidate extrema of the segment loss
// (the mean projection for squared error, the per-coordinate kinks for l1),
// and take the best loss seen.
double grid_min_loss(const FeasibleSet& set, const ObservationSet& X, Metric metric,
                     double step = 1e-3) {
  const auto members = all_of(X);
  double best = std::numeric_limits<double>::infinity();
  for (int j = 0; j < set.rows(); ++j) {
    if (!set.face_candidate(j)) continue;
    Eigen::VectorXd t(2);
    t << -set.A()(j, 1), set.A()(j, 0);
    Eigen::MatrixXd face_row = set.A().row(j);
    Eigen::VectorXd face_rhs(1);
    face_rhs << set.b()(j);
    const GeneralLpSolution lo = solve_lp_general(t, set.A(), set.b(), face_row, face_rhs);
    const GeneralLpSolution hi =
        solve_lp_general(Eigen::VectorXd(-t), set.A(), set.b(), face_row, face_rhs);
    if (lo.status != LpStatus::Optimal || hi.status != LpStatus::Optimal) continue;
    const Eigen::VectorXd a = lo.x;
    const Eigen::VectorXd b = hi.x;
    const Eigen::VectorXd d = b - a;
    const double len = d.norm();
    const int n_steps = std::max(1, static_cast<int>(std::ceil(len / step)));
    std::vector<double> params;
    for (int s = 0; s <= n_steps; ++s) params.push_back(static_cast<double>(s) / n_steps);
    if (len > 0) {
      const Eigen::VectorXd mean = metric_centroid(X, members, Metric::SquaredEuclidean);
      params.push_back(std::clamp(d.dot(mean - a) / d.squaredNorm(), 0.0, 1.0));
      for (int k = 0; k < X.count(); ++k)
        for (int i = 0; i < X.dim(); ++i)
          if (std::abs(d(i)) > 1e-12) {
            const double s = (X.points(i, k) - a(i)) / d(i);
            if (s > 0.0 && s < 1.0) params.push_back(s);
          }
    }
    for (const double s : params) {
      const Eigen::VectorXd z = a + s * d;
      best = std::min(best, loss(z, X, members, metric));
    }
  }
  return best;
}

}  // namespace

TEST_CASE("loss matches hand values") {
  Eigen::MatrixXd pts(2, 2);
  pts << 2, 4, 2, 2;
  const ObservationSet X = make_obs(pts);
  Eigen::VectorXd z(2);
  z << 3, 1;
  CHECK(loss(z, X, {0, 1}, Metric::SquaredEuclidean) == doctest::Approx(4.0));
  CHECK(loss(pts.col(0), X, {0}, Metric::SquaredEuclidean) == doctest::Approx(0.0));

  Eigen::MatrixXd single(2, 1);
  single << 1, 2;
  const ObservationSet Y = make_obs(single);
  CHECK(loss(Eigen::VectorXd::Zero(2), Y, {0}, Metric::L1) == doctest::Approx(3.0));
  CHECK_THROWS_AS(loss(Eigen::VectorXd::Zero(3), Y, {0}, Metric::L1), DimensionMismatch);
}

TEST_CASE("two-point squared fit picks the bottom edge") {
  const FeasibleSet set = demo2d_polytope();
  Eigen::MatrixXd pts(2, 2);
  pts << 2, 4, 2, 2;
  const ObservationSet X = make_obs(pts);

  const ClusterModel model = io_solve(X, set, Metric::SquaredEuclidean);
  CHECK(model.face == 2);
  CHECK((model.z - Eigen::Vector2d(3, 1)).norm() < 1e-8);
  CHECK(model.loss == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(model.cost(0) == doctest::Approx(0.0));
  CHECK(model.cost(1) == doctest::Approx(-1.0));
  CHECK(model.y(2) == doctest::Approx(1.0));
  CHECK(model.gap <= 1e-8);

  // Perturbations reconstruct the observations from the representative.
  for (size_t i = 0; i < model.members.size(); ++i) {
    const Eigen::VectorXd back = model.z + model.perturbations.col(static_cast<int>(i));
    CHECK((back - pts.col(model.members[i])).norm() < 1e-12);
  }
}

TEST_CASE("l1 fit ties break to the lowest face index") {
  const FeasibleSet set = demo2d_polytope();
  Eigen::MatrixXd pts(2, 2);
  pts << 2, 4, 2, 2;
  const ObservationSet X = make_obs(pts);

  // Faces x1>=1, x1<=5 and x2>=1 all reach l1 loss 4; the first wins.
  const ClusterModel model = io_solve(X, set, Metric::L1);
  CHECK(model.face == 0);
  CHECK((model.z - Eigen::Vector2d(1, 2)).norm() < 1e-8);
  CHECK(model.loss == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(model.cost(0) == doctest::Approx(-1.0));
  CHECK(model.cost(1) == doctest::Approx(0.0));
}

TEST_CASE("certify flags hand-built defects") {
  const FeasibleSet set = demo2d_polytope();
  Eigen::MatrixXd pts(2, 2);
  pts << 2, 4, 2, 2;
  const ObservationSet X = make_obs(pts);

  ClusterModel model = io_solve(X, set, Metric::SquaredEuclidean);
  CHECK(certify(model, set).worst() <= 1e-8);

  // Interior representative: primal fine, strong duality broken by 1.
  ClusterModel interior = model;
  interior.z << 2, 2;
  interior.y = Eigen::VectorXd::Zero(set.rows());
  interior.y(0) = 1.0;
  interior.cost << -1, 0;
  const CertifyReport rep = certify(interior, set);
  CHECK(rep.primal <= 1e-12);
  CHECK(rep.duality == doctest::Approx(1.0));
  CHECK(rep.stationarity <= 1e-12);

  ClusterModel half = model;
  half.y *= 0.5;
  CHECK(certify(half, set).normalization == doctest::Approx(0.5));
}

TEST_CASE("singleton member subsets fit exactly when feasible") {
  const FeasibleSet set = demo2d_polytope();
  Eigen::MatrixXd pts(2, 3);
  pts << 1, 3, 9, 4, 1, 9;
  const ObservationSet X = make_obs(pts);

  // (1,4) is on the face x1 >= 1 already: zero loss.
  ClusterModel m = io_solve(X, {0}, set, Metric::SquaredEuclidean);
  CHECK(m.loss == doctest::Approx(0.0).epsilon(1e-12));
  CHECK((m.z - pts.col(0)).norm() < 1e-8);

  // (3,1) sits on the bottom edge.
  m = io_solve(X, {1}, set, Metric::L1);
  CHECK(m.loss == doctest::Approx(0.0).epsilon(1e-12));

  // (9,9) is outside; the answer is its boundary projection.
  m = io_solve(X, {2}, set, Metric::SquaredEuclidean);
  CHECK(m.loss == doctest::Approx(grid_min_loss(set, make_obs(pts.col(2)),
                                                Metric::SquaredEuclidean))
                      .epsilon(1e-4));
}

TEST_CASE("io loss matches the boundary grid search") {
  Rng rng(1234);
  for (int trial = 0; trial < 12; ++trial) {
    // Random bounded 2-D polytope: a box plus a random cut that keeps a
    // known interior point feasible.
    Eigen::MatrixXd A(5, 2);
    Eigen::VectorXd b(5);
    A << 1, 0, -1, 0, 0, 1, 0, -1, 0, 0;
    const double w = rng.uniform(2, 6);
    const double h = rng.uniform(2, 6);
    b << 0, -w, 0, -h, 0;
    A(4, 0) = rng.uniform(-1, 1);
    A(4, 1) = rng.uniform(-1, 1);
    if (A.row(4).cwiseAbs().maxCoeff() < 0.2) A(4, 0) = 1;
    Eigen::VectorXd mid(2);
    mid << w / 2, h / 2;
    b(4) = A.row(4).dot(mid) - rng.uniform(0.2, 1.0);
    const FeasibleSet set(A, b);

    const int count = 2 + static_cast<int>(rng.uniform_int(5));
    Eigen::MatrixXd pts(2, count);
    for (int k = 0; k < count; ++k) {
      pts(0, k) = rng.uniform(-1, w + 1);
      pts(1, k) = rng.uniform(-1, h + 1);
    }
    const ObservationSet X = make_obs(pts);

    for (const Metric metric : {Metric::SquaredEuclidean, Metric::L1}) {
      const ClusterModel model = io_solve(X, set, metric);
      const double ref = grid_min_loss(set, X, metric);
      CHECK(model.loss <= ref + 1e-6);
      CHECK(model.loss >= ref - 1e-4);
      CHECK(certify(model, set).worst() <= 1e-8);
      CHECK(set.boundary_distance(model.z) <= 1e-8);

      // The representative maximizes the reported cost over the whole set.
      const LpSolution fo = solve_lp(model.cost, set, Sense::Max);
      REQUIRE(fo.status == LpStatus::Optimal);
      CHECK(std::abs(fo.objective - model.cost.dot(model.z)) <= 1e-8);
    }
  }
}

TEST_CASE("candidate flags exclude faces from the scan") {
  Eigen::MatrixXd A(4, 2);
  A << 1, 0, -1, 0, 0, 1, 0, -1;
  Eigen::VectorXd b(4);
  b << 0, -4, 0, -4;
  std::vector<std::string> rows = {"left", "right", "bottom", "top"};
  std::vector<std::string> vars = {"x1", "x2"};
  std::vector<char> candidate = {1, 1, 0, 1};
  const FeasibleSet set(A, b, rows, vars, candidate);

  Eigen::MatrixXd pts(2, 1);
  pts << 2, 0.5;  // nearest face would be the excluded bottom edge
  const ClusterModel model = io_solve(make_obs(pts), set, Metric::SquaredEuclidean);
  CHECK(model.face != 2);
  // Left and right tie at squared distance 4; the lower index wins.
  CHECK(model.face == 0);
}
