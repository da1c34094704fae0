#pragma once

#include <Eigen/Dense>
#include <vector>

#include "mlio/clustering.hpp"
#include "mlio/metric.hpp"
#include "mlio/polytope.hpp"

namespace mlio {

// Recovered utility for one cluster.  The representative z lies on face
// `face` of the feasible set and minimizes the summed perturbation distance
// to the member observations; (cost, y) certify that z maximizes the reported
// cost vector over the set (strong duality through the face row).  `face` is
// -1 and cost/y are zero for placeholder models (empty cluster, or fits run
// without a feasible set).
struct ClusterModel {
  std::vector<int> members;
  Eigen::VectorXd cost;        // reported, normalized to unit l1 norm
  Eigen::VectorXd y;           // dual weights over rows, y >= 0, sum 1
  Eigen::VectorXd z;           // representative decision
  Eigen::MatrixXd perturbations;  // x^k - z per member, dim x |members|
  int face = -1;
  double loss = 0.0;
  double gap = 0.0;  // distance from z to the boundary of the feasible set
};

double loss(const Eigen::VectorXd& z, const ObservationSet& X, const std::vector<int>& members,
            Metric metric);

// Minimum-perturbation inverse fit for one cluster: scan candidate faces,
// solve the distance subproblem restricted to each, keep the best face
// (lowest row index on ties).  Throws EmptyFeasibleSet-style failures only at
// set construction; here the set is assumed valid.
ClusterModel io_solve(const ObservationSet& X0, const FeasibleSet& set, Metric metric);
ClusterModel io_solve(const ObservationSet& X, const std::vector<int>& members,
                      const FeasibleSet& set, Metric metric);

// Residuals of the optimality certificate carried by a model: primal
// feasibility of z, strong duality across the face row, dual stationarity
// A'y = c_internal, and the simplex-weight normalization of y.  All are ~0
// for a valid fit.
struct CertifyReport {
  double primal = 0.0;
  double duality = 0.0;
  double stationarity = 0.0;
  double normalization = 0.0;
  double worst() const;
};

CertifyReport certify(const ClusterModel& model, const FeasibleSet& set);

}  // namespace mlio
