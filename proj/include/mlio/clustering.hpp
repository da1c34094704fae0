#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "mlio/metric.hpp"

namespace mlio {

// Observed decisions, one per column.  Ids are carried through to reports and
// solution files; var_names (when loaded from CSV) are checked against the
// constraint file before fitting.
struct ObservationSet {
  Eigen::MatrixXd points;  // dim x count
  std::vector<std::string> ids;
  std::vector<std::string> var_names;

  int dim() const { return static_cast<int>(points.rows()); }
  int count() const { return static_cast<int>(points.cols()); }
  Eigen::VectorXd point(int k) const { return points.col(k); }

  ObservationSet subset(const std::vector<int>& indices) const;
};

ObservationSet load_observations(const std::string& path);
void save_observations(const ObservationSet& X, const std::string& path);

// Assignment of each observation to one of L clusters.  Clusters may be
// empty; `members_of` preserves observation order.
struct Partition {
  std::vector<int> assign;
  int num_clusters = 0;

  std::vector<int> members_of(int cluster) const;
  std::vector<std::vector<int>> all_members() const;
  bool operator==(const Partition&) const = default;
  std::uint64_t hash() const;
};

// Nearest center index under the metric, lowest index on ties.
int nearest_center(const Eigen::VectorXd& x, const std::vector<Eigen::VectorXd>& centers,
                   Metric metric);

Partition assign_to_centers(const ObservationSet& X, const std::vector<Eigen::VectorXd>& centers,
                            Metric metric);

// Center minimizing the summed metric distance over the given members: the
// mean for squared Euclidean, the coordinate-wise median for L1.
Eigen::VectorXd metric_centroid(const ObservationSet& X, const std::vector<int>& members,
                                Metric metric);

// Indices of the initial centers: first drawn uniformly, the rest weighted by
// squared distance (in the active metric) to the nearest already-chosen
// center.
std::vector<int> kmeans_plus_plus_seed(const ObservationSet& X, int L, std::uint64_t seed,
                                       Metric metric);

struct KmeansResult {
  Partition partition;
  std::vector<Eigen::VectorXd> centroids;
  double total_loss = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Lloyd iteration from a kmeans++ seeding.  An update that empties a cluster
// re-seeds it with the observation farthest from its assigned center.
KmeansResult kmeans(const ObservationSet& X, int L, std::uint64_t seed, Metric metric,
                    int max_iter = 500);

}  // namespace mlio
