#pragma once

#include <Eigen/Dense>
#include <string>

#include "mlio/errors.hpp"

namespace mlio {

enum class Metric { SquaredEuclidean, L1 };

inline double point_distance(const Eigen::VectorXd& z, const Eigen::VectorXd& x, Metric metric) {
  if (z.size() != x.size())
    throw DimensionMismatch("point_distance: sizes " + std::to_string(z.size()) + " vs " +
                            std::to_string(x.size()));
  switch (metric) {
    case Metric::SquaredEuclidean:
      return (z - x).squaredNorm();
    case Metric::L1:
      return (z - x).lpNorm<1>();
  }
  return 0.0;
}

inline std::string metric_name(Metric metric) {
  return metric == Metric::SquaredEuclidean ? "sqeuclidean" : "l1";
}

inline Metric parse_metric(const std::string& name) {
  if (name == "sqeuclidean") return Metric::SquaredEuclidean;
  if (name == "l1") return Metric::L1;
  throw MalformedInput("unknown metric '" + name + "' (expected sqeuclidean or l1)");
}

}  // namespace mlio
