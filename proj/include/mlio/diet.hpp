#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mlio/engine.hpp"
#include "mlio/polytope.hpp"

namespace mlio {

// Nutrient bounds for a menu of foods: N(i,j) is the amount of nutrient i in
// one serving of food j, and a serving vector x must keep N x within
// [lb, ub].  `groups` maps each food to a food group for report aggregation.
struct NutrientSpec {
  std::vector<std::string> foods;
  std::vector<std::string> nutrients;
  Eigen::MatrixXd N;  // nutrients x foods
  Eigen::VectorXd lb;
  Eigen::VectorXd ub;
  std::map<std::string, std::string> groups;
};

NutrientSpec load_nutrient_spec(const std::string& path);
void save_nutrient_spec(const NutrientSpec& spec, const std::string& path);

// Canonical feasible set for a nutrient spec: N x >= lb rows, negated
// N x <= ub rows, and (by default) per-food nonnegativity.  By default the
// nonnegativity rows are kept out of the optimal-face scan, so recovered
// utilities are driven by nutrient constraints rather than by a bound at
// zero; exclude_nonneg_faces = false restores the full scan.
FeasibleSet build_diet_polytope(const NutrientSpec& spec, bool include_nonneg = true,
                                bool exclude_nonneg_faces = true);

struct SplitResult {
  std::vector<int> train;
  std::vector<int> test;
};

// Deterministic shuffled split; `ratio` is the train fraction.
SplitResult train_test_split(int count, double ratio, std::uint64_t seed);

// Per-cluster nutrient totals for each representative, checked against the
// spec bounds.  K-means centroid rows (cluster "kmeans:<l>") are appended
// when centroids are supplied, which is how the reports surface bound
// violations of the unconstrained baseline.
struct NutrientRow {
  std::string cluster;
  std::string entity;  // nutrient name
  double value = 0.0;
  double lb = 0.0;
  double ub = 0.0;
  bool in_bounds = true;
};

std::vector<NutrientRow> nutrient_report(const MlioSolution& sol, const NutrientSpec& spec,
                                         const std::vector<Eigen::VectorXd>& kmeans_centroids = {});

struct GroupRow {
  std::string cluster;
  std::string group;
  double mlio_total = 0.0;
  double kmeans_total = 0.0;
};

// Summed servings per food group, representative vs k-means centroid.
std::vector<GroupRow> food_group_report(const MlioSolution& sol, const NutrientSpec& spec,
                                        const std::vector<Eigen::VectorXd>& kmeans_centroids);

void write_nutrient_csv(const std::vector<NutrientRow>& rows, const std::string& path);
void write_group_csv(const std::vector<GroupRow>& rows, const std::string& path);

}  // namespace mlio
