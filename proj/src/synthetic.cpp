#include "mlio/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "mlio/rng.hpp"

namespace mlio {

FeasibleSet demo2d_polytope() {
  Eigen::MatrixXd A(5, 2);
  Eigen::VectorXd b(5);
  A << 1, 0,
      -1, 0,
       0, 1,
       0, -1,
      -1, -1;
  b << 1, -5, 1, -10, -15;
  return FeasibleSet(std::move(A), std::move(b), {"x1_lb", "x1_ub", "x2_lb", "x2_ub", "sum_ub"},
                     {"x1", "x2"}, {});
}

ObservationSet gen2d_observations(int count, std::uint64_t seed) {
  if (count < 1) throw MalformedInput("gen2d needs count >= 1");
  // Three preference groups; the right two straddle the x1 <= 5 face so a
  // fair share of draws lands outside the polytope.
  const double cx[3] = {1.8, 5.3, 6.4};
  const double cy[3] = {5.0, 7.6, 2.6};
  const double sx[3] = {0.7, 1.0, 1.1};
  const double sy[3] = {1.6, 1.1, 0.9};

  Rng rng(seed);
  ObservationSet out;
  out.var_names = {"x1", "x2"};
  out.points.resize(2, count);
  out.ids.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    const int g = static_cast<int>(rng.uniform_int(3));
    out.points(0, k) = cx[g] + sx[g] * rng.normal();
    out.points(1, k) = cy[g] + sy[g] * rng.normal();
    out.ids.push_back("p" + std::to_string(k + 1));
  }
  return out;
}

namespace {

struct FoodDef {
  const char* name;
  const char* group;
  // calories, protein, carbs, fat, sodium, fiber, calcium, potassium
  double nutrients[8];
  double ref_servings;
};

// Per-serving amounts in scaled units (calories 100 kcal, protein/carbs/fat
// 10 g, sodium/calcium/potassium 100 mg, fiber g) to keep the rows of the
// polytope comparably conditioned.
constexpr FoodDef kMenu[20] = {
    {"bread", "grains", {0.8, 0.3, 1.5, 0.10, 1.5, 1.9, 0.7, 0.7}, 1.2},
    {"rice", "grains", {1.3, 0.3, 2.8, 0.03, 0.01, 0.4, 0.1, 0.5}, 1.0},
    {"oats", "grains", {1.5, 0.5, 2.7, 0.30, 0.02, 4.0, 0.2, 1.5}, 0.8},
    {"pasta", "grains", {1.6, 0.6, 3.1, 0.10, 0.01, 2.5, 0.1, 0.6}, 0.8},
    {"broccoli", "vegetables", {0.3, 0.3, 0.6, 0.04, 0.3, 2.4, 0.4, 2.9}, 1.5},
    {"spinach", "vegetables", {0.2, 0.3, 0.4, 0.04, 0.8, 2.2, 1.0, 5.6}, 1.0},
    {"carrots", "vegetables", {0.4, 0.1, 0.9, 0.02, 0.7, 2.8, 0.3, 2.3}, 1.0},
    {"tomato", "vegetables", {0.2, 0.1, 0.5, 0.02, 0.05, 1.2, 0.1, 2.4}, 1.0},
    {"apple", "fruits", {0.9, 0.05, 2.5, 0.03, 0.02, 4.4, 0.1, 2.0}, 1.2},
    {"banana", "fruits", {1.1, 0.1, 2.7, 0.04, 0.01, 3.1, 0.06, 4.2}, 1.0},
    {"orange", "fruits", {0.6, 0.1, 1.5, 0.02, 0.0, 3.1, 0.4, 2.3}, 1.0},
    {"milk", "dairy", {1.0, 0.8, 1.2, 0.24, 1.0, 0.0, 2.8, 3.2}, 1.5},
    {"yogurt", "dairy", {0.6, 1.0, 0.7, 0.04, 0.5, 0.0, 1.1, 1.4}, 1.0},
    {"cheese", "dairy", {1.1, 0.7, 0.04, 0.90, 6.2, 0.0, 2.0, 0.3}, 0.8},
    {"chicken", "protein_foods", {1.6, 3.1, 0.0, 0.36, 0.7, 0.0, 0.1, 2.6}, 1.0},
    {"beans", "protein_foods", {1.2, 0.9, 2.2, 0.05, 4.0, 7.5, 0.5, 4.0}, 0.8},
    {"eggs", "protein_foods", {0.7, 0.6, 0.04, 0.50, 0.7, 0.0, 0.3, 0.7}, 1.0},
    {"fish", "protein_foods", {1.4, 2.2, 0.0, 0.60, 0.5, 0.0, 0.1, 4.0}, 0.8},
    {"chips", "snacks", {1.5, 0.2, 1.5, 1.00, 5.3, 1.2, 0.2, 3.4}, 0.4},
    {"cookies", "snacks", {1.6, 0.2, 2.4, 0.70, 3.6, 0.6, 0.1, 0.4}, 0.3},
};

constexpr int kSodiumRow = 4;

// Taste archetypes as per-group serving multipliers.
double group_emphasis(int archetype, const std::string& group) {
  if (archetype == 0) {  // hearty: heavy on grains, protein and snacks
    if (group == "grains") return 1.3;
    if (group == "protein_foods") return 1.4;
    if (group == "snacks") return 2.2;
    if (group == "vegetables" || group == "fruits") return 0.7;
    return 1.0;
  }
  if (archetype == 1) {  // balanced, still snacking
    if (group == "snacks") return 1.8;
    return 1.0;
  }
  // sweet tooth
  if (group == "fruits") return 1.3;
  if (group == "dairy") return 1.2;
  if (group == "snacks") return 2.6;
  if (group == "grains") return 1.1;
  if (group == "vegetables") return 0.6;
  if (group == "protein_foods") return 0.8;
  return 1.0;
}

}  // namespace

DietData gen_diet(int count, std::uint64_t seed) {
  if (count < 1) throw MalformedInput("gen_diet needs count >= 1");
  constexpr int n = 20;
  constexpr int p = 8;

  Rng rng(seed);
  DietData data;
  NutrientSpec& spec = data.spec;
  spec.nutrients = {"calories", "protein", "carbs", "fat", "sodium", "fiber", "calcium",
                    "potassium"};
  spec.foods.reserve(n);
  spec.N.resize(p, n);
  Eigen::VectorXd ref_servings(n);
  for (int j = 0; j < n; ++j) {
    spec.foods.emplace_back(kMenu[j].name);
    spec.groups[kMenu[j].name] = kMenu[j].group;
    ref_servings(j) = kMenu[j].ref_servings;
    for (int i = 0; i < p; ++i)
      spec.N(i, j) = kMenu[j].nutrients[i] * rng.uniform(0.85, 1.15);
  }

  // Noisy daily menus around the taste archetypes; servings stay positive.
  ObservationSet& X = data.observations;
  X.var_names = spec.foods;
  X.points.resize(n, count);
  X.ids.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    const int archetype = static_cast<int>(rng.uniform_int(3));
    for (int j = 0; j < n; ++j) {
      const double base = ref_servings(j) * group_emphasis(archetype, kMenu[j].group);
      X.points(j, k) = base * std::exp(0.2 * rng.normal());
    }
    X.ids.push_back("d" + std::to_string(k + 1));
  }

  // Bounds framed around the reference diet.  The sodium cap is deliberately
  // set below the population mean (snack-heavy menus) yet above the
  // reference value, so the polytope stays non-empty while raw centroids
  // overshoot it.
  const Eigen::VectorXd ref = spec.N * ref_servings;
  spec.lb = 0.7 * ref;
  spec.ub = 1.3 * ref;
  spec.lb(kSodiumRow) = 0.25 * ref(kSodiumRow);
  const double mean_sodium =
      (spec.N.row(kSodiumRow) * X.points).sum() / static_cast<double>(count);
  spec.ub(kSodiumRow) = std::max(1.05 * ref(kSodiumRow), 0.85 * mean_sodium);
  return data;
}

}  // namespace mlio
