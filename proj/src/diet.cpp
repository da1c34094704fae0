#include "mlio/diet.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "mlio/errors.hpp"
#include "mlio/rng.hpp"

namespace mlio {

namespace {

void check_spec(const NutrientSpec& spec) {
  const int p = static_cast<int>(spec.nutrients.size());
  const int n = static_cast<int>(spec.foods.size());
  if (p < 1 || n < 1) throw MalformedInput("nutrient spec needs at least one nutrient and one food");
  if (spec.N.rows() != p || spec.N.cols() != n)
    throw DimensionMismatch("nutrient matrix must be nutrients x foods");
  if (spec.lb.size() != p || spec.ub.size() != p)
    throw DimensionMismatch("nutrient bounds must have one entry per nutrient");
  if (!spec.N.allFinite() || !spec.lb.allFinite() || !spec.ub.allFinite())
    throw MalformedInput("nutrient spec values must be finite");
  if ((spec.N.array() < 0.0).any()) throw MalformedInput("nutrient matrix must be nonnegative");
  for (int i = 0; i < p; ++i) {
    if (spec.lb(i) > spec.ub(i))
      throw MalformedInput("nutrient '" + spec.nutrients[static_cast<std::size_t>(i)] +
                           "' has lb > ub");
  }
}

}  // namespace

NutrientSpec load_nutrient_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MalformedInput("cannot open nutrient spec '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw MalformedInput("nutrient spec '" + path + "': " + e.what());
  }

  NutrientSpec spec;
  try {
    spec.foods = doc.at("foods").get<std::vector<std::string>>();
    spec.nutrients = doc.at("nutrients").get<std::vector<std::string>>();
    const auto matrix = doc.at("matrix").get<std::vector<std::vector<double>>>();
    const int p = static_cast<int>(spec.nutrients.size());
    const int n = static_cast<int>(spec.foods.size());
    if (static_cast<int>(matrix.size()) != p)
      throw MalformedInput("nutrient spec: matrix row count != nutrient count");
    spec.N.resize(p, n);
    for (int i = 0; i < p; ++i) {
      if (static_cast<int>(matrix[static_cast<std::size_t>(i)].size()) != n)
        throw MalformedInput("nutrient spec: matrix column count != food count");
      for (int j = 0; j < n; ++j) spec.N(i, j) = matrix[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    const auto lb = doc.at("lb").get<std::vector<double>>();
    const auto ub = doc.at("ub").get<std::vector<double>>();
    spec.lb = Eigen::Map<const Eigen::VectorXd>(lb.data(), static_cast<int>(lb.size()));
    spec.ub = Eigen::Map<const Eigen::VectorXd>(ub.data(), static_cast<int>(ub.size()));
    if (doc.contains("groups"))
      spec.groups = doc.at("groups").get<std::map<std::string, std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw MalformedInput("nutrient spec '" + path + "': " + e.what());
  }
  check_spec(spec);
  return spec;
}

void save_nutrient_spec(const NutrientSpec& spec, const std::string& path) {
  check_spec(spec);
  nlohmann::ordered_json doc;
  doc["foods"] = spec.foods;
  doc["nutrients"] = spec.nutrients;
  nlohmann::ordered_json matrix = nlohmann::ordered_json::array();
  for (int i = 0; i < spec.N.rows(); ++i) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (int j = 0; j < spec.N.cols(); ++j) row.push_back(spec.N(i, j));
    matrix.push_back(row);
  }
  doc["matrix"] = matrix;
  doc["lb"] = std::vector<double>(spec.lb.data(), spec.lb.data() + spec.lb.size());
  doc["ub"] = std::vector<double>(spec.ub.data(), spec.ub.data() + spec.ub.size());
  doc["groups"] = spec.groups;
  std::ofstream out(path);
  if (!out) throw MalformedInput("cannot write nutrient spec '" + path + "'");
  out << doc.dump(2) << "\n";
}

FeasibleSet build_diet_polytope(const NutrientSpec& spec, bool include_nonneg,
                                bool exclude_nonneg_faces) {
  check_spec(spec);
  const int p = static_cast<int>(spec.nutrients.size());
  const int n = static_cast<int>(spec.foods.size());

  const int m = 2 * p + (include_nonneg ? n : 0);
  Eigen::MatrixXd A(m, n);
  Eigen::VectorXd b(m);
  std::vector<std::string> row_names;
  std::vector<char> candidate;
  row_names.reserve(static_cast<std::size_t>(m));
  candidate.reserve(static_cast<std::size_t>(m));

  A.topRows(p) = spec.N;
  b.head(p) = spec.lb;
  for (int i = 0; i < p; ++i) {
    row_names.push_back(spec.nutrients[static_cast<std::size_t>(i)] + ":lb");
    candidate.push_back(1);
  }
  A.middleRows(p, p) = -spec.N;
  b.segment(p, p) = -spec.ub;
  for (int i = 0; i < p; ++i) {
    row_names.push_back(spec.nutrients[static_cast<std::size_t>(i)] + ":ub");
    candidate.push_back(1);
  }
  if (include_nonneg) {
    A.bottomRows(n) = Eigen::MatrixXd::Identity(n, n);
    b.tail(n).setZero();
    for (int j = 0; j < n; ++j) {
      row_names.push_back(spec.foods[static_cast<std::size_t>(j)] + ":nonneg");
      candidate.push_back(exclude_nonneg_faces ? 0 : 1);
    }
  }

  return FeasibleSet(std::move(A), std::move(b), std::move(row_names), spec.foods,
                     std::move(candidate));
}

SplitResult train_test_split(int count, double ratio, std::uint64_t seed) {
  if (count < 1) throw MalformedInput("split needs at least one observation");
  if (!(ratio > 0.0 && ratio < 1.0)) throw MalformedInput("split ratio must lie in (0, 1)");
  std::vector<int> order(static_cast<std::size_t>(count));
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order);
  const int train_count = static_cast<int>(std::floor(count * ratio));
  SplitResult split;
  split.train.assign(order.begin(), order.begin() + train_count);
  split.test.assign(order.begin() + train_count, order.end());
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

std::vector<NutrientRow> nutrient_report(const MlioSolution& sol, const NutrientSpec& spec,
                                         const std::vector<Eigen::VectorXd>& kmeans_centroids) {
  check_spec(spec);
  const int p = static_cast<int>(spec.nutrients.size());
  std::vector<NutrientRow> rows;

  const auto emit = [&](const std::string& cluster, const Eigen::VectorXd& servings) {
    if (servings.size() != spec.N.cols())
      throw DimensionMismatch("nutrient report: serving vector length != food count");
    const Eigen::VectorXd totals = spec.N * servings;
    for (int i = 0; i < p; ++i) {
      NutrientRow row;
      row.cluster = cluster;
      row.entity = spec.nutrients[static_cast<std::size_t>(i)];
      row.value = totals(i);
      row.lb = spec.lb(i);
      row.ub = spec.ub(i);
      row.in_bounds = totals(i) >= spec.lb(i) - 1e-8 && totals(i) <= spec.ub(i) + 1e-8;
      rows.push_back(row);
    }
  };

  for (int l = 0; l < static_cast<int>(sol.models.size()); ++l)
    emit(std::to_string(l), sol.models[static_cast<std::size_t>(l)].z);
  for (int l = 0; l < static_cast<int>(kmeans_centroids.size()); ++l)
    emit("kmeans:" + std::to_string(l), kmeans_centroids[static_cast<std::size_t>(l)]);
  return rows;
}

std::vector<GroupRow> food_group_report(const MlioSolution& sol, const NutrientSpec& spec,
                                        const std::vector<Eigen::VectorXd>& kmeans_centroids) {
  check_spec(spec);
  if (spec.groups.empty()) throw MissingGroupMap();

  std::vector<std::string> group_names;
  for (const auto& [food, group] : spec.groups) {
    if (std::find(spec.foods.begin(), spec.foods.end(), food) == spec.foods.end())
      throw MalformedInput("group map references unknown food '" + food + "'");
    if (std::find(group_names.begin(), group_names.end(), group) == group_names.end())
      group_names.push_back(group);
  }
  std::sort(group_names.begin(), group_names.end());

  const auto group_total = [&](const Eigen::VectorXd& servings, const std::string& group) {
    double total = 0.0;
    for (int j = 0; j < static_cast<int>(spec.foods.size()); ++j) {
      const auto it = spec.groups.find(spec.foods[static_cast<std::size_t>(j)]);
      if (it != spec.groups.end() && it->second == group) total += servings(j);
    }
    return total;
  };

  std::vector<GroupRow> rows;
  for (int l = 0; l < static_cast<int>(sol.models.size()); ++l) {
    const Eigen::VectorXd& z = sol.models[static_cast<std::size_t>(l)].z;
    const bool have_centroid = l < static_cast<int>(kmeans_centroids.size());
    for (const auto& group : group_names) {
      GroupRow row;
      row.cluster = std::to_string(l);
      row.group = group;
      row.mlio_total = group_total(z, group);
      row.kmeans_total =
          have_centroid ? group_total(kmeans_centroids[static_cast<std::size_t>(l)], group) : 0.0;
      rows.push_back(row);
    }
  }
  return rows;
}

namespace {

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

void write_nutrient_csv(const std::vector<NutrientRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw MalformedInput("cannot write nutrient report '" + path + "'");
  out << "cluster,entity,value,lb,ub,in_bounds\n";
  for (const auto& row : rows) {
    out << row.cluster << ',' << row.entity << ',' << format_real(row.value) << ','
        << format_real(row.lb) << ',' << format_real(row.ub) << ','
        << (row.in_bounds ? "true" : "false") << '\n';
  }
}

void write_group_csv(const std::vector<GroupRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw MalformedInput("cannot write group report '" + path + "'");
  out << "cluster,group,mlio_total,kmeans_total\n";
  for (const auto& row : rows) {
    out << row.cluster << ',' << row.group << ',' << format_real(row.mlio_total) << ','
        << format_real(row.kmeans_total) << '\n';
  }
}

}  // namespace mlio
