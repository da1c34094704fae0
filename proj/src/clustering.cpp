#include "mlio/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "mlio/errors.hpp"
#include "mlio/rng.hpp"

namespace mlio {

ObservationSet ObservationSet::subset(const std::vector<int>& indices) const {
  ObservationSet out;
  out.points.resize(dim(), static_cast<int>(indices.size()));
  out.ids.reserve(indices.size());
  for (int i = 0; i < static_cast<int>(indices.size()); ++i) {
    out.points.col(i) = points.col(indices[static_cast<std::size_t>(i)]);
    out.ids.push_back(ids[static_cast<std::size_t>(indices[static_cast<std::size_t>(i)])]);
  }
  out.var_names = var_names;
  return out;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

ObservationSet load_observations(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MalformedInput("cannot open observations file '" + path + "'");

  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) throw MalformedCsv(1, "missing header");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header = split_csv_line(line);
  if (header.size() < 2 || header[0] != "id")
    throw MalformedCsv(1, "header must be 'id,<var1>,...'");

  ObservationSet out;
  out.var_names.assign(header.begin() + 1, header.end());
  const int n = static_cast<int>(out.var_names.size());

  std::vector<Eigen::VectorXd> rows;
  std::set<std::string> seen_ids;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (static_cast<int>(fields.size()) != n + 1)
      throw MalformedCsv(line_no, "expected " + std::to_string(n + 1) + " fields, got " +
                                      std::to_string(fields.size()));
    if (!seen_ids.insert(fields[0]).second)
      throw MalformedCsv(line_no, "duplicate id '" + fields[0] + "'");
    Eigen::VectorXd x(n);
    for (int j = 0; j < n; ++j) {
      try {
        std::size_t used = 0;
        x(j) = std::stod(fields[static_cast<std::size_t>(j + 1)], &used);
        if (used != fields[static_cast<std::size_t>(j + 1)].size())
          throw std::invalid_argument("trailing characters");
      } catch (const std::exception&) {
        throw MalformedCsv(line_no, "bad numeric value '" + fields[static_cast<std::size_t>(j + 1)] +
                                        "'");
      }
      if (!std::isfinite(x(j))) throw MalformedCsv(line_no, "non-finite value");
    }
    out.ids.push_back(fields[0]);
    rows.push_back(std::move(x));
  }
  if (rows.empty()) throw MalformedCsv(line_no, "no observations");

  out.points.resize(n, static_cast<int>(rows.size()));
  for (int k = 0; k < static_cast<int>(rows.size()); ++k)
    out.points.col(k) = rows[static_cast<std::size_t>(k)];
  return out;
}

void save_observations(const ObservationSet& X, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw MalformedInput("cannot write observations file '" + path + "'");
  out << "id";
  for (const auto& name : X.var_names) out << ',' << name;
  out << '\n';
  char buf[64];
  for (int k = 0; k < X.count(); ++k) {
    out << X.ids[static_cast<std::size_t>(k)];
    for (int j = 0; j < X.dim(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", X.points(j, k));
      out << ',' << buf;
    }
    out << '\n';
  }
}

std::vector<int> Partition::members_of(int cluster) const {
  std::vector<int> members;
  for (int k = 0; k < static_cast<int>(assign.size()); ++k) {
    if (assign[static_cast<std::size_t>(k)] == cluster) members.push_back(k);
  }
  return members;
}

std::vector<std::vector<int>> Partition::all_members() const {
  std::vector<std::vector<int>> members(static_cast<std::size_t>(num_clusters));
  for (int k = 0; k < static_cast<int>(assign.size()); ++k)
    members[static_cast<std::size_t>(assign[static_cast<std::size_t>(k)])].push_back(k);
  return members;
}

std::uint64_t Partition::hash() const {
  // FNV-1a over the label sequence.
  std::uint64_t h = 1469598103934665603ULL;
  for (int label : assign) {
    h ^= static_cast<std::uint64_t>(label) + 1;
    h *= 1099511628211ULL;
  }
  return h;
}

int nearest_center(const Eigen::VectorXd& x, const std::vector<Eigen::VectorXd>& centers,
                   Metric metric) {
  if (centers.empty()) throw MalformedInput("nearest_center: no centers");
  int best = 0;
  double best_dist = point_distance(centers[0], x, metric);
  for (int l = 1; l < static_cast<int>(centers.size()); ++l) {
    const double dist = point_distance(centers[static_cast<std::size_t>(l)], x, metric);
    if (dist < best_dist) {
      best_dist = dist;
      best = l;
    }
  }
  return best;
}

Partition assign_to_centers(const ObservationSet& X, const std::vector<Eigen::VectorXd>& centers,
                            Metric metric) {
  Partition part;
  part.num_clusters = static_cast<int>(centers.size());
  part.assign.resize(static_cast<std::size_t>(X.count()));
  for (int k = 0; k < X.count(); ++k)
    part.assign[static_cast<std::size_t>(k)] = nearest_center(X.point(k), centers, metric);
  return part;
}

Eigen::VectorXd metric_centroid(const ObservationSet& X, const std::vector<int>& members,
                                Metric metric) {
  if (members.empty()) return Eigen::VectorXd::Zero(X.dim());
  if (metric == Metric::SquaredEuclidean) {
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(X.dim());
    for (int k : members) mean += X.point(k);
    return mean / static_cast<double>(members.size());
  }
  Eigen::VectorXd median(X.dim());
  std::vector<double> vals(members.size());
  for (int j = 0; j < X.dim(); ++j) {
    for (std::size_t i = 0; i < members.size(); ++i) vals[i] = X.points(j, members[i]);
    std::sort(vals.begin(), vals.end());
    const std::size_t mid = vals.size() / 2;
    median(j) = (vals.size() % 2 == 1) ? vals[mid] : 0.5 * (vals[mid - 1] + vals[mid]);
  }
  return median;
}

std::vector<int> kmeans_plus_plus_seed(const ObservationSet& X, int L, std::uint64_t seed,
                                       Metric metric) {
  if (L < 1) throw MalformedInput("kmeans seeding needs L >= 1");
  Rng rng(seed);
  const int K = X.count();
  std::vector<int> chosen;
  chosen.push_back(static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(K))));
  std::vector<double> weights(static_cast<std::size_t>(K));
  while (static_cast<int>(chosen.size()) < std::min(L, K)) {
    for (int k = 0; k < K; ++k) {
      double nearest = std::numeric_limits<double>::infinity();
      for (int c : chosen)
        nearest = std::min(nearest, point_distance(X.point(c), X.point(k), metric));
      // "D squared" in the active metric; the squared-Euclidean metric is
      // already a squared distance.
      weights[static_cast<std::size_t>(k)] =
          metric == Metric::SquaredEuclidean ? nearest : nearest * nearest;
    }
    chosen.push_back(static_cast<int>(rng.pick_weighted(weights)));
  }
  return chosen;
}

KmeansResult kmeans(const ObservationSet& X, int L, std::uint64_t seed, Metric metric,
                    int max_iter) {
  if (L < 1) throw MalformedInput("kmeans needs L >= 1");
  if (max_iter < 1) throw MalformedInput("kmeans needs max_iter >= 1");

  const std::vector<int> seeds = kmeans_plus_plus_seed(X, L, seed, metric);
  std::vector<Eigen::VectorXd> centers;
  centers.reserve(static_cast<std::size_t>(L));
  for (int idx : seeds) centers.push_back(X.point(idx));
  while (static_cast<int>(centers.size()) < L) centers.push_back(centers.back());

  KmeansResult result;
  Partition prev;
  for (int iter = 1; iter <= max_iter; ++iter) {
    Partition part = assign_to_centers(X, centers, metric);

    // Re-seed any emptied cluster with the observation currently served
    // worst, stealing at most one observation per empty cluster.
    std::vector<char> stolen(static_cast<std::size_t>(X.count()), 0);
    for (int l = 0; l < L; ++l) {
      if (!part.members_of(l).empty()) continue;
      int farthest = -1;
      double worst = -1.0;
      for (int k = 0; k < X.count(); ++k) {
        if (stolen[static_cast<std::size_t>(k)]) continue;
        const int owner = part.assign[static_cast<std::size_t>(k)];
        if (part.members_of(owner).size() <= 1) continue;
        const double dist =
            point_distance(centers[static_cast<std::size_t>(owner)], X.point(k), metric);
        if (dist > worst) {
          worst = dist;
          farthest = k;
        }
      }
      if (farthest < 0) continue;
      part.assign[static_cast<std::size_t>(farthest)] = l;
      stolen[static_cast<std::size_t>(farthest)] = 1;
      centers[static_cast<std::size_t>(l)] = X.point(farthest);
    }

    result.iterations = iter;
    if (iter > 1 && part == prev) {
      result.converged = true;
      result.partition = part;
      break;
    }
    prev = part;
    result.partition = part;
    for (int l = 0; l < L; ++l) {
      const std::vector<int> members = part.members_of(l);
      if (!members.empty()) centers[static_cast<std::size_t>(l)] = metric_centroid(X, members, metric);
    }
  }

  result.centroids = centers;
  result.total_loss = 0.0;
  for (int k = 0; k < X.count(); ++k) {
    const int l = result.partition.assign[static_cast<std::size_t>(k)];
    result.total_loss += point_distance(centers[static_cast<std::size_t>(l)], X.point(k), metric);
  }
  return result;
}

}  // namespace mlio
