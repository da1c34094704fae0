#include "mlio/engine.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "mlio/errors.hpp"
#include "mlio/solvers.hpp"

namespace mlio {

std::string method_name(Method m) {
  switch (m) {
    case Method::Kmeans: return "kmeans";
    case Method::Io: return "io";
    case Method::Seq: return "seq";
    case Method::Emb: return "emb";
    case Method::Exact: return "exact";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  if (name == "kmeans") return Method::Kmeans;
  if (name == "io") return Method::Io;
  if (name == "seq") return Method::Seq;
  if (name == "emb") return Method::Emb;
  if (name == "exact") return Method::Exact;
  throw MalformedInput("unknown method '" + name + "' (expected kmeans, io, seq, emb or exact)");
}

std::string termination_name(Termination t) {
  switch (t) {
    case Termination::PartitionFixed: return "partition_fixed";
    case Termination::LossFixed: return "loss_fixed";
    case Termination::MaxIter: return "max_iter";
    case Termination::Exhaustive: return "exhaustive";
  }
  return "?";
}

namespace {

Termination parse_termination(const std::string& name) {
  if (name == "partition_fixed") return Termination::PartitionFixed;
  if (name == "loss_fixed") return Termination::LossFixed;
  if (name == "max_iter") return Termination::MaxIter;
  if (name == "exhaustive") return Termination::Exhaustive;
  throw MalformedInput("unknown termination '" + name + "'");
}

// Placeholder for an empty cluster, or any cluster fitted without a feasible
// set: the representative is the metric centroid (the set's witness for an
// empty cluster), with no recovered cost.
ClusterModel centroid_model(const ObservationSet& X, const std::vector<int>& members,
                            const FeasibleSet* set, Metric metric, int rows) {
  ClusterModel model;
  model.members = members;
  if (members.empty())
    model.z = set ? set->witness() : Eigen::VectorXd::Zero(X.dim());
  else
    model.z = metric_centroid(X, members, metric);
  model.cost = Eigen::VectorXd::Zero(X.dim());
  model.y = Eigen::VectorXd::Zero(rows);
  model.face = -1;
  model.perturbations.resize(X.dim(), static_cast<int>(members.size()));
  for (int i = 0; i < static_cast<int>(members.size()); ++i)
    model.perturbations.col(i) = X.point(members[static_cast<std::size_t>(i)]) - model.z;
  model.loss = loss(model.z, X, members, metric);
  model.gap = (set && !members.empty()) ? set->boundary_distance(model.z) : 0.0;
  return model;
}

ClusterModel fit_cluster(const ObservationSet& X, const std::vector<int>& members,
                         const FeasibleSet* set, Metric metric) {
  if (!set || members.empty())
    return centroid_model(X, members, set, metric, set ? set->rows() : 0);
  return io_solve(X, members, *set, metric);
}

// Rebind a model to a possibly different member list, keeping its (c, y, z).
void rebind_members(ClusterModel& model, const ObservationSet& X, const std::vector<int>& members,
                    Metric metric) {
  model.members = members;
  model.perturbations.resize(X.dim(), static_cast<int>(members.size()));
  for (int i = 0; i < static_cast<int>(members.size()); ++i)
    model.perturbations.col(i) = X.point(members[static_cast<std::size_t>(i)]) - model.z;
  model.loss = loss(model.z, X, members, metric);
}

double total_model_loss(const std::vector<ClusterModel>& models) {
  double total = 0.0;
  for (const auto& model : models) total += model.loss;
  return total;
}

}  // namespace

MlioSolution kmeans_solution(const ObservationSet& X, const FeasibleSet* set,
                             const MlioOptions& opts) {
  const KmeansResult km = kmeans(X, opts.clusters, opts.seed, opts.metric, opts.max_iter);
  MlioSolution sol;
  sol.method = Method::Kmeans;
  sol.seed = opts.seed;
  sol.metric = opts.metric;
  sol.partition = km.partition;
  sol.iterations = km.iterations;
  sol.termination = km.converged ? Termination::PartitionFixed : Termination::MaxIter;
  sol.visited = {km.partition.hash()};
  for (int l = 0; l < opts.clusters; ++l)
    sol.models.push_back(
        centroid_model(X, km.partition.members_of(l), set, opts.metric, set ? set->rows() : 0));
  sol.total_loss = total_model_loss(sol.models);
  return sol;
}

MlioSolution io_solution(const ObservationSet& X, const FeasibleSet* set, const MlioOptions& opts) {
  std::vector<int> all(static_cast<std::size_t>(X.count()));
  std::iota(all.begin(), all.end(), 0);
  MlioSolution sol;
  sol.method = Method::Io;
  sol.seed = opts.seed;
  sol.metric = opts.metric;
  sol.partition.assign.assign(static_cast<std::size_t>(X.count()), 0);
  sol.partition.num_clusters = 1;
  sol.models.push_back(fit_cluster(X, all, set, opts.metric));
  sol.total_loss = sol.models[0].loss;
  sol.iterations = 1;
  sol.termination = Termination::PartitionFixed;
  sol.visited = {sol.partition.hash()};
  return sol;
}

MlioSolution seq_mlio(const ObservationSet& X, const FeasibleSet* set, const MlioOptions& opts) {
  const KmeansResult km = kmeans(X, opts.clusters, opts.seed, opts.metric, opts.max_iter);
  MlioSolution sol;
  sol.method = Method::Seq;
  sol.seed = opts.seed;
  sol.metric = opts.metric;
  sol.partition = km.partition;
  sol.iterations = km.iterations;
  sol.termination = km.converged ? Termination::PartitionFixed : Termination::MaxIter;
  sol.visited = {km.partition.hash()};
  for (int l = 0; l < opts.clusters; ++l)
    sol.models.push_back(fit_cluster(X, km.partition.members_of(l), set, opts.metric));
  sol.total_loss = total_model_loss(sol.models);
  return sol;
}

MlioSolution emb_mlio(const ObservationSet& X, const FeasibleSet* set, const MlioOptions& opts,
                      const Partition* init) {
  MlioSolution sol;
  sol.method = Method::Emb;
  sol.seed = opts.seed;
  sol.metric = opts.metric;

  Partition part;
  if (init) {
    if (static_cast<int>(init->assign.size()) != X.count())
      throw DimensionMismatch("emb_mlio: init partition size != observation count");
    for (int label : init->assign) {
      if (label < 0 || label >= opts.clusters)
        throw MalformedInput("emb_mlio: init label " + std::to_string(label) +
                             " outside [0, " + std::to_string(opts.clusters) + ")");
    }
    part = *init;
    part.num_clusters = opts.clusters;
  } else {
    part = kmeans(X, opts.clusters, opts.seed, opts.metric, opts.max_iter).partition;
  }

  double prev_loss = std::numeric_limits<double>::infinity();
  std::vector<ClusterModel> models;
  for (int iter = 1; iter <= opts.max_iter; ++iter) {
    sol.visited.push_back(part.hash());
    sol.iterations = iter;

    models.clear();
    for (int l = 0; l < opts.clusters; ++l)
      models.push_back(fit_cluster(X, part.members_of(l), set, opts.metric));
    const double current_loss = total_model_loss(models);

    // An emptied cluster sits out this reassignment; it gets re-seeded with
    // the worst-served observation before the next round of fits.
    std::vector<int> live;
    for (int l = 0; l < opts.clusters; ++l) {
      if (!models[static_cast<std::size_t>(l)].members.empty()) live.push_back(l);
    }
    Partition next;
    next.num_clusters = opts.clusters;
    next.assign.resize(static_cast<std::size_t>(X.count()));
    for (int k = 0; k < X.count(); ++k) {
      int best = live.front();
      double best_dist =
          point_distance(models[static_cast<std::size_t>(best)].z, X.point(k), opts.metric);
      for (std::size_t i = 1; i < live.size(); ++i) {
        const int l = live[i];
        const double dist =
            point_distance(models[static_cast<std::size_t>(l)].z, X.point(k), opts.metric);
        if (dist < best_dist) {
          best_dist = dist;
          best = l;
        }
      }
      next.assign[static_cast<std::size_t>(k)] = best;
    }
    for (int l = 0; l < opts.clusters; ++l) {
      if (!next.members_of(l).empty()) continue;
      int farthest = -1;
      double worst = -1.0;
      for (int k = 0; k < X.count(); ++k) {
        const int owner = next.assign[static_cast<std::size_t>(k)];
        if (next.members_of(owner).size() <= 1) continue;
        const double dist =
            point_distance(models[static_cast<std::size_t>(owner)].z, X.point(k), opts.metric);
        if (dist > worst) {
          worst = dist;
          farthest = k;
        }
      }
      if (farthest >= 0) next.assign[static_cast<std::size_t>(farthest)] = l;
    }

    if (next == part) {
      sol.termination = Termination::PartitionFixed;
      sol.partition = part;
      sol.models = models;
      sol.total_loss = current_loss;
      return sol;
    }
    if (std::abs(current_loss - prev_loss) <= 1e-10) {
      sol.termination = Termination::LossFixed;
      sol.partition = next;
      for (int l = 0; l < opts.clusters; ++l)
        rebind_members(models[static_cast<std::size_t>(l)], X, next.members_of(l), opts.metric);
      sol.models = models;
      sol.total_loss = total_model_loss(models);
      return sol;
    }
    prev_loss = current_loss;
    part = next;
  }

  sol.termination = Termination::MaxIter;
  sol.partition = part;
  for (int l = 0; l < opts.clusters; ++l)
    rebind_members(models[static_cast<std::size_t>(l)], X, part.members_of(l), opts.metric);
  sol.models = models;
  sol.total_loss = total_model_loss(models);
  return sol;
}

namespace {

// Count restricted growth strings over K items with at most L blocks
// (partitions counted once per labeling class).
double partition_count(int K, int L) {
  // Stirling numbers of the second kind, summed over block counts 1..L.
  std::vector<std::vector<double>> S(static_cast<std::size_t>(K + 1),
                                     std::vector<double>(static_cast<std::size_t>(L + 1), 0.0));
  S[0][0] = 1.0;
  for (int k = 1; k <= K; ++k) {
    for (int l = 1; l <= L; ++l) {
      S[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)] =
          S[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(l - 1)] +
          l * S[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(l)];
      if (S[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)] > 1e18) return 1e18;
    }
  }
  double total = 0.0;
  for (int l = 1; l <= L; ++l) total += S[static_cast<std::size_t>(K)][static_cast<std::size_t>(l)];
  return total;
}

}  // namespace

MlioSolution exact_mlio(const ObservationSet& X, const FeasibleSet* set, const MlioOptions& opts) {
  const int K = X.count();
  const int L = opts.clusters;
  if (K > 62) throw InstanceTooLarge("exact method supports at most 62 observations");
  const double count = partition_count(K, L);
  if (count > 1e6)
    throw InstanceTooLarge("exact method would enumerate " + std::to_string(count) +
                           " partitions (limit 1e6)");

  // Memoized per-subset fits keyed by member bitmask.
  std::unordered_map<std::uint64_t, double> subset_loss;
  const auto block_loss = [&](std::uint64_t mask, const std::vector<int>& members) {
    const auto it = subset_loss.find(mask);
    if (it != subset_loss.end()) return it->second;
    const double value = fit_cluster(X, members, set, opts.metric).loss;
    subset_loss.emplace(mask, value);
    return value;
  };

  std::vector<int> assign(static_cast<std::size_t>(K), 0);
  std::vector<int> best_assign;
  double best_loss = std::numeric_limits<double>::infinity();
  long scanned = 0;

  // Depth-first over restricted growth strings: label[k] <= 1 + max(previous
  // labels), labels < L.  Enumeration order is lexicographic, so the first
  // optimum found is the lexicographically smallest one.
  std::vector<std::uint64_t> masks(static_cast<std::size_t>(L), 0);
  const std::function<void(int, int)> rec = [&](int k, int used) {
    if (k == K) {
      ++scanned;
      double total = 0.0;
      for (int l = 0; l < used; ++l) {
        std::vector<int> members;
        for (int i = 0; i < K; ++i) {
          if (assign[static_cast<std::size_t>(i)] == l) members.push_back(i);
        }
        total += block_loss(masks[static_cast<std::size_t>(l)], members);
        if (total >= best_loss) break;
      }
      if (total < best_loss) {
        best_loss = total;
        best_assign = assign;
      }
      return;
    }
    const int limit = std::min(L - 1, used);
    for (int l = 0; l <= limit; ++l) {
      assign[static_cast<std::size_t>(k)] = l;
      masks[static_cast<std::size_t>(l)] |= (1ULL << k);
      rec(k + 1, std::max(used, l + 1));
      masks[static_cast<std::size_t>(l)] &= ~(1ULL << k);
    }
  };
  rec(0, 0);

  MlioSolution sol;
  sol.method = Method::Exact;
  sol.seed = opts.seed;
  sol.metric = opts.metric;
  sol.partition.assign = best_assign;
  sol.partition.num_clusters = L;
  for (int l = 0; l < L; ++l)
    sol.models.push_back(fit_cluster(X, sol.partition.members_of(l), set, opts.metric));
  sol.total_loss = total_model_loss(sol.models);
  sol.iterations = static_cast<int>(scanned);
  sol.termination = Termination::Exhaustive;
  sol.visited = {sol.partition.hash()};
  return sol;
}

MlioSolution fit(const ObservationSet& X, const FeasibleSet* set, Method method,
                 const MlioOptions& opts) {
  if (opts.clusters < 1) throw MalformedInput("cluster count must be >= 1");
  if (opts.clusters > X.count())
    throw MalformedInput("cluster count " + std::to_string(opts.clusters) +
                         " exceeds observation count " + std::to_string(X.count()));
  switch (method) {
    case Method::Kmeans: return kmeans_solution(X, set, opts);
    case Method::Io: return io_solution(X, set, opts);
    case Method::Seq: return seq_mlio(X, set, opts);
    case Method::Emb: return emb_mlio(X, set, opts);
    case Method::Exact: return exact_mlio(X, set, opts);
  }
  throw MalformedInput("unhandled method");
}

PartialOptimalityReport verify_partial_optimal(const MlioSolution& sol, const ObservationSet& X,
                                               const FeasibleSet* set, double tol) {
  PartialOptimalityReport report;
  std::ostringstream witness;

  // Condition (i): with representatives fixed, no single observation prefers
  // another cluster's representative.
  for (int k = 0; k < X.count() && report.reassignment_stable; ++k) {
    const int owner = sol.partition.assign[static_cast<std::size_t>(k)];
    const double own_dist =
        point_distance(sol.models[static_cast<std::size_t>(owner)].z, X.point(k), sol.metric);
    for (int l = 0; l < sol.partition.num_clusters; ++l) {
      if (l == owner || sol.models[static_cast<std::size_t>(l)].members.empty()) continue;
      const double dist =
          point_distance(sol.models[static_cast<std::size_t>(l)].z, X.point(k), sol.metric);
      if (dist < own_dist - tol) {
        report.reassignment_stable = false;
        witness << "observation " << k << " prefers cluster " << l << " (" << dist << " < "
                << own_dist << ")";
        break;
      }
    }
  }

  // Condition (ii): with the partition fixed, no per-cluster refit improves.
  const bool io_family = set != nullptr && sol.method != Method::Kmeans;
  for (int l = 0; l < sol.partition.num_clusters && report.refit_stable; ++l) {
    const ClusterModel& model = sol.models[static_cast<std::size_t>(l)];
    if (model.members.empty()) continue;
    const ClusterModel refit = io_family
                                   ? io_solve(X, model.members, *set, sol.metric)
                                   : centroid_model(X, model.members, set, sol.metric,
                                                    set ? set->rows() : 0);
    if (refit.loss < model.loss - tol) {
      report.refit_stable = false;
      if (witness.tellp() > 0) witness << "; ";
      witness << "cluster " << l << " refit improves " << model.loss << " -> " << refit.loss;
    }
  }

  report.witness = witness.str();
  return report;
}

std::vector<double> optimality_gap(const MlioSolution& sol, const FeasibleSet& set) {
  std::vector<double> gaps;
  gaps.reserve(sol.models.size());
  for (const auto& model : sol.models)
    gaps.push_back(model.members.empty() ? 0.0 : set.boundary_distance(model.z));
  return gaps;
}

double evaluate_holdout(const MlioSolution& sol, const ObservationSet& test, Metric metric) {
  if (test.count() == 0) return std::numeric_limits<double>::quiet_NaN();
  double total = 0.0;
  for (int k = 0; k < test.count(); ++k) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& model : sol.models) {
      if (model.members.empty()) continue;
      best = std::min(best, point_distance(model.z, test.point(k), metric));
    }
    total += best;
  }
  return total / test.count();
}

std::vector<SweepRow> sweep(const ObservationSet& train, const ObservationSet* test,
                            const FeasibleSet* set, int clusters_lo, int clusters_hi,
                            const MlioOptions& base, const std::vector<Method>& methods) {
  if (clusters_lo < 1 || clusters_hi < clusters_lo)
    throw MalformedInput("cluster range must satisfy 1 <= lo <= hi");
  std::vector<SweepRow> rows;
  for (int L = clusters_lo; L <= clusters_hi; ++L) {
    for (Method method : methods) {
      MlioOptions opts = base;
      opts.clusters = L;
      const MlioSolution sol = fit(train, set, method, opts);
      SweepRow row;
      row.clusters = L;
      row.method = method;
      row.train_total = sol.total_loss;
      row.train_avg = sol.total_loss / train.count();
      row.test_avg = test ? evaluate_holdout(sol, *test, base.metric)
                          : std::numeric_limits<double>::quiet_NaN();
      if (set) {
        const std::vector<double> gaps = optimality_gap(sol, *set);
        row.gap_sum = std::accumulate(gaps.begin(), gaps.end(), 0.0);
      }
      row.iterations = sol.iterations;
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

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw MalformedInput("cannot write sweep file '" + path + "'");
  out << "clusters,method,train_total,train_avg,test_avg,gap_sum,iterations\n";
  for (const auto& row : rows) {
    out << row.clusters << ',' << method_name(row.method) << ',' << format_real(row.train_total)
        << ',' << format_real(row.train_avg) << ',' << format_real(row.test_avg) << ','
        << format_real(row.gap_sum) << ',' << row.iterations << '\n';
  }
}

nlohmann::ordered_json solution_to_json(const MlioSolution& sol, const ObservationSet& X) {
  nlohmann::ordered_json doc;
  doc["method"] = method_name(sol.method);
  doc["seed"] = sol.seed;
  doc["metric"] = metric_name(sol.metric);
  doc["L"] = sol.partition.num_clusters;
  doc["total_loss"] = sol.total_loss;
  doc["iterations"] = sol.iterations;
  doc["termination"] = termination_name(sol.termination);
  nlohmann::ordered_json clusters = nlohmann::ordered_json::array();
  for (const auto& model : sol.models) {
    nlohmann::ordered_json entry;
    nlohmann::ordered_json members = nlohmann::ordered_json::array();
    for (int k : model.members) members.push_back(X.ids[static_cast<std::size_t>(k)]);
    entry["members"] = members;
    entry["cost_vector"] = std::vector<double>(model.cost.data(), model.cost.data() + model.cost.size());
    entry["representative"] = std::vector<double>(model.z.data(), model.z.data() + model.z.size());
    if (model.face >= 0)
      entry["face"] = model.face;
    else
      entry["face"] = nullptr;
    entry["loss"] = model.loss;
    entry["gap"] = model.gap;
    clusters.push_back(entry);
  }
  doc["clusters"] = clusters;
  return doc;
}

void save_solution(const MlioSolution& sol, const ObservationSet& X, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw MalformedInput("cannot write solution file '" + path + "'");
  out << solution_to_json(sol, X).dump(2) << "\n";
}

LoadedSolution solution_from_json(const nlohmann::json& doc, const ObservationSet& X) {
  LoadedSolution loaded;
  MlioSolution& sol = loaded.sol;

  std::unordered_map<std::string, int> index_of;
  for (int k = 0; k < X.count(); ++k) index_of.emplace(X.ids[static_cast<std::size_t>(k)], k);
  std::vector<char> claimed(static_cast<std::size_t>(X.count()), 0);

  try {
    sol.method = parse_method(doc.at("method").get<std::string>());
    sol.seed = doc.at("seed").get<std::uint64_t>();
    sol.metric = parse_metric(doc.at("metric").get<std::string>());
    sol.total_loss = doc.at("total_loss").get<double>();
    sol.iterations = doc.at("iterations").get<int>();
    sol.termination = parse_termination(doc.at("termination").get<std::string>());
    sol.partition.num_clusters = doc.at("L").get<int>();
    sol.partition.assign.assign(static_cast<std::size_t>(X.count()), -1);

    int cluster = 0;
    for (const auto& entry : doc.at("clusters")) {
      ClusterModel model;
      for (const auto& id : entry.at("members").get<std::vector<std::string>>()) {
        const auto it = index_of.find(id);
        if (it == index_of.end()) {
          loaded.unknown_ids.push_back(id);
          continue;
        }
        if (claimed[static_cast<std::size_t>(it->second)]) {
          loaded.duplicate_ids.push_back(id);
          continue;
        }
        claimed[static_cast<std::size_t>(it->second)] = 1;
        model.members.push_back(it->second);
        sol.partition.assign[static_cast<std::size_t>(it->second)] = cluster;
      }
      const std::vector<double> cost = entry.at("cost_vector").get<std::vector<double>>();
      model.cost = Eigen::Map<const Eigen::VectorXd>(cost.data(), static_cast<int>(cost.size()));
      const std::vector<double> rep = entry.at("representative").get<std::vector<double>>();
      model.z = Eigen::Map<const Eigen::VectorXd>(rep.data(), static_cast<int>(rep.size()));
      model.face = entry.at("face").is_null() ? -1 : entry.at("face").get<int>();
      model.loss = entry.at("loss").get<double>();
      model.gap = entry.at("gap").get<double>();
      model.y = Eigen::VectorXd();
      model.perturbations.resize(X.dim(), static_cast<int>(model.members.size()));
      for (int i = 0; i < static_cast<int>(model.members.size()); ++i)
        model.perturbations.col(i) = X.point(model.members[static_cast<std::size_t>(i)]) - model.z;
      sol.models.push_back(std::move(model));
      ++cluster;
    }
    if (sol.partition.num_clusters != static_cast<int>(sol.models.size()))
      throw MalformedInput("solution file: L != number of cluster entries");
  } catch (const nlohmann::json::exception& e) {
    throw MalformedInput(std::string("solution file: ") + e.what());
  }

  for (int k = 0; k < X.count(); ++k) {
    if (!claimed[static_cast<std::size_t>(k)])
      loaded.uncovered_ids.push_back(X.ids[static_cast<std::size_t>(k)]);
  }
  return loaded;
}

LoadedSolution load_solution(const std::string& path, const ObservationSet& X) {
  std::ifstream in(path);
  if (!in) throw MalformedInput("cannot open solution file '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw MalformedInput("solution file '" + path + "': " + e.what());
  }
  return solution_from_json(doc, X);
}

}  // namespace mlio
