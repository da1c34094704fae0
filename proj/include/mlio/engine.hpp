#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "mlio/clustering.hpp"
#include "mlio/inverse.hpp"

namespace mlio {

enum class Method { Kmeans, Io, Seq, Emb, Exact };
enum class Termination { PartitionFixed, LossFixed, MaxIter, Exhaustive };

std::string method_name(Method m);
Method parse_method(const std::string& name);
std::string termination_name(Termination t);

struct MlioOptions {
  int clusters = 1;
  std::uint64_t seed = 42;
  Metric metric = Metric::SquaredEuclidean;
  int max_iter = 500;
};

// A fitted multi-cluster model: the partition, one ClusterModel per cluster,
// and bookkeeping about how the fit terminated.  `visited` records the hash
// of each partition the alternating method moved through, in order.
struct MlioSolution {
  Method method = Method::Seq;
  std::uint64_t seed = 0;
  Metric metric = Metric::SquaredEuclidean;
  Partition partition;
  std::vector<ClusterModel> models;
  double total_loss = 0.0;
  int iterations = 0;
  Termination termination = Termination::PartitionFixed;
  std::vector<std::uint64_t> visited;
};

// The feasible set is passed by pointer throughout: null drops the structural
// constraints entirely, in which case each representative degrades to the
// metric centroid of its cluster and cost vectors are reported as zero.

// Baseline: plain k-means packaged as a solution (no utility recovery).
MlioSolution kmeans_solution(const ObservationSet& X, const FeasibleSet* set,
                             const MlioOptions& opts);

// Single-cluster inverse fit.
MlioSolution io_solution(const ObservationSet& X, const FeasibleSet* set, const MlioOptions& opts);

// Two-stage fit: k-means partition first, then one inverse fit per cluster.
MlioSolution seq_mlio(const ObservationSet& X, const FeasibleSet* set, const MlioOptions& opts);

// Alternating fit: per-cluster inverse solves, then reassignment of each
// observation to its nearest representative, repeated until the partition or
// the total loss stops changing.  Starts from `init` when given, otherwise
// from the k-means partition for the same seed, which makes the first pass
// coincide with the two-stage fit.
MlioSolution emb_mlio(const ObservationSet& X, const FeasibleSet* set, const MlioOptions& opts,
                      const Partition* init = nullptr);

// Exhaustive optimum over all partitions into at most `clusters` clusters,
// enumerated as restricted growth strings so label permutations are counted
// once.  Guarded by InstanceTooLarge above ~1e6 partitions.  Ties pick the
// lexicographically smallest assignment.
MlioSolution exact_mlio(const ObservationSet& X, const FeasibleSet* set, const MlioOptions& opts);

MlioSolution fit(const ObservationSet& X, const FeasibleSet* set, Method method,
                 const MlioOptions& opts);

// Partial-optimality check: (i) no single-observation reassignment to another
// cluster's representative lowers the loss; (ii) no per-cluster refit lowers
// the loss with the partition held fixed.  The witness strings describe the
// first violation found.
struct PartialOptimalityReport {
  bool reassignment_stable = true;
  bool refit_stable = true;
  std::string witness;
  bool holds() const { return reassignment_stable && refit_stable; }
};

PartialOptimalityReport verify_partial_optimal(const MlioSolution& sol, const ObservationSet& X,
                                               const FeasibleSet* set, double tol = 1e-9);

// Distance from each representative to the boundary of the feasible set;
// zero certifies the representative sits on an optimal face.
std::vector<double> optimality_gap(const MlioSolution& sol, const FeasibleSet& set);

struct SweepRow {
  int clusters = 0;
  Method method = Method::Seq;
  double train_total = 0.0;
  double train_avg = 0.0;
  double test_avg = 0.0;  // NaN when no test split
  double gap_sum = 0.0;
  int iterations = 0;
};

std::vector<SweepRow> sweep(const ObservationSet& train, const ObservationSet* test,
                            const FeasibleSet* set, int clusters_lo, int clusters_hi,
                            const MlioOptions& base, const std::vector<Method>& methods);

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path);

// Average distance from held-out observations to their nearest representative.
double evaluate_holdout(const MlioSolution& sol, const ObservationSet& test, Metric metric);

nlohmann::ordered_json solution_to_json(const MlioSolution& sol, const ObservationSet& X);
void save_solution(const MlioSolution& sol, const ObservationSet& X, const std::string& path);

// A solution read back from disk, with cluster member ids resolved against an
// observation set.  Resolution problems are recorded rather than thrown, so a
// validator can report them as findings.
struct LoadedSolution {
  MlioSolution sol;
  std::vector<std::string> unknown_ids;    // claimed by the file, absent from X
  std::vector<std::string> duplicate_ids;  // claimed by more than one cluster
  std::vector<std::string> uncovered_ids;  // present in X, claimed by none
};

LoadedSolution solution_from_json(const nlohmann::json& doc, const ObservationSet& X);
LoadedSolution load_solution(const std::string& path, const ObservationSet& X);

}  // namespace mlio
