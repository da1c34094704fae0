// Acceptance gate: one line per criterion, nonzero exit if any fails.
// Each criterion pins its own tolerances and (where stated) a wall-clock
// budget, so a run documents exactly what was demonstrated.

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mlio/clustering.hpp"
#include "mlio/diet.hpp"
#include "mlio/engine.hpp"
#include "mlio/inverse.hpp"
#include "mlio/polytope.hpp"
#include "mlio/rng.hpp"
#include "mlio/solvers.hpp"
#include "mlio/synthetic.hpp"

using namespace mlio;

namespace {

class Checker {
 public:
  void require(bool condition, const std::string& what) {
    if (!condition) {
      ++failures_;
      if (first_.empty()) first_ = what;
    }
  }
  bool ok() const { return failures_ == 0; }
  const std::string& first_failure() const { return first_; }

 private:
  int failures_ = 0;
  std::string first_;
};

struct EmbRun {
  MlioSolution sol;
  ObservationSet X;
};

std::vector<EmbRun> g_emb_runs;  // accumulated by criteria 2 and 4, audited by 5

ObservationSet first_n(const ObservationSet& X, int n) {
  std::vector<int> indices(static_cast<std::size_t>(n));
  std::iota(indices.begin(), indices.end(), 0);
  return X.subset(indices);
}

// Random bounded 2-D polytope: an axis box with a random cut through the
// middle, so every instance keeps a nonempty interior.
FeasibleSet random_polytope_2d(Rng& rng) {
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
  return FeasibleSet(A, b);
}

ObservationSet random_points_2d(Rng& rng, int count, double w, double h) {
  ObservationSet X;
  X.var_names = {"x1", "x2"};
  X.points.resize(2, count);
  for (int k = 0; k < count; ++k) {
    X.points(0, k) = rng.uniform(-1, w + 1);
    X.points(1, k) = rng.uniform(-1, h + 1);
    X.ids.push_back("p" + std::to_string(k + 1));
  }
  return X;
}

double grid_min_loss(const FeasibleSet& set, const ObservationSet& X, Metric metric,
                     double step) {
  std::vector<int> members(static_cast<std::size_t>(X.count()));
  std::iota(members.begin(), members.end(), 0);
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
    const Eigen::VectorXd b2 = hi.x;
    const Eigen::VectorXd d = b2 - a;
    const double len = d.norm();
    const int n_steps = std::max(1, static_cast<int>(std::ceil(len / step)));
    std::vector<double> params;
    for (int s = 0; s <= n_steps; ++s) params.push_back(static_cast<double>(s) / n_steps);
    if (len > 0) {
      // Refine at the candidate extrema of the segment loss: the mean
      // projection for squared error, the per-coordinate kinks for l1.
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

bool cost_matches_some_face(const Eigen::VectorXd& cost, const FeasibleSet& set, double tol) {
  if (std::abs(cost.lpNorm<1>() - 1.0) > tol) return false;
  for (int j = 0; j < set.rows(); ++j) {
    const Eigen::VectorXd expected = -set.A().row(j).transpose() / set.A().row(j).lpNorm<1>();
    if ((cost - expected).lpNorm<Eigen::Infinity>() <= tol) return true;
  }
  return false;
}

// --- criteria -------------------------------------------------------------

void criterion_reductions(Checker& check) {
  const ObservationSet X = gen2d_observations(40, 42);
  MlioOptions opts;
  opts.clusters = 3;
  opts.seed = 42;

  const MlioSolution km = kmeans_solution(X, nullptr, opts);
  const MlioSolution emb = emb_mlio(X, nullptr, opts);
  check.require(emb.partition == km.partition, "unconstrained emb partition != kmeans partition");
  for (std::size_t l = 0; l < km.models.size(); ++l) {
    check.require((emb.models[l].z - km.models[l].z).norm() == 0.0,
                  "unconstrained emb representative != kmeans centroid");
  }

  const FeasibleSet set = demo2d_polytope();
  MlioOptions one;
  one.clusters = 1;
  one.seed = 42;
  const MlioSolution io = io_solution(X, &set, one);
  for (const Method method : {Method::Seq, Method::Emb, Method::Exact}) {
    const MlioSolution sol = fit(X, &set, method, one);
    check.require(std::abs(sol.total_loss - io.total_loss) <= 1e-10,
                  "L=1 " + method_name(method) + " loss != io loss");
  }
}

void criterion_emb_beats_seq(Checker& check) {
  const FeasibleSet set = demo2d_polytope();
  for (int i = 0; i < 200; ++i) {
    const std::uint64_t seed = 1000 + static_cast<std::uint64_t>(i);
    Rng rng(seed);
    const int K = 20 + static_cast<int>(rng.uniform_int(61));
    const ObservationSet X = gen2d_observations(K, seed);
    MlioOptions opts;
    opts.clusters = 2 + (i % 2);
    opts.seed = seed;
    const MlioSolution seq = seq_mlio(X, &set, opts);
    const MlioSolution emb = emb_mlio(X, &set, opts);
    check.require(emb.total_loss <= seq.total_loss + 1e-9,
                  "instance " + std::to_string(i) + ": emb loss exceeds seq loss");
    g_emb_runs.push_back({emb, X});
  }
}

void criterion_partial_optimality(Checker& check) {
  const FeasibleSet set = demo2d_polytope();
  int verified = 0;
  for (const EmbRun& run : g_emb_runs) {
    if (run.sol.method != Method::Emb) continue;
    if (run.sol.termination == Termination::MaxIter) continue;
    const PartialOptimalityReport report = verify_partial_optimal(run.sol, run.X, &set);
    check.require(report.holds(), "partial optimality violated: " + report.witness);
    ++verified;
  }
  check.require(verified > 0, "no emb runs available to verify");
}

void criterion_exact_sandwich(Checker& check) {
  const FeasibleSet set = demo2d_polytope();
  for (int i = 0; i < 100; ++i) {
    const std::uint64_t seed = 5000 + static_cast<std::uint64_t>(i);
    const ObservationSet X = gen2d_observations(8, seed);
    MlioOptions opts;
    opts.clusters = 2 + (i % 2);
    opts.seed = seed;
    const MlioSolution exact = exact_mlio(X, &set, opts);
    const MlioSolution emb = emb_mlio(X, &set, opts);
    const MlioSolution seq = seq_mlio(X, &set, opts);
    check.require(exact.total_loss <= emb.total_loss + 1e-9,
                  "instance " + std::to_string(i) + ": exact loss exceeds emb loss");
    check.require(emb.total_loss <= seq.total_loss + 1e-9,
                  "instance " + std::to_string(i) + ": emb loss exceeds seq loss");
    for (const auto& model : exact.models) {
      if (model.members.empty()) continue;
      const ClusterModel refit = io_solve(X, model.members, set, opts.metric);
      check.require(std::abs(refit.loss - model.loss) <= 1e-9,
                    "instance " + std::to_string(i) + ": exact cluster refit moved its loss");
    }
    g_emb_runs.push_back({emb, X});
  }
}

void criterion_hash_log(Checker& check) {
  check.require(!g_emb_runs.empty(), "no emb runs recorded");
  for (std::size_t i = 0; i < g_emb_runs.size(); ++i) {
    const MlioSolution& sol = g_emb_runs[i].sol;
    const std::set<std::uint64_t> unique(sol.visited.begin(), sol.visited.end());
    check.require(unique.size() == sol.visited.size(),
                  "run " + std::to_string(i) + " revisited a partition");
    check.require(sol.iterations <= 50,
                  "run " + std::to_string(i) + " took " + std::to_string(sol.iterations) +
                      " iterations");
    check.require(static_cast<int>(sol.visited.size()) == sol.iterations,
                  "run " + std::to_string(i) + " hash log length != iterations");
  }
}

void criterion_planar_experiment(Checker& check) {
  const FeasibleSet set = demo2d_polytope();
  const ObservationSet X = gen2d_observations(80, 42);
  MlioOptions opts;
  opts.clusters = 3;
  opts.seed = 42;

  const MlioSolution km = kmeans_solution(X, &set, opts);
  const MlioSolution seq = seq_mlio(X, &set, opts);
  const MlioSolution emb = emb_mlio(X, &set, opts);
  const MlioSolution exact_sub = exact_mlio(first_n(X, 12), &set, opts);

  for (const MlioSolution* sol : {&seq, &emb, &exact_sub}) {
    for (double gap : optimality_gap(*sol, set)) {
      check.require(gap <= 1e-8, method_name(sol->method) + " representative off the boundary");
    }
  }
  bool kmeans_interior = false;
  for (double gap : optimality_gap(km, set)) kmeans_interior = kmeans_interior || gap > 0.0;
  check.require(kmeans_interior, "no kmeans centroid had a positive gap");

  check.require(km.total_loss <= emb.total_loss + 1e-9, "kmeans loss exceeds emb loss");
  check.require(emb.total_loss <= seq.total_loss + 1e-9, "emb loss exceeds seq loss");

  for (const MlioSolution* sol : {&seq, &emb, &exact_sub}) {
    for (const auto& model : sol->models) {
      if (model.members.empty()) continue;
      check.require(cost_matches_some_face(model.cost, set, 1e-8),
                    method_name(sol->method) + " cost vector matches no face");
    }
  }
}

void criterion_io_oracle(Checker& check) {
  for (int i = 0; i < 50; ++i) {
    Rng rng(9000 + static_cast<std::uint64_t>(i));
    const FeasibleSet set = random_polytope_2d(rng);
    const ObservationSet X = random_points_2d(rng, 2 + static_cast<int>(rng.uniform_int(6)),
                                              -set.b()(1), -set.b()(3));
    const Metric metric = i % 2 == 0 ? Metric::SquaredEuclidean : Metric::L1;
    const ClusterModel model = io_solve(X, set, metric);
    const double ref = grid_min_loss(set, X, metric, 1e-3);
    check.require(std::abs(model.loss - ref) <= 1e-4,
                  "instance " + std::to_string(i) + ": io loss deviates from grid search");
    check.require(certify(model, set).worst() <= 1e-8,
                  "instance " + std::to_string(i) + ": certificate residual too large");
  }
}

void criterion_lp_vs_vertices(Checker& check) {
  for (int i = 0; i < 100; ++i) {
    Rng rng(13000 + static_cast<std::uint64_t>(i));
    const int n = 1 + static_cast<int>(rng.uniform_int(3));
    const int extra = static_cast<int>(rng.uniform_int(3));
    Eigen::MatrixXd A(2 * n + extra, n);
    Eigen::VectorXd b(2 * n + extra);
    A.setZero();
    for (int j = 0; j < n; ++j) {
      A(2 * j, j) = 1;
      b(2 * j) = -rng.uniform(1, 5);
      A(2 * j + 1, j) = -1;
      b(2 * j + 1) = -rng.uniform(1, 5);
    }
    for (int e = 0; e < extra; ++e) {
      for (int j = 0; j < n; ++j) A(2 * n + e, j) = rng.uniform(-1, 1);
      if (A.row(2 * n + e).cwiseAbs().maxCoeff() < 0.2) A(2 * n + e, 0) = 1;
      b(2 * n + e) = -rng.uniform(0.5, 2.0);
    }
    const FeasibleSet set(A, b);
    const std::vector<Eigen::VectorXd> vertices = set.enumerate_vertices();
    check.require(!vertices.empty(), "instance " + std::to_string(i) + ": no vertices found");

    for (int o = 0; o < 5; ++o) {
      Eigen::VectorXd c(n);
      for (int j = 0; j < n; ++j) c(j) = rng.uniform(-1, 1);
      const Sense sense = o % 2 == 0 ? Sense::Max : Sense::Min;
      const LpSolution sol = solve_lp(c, set, sense);
      check.require(sol.status == LpStatus::Optimal,
                    "instance " + std::to_string(i) + ": lp not optimal");
      if (sol.status != LpStatus::Optimal) continue;
      double best = sense == Sense::Max ? -std::numeric_limits<double>::infinity()
                                        : std::numeric_limits<double>::infinity();
      for (const auto& v : vertices) {
        const double value = c.dot(v);
        best = sense == Sense::Max ? std::max(best, value) : std::min(best, value);
      }
      check.require(std::abs(sol.objective - best) <= 1e-8,
                    "instance " + std::to_string(i) + ": lp objective != vertex optimum");
    }
  }
}

void criterion_diet(Checker& check) {
  const DietData data = gen_diet(200, 42);
  const FeasibleSet set = build_diet_polytope(data.spec);
  MlioOptions opts;
  opts.clusters = 3;
  opts.seed = 42;

  const MlioSolution emb = emb_mlio(data.observations, &set, opts);
  for (const NutrientRow& row : nutrient_report(emb, data.spec)) {
    check.require(row.in_bounds, "representative for cluster " + row.cluster +
                                     " breaks the " + row.entity + " bound");
  }

  const MlioSolution km = kmeans_solution(data.observations, &set, opts);
  std::vector<Eigen::VectorXd> centroids;
  for (const auto& model : km.models) centroids.push_back(model.z);
  bool sodium_violation = false;
  for (const NutrientRow& row : nutrient_report(emb, data.spec, centroids)) {
    if (row.cluster.rfind("kmeans:", 0) == 0 && row.entity == "sodium" &&
        row.value > row.ub + 1e-8) {
      sodium_violation = true;
    }
  }
  check.require(sodium_violation, "no kmeans centroid exceeded the sodium cap");
}

void criterion_determinism(Checker& check) {
  const FeasibleSet set = demo2d_polytope();
  const auto fit_json = [&](Method method, const ObservationSet& X, const FeasibleSet* s,
                            int clusters) {
    MlioOptions opts;
    opts.clusters = clusters;
    opts.seed = 42;
    return solution_to_json(fit(X, s, method, opts), X).dump(2);
  };

  const ObservationSet planar = gen2d_observations(80, 42);
  const ObservationSet planar_again = gen2d_observations(80, 42);
  check.require(fit_json(Method::Emb, planar, &set, 3) ==
                    fit_json(Method::Emb, planar_again, &set, 3),
                "emb rerun not byte-identical");
  check.require(fit_json(Method::Seq, planar, &set, 3) ==
                    fit_json(Method::Seq, planar_again, &set, 3),
                "seq rerun not byte-identical");
  check.require(fit_json(Method::Exact, first_n(planar, 12), &set, 3) ==
                    fit_json(Method::Exact, first_n(planar_again, 12), &set, 3),
                "exact rerun not byte-identical");

  const DietData diet = gen_diet(200, 42);
  const DietData diet_again = gen_diet(200, 42);
  const FeasibleSet diet_set = build_diet_polytope(diet.spec);
  const FeasibleSet diet_set_again = build_diet_polytope(diet_again.spec);
  MlioOptions opts;
  opts.clusters = 3;
  opts.seed = 42;
  check.require(solution_to_json(emb_mlio(diet.observations, &diet_set, opts),
                                 diet.observations)
                        .dump(2) ==
                    solution_to_json(emb_mlio(diet_again.observations, &diet_set_again, opts),
                                     diet_again.observations)
                        .dump(2),
                "diet emb rerun not byte-identical");
}

struct Criterion {
  int id;
  const char* label;
  double time_limit;  // seconds; 0 = no budget stated
  std::function<void(Checker&)> body;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "reduction identities", 1.0, criterion_reductions},
      {2, "emb never loses to seq (200 instances)", 30.0, criterion_emb_beats_seq},
      {3, "partial optimality of emb outputs", 0.0, criterion_partial_optimality},
      {4, "exact oracle sandwich (100 instances)", 60.0, criterion_exact_sandwich},
      {5, "partition hash log", 0.0, criterion_hash_log},
      {6, "planar experiment reproduction", 5.0, criterion_planar_experiment},
      {7, "io loss vs boundary grid search (50 instances)", 30.0, criterion_io_oracle},
      {8, "lp vs vertex enumeration (100 polytopes)", 0.0, criterion_lp_vs_vertices},
      {9, "diet bounds vs kmeans sodium", 10.0, criterion_diet},
      {10, "byte-identical reruns", 0.0, criterion_determinism},
  };

  int passed = 0;
  for (const Criterion& criterion : criteria) {
    Checker check;
    std::string error;
    const auto start = std::chrono::steady_clock::now();
    try {
      criterion.body(check);
    } catch (const std::exception& e) {
      error = e.what();
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    bool pass = check.ok() && error.empty();
    std::string note;
    if (!error.empty()) {
      note = "exception: " + error;
    } else if (!check.ok()) {
      note = check.first_failure();
    }
    if (pass && criterion.time_limit > 0.0 && elapsed > criterion.time_limit) {
      pass = false;
      std::ostringstream budget;
      budget << "exceeded " << criterion.time_limit << "s budget";
      note = budget.str();
    }

    std::printf("criterion %2d [%s]: %s (%.2fs)%s%s\n", criterion.id, criterion.label,
                pass ? "PASS" : "FAIL", elapsed, note.empty() ? "" : " -- ",
                note.c_str());
    if (pass) ++passed;
  }

  std::printf("acceptance: %d/%zu criteria passed\n", passed, criteria.size());
  return passed == static_cast<int>(criteria.size()) ? 0 : 1;
}
