#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mlio/diet.hpp"
#include "mlio/engine.hpp"
#include "mlio/errors.hpp"
#include "mlio/synthetic.hpp"

namespace {

using namespace mlio;

constexpr int kExitOk = 0;
constexpr int kExitValidationFailure = 1;
constexpr int kExitInputError = 2;

struct CommonOptions {
  std::string constraints_path;
  std::string observations_path;
  std::string method = "emb";
  std::string metric = "sqeuclidean";
  int clusters = 1;
  std::string cluster_range;
  std::uint64_t seed = 42;
  int max_iter = 500;
  double split_ratio = 0.0;  // 0 disables the holdout split
  std::string out_path;
  bool unconstrained = false;
  std::string solution_path;
  std::string nutrients_path;
  int count = 0;
};

void add_fit_like_flags(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("--observations", opt.observations_path, "Observations CSV")->required();
  auto* constraints = cmd->add_option("--constraints", opt.constraints_path, "Constraint JSON");
  auto* unconstrained =
      cmd->add_flag("--unconstrained", opt.unconstrained, "Fit without structural constraints");
  constraints->excludes(unconstrained);
  unconstrained->excludes(constraints);
  cmd->add_option("--metric", opt.metric, "Distance metric: sqeuclidean or l1");
  cmd->add_option("--seed", opt.seed, "Random seed");
  cmd->add_option("--max-iter", opt.max_iter, "Iteration cap");
}

std::optional<FeasibleSet> load_set_if_any(const CommonOptions& opt) {
  if (opt.unconstrained) return std::nullopt;
  if (opt.constraints_path.empty())
    throw MalformedInput("either --constraints or --unconstrained is required");
  return load_constraints(opt.constraints_path);
}

std::pair<int, int> parse_cluster_range(const CommonOptions& opt) {
  if (opt.cluster_range.empty()) return {opt.clusters, opt.clusters};
  const auto sep = opt.cluster_range.find("..");
  if (sep == std::string::npos)
    throw MalformedInput("--cluster-range must look like A..B");
  try {
    const int lo = std::stoi(opt.cluster_range.substr(0, sep));
    const int hi = std::stoi(opt.cluster_range.substr(sep + 2));
    return {lo, hi};
  } catch (const std::exception&) {
    throw MalformedInput("--cluster-range must look like A..B");
  }
}

std::vector<Method> parse_method_list(const std::string& text) {
  std::vector<Method> methods;
  std::istringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    if (!item.empty()) methods.push_back(parse_method(item));
  }
  if (methods.empty()) throw MalformedInput("no methods given");
  return methods;
}

int run_fit(const CommonOptions& opt) {
  const ObservationSet X = load_observations(opt.observations_path);
  const std::optional<FeasibleSet> set = load_set_if_any(opt);
  MlioOptions opts;
  opts.clusters = parse_cluster_range(opt).first;
  opts.seed = opt.seed;
  opts.metric = parse_metric(opt.metric);
  opts.max_iter = opt.max_iter;
  const MlioSolution sol = fit(X, set ? &*set : nullptr, parse_method(opt.method), opts);
  if (opt.out_path.empty())
    std::cout << solution_to_json(sol, X).dump(2) << "\n";
  else
    save_solution(sol, X, opt.out_path);
  return kExitOk;
}

int run_sweep(const CommonOptions& opt) {
  const ObservationSet X = load_observations(opt.observations_path);
  const std::optional<FeasibleSet> set = load_set_if_any(opt);
  const auto [lo, hi] = parse_cluster_range(opt);

  ObservationSet train = X;
  ObservationSet test;
  bool have_test = false;
  if (opt.split_ratio > 0.0) {
    const SplitResult split = train_test_split(X.count(), opt.split_ratio, opt.seed);
    train = X.subset(split.train);
    test = X.subset(split.test);
    have_test = !split.test.empty();
  }

  MlioOptions base;
  base.seed = opt.seed;
  base.metric = parse_metric(opt.metric);
  base.max_iter = opt.max_iter;
  const std::vector<SweepRow> rows = sweep(train, have_test ? &test : nullptr,
                                           set ? &*set : nullptr, lo, hi, base,
                                           parse_method_list(opt.method));
  if (opt.out_path.empty()) {
    const auto tmp = std::filesystem::temp_directory_path() / "mlio_sweep_stdout.csv";
    write_sweep_csv(rows, tmp.string());
    std::ifstream in(tmp);
    std::cout << in.rdbuf();
    std::filesystem::remove(tmp);
  } else {
    write_sweep_csv(rows, opt.out_path);
  }
  return kExitOk;
}

struct CheckResult {
  std::string name;
  bool pass = true;
  std::string detail;
};

void check_loaded_ids(const LoadedSolution& loaded, std::vector<CheckResult>& checks) {
  CheckResult check;
  check.name = "membership";
  if (!loaded.unknown_ids.empty()) {
    check.pass = false;
    check.detail = "unknown id '" + loaded.unknown_ids.front() + "'";
  } else if (!loaded.duplicate_ids.empty()) {
    check.pass = false;
    check.detail = "id '" + loaded.duplicate_ids.front() + "' claimed twice";
  } else if (!loaded.uncovered_ids.empty()) {
    check.pass = false;
    check.detail = "id '" + loaded.uncovered_ids.front() + "' not in any cluster";
  }
  checks.push_back(check);
}

void check_losses(const MlioSolution& sol, const ObservationSet& X,
                  std::vector<CheckResult>& checks) {
  CheckResult check;
  check.name = "loss_consistency";
  double total = 0.0;
  double worst = 0.0;
  for (const auto& model : sol.models) {
    const double actual = loss(model.z, X, model.members, sol.metric);
    worst = std::max(worst, std::abs(actual - model.loss));
    total += actual;
  }
  worst = std::max(worst, std::abs(total - sol.total_loss));
  if (worst > 1e-6) {
    check.pass = false;
    std::ostringstream detail;
    detail << "stored losses off by " << worst;
    check.detail = detail.str();
  }
  checks.push_back(check);
}

void check_geometry(const MlioSolution& sol, const FeasibleSet& set,
                    std::vector<CheckResult>& checks) {
  CheckResult gaps;
  gaps.name = "gaps";
  double worst_gap = 0.0;
  for (const auto& model : sol.models) {
    if (model.members.empty()) continue;
    worst_gap = std::max(worst_gap, set.boundary_distance(model.z));
  }
  if (worst_gap > 1e-8) {
    gaps.pass = false;
    std::ostringstream detail;
    detail << "representative sits " << worst_gap << " from the boundary";
    gaps.detail = detail.str();
  }
  checks.push_back(gaps);

  if (sol.method == Method::Kmeans) return;

  CheckResult faces;
  faces.name = "faces";
  for (std::size_t l = 0; l < sol.models.size() && faces.pass; ++l) {
    const ClusterModel& model = sol.models[l];
    if (model.members.empty()) continue;
    if (model.face < 0 || model.face >= set.rows()) {
      faces.pass = false;
      faces.detail = "cluster " + std::to_string(l) + " has no face index";
      break;
    }
    const Eigen::VectorXd row = set.A().row(model.face);
    if (std::abs(row.dot(model.z) - set.b()(model.face)) > 1e-8) {
      faces.pass = false;
      faces.detail = "cluster " + std::to_string(l) + " representative is off its face";
      break;
    }
    const Eigen::VectorXd expected = -row / row.lpNorm<1>();
    if ((model.cost - expected).lpNorm<Eigen::Infinity>() > 1e-8) {
      faces.pass = false;
      faces.detail = "cluster " + std::to_string(l) + " cost vector does not match its face";
      break;
    }
  }
  checks.push_back(faces);
}

void check_partial_optimality(const MlioSolution& sol, const ObservationSet& X,
                              const FeasibleSet* set, std::vector<CheckResult>& checks) {
  const PartialOptimalityReport report = verify_partial_optimal(sol, X, set);

  if (sol.method == Method::Emb || sol.method == Method::Exact) {
    CheckResult reassign;
    reassign.name = "reassignment_stable";
    if (sol.termination == Termination::MaxIter) {
      reassign.detail = "skipped (iteration cap hit)";
    } else if (!report.reassignment_stable) {
      reassign.pass = false;
      reassign.detail = report.witness;
    }
    checks.push_back(reassign);
  }

  CheckResult refit;
  refit.name = "refit_stable";
  if (!report.refit_stable) {
    refit.pass = false;
    refit.detail = report.witness;
  }
  checks.push_back(refit);
}

int run_validate(const CommonOptions& opt) {
  const ObservationSet X = load_observations(opt.observations_path);
  const std::optional<FeasibleSet> set = load_set_if_any(opt);
  const LoadedSolution loaded = load_solution(opt.solution_path, X);
  const MlioSolution& sol = loaded.sol;

  std::vector<CheckResult> checks;
  check_loaded_ids(loaded, checks);
  check_losses(sol, X, checks);
  if (set) check_geometry(sol, *set, checks);
  check_partial_optimality(sol, X, set ? &*set : nullptr, checks);

  bool all_pass = true;
  for (const auto& check : checks) {
    std::cout << "check " << check.name << ": " << (check.pass ? "PASS" : "FAIL");
    if (!check.detail.empty()) std::cout << " (" << check.detail << ")";
    std::cout << "\n";
    all_pass = all_pass && check.pass;
  }
  std::cout << "overall: " << (all_pass ? "PASS" : "FAIL") << "\n";
  return all_pass ? kExitOk : kExitValidationFailure;
}

int run_report(const CommonOptions& opt) {
  const ObservationSet X = load_observations(opt.observations_path);
  const NutrientSpec spec = load_nutrient_spec(opt.nutrients_path);
  const LoadedSolution loaded = load_solution(opt.solution_path, X);
  const MlioSolution& sol = loaded.sol;

  // The baseline columns restate what plain k-means would recommend for the
  // same cluster count, seed and metric.
  const KmeansResult km =
      kmeans(X, sol.partition.num_clusters, sol.seed, sol.metric, opt.max_iter);

  const std::filesystem::path dir = opt.out_path.empty() ? "." : opt.out_path;
  std::filesystem::create_directories(dir);
  write_nutrient_csv(nutrient_report(sol, spec, km.centroids), (dir / "nutrients.csv").string());
  write_group_csv(food_group_report(sol, spec, km.centroids), (dir / "groups.csv").string());
  return kExitOk;
}

int run_gen2d(const CommonOptions& opt) {
  const std::filesystem::path dir = opt.out_path.empty() ? "." : opt.out_path;
  std::filesystem::create_directories(dir);
  save_observations(gen2d_observations(opt.count, opt.seed), (dir / "observations.csv").string());
  save_constraints(demo2d_polytope(), (dir / "constraints.json").string());
  return kExitOk;
}

int run_gen_diet(const CommonOptions& opt) {
  const std::filesystem::path dir = opt.out_path.empty() ? "." : opt.out_path;
  std::filesystem::create_directories(dir);
  const DietData data = gen_diet(opt.count, opt.seed);
  save_observations(data.observations, (dir / "observations.csv").string());
  save_nutrient_spec(data.spec, (dir / "nutrients.json").string());
  save_constraints(build_diet_polytope(data.spec), (dir / "constraints.json").string());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Preference-aware inverse optimization over polyhedral feasible sets"};
  app.require_subcommand(1);
  CommonOptions opt;

  CLI::App* fit_cmd = app.add_subcommand("fit", "Fit cluster models and write solution JSON");
  add_fit_like_flags(fit_cmd, opt);
  fit_cmd->add_option("--method", opt.method, "kmeans, io, seq, emb or exact");
  fit_cmd->add_option("--clusters", opt.clusters, "Number of clusters");
  fit_cmd->add_option("--out", opt.out_path, "Solution JSON path (default: stdout)");

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Loss curve over a range of cluster counts");
  add_fit_like_flags(sweep_cmd, opt);
  sweep_cmd->add_option("--method", opt.method, "Comma-separated method list");
  auto* clusters_opt = sweep_cmd->add_option("--clusters", opt.clusters, "Single cluster count");
  auto* range_opt =
      sweep_cmd->add_option("--cluster-range", opt.cluster_range, "Cluster count range A..B");
  clusters_opt->excludes(range_opt);
  range_opt->excludes(clusters_opt);
  sweep_cmd->add_option("--split", opt.split_ratio, "Train fraction for holdout scoring");
  sweep_cmd->add_option("--out", opt.out_path, "CSV path (default: stdout)");

  CLI::App* validate_cmd =
      app.add_subcommand("validate", "Re-check a solution file against its inputs");
  add_fit_like_flags(validate_cmd, opt);
  validate_cmd->add_option("--solution", opt.solution_path, "Solution JSON to check")->required();

  CLI::App* report_cmd =
      app.add_subcommand("report", "Nutrient and food-group reports for a diet solution");
  report_cmd->add_option("--observations", opt.observations_path, "Observations CSV")->required();
  report_cmd->add_option("--solution", opt.solution_path, "Solution JSON")->required();
  report_cmd->add_option("--nutrients", opt.nutrients_path, "Nutrient spec JSON")->required();
  report_cmd->add_option("--max-iter", opt.max_iter, "Iteration cap for the k-means baseline");
  report_cmd->add_option("--out", opt.out_path, "Output directory (default: .)");

  CLI::App* gen2d_cmd = app.add_subcommand("gen2d", "Generate the planar synthetic fixture");
  gen2d_cmd->add_option("--count", opt.count, "Number of observations")->default_val(80);
  gen2d_cmd->add_option("--seed", opt.seed, "Random seed");
  gen2d_cmd->add_option("--out", opt.out_path, "Output directory (default: .)");

  CLI::App* gen_diet_cmd = app.add_subcommand("gen-diet", "Generate the synthetic diet fixture");
  gen_diet_cmd->add_option("--count", opt.count, "Number of observations")->default_val(200);
  gen_diet_cmd->add_option("--seed", opt.seed, "Random seed");
  gen_diet_cmd->add_option("--out", opt.out_path, "Output directory (default: .)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (fit_cmd->parsed()) return run_fit(opt);
    if (sweep_cmd->parsed()) return run_sweep(opt);
    if (validate_cmd->parsed()) return run_validate(opt);
    if (report_cmd->parsed()) return run_report(opt);
    if (gen2d_cmd->parsed()) return run_gen2d(opt);
    if (gen_diet_cmd->parsed()) return run_gen_diet(opt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}
