#include "vrsmd/cli_app.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <json.hpp>

#include "vrsmd/experiments.hpp"
#include "vrsmd/oracles.hpp"
#include "vrsmd/rng.hpp"
#include "vrsmd/run_io.hpp"

namespace vrsmd::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct SharedArgs {
  std::uint64_t seed = 0;
  int threads = 1;
  std::string out_dir = "runs";
  std::string config_file;
};

void add_shared(CLI::App* sub, SharedArgs& args) {
  sub->add_option("--seed", args.seed, "root seed; all randomness derives from it");
  sub->add_option("--threads", args.threads, "worker cap; 1 is bitwise-identical to N")
      ->check(CLI::PositiveNumber);
  sub->add_option("--out-dir", args.out_dir, "output directory");
  sub->add_option("--config", args.config_file, "JSON config file (flags take precedence)");
}

// Precedence is flags > config file > defaults: after parsing, unset options
// are filled from the config JSON (keys are the long flag names, no dashes).
class ConfigFill {
 public:
  ConfigFill(CLI::App* sub, const std::string& path) : sub_(sub) {
    if (!path.empty()) j_ = run_io::read_json(path);
  }

  template <typename T>
  void fill(const std::string& flag, T& value) const {
    if (j_.is_null()) return;
    const std::string key = flag.substr(2);  // strip "--"
    if (sub_->count(flag) == 0 && j_.contains(key)) value = j_.at(key).get<T>();
  }

 private:
  CLI::App* sub_;
  json j_;
};

json shared_json(const SharedArgs& args, const std::string& subcommand) {
  json j;
  j["subcommand"] = subcommand;
  j["version"] = run_io::kVersion;
  j["seed"] = args.seed;
  j["out_dir"] = args.out_dir;
  return j;
}

// Manifest: config echo, input hashes, output hashes.  Everything listed
// under "outputs" must reproduce bitwise given the same manifest; wall-clock
// data lives in timing.json, which is deliberately left out.
void write_manifest(const fs::path& dir, json manifest, const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs) {
  json in_hashes = json::object();
  for (const auto& p : inputs) in_hashes[p] = run_io::hash_hex(run_io::hash_file(p));
  json out_hashes = json::object();
  for (const auto& p : outputs)
    out_hashes[p] = run_io::hash_hex(run_io::hash_file((dir / p).string()));
  manifest["inputs"] = in_hashes;
  manifest["outputs"] = out_hashes;
  run_io::write_json(manifest, (dir / "manifest.json").string());
}

solvers::OptionVariant option_from_int(int option) {
  if (option == 1) return solvers::OptionVariant::option_i;
  if (option == 2) return solvers::OptionVariant::option_ii;
  throw CLI::ValidationError("--option", "must be 1 or 2");
}

struct SolveArgs {
  SharedArgs shared;
  std::string data;
  bool header = false;
  std::string solver = "vrsmd";
  std::string mirror = "l2";
  double eta = 0.01;
  int inner_m = 1;
  int outer_s = 1;
  int option = 2;
  int record_every = 1;
  double init_scale = 1e-2;
};

int do_solve(const SolveArgs& args) {
  const auto prob = core::load_problem_csv(args.data, args.header);

  solvers::SolverConfig cfg;
  cfg.eta = args.eta;
  cfg.inner_m = args.inner_m;
  cfg.outer_s = args.outer_s;
  cfg.option = option_from_int(args.option);
  cfg.seed = args.shared.seed;
  cfg.record_every = args.record_every;

  std::string mirror_spec = args.mirror;
  solvers::SolverRun run;
  if (args.solver == "vrsmd" || args.solver == "svrg") {
    if (args.solver == "svrg") mirror_spec = "l2";  // the reduction
    const auto psi = make_mirror(mirror_spec);
    run = solvers::run_vrsmd(prob, *psi, cfg);
  } else if (args.solver == "smd") {
    const auto psi = make_mirror(mirror_spec);
    run = solvers::run_smd(prob, *psi, cfg);
  } else if (args.solver == "md") {
    const auto psi = make_mirror(mirror_spec);
    run = solvers::run_mirror_descent(prob, *psi, cfg);
  } else if (args.solver == "hadamard") {
    run = solvers::run_hadamard_gd(prob, cfg, args.init_scale);
  } else {
    throw CLI::ValidationError("--solver", "unknown solver '" + args.solver + "'");
  }

  const fs::path dir(args.shared.out_dir);
  fs::create_directories(dir);
  run_io::write_trace_csv(run, (dir / "trace.csv").string());
  run_io::write_vector_csv(run.final_beta, (dir / "final_beta.csv").string());

  json summary = run_io::run_summary_json(cfg, run);
  summary["solver"] = args.solver;
  summary["mirror"] = mirror_spec;
  run_io::write_json(summary, (dir / "summary.json").string());

  json timing;
  timing["wall_seconds"] = run.wall_seconds;
  run_io::write_json(timing, (dir / "timing.json").string());

  json manifest = shared_json(args.shared, "solve");
  manifest["config"] = summary["config"];
  manifest["config"]["solver"] = args.solver;
  manifest["config"]["mirror"] = mirror_spec;
  manifest["config"]["data"] = args.data;
  manifest["config"]["header"] = args.header;
  manifest["config"]["init_scale"] = args.init_scale;
  write_manifest(dir, manifest, {args.data}, {"trace.csv", "final_beta.csv", "summary.json"});

  for (const auto& w : run.warnings) std::cerr << "warning: " << w << '\n';
  if (run.status != solvers::RunStatus::ok) {
    std::cerr << "solver stopped early: " << run.message << '\n';
    return kExitNonConvergence;
  }
  return kExitOk;
}

struct SimulateArgs {
  SharedArgs shared;
  int n = 100;
  int p = 200;
  int sparsity = 5;
  double rho = 0.0;
  double noise_sd = 0.0;
  std::string cov = "rows";
  bool header = false;
};

int do_simulate(const SimulateArgs& args) {
  experiments::SimulationSpec spec;
  spec.n = args.n;
  spec.p = args.p;
  spec.s = args.sparsity;
  spec.rho = args.rho;
  spec.noise_sd = args.noise_sd;
  spec.seed = args.shared.seed;
  if (args.cov == "rows") {
    spec.cov = experiments::CovMode::rows;
  } else if (args.cov == "cols") {
    spec.cov = experiments::CovMode::cols;
  } else {
    throw CLI::ValidationError("--cov", "must be rows or cols");
  }

  const auto data = experiments::simulate_raw(spec);

  const fs::path dir(args.shared.out_dir);
  fs::create_directories(dir);
  {
    Matrix joined(data.x.rows(), data.x.cols() + 1);
    joined.col(0) = data.y;
    joined.rightCols(data.x.cols()) = data.x;
    core::save_matrix_csv(joined, (dir / "data.csv").string());
  }
  run_io::write_vector_csv(data.beta_true, (dir / "beta_true.csv").string());

  json manifest = shared_json(args.shared, "simulate");
  manifest["config"] = {{"n", spec.n},        {"p", spec.p},
                        {"sparsity", spec.s}, {"rho", spec.rho},
                        {"noise_sd", spec.noise_sd}, {"cov", args.cov}};
  write_manifest(dir, manifest, {}, {"data.csv", "beta_true.csv"});
  return kExitOk;
}

struct VerifyArgs {
  SharedArgs shared;
  std::string run_dir;
  double epsilon = 1e-3;
  int sparsity = 0;
  double xi = 0.0;
  std::string beta_true_file;
};

int do_verify(const VerifyArgs& args) {
  const fs::path dir(args.run_dir);
  if (!fs::exists(dir / "manifest.json"))
    throw std::runtime_error("verify: no manifest.json in " + args.run_dir);
  if (!fs::exists(dir / "trace.csv"))
    throw std::runtime_error("verify: missing trace.csv in " + args.run_dir);
  const json manifest = run_io::read_json((dir / "manifest.json").string());
  const json summary = run_io::read_json((dir / "summary.json").string());
  const json& cfg_j = manifest.at("config");

  const auto prob =
      core::load_problem_csv(cfg_j.at("data").get<std::string>(), cfg_j.value("header", false));
  const Vector beta = run_io::read_vector_csv((dir / "final_beta.csv").string());
  const auto psi = make_mirror(cfg_j.at("mirror").get<std::string>());

  json cert;
  cert["run_dir"] = args.run_dir;
  bool converged = true;

  const auto interp = oracles::min_mirror_interpolant(prob, *psi);
  converged = converged && interp.converged;
  cert["interpolant"] = {{"psi_value", interp.psi_value},
                         {"feasibility_residual", interp.feasibility_residual},
                         {"dual_range_residual", interp.dual_range_residual},
                         {"converged", interp.converged},
                         {"method", interp.method},
                         {"iterations", interp.iterations}};

  const auto eps_rep = oracles::epsilon_solution_check(prob, *psi, beta, interp, args.epsilon);
  cert["epsilon_check"] = {{"epsilon", eps_rep.epsilon}, {"psi_gap", eps_rep.psi_gap},
                           {"f_gap", eps_rep.f_gap},     {"psi_ok", eps_rep.psi_ok},
                           {"f_ok", eps_rep.f_ok}};

  const Vector theta = psi->grad(beta);
  const double dual_res = (theta - prob.project_row_x(theta)).norm();
  cert["final_dual_range_residual"] = dual_res;
  cert["final_dual_range_relative"] = theta.norm() > 0 ? dual_res / theta.norm() : 0.0;

  const Vector l2 = oracles::min_l2_interpolant(prob);
  cert["l2_interpolant_distance"] = (beta - l2).norm();

  // Theorem-style bound values, conditional on the observed B.
  const double b_observed = summary.value("b_observed", 0.0);
  const double k_observed = std::max(1e-12, summary.value("k_observed", 1.0));
  try {
    const double alpha = psi->strong_convexity_alpha(k_observed);
    const double eta = cfg_j.at("eta").get<double>();
    const double m = cfg_j.at("inner_m").get<double>();
    const double s_out = cfg_j.at("outer_s").get<double>();
    const Vector beta0 = psi->grad_inverse(Vector::Zero(prob.p()));
    oracles::BoundInputs in;
    in.alpha = alpha;
    in.smooth_l = prob.smoothness_l();
    in.eta = eta;
    in.inner_m = m;
    in.outer_s = s_out;
    in.total_t = m * s_out;
    in.b_norm = b_observed;
    in.s_min = prob.smallest_singular();
    in.n = static_cast<double>(prob.n());
    in.bregman_init = mirror::bregman_divergence(*psi, interp.beta_star, beta0);
    in.f_gap_init =
        core::objective_value(prob, beta0) - core::objective_value(prob, interp.beta_star);
    json bounds;
    bounds["psi_gap_rhs"] = oracles::theoretical_bound_rhs(oracles::BoundKind::eq11, in);
    bounds["f_gap_rhs"] = oracles::theoretical_bound_rhs(oracles::BoundKind::eq13, in);
    bounds["psi_gap_lhs"] = eps_rep.psi_gap;
    bounds["f_gap_lhs"] = eps_rep.f_gap;
    bounds["psi_gap_ok"] = eps_rep.psi_gap <= bounds["psi_gap_rhs"].get<double>();
    bounds["f_gap_ok"] = eps_rep.f_gap <= bounds["f_gap_rhs"].get<double>();
    bounds["note"] = "conditional on B_observed; B is assumed, not proven";
    cert["bounds"] = bounds;
  } catch (const std::exception& e) {
    cert["bounds"] = {{"error", e.what()}};
  }

  if (args.sparsity > 0) {
    try {
      const double xi = args.xi > 0.0 ? args.xi : 0.1;
      const auto rec =
          oracles::certify_recovery(prob, args.sparsity, xi, args.shared.threads);
      json rj = {{"kappa", rec.kappa},         {"gamma", rec.gamma},
                 {"s", rec.s},                 {"s_good", rec.s_good},
                 {"delta_max", rec.delta_max}, {"predicted_xi", rec.predicted_xi}};
      if (!rec.s_good) {
        rj["status"] = "theorem_inapplicable";  // kappa >= 1/2 is not a failure
      } else {
        rj["status"] = "certified";
        if (!args.beta_true_file.empty()) {
          const Vector beta_o = run_io::read_vector_csv(args.beta_true_file);
          const auto l1 = oracles::min_l1_interpolant(prob);
          rj["l1_exact_recovery_error"] = (l1.beta - beta_o).lpNorm<1>();
          rj["solver_l1_error"] = (beta - beta_o).lpNorm<1>();
        }
      }
      cert["recovery"] = rj;
    } catch (const oracles::BudgetError& e) {
      cert["recovery"] = {{"status", "not_certifiable_at_desk_scale"}, {"detail", e.what()}};
    }
  }

  cert["converged"] = converged;
  run_io::write_json(cert, (dir / "certificate.json").string());
  return converged ? kExitOk : kExitNonConvergence;
}

struct CompareArgs {
  SharedArgs shared;
  std::string data;
  bool header = false;
  std::string beta_true_file;
  int n = 60;
  int p = 200;
  int sparsity = 5;
  double rho = 0.0;
  double noise_sd = 0.0;
  double delta = 0.1;
  double eta = 0.01;
  int inner_m = 1;
  int outer_s = 1;
  int option = 2;
  int repeats = 10;
  double train_ratio = 0.75;
  double hadamard_eta = 0.0;
  double init_scale = 1e-2;
  std::string baseline = "hadamard";
  int record_every = 1;
};

int do_compare(const CompareArgs& args) {
  std::unique_ptr<core::DesignProblem> prob;
  Vector beta_true;
  bool have_truth = false;

  if (!args.data.empty()) {
    prob = std::make_unique<core::DesignProblem>(core::load_problem_csv(args.data, args.header));
    if (!args.beta_true_file.empty()) {
      beta_true = run_io::read_vector_csv(args.beta_true_file);
      have_truth = true;
    }
  } else {
    experiments::SimulationSpec spec;
    spec.n = args.n;
    spec.p = args.p;
    spec.s = args.sparsity;
    spec.rho = args.rho;
    spec.noise_sd = args.noise_sd;
    spec.seed = args.shared.seed;
    auto data = experiments::simulate_raw(spec);
    prob = std::make_unique<core::DesignProblem>(std::move(data.x), std::move(data.y));
    beta_true = std::move(data.beta_true);
    have_truth = true;
  }

  experiments::CompareConfig ccfg;
  ccfg.train_ratio = args.train_ratio;
  ccfg.repeats = args.repeats;
  ccfg.power_delta = args.delta;
  ccfg.solver.eta = args.eta;
  ccfg.solver.inner_m = args.inner_m;
  ccfg.solver.outer_s = args.outer_s;
  ccfg.solver.option = option_from_int(args.option);
  ccfg.solver.seed = args.shared.seed;
  ccfg.solver.record_every = args.record_every;
  ccfg.hadamard_eta = args.hadamard_eta;
  ccfg.hadamard_init_scale = args.init_scale;
  if (args.baseline == "self") {
    ccfg.baseline_self = true;
  } else if (args.baseline != "hadamard") {
    throw CLI::ValidationError("--baseline", "must be hadamard or self");
  }

  const auto report = experiments::compare_vrsmd_hadamard(
      *prob, have_truth ? &beta_true : nullptr, ccfg, args.shared.threads);

  // Run directory named by the hash of the resolved configuration.
  json cfg_echo = {{"delta", args.delta},           {"eta", args.eta},
                   {"inner_m", args.inner_m},       {"outer_s", args.outer_s},
                   {"option", args.option},         {"repeats", args.repeats},
                   {"train_ratio", args.train_ratio}, {"hadamard_eta", args.hadamard_eta},
                   {"init_scale", args.init_scale}, {"baseline", args.baseline},
                   {"seed", args.shared.seed},      {"data", args.data},
                   {"n", args.n}, {"p", args.p}, {"sparsity", args.sparsity},
                   {"rho", args.rho}, {"noise_sd", args.noise_sd}};
  const std::string cfg_hash = run_io::hash_hex(fnv1a64(cfg_echo.dump()));
  const fs::path dir = fs::path(args.shared.out_dir) / cfg_hash;
  fs::create_directories(dir);

  json rep;
  rep["config"] = cfg_echo;
  rep["baseline"] = report.baseline_name;
  rep["p_time_one_sided"] = report.p_time_one_sided;
  rep["p_error_two_sided"] = report.p_error_two_sided;
  auto arm_to_json = [](const experiments::CompareArmResult& a) {
    return json{{"train_objective", a.train_objective},
                {"test_mse", a.test_mse},
                {"l1_error", a.l1_error},
                {"l2_error", a.l2_error},
                {"wall_seconds", a.wall_seconds}};
  };
  rep["vrsmd"] = json::array();
  rep["baseline_runs"] = json::array();
  std::vector<std::string> trace_files;
  for (int r = 0; r < args.repeats; ++r) {
    rep["vrsmd"].push_back(arm_to_json(report.vrsmd[static_cast<std::size_t>(r)]));
    rep["baseline_runs"].push_back(arm_to_json(report.baseline[static_cast<std::size_t>(r)]));
    const std::string vname = "run-" + std::to_string(r) + "-vrsmd.csv";
    const std::string bname = "run-" + std::to_string(r) + "-" + report.baseline_name + ".csv";
    run_io::write_trace_csv(report.vrsmd_runs[static_cast<std::size_t>(r)], (dir / vname).string());
    run_io::write_trace_csv(report.baseline_runs[static_cast<std::size_t>(r)],
                            (dir / bname).string());
    trace_files.push_back(vname);
    trace_files.push_back(bname);
  }
  run_io::write_json(rep, (dir / "report.json").string());

  json manifest = shared_json(args.shared, "compare");
  manifest["config"] = cfg_echo;
  std::vector<std::string> inputs;
  if (!args.data.empty()) inputs.push_back(args.data);
  write_manifest(dir, manifest, inputs, trace_files);
  std::cout << dir.string() << '\n';
  return kExitOk;
}

}  // namespace

std::unique_ptr<mirror::MirrorMap> make_mirror(const std::string& spec) {
  if (spec == "l2") return std::make_unique<mirror::SquaredL2>();
  if (spec == "entropy") return std::make_unique<mirror::NegativeEntropy>();
  if (spec.rfind("power:", 0) == 0) {
    const double delta = std::stod(spec.substr(6));
    return std::make_unique<mirror::PowerNorm>(delta);
  }
  if (spec.rfind("quad:", 0) == 0) {
    const Matrix h = core::load_matrix_csv(spec.substr(5), false);
    return std::make_unique<mirror::QuadraticForm>(h);
  }
  throw std::runtime_error("unknown mirror spec '" + spec +
                           "' (expected l2 | power:<delta> | quad:<H-file> | entropy)");
}

int vrsmd_main(int argc, const char* const* argv) {
  CLI::App app{"variance-reduced stochastic mirror descent toolkit"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "write a simulated sparse regression dataset");
  add_shared(sim_cmd, sim.shared);
  sim_cmd->add_option("--n", sim.n, "samples")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--p", sim.p, "features")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--sparsity", sim.sparsity, "nonzeros in the truth");
  sim_cmd->add_option("--rho", sim.rho, "equicorrelation in [0,1)");
  sim_cmd->add_option("--noise-sd", sim.noise_sd, "additive noise sd");
  sim_cmd->add_option("--cov", sim.cov, "apply covariance to rows|cols");

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "run a solver and write its trace");
  add_shared(solve_cmd, solve.shared);
  solve_cmd->add_option("--data", solve.data, "problem CSV (y, then features)")->required();
  solve_cmd->add_flag("--header", solve.header, "CSV has a header row");
  solve_cmd->add_option("--solver", solve.solver, "vrsmd|svrg|smd|md|hadamard");
  solve_cmd->add_option("--mirror", solve.mirror, "l2 | power:<delta> | quad:<H-file> | entropy");
  solve_cmd->add_option("--eta", solve.eta, "step size");
  solve_cmd->add_option("--inner-m", solve.inner_m, "inner iterations");
  solve_cmd->add_option("--outer-s", solve.outer_s, "outer iterations");
  solve_cmd->add_option("--option", solve.option, "Algorithm option 1 or 2");
  solve_cmd->add_option("--record-every", solve.record_every, "trace recording stride");
  solve_cmd->add_option("--init-scale", solve.init_scale, "Hadamard GD u=v init scale");

  VerifyArgs verify;
  auto* verify_cmd = app.add_subcommand("verify", "run oracles against a finished run directory");
  add_shared(verify_cmd, verify.shared);
  verify_cmd->add_option("--run-dir", verify.run_dir, "directory written by solve")->required();
  verify_cmd->add_option("--epsilon", verify.epsilon, "epsilon-solution threshold");
  verify_cmd->add_option("--sparsity", verify.sparsity, "certify s-goodness/RE at this s");
  verify_cmd->add_option("--xi", verify.xi, "target l1 recovery error");
  verify_cmd->add_option("--beta-true", verify.beta_true_file, "ground-truth vector CSV");

  CompareArgs compare;
  auto* compare_cmd = app.add_subcommand("compare", "VRSMD vs Hadamard GD on a shared split");
  add_shared(compare_cmd, compare.shared);
  compare_cmd->add_option("--data", compare.data, "problem CSV; omit to simulate");
  compare_cmd->add_flag("--header", compare.header, "CSV has a header row");
  compare_cmd->add_option("--beta-true", compare.beta_true_file, "ground-truth vector CSV");
  compare_cmd->add_option("--n", compare.n, "simulated samples");
  compare_cmd->add_option("--p", compare.p, "simulated features");
  compare_cmd->add_option("--sparsity", compare.sparsity, "simulated nonzeros");
  compare_cmd->add_option("--rho", compare.rho, "simulated equicorrelation");
  compare_cmd->add_option("--noise-sd", compare.noise_sd, "simulated noise sd");
  compare_cmd->add_option("--delta", compare.delta, "PowerNorm delta for the VRSMD arm");
  compare_cmd->add_option("--eta", compare.eta, "step size");
  compare_cmd->add_option("--inner-m", compare.inner_m, "inner iterations");
  compare_cmd->add_option("--outer-s", compare.outer_s, "outer iterations");
  compare_cmd->add_option("--option", compare.option, "Algorithm option 1 or 2");
  compare_cmd->add_option("--repeats", compare.repeats, "number of paired repeats");
  compare_cmd->add_option("--train-ratio", compare.train_ratio, "train fraction");
  compare_cmd->add_option("--hadamard-eta", compare.hadamard_eta, "baseline step (0 = same)");
  compare_cmd->add_option("--init-scale", compare.init_scale, "Hadamard init scale");
  compare_cmd->add_option("--baseline", compare.baseline, "hadamard|self");
  compare_cmd->add_option("--record-every", compare.record_every, "trace recording stride");

  try {
    app.parse(argc, argv);

    if (sim_cmd->parsed()) {
      ConfigFill fill(sim_cmd, sim.shared.config_file);
      fill.fill("--seed", sim.shared.seed);
      fill.fill("--threads", sim.shared.threads);
      fill.fill("--out-dir", sim.shared.out_dir);
      fill.fill("--n", sim.n);
      fill.fill("--p", sim.p);
      fill.fill("--sparsity", sim.sparsity);
      fill.fill("--rho", sim.rho);
      fill.fill("--noise-sd", sim.noise_sd);
      fill.fill("--cov", sim.cov);
      return do_simulate(sim);
    }
    if (solve_cmd->parsed()) {
      ConfigFill fill(solve_cmd, solve.shared.config_file);
      fill.fill("--seed", solve.shared.seed);
      fill.fill("--threads", solve.shared.threads);
      fill.fill("--out-dir", solve.shared.out_dir);
      fill.fill("--solver", solve.solver);
      fill.fill("--mirror", solve.mirror);
      fill.fill("--eta", solve.eta);
      fill.fill("--inner-m", solve.inner_m);
      fill.fill("--outer-s", solve.outer_s);
      fill.fill("--option", solve.option);
      fill.fill("--record-every", solve.record_every);
      fill.fill("--init-scale", solve.init_scale);
      return do_solve(solve);
    }
    if (verify_cmd->parsed()) {
      ConfigFill fill(verify_cmd, verify.shared.config_file);
      fill.fill("--epsilon", verify.epsilon);
      fill.fill("--sparsity", verify.sparsity);
      fill.fill("--xi", verify.xi);
      fill.fill("--threads", verify.shared.threads);
      return do_verify(verify);
    }
    if (compare_cmd->parsed()) {
      ConfigFill fill(compare_cmd, compare.shared.config_file);
      fill.fill("--seed", compare.shared.seed);
      fill.fill("--threads", compare.shared.threads);
      fill.fill("--out-dir", compare.shared.out_dir);
      fill.fill("--delta", compare.delta);
      fill.fill("--eta", compare.eta);
      fill.fill("--inner-m", compare.inner_m);
      fill.fill("--outer-s", compare.outer_s);
      fill.fill("--option", compare.option);
      fill.fill("--repeats", compare.repeats);
      fill.fill("--train-ratio", compare.train_ratio);
      fill.fill("--hadamard-eta", compare.hadamard_eta);
      fill.fill("--init-scale", compare.init_scale);
      fill.fill("--baseline", compare.baseline);
      fill.fill("--record-every", compare.record_every);
      return do_compare(compare);
    }
    return kExitUsage;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << e.what() << '\n';
    return kExitUsage;
  } catch (const oracles::BudgetError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNonConvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace vrsmd::cli
