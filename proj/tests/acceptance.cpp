// Acceptance suite: one criterion per section, one PASS/FAIL line each,
// nonzero exit if anything fails.  Fixtures are frozen desk-scale stand-ins
// for the full-size experiments.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <json.hpp>
#include <string>
#include <vector>

#include "reference_svrg.hpp"
#include "test_util.hpp"
#include "vrsmd/cli_app.hpp"
#include "vrsmd/core.hpp"
#include "vrsmd/experiments.hpp"
#include "vrsmd/mirror.hpp"
#include "vrsmd/oracles.hpp"
#include "vrsmd/run_io.hpp"
#include "vrsmd/solvers.hpp"

using namespace vrsmd;
using testutil::gaussian_matrix;
using testutil::gaussian_vector;

namespace {

int g_failures = 0;

class Criterion {
 public:
  Criterion(int index, std::string name)
      : index_(index), name_(std::move(name)), start_(std::chrono::steady_clock::now()) {}

  void finish(bool pass, const std::string& detail, double budget_seconds) {
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    const bool in_budget = secs < budget_seconds;
    const bool ok = pass && in_budget;
    if (!ok) ++g_failures;
    std::printf("%s criterion %2d: %s (%.2fs / budget %.0fs) %s%s\n", ok ? "PASS" : "FAIL", index_,
                name_.c_str(), secs, budget_seconds, detail.c_str(),
                in_budget ? "" : " [over budget]");
    std::fflush(stdout);
  }

 private:
  int index_;
  std::string name_;
  std::chrono::steady_clock::time_point start_;
};

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), pattern, a, b, c);
  return buf;
}

struct RecoveryInstance {
  core::DesignProblem prob;
  Vector beta_o;
};

RecoveryInstance recovery_instance() {
  auto f = testutil::recovery_fixture();
  return RecoveryInstance{core::DesignProblem(f.x, f.y), f.beta_o};
}

solvers::SolverConfig recovery_run_config(std::uint64_t seed) {
  solvers::SolverConfig cfg;
  cfg.eta = 0.005;
  cfg.inner_m = 24;
  cfg.outer_s = 40000;
  cfg.option = solvers::OptionVariant::option_ii;
  cfg.seed = seed;
  cfg.record_every = 1 << 20;
  return cfg;
}

void criterion_1_svrg_reduction() {
  Criterion c(1, "VRSMD with psi = ||.||^2/2 reduces to SVRG bitwise");
  const Matrix x = gaussian_matrix(20, 10, 808);
  const Vector y = gaussian_vector(20, 809);
  core::DesignProblem prob(x, y);
  mirror::SquaredL2 l2;

  solvers::SolverConfig cfg;
  cfg.eta = 0.01;
  cfg.inner_m = 20;
  cfg.outer_s = 12;
  cfg.option = solvers::OptionVariant::option_ii;
  cfg.seed = 424242;

  const auto run = solvers::run_vrsmd(prob, l2, cfg);
  const auto ref = testutil::reference_svrg(x, y, prob.basis_row(), cfg.eta, cfg.inner_m,
                                            cfg.outer_s, false, cfg.seed, cfg.record_every);
  bool equal = run.trace.size() == ref.trace.size() &&
               testutil::bitwise_equal(run.final_beta, ref.final_beta);
  for (std::size_t k = 0; equal && k < ref.trace.size(); ++k) {
    equal = testutil::bitwise_equal(run.trace[k].objective, ref.trace[k].objective) &&
            testutil::bitwise_equal(run.trace[k].psi_value, ref.trace[k].psi_value) &&
            testutil::bitwise_equal(run.trace[k].dual_residual, ref.trace[k].dual_residual) &&
            testutil::bitwise_equal(run.trace[k].inf_norm, ref.trace[k].inf_norm);
  }
  c.finish(equal, equal ? "trace and output bit-identical" : "trace mismatch", 1.0);
}

void criterion_2_corollary1() {
  Criterion c(2, "Corollary-style linear convergence to the pseudoinverse solution");
  Matrix x = gaussian_matrix(40, 12, 2024);
  for (Index i = 0; i < x.rows(); ++i) x.row(i) /= x.row(i).norm();
  CounterRng brng(999);
  Vector beta_o(12);
  for (Index j = 0; j < 12; ++j) beta_o(j) = brng.normal();
  Vector y = x * beta_o;
  for (Index i = 0; i < y.size(); ++i) y(i) += 0.1 * brng.normal();
  core::DesignProblem prob(x, y);
  mirror::SquaredL2 l2;

  solvers::SolverConfig cfg;
  cfg.eta = 1.0 / 48.0;
  const double sm2 = prob.smallest_singular() * prob.smallest_singular();
  cfg.inner_m =
      static_cast<int>(std::ceil(64.0 * 40.0 / (sm2 * (0.9 - 1.0 / 3.0)) * 1.05));
  cfg.outer_s = 60;
  cfg.option = solvers::OptionVariant::option_ii;
  cfg.record_every = 1 << 30;

  const auto cc = oracles::convergence_constants(prob, l2, cfg, sm2 / 40.0, 1.0);
  bool ok = prob.rank() == 12 && cc.tau_double_prime <= 0.9 && cfg.eta < 1.0 / (24.0 * prob.smoothness_l());

  const Vector pinv_y = oracles::min_l2_interpolant(prob);
  const double proj_sq = prob.project_col_x(prob.y()).squaredNorm();
  const int seeds = 20;
  std::vector<double> mean_err(static_cast<std::size_t>(cfg.outer_s), 0.0);
  for (int k = 0; k < seeds; ++k) {
    cfg.seed = derive_seed(4242, "cor1-seed-" + std::to_string(k));
    const auto run = solvers::run_vrsmd(prob, l2, cfg);
    for (int s = 0; s < cfg.outer_s; ++s)
      mean_err[static_cast<std::size_t>(s)] +=
          (run.outer_estimates[static_cast<std::size_t>(s)] - pinv_y).squaredNorm() / seeds;
  }

  // geometric decay down to the numerical floor
  const double floor = 1e-20;
  for (std::size_t s = 0; s + 1 < mean_err.size(); ++s) {
    if (mean_err[s] > floor && mean_err[s + 1] > floor)
      ok = ok && mean_err[s + 1] <= 0.9 * mean_err[s];
  }
  ok = ok && mean_err.back() <= 1e-6;

  // the empirical mean stays below the theoretical curve (5% MC slack)
  for (int s = 1; s <= cfg.outer_s; ++s) {
    oracles::BoundInputs in;
    in.tau_double_prime = cc.tau_double_prime;
    in.outer_s = static_cast<double>(s);
    in.s_min = prob.smallest_singular();
    in.proj_y_sq = proj_sq;
    const double rhs = oracles::theoretical_bound_rhs(oracles::BoundKind::cor1, in);
    ok = ok && mean_err[static_cast<std::size_t>(s - 1)] <= 1.05 * rhs;
  }
  c.finish(ok, fmt("tau''=%.3f final mean err=%.2e", cc.tau_double_prime, mean_err.back()), 10.0);
}

core::DesignProblem theorem2_problem() {
  Matrix x = gaussian_matrix(10, 30, 77);
  x /= std::sqrt(10.0);
  CounterRng brng(555);
  Vector beta_o = Vector::Zero(30);
  for (int j = 0; j < 4; ++j) beta_o(j) = brng.normal();
  return core::DesignProblem(x, x * beta_o);
}

std::vector<solvers::SolverRun> g_theorem2_runs;  // reused by criterion 4

void criterion_3_implicit_regularization() {
  Criterion c(3, "Option II converges to the minimum mirror interpolant");
  const auto prob = theorem2_problem();
  mirror::PowerNorm map(0.3);
  const auto cert = oracles::min_mirror_interpolant(prob, map);

  solvers::SolverConfig cfg;
  cfg.eta = 0.02;
  cfg.inner_m = 20;
  cfg.outer_s = 4000;
  cfg.option = solvers::OptionVariant::option_ii;
  cfg.record_every = 1;  // criterion 4 inspects every iterate

  double mean_dist = 0.0;
  double mean_f_gap = 0.0;
  const int seeds = 10;
  g_theorem2_runs.clear();
  for (int k = 0; k < seeds; ++k) {
    cfg.seed = derive_seed(31337, "thm2-seed-" + std::to_string(k));
    auto run = solvers::run_vrsmd(prob, map, cfg);
    mean_dist += (run.final_beta - cert.beta_star).norm() / seeds;
    mean_f_gap += core::objective_value(prob, run.final_beta) / seeds;  // F(beta^psi) = 0
    g_theorem2_runs.push_back(std::move(run));
  }
  const bool ok = cert.converged && mean_dist <= 1e-3 && mean_f_gap <= 1e-8;
  c.finish(ok, fmt("mean ||beta - beta_psi|| = %.2e, mean F-gap = %.2e", mean_dist, mean_f_gap),
           30.0);
}

void criterion_4_dual_range() {
  Criterion c(4, "dual iterates stay in col(X^T) along every trace");
  bool ok = !g_theorem2_runs.empty();
  double worst = 0.0;
  for (const auto& run : g_theorem2_runs) {
    for (const auto& rec : run.trace) {
      const double rel = rec.dual_residual / std::max(rec.dual_norm, 1e-300);
      worst = std::max(worst, rel);
      ok = ok && rel <= 1e-8;
    }
  }
  c.finish(ok, fmt("worst relative residual = %.2e over %.0f records", worst,
                   g_theorem2_runs.empty() ? 0.0
                                           : static_cast<double>(g_theorem2_runs.size() *
                                                                 g_theorem2_runs[0].trace.size())),
           60.0);
  g_theorem2_runs.clear();
}

void criterion_5_sparse_recovery() {
  Criterion c(5, "certified sparse recovery at xi = 0.1");
  const auto inst = recovery_instance();
  const int s = 2;
  const double xi = 0.1;

  const auto rec = oracles::certify_recovery(inst.prob, s, xi, 2);
  bool ok = rec.s_good && rec.gamma > 0.0 && rec.delta_max > 0.0;

  const auto cert = oracles::min_mirror_interpolant(inst.prob, mirror::PowerNorm(rec.delta_max));
  ok = ok && cert.converged;
  const double oracle_err = (cert.beta_star - inst.beta_o).lpNorm<1>();
  ok = ok && oracle_err <= xi;

  const auto run =
      solvers::run_vrsmd(inst.prob, mirror::PowerNorm(rec.delta_max), recovery_run_config(11));
  const double solver_gap = (run.final_beta - cert.beta_star).lpNorm<1>();
  ok = ok && run.status == solvers::RunStatus::ok && solver_gap <= 0.02;

  c.finish(ok,
           fmt("kappa=%.3f, ||beta_delta - beta_o||_1 = %.2e, solver gap = %.2e", rec.kappa,
               oracle_err, solver_gap),
           60.0);
}

void criterion_6_exact_l1_recovery() {
  Criterion c(6, "exact l1 recovery on the certified instance");
  const auto inst = recovery_instance();
  const auto l1 = oracles::min_l1_interpolant(inst.prob);
  const double err = (l1.beta - inst.beta_o).lpNorm<1>();
  c.finish(err <= 1e-8, fmt("||beta_l1 - beta_o||_1 = %.2e", err), 60.0);
}

void criterion_7_delta_trend() {
  Criterion c(7, "final l1 error grows with delta");
  const auto inst = recovery_instance();
  core::SparseGroundTruth truth{inst.beta_o, 2};
  const auto report = experiments::delta_sweep(inst.prob, truth, {0.05, 0.2, 0.5},
                                               recovery_run_config(909), 3);
  bool ok = report.entries.size() == 3;
  for (const auto& e : report.entries) ok = ok && !e.failed;
  ok = ok && report.entries[0].l1_error < report.entries[1].l1_error &&
       report.entries[1].l1_error < report.entries[2].l1_error;
  c.finish(ok,
           fmt("errors %.4f < %.4f < %.4f", report.entries[0].l1_error, report.entries[1].l1_error,
               report.entries[2].l1_error),
           60.0);
}

void criterion_8_compare_harness() {
  Criterion c(8, "comparison harness: VRSMD vs Hadamard GD plus the exact Wilcoxon path");
  namespace fs = std::filesystem;
  const fs::path out = fs::temp_directory_path() / "vrsmd_acceptance_compare";
  fs::remove_all(out);

  const std::vector<std::string> args{
      "vrsmd",     "compare",    "--n",        "60",   "--p",         "200",  "--sparsity",
      "5",         "--noise-sd", "0.5",        "--delta", "0.1",      "--eta", "0.002",
      "--inner-m", "45",         "--outer-s",  "400",  "--repeats",   "10",   "--hadamard-eta",
      "0.05",      "--seed",     "606",        "--threads", "3",      "--record-every", "65536",
      "--out-dir", out.string()};
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  const int rc = cli::vrsmd_main(static_cast<int>(argv.size()), argv.data());

  bool ok = rc == 0;
  double mean_v = 0.0;
  double mean_h = 0.0;
  if (ok) {
    for (const auto& e : fs::directory_iterator(out)) {
      const auto report = run_io::read_json((e.path() / "report.json").string());
      for (const auto& r : report.at("vrsmd")) mean_v += r.at("test_mse").get<double>();
      for (const auto& r : report.at("baseline_runs")) mean_h += r.at("test_mse").get<double>();
      mean_v /= report.at("vrsmd").size();
      mean_h /= report.at("baseline_runs").size();
    }
    ok = mean_v > 0.0 && mean_h > 0.0 &&
         std::max(mean_v, mean_h) <= 2.0 * std::min(mean_v, mean_h);
  }

  // the all-positive-differences exact path at n = 10
  Vector a(10), b(10);
  for (int i = 0; i < 10; ++i) {
    a(i) = i + 1.0;
    b(i) = i + 0.5;
  }
  const auto wres = experiments::wilcoxon_signed_rank(a, b, experiments::Alternative::greater);
  ok = ok && wres.exact && wres.p_value == 0.0009765625;

  c.finish(ok, fmt("mean test MSE %.3f vs %.3f; exact p = %.10f", mean_v, mean_h, wres.p_value),
           30.0);
}

void criterion_9_constants() {
  Criterion c(9, "constant calculators match the hand fixtures");
  core::DesignProblem prob(Matrix::Identity(2, 2), Vector::Ones(2));
  mirror::SquaredL2 l2;
  solvers::SolverConfig cfg;
  cfg.eta = 1.0 / 36.0;
  cfg.inner_m = 220;
  cfg.outer_s = 1;
  const auto cc = oracles::convergence_constants(prob, l2, cfg, 0.5, 1.0);
  bool ok = std::abs(cc.tau_prime - 218.0 / 220.0) <= 1e-12;

  ok = ok && std::abs(solvers::step_size_bound(1.0, 1.0) - 1.0 / 24.0) <= 1e-12;
  ok = ok && std::abs(solvers::step_size_bound(1.0, 24.0) - 1.0 / 576.0) <= 1e-12;
  ok = ok && std::abs(solvers::step_size_bound(2.0, 1.0) - 1.0 / 12.0) <= 1e-12;
  ok = ok && std::abs(oracles::delta_bound(1.0, 0.25, 1.0, 4, 100, 10.0, 100) -
                      0.050922454361306387) <= 1e-12;
  c.finish(ok, fmt("tau' = %.15f", cc.tau_prime), 10.0);
}

void criterion_10_property_suites() {
  Criterion c(10, "property suites: round trips, invariants, determinism, threading");
  bool ok = true;
  std::string first_fail;
  const auto expect = [&](bool cond, const char* what) {
    if (!cond && ok) {
      ok = false;
      first_fail = what;
    }
  };

  // mirror round trips and Bregman nonnegativity
  {
    std::vector<std::unique_ptr<mirror::MirrorMap>> maps;
    maps.push_back(std::make_unique<mirror::SquaredL2>());
    maps.push_back(std::make_unique<mirror::PowerNorm>(0.4));
    maps.push_back(std::make_unique<mirror::PowerNorm>(1.0));
    Matrix h(3, 3);
    h << 2, 0.3, 0, 0.3, 1, 0.1, 0, 0.1, 3;
    maps.push_back(std::make_unique<mirror::QuadraticForm>(h));
    maps.push_back(std::make_unique<mirror::NegativeEntropy>());
    CounterRng rng(5150);
    for (const auto& map : maps) {
      for (int rep = 0; rep < 40; ++rep) {
        Vector u(3), w(3);
        for (Index j = 0; j < 3; ++j) {
          u(j) = 0.05 + rng.uniform01();
          w(j) = 0.05 + rng.uniform01();
          if (map->name() != "entropy" && rng.uniform01() < 0.5) u(j) = -u(j);
          if (map->name() != "entropy" && rng.uniform01() < 0.5) w(j) = -w(j);
        }
        expect((map->grad_inverse(map->grad(u)) - u).lpNorm<Eigen::Infinity>() <= 1e-10,
               "mirror round trip");
        expect(mirror::bregman_divergence(*map, u, w) >= 0.0, "bregman nonnegative");
        for (Index j = 0; j < 3; ++j) {
          const double step = 1e-6;
          Vector up = u, um = u;
          up(j) += step;
          um(j) -= step;
          const double fd = (map->psi(up) - map->psi(um)) / (2.0 * step);
          expect(std::abs(fd - map->grad(u)(j)) <= 1e-6 * std::max(1.0, std::abs(fd)),
                 "mirror gradient finite difference");
        }
      }
    }
  }

  // objective finite differences, the singular-value inequality, recovery lemmas
  {
    const auto x = gaussian_matrix(9, 7, 31415);
    core::DesignProblem prob(x, gaussian_vector(9, 92653));
    CounterRng rng(58979);
    for (int rep = 0; rep < 20; ++rep) {
      const Vector beta = gaussian_vector(7, 10000 + rep);
      Vector dir(7);
      for (Index j = 0; j < 7; ++j) dir(j) = rng.normal();
      dir.normalize();
      const double h = 1e-5;
      const double fd = (core::objective_value(prob, beta + h * dir) -
                         core::objective_value(prob, beta - h * dir)) /
                        (2 * h);
      const double an = core::full_gradient(prob, beta).dot(dir);
      expect(std::abs(fd - an) <= 1e-6 * std::max(1.0, std::abs(an)), "objective finite difference");
    }
    const double sm2 = prob.smallest_singular() * prob.smallest_singular();
    for (int rep = 0; rep < 100; ++rep) {
      Vector coef(prob.rank());
      for (Index j = 0; j < coef.size(); ++j) coef(j) = rng.normal();
      const Vector u = prob.basis_row() * coef;
      expect((prob.x() * u).squaredNorm() >= sm2 * u.squaredNorm() - 1e-10,
             "smallest-singular-value inequality");
    }
  }
  {
    const auto inst = recovery_instance();
    const double kappa = oracles::check_s_good(inst.prob, 2, 2);
    const double sm = inst.prob.smallest_singular();
    const double p = static_cast<double>(inst.prob.p());
    const auto l1 = oracles::min_l1_interpolant(inst.prob);
    for (const double delta : {0.1, 0.3}) {
      const auto cert = oracles::min_mirror_interpolant(inst.prob, mirror::PowerNorm(delta));
      expect(cert.converged, "interpolant oracle convergence");
      expect(cert.beta_star.lpNorm<1>() <=
                 std::pow(p, delta / (1.0 + delta)) * l1.beta.lpNorm<1>() + 1e-8,
             "l1 mass bound for the power interpolant");
    }
    CounterRng rng(26433);
    for (int rep = 0; rep < 60; ++rep) {
      const Vector beta = gaussian_vector(inst.prob.p(), 20000 + rep);
      Index i = static_cast<Index>(rng.uniform_index(16)), j = static_cast<Index>(rng.uniform_index(16));
      if (i == j) j = (j + 1) % 16;
      const double lhs = std::abs(beta(i)) + std::abs(beta(j));
      const double rhs = (std::sqrt(2.0) + kappa * std::sqrt(p)) / sm * (inst.prob.x() * beta).norm() +
                         kappa * beta.lpNorm<1>();
      expect(lhs <= rhs + 1e-9, "support-restricted l1 bound");
    }
  }

  // exhaustive unbiasedness and variance shrink
  {
    const auto x = gaussian_matrix(10, 4, 83279);
    const Vector beta_star = gaussian_vector(4, 50288);
    core::DesignProblem prob(x, x * beta_star);
    const Vector beta0 = Vector::Zero(4);
    const Vector beta = beta_star + 0.01 * (beta0 - beta_star);
    const Vector snap = beta_star + 0.005 * (beta0 - beta_star);
    const Vector snap_grad = core::full_gradient(prob, snap);
    const Vector full = core::full_gradient(prob, beta);
    Vector mean = Vector::Zero(4);
    double var_vr = 0.0, var_sg = 0.0;
    for (Index i = 0; i < prob.n(); ++i) {
      const Vector v = solvers::variance_reduced_direction(prob, i, beta, snap, snap_grad);
      mean += v;
      var_vr += (v - full).squaredNorm();
      var_sg += (core::sample_gradient(prob, i, beta) - full).squaredNorm();
    }
    mean /= static_cast<double>(prob.n());
    expect((mean - full).lpNorm<Eigen::Infinity>() <= 1e-12, "exhaustive unbiasedness");
    expect(var_vr < var_sg, "variance shrink");
  }

  // determinism and thread-count invariance
  {
    const auto x = gaussian_matrix(12, 9, 50289);
    core::DesignProblem prob(x, gaussian_vector(12, 41971));
    mirror::PowerNorm map(0.5);
    solvers::SolverConfig cfg;
    cfg.eta = 0.005;
    cfg.inner_m = 12;
    cfg.outer_s = 50;
    cfg.seed = 69399;
    const auto r1 = solvers::run_vrsmd(prob, map, cfg);
    const auto r2 = solvers::run_vrsmd(prob, map, cfg);
    expect(testutil::bitwise_equal(r1.final_beta, r2.final_beta) &&
               r1.rng_transcript_hash == r2.rng_transcript_hash,
           "seed determinism");

    core::SparseGroundTruth truth{gaussian_vector(9, 37510), 9};
    const auto seq = experiments::delta_sweep(prob, truth, {0.2, 0.4, 0.8}, cfg, 1);
    const auto par = experiments::delta_sweep(prob, truth, {0.2, 0.4, 0.8}, cfg, 4);
    for (std::size_t k = 0; k < 3; ++k)
      expect(testutil::bitwise_equal(seq.entries[k].run.final_beta, par.entries[k].run.final_beta),
             "thread-count invariance");
    const auto inst = recovery_instance();
    expect(oracles::check_s_good(inst.prob, 2, 1) == oracles::check_s_good(inst.prob, 2, 4),
           "threaded certification invariance");
  }

  c.finish(ok, ok ? "all property checks hold" : "first failure: " + first_fail, 60.0);
}

}  // namespace

int main() {
  criterion_1_svrg_reduction();
  criterion_2_corollary1();
  criterion_3_implicit_regularization();
  criterion_4_dual_range();
  criterion_5_sparse_recovery();
  criterion_6_exact_l1_recovery();
  criterion_7_delta_trend();
  criterion_8_compare_harness();
  criterion_9_constants();
  criterion_10_property_suites();

  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all acceptance criteria passed\n");
  return 0;
}
