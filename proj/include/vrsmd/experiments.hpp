#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "vrsmd/core.hpp"
#include "vrsmd/mirror.hpp"
#include "vrsmd/solvers.hpp"

namespace vrsmd::experiments {

enum class CovMode { rows, cols };

/// Equicorrelated Gaussian design with a sparse truth.  `rows` applies the
/// covariance on the left (row correlation, as stated); `cols` is the more
/// common feature-correlation variant.
struct SimulationSpec {
  int n = 0;
  int p = 0;
  int s = 0;
  double rho = 0.0;
  double noise_sd = 0.0;
  std::uint64_t seed = 0;
  CovMode cov = CovMode::rows;
};

struct SimulatedData {
  Matrix x;
  Vector y;
  Vector beta_true;
};

// Draws (X, y, beta_true) without paying for the SVD cache; useful when the
// caller only writes files.
SimulatedData simulate_raw(const SimulationSpec& spec);

std::pair<core::DesignProblem, core::SparseGroundTruth> simulate_sparse_data(
    const SimulationSpec& spec);

struct CvResult {
  int best_outer = 0;             // 1-based outer iteration count
  std::vector<double> curve;      // fold-averaged held-out MSE per outer iteration
};

// Seeded shuffle split into k folds whose sizes differ by at most one; the
// folds partition {0..n-1} exactly.
std::vector<std::vector<int>> make_folds(int n, int k, std::uint64_t seed);

// k-fold early stopping: record held-out squared error after every outer
// iteration, average across folds, return the argmin (ties -> smallest).
CvResult kfold_early_stopping(const core::DesignProblem& prob, const mirror::MirrorMap& psi,
                              const solvers::SolverConfig& cfg, int k, int threads = 1);

enum class Alternative { two_sided, less, greater };

struct WilcoxonResult {
  double p_value = 1.0;
  double w_plus = 0.0;   // signed-rank statistic (sum of ranks of positive diffs)
  int n_used = 0;        // pairs remaining after dropping zero differences
  bool exact = false;    // exact distribution (n_used <= 20) vs normal approx
  bool all_zero = false; // a == b elementwise; p = 1 with a warning
  std::string warning;
};

// Differences are a - b; zero differences are dropped (standard convention).
WilcoxonResult wilcoxon_signed_rank(const Vector& a, const Vector& b, Alternative alternative);

struct SweepEntry {
  double delta = 0.0;
  solvers::SolverRun run;
  double l1_error = 0.0;  // ||final beta - beta_true||_1
  bool failed = false;
  std::string error;
};

struct SweepReport {
  std::vector<SweepEntry> entries;
};

// Runs VRSMD with PowerNorm(delta) per delta; per-entry failures are
// captured and the sweep continues.  Sub-seeds are derived from the delta
// value itself so adding an entry does not shift the others.
SweepReport delta_sweep(const core::DesignProblem& prob, const core::SparseGroundTruth& truth,
                        const std::vector<double>& deltas, const solvers::SolverConfig& cfg,
                        int threads = 1);

struct TrainTestSplit {
  std::vector<int> train_rows;
  std::vector<int> test_rows;
};

TrainTestSplit split_rows(int n, double train_ratio, std::uint64_t seed);

core::DesignProblem subproblem(const core::DesignProblem& prob, const std::vector<int>& rows);

struct CompareArmResult {
  double train_objective = 0.0;
  double test_mse = 0.0;
  double l1_error = 0.0;  // vs beta_true when available, else 0
  double l2_error = 0.0;
  double wall_seconds = 0.0;
};

struct CompareReport {
  std::vector<CompareArmResult> vrsmd;
  std::vector<CompareArmResult> baseline;
  std::vector<solvers::SolverRun> vrsmd_runs;
  std::vector<solvers::SolverRun> baseline_runs;
  std::string baseline_name;
  double p_time_one_sided = 1.0;   // H1: baseline slower than VRSMD
  double p_error_two_sided = 1.0;  // H1: test errors differ
};

struct CompareConfig {
  double train_ratio = 0.75;
  int repeats = 10;
  double power_delta = 0.1;
  solvers::SolverConfig solver;    // eta/m/S/option/seed for the VRSMD arm
  double hadamard_eta = 0.0;       // defaults to solver.eta when 0
  double hadamard_init_scale = 1e-2;
  bool baseline_self = false;      // compare VRSMD against itself (diagnostics)
};

CompareReport compare_vrsmd_hadamard(const core::DesignProblem& prob,
                                     const Vector* beta_true,  // optional
                                     const CompareConfig& cfg, int threads = 1);

}  // namespace vrsmd::experiments
