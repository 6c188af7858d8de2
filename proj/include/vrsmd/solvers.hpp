#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vrsmd/core.hpp"
#include "vrsmd/mirror.hpp"

namespace vrsmd::solvers {

enum class OptionVariant { option_i, option_ii };

enum class RunStatus { ok, aborted_non_finite, domain_violation };

/// One solver configuration; all randomness flows from `seed`.
///
/// The RNG draw order is part of the contract (it makes transcripts
/// reproducible and lets an external implementation share the stream):
/// each outer loop draws its m sample indices, then one snapshot index.
/// Option I draws its output index over all S*m inner iterates up front
/// from the sub-stream derive_seed(seed, "option-i-output"), so the sample
/// stream is identical across options and traces diverge only at outer-loop
/// boundaries.
struct SolverConfig {
  double eta = 0.1;
  int inner_m = 1;
  int outer_s = 1;
  OptionVariant option = OptionVariant::option_ii;
  std::uint64_t seed = 0;
  Vector init_dual_coeff;  // a with beta0 = (grad psi)^-1(X^T a); empty = zero
  int record_every = 1;
  bool keep_iterates = false;  // store every inner iterate (desk scale only)
};

struct TraceRecord {
  int outer = 0;  // s, 1-based
  int inner = 0;  // t, 1-based
  double objective = 0.0;
  double psi_value = 0.0;
  double dual_residual = 0.0;  // || grad psi(beta) - P_col(X^T) grad psi(beta) ||_2
  double inf_norm = 0.0;
  double dual_norm = 0.0;  // || grad psi(beta) ||_2; in memory only, not in the CSV
};

struct SolverRun {
  Vector final_beta;
  std::vector<TraceRecord> trace;
  // Per-outer-loop estimate: Option II's snapshot (the output if stopped at
  // S = s), Option I's chaining iterate.
  std::vector<Vector> outer_estimates;
  std::vector<Vector> iterates;  // pre-update inner iterates, if requested
  std::uint64_t rng_transcript_hash = 0;
  double b_observed = 0.0;  // max ||grad psi(beta)||_2 over recorded iterates
  double k_observed = 0.0;  // max ||beta||_inf over recorded iterates
  RunStatus status = RunStatus::ok;
  std::string message;
  std::vector<std::string> warnings;
  double wall_seconds = 0.0;
};

// v = grad f_i(beta) - grad f_i(snapshot) + snapshot_grad; its mean over
// i = 0..n-1 equals the full gradient at beta.
Vector variance_reduced_direction(const core::DesignProblem& prob, Index i, const Vector& beta,
                                  const Vector& snapshot, const Vector& snapshot_grad);

// Sufficient stability threshold alpha / (24 L); not necessary, so solvers
// warn rather than refuse above it.
double step_size_bound(double alpha, double smoothness_l);

SolverRun run_vrsmd(const core::DesignProblem& prob, const mirror::MirrorMap& psi,
                    const SolverConfig& cfg);

// Plain stochastic mirror descent (no variance reduction), constant eta.
SolverRun run_smd(const core::DesignProblem& prob, const mirror::MirrorMap& psi,
                  const SolverConfig& cfg);

// Deterministic mirror descent with the full gradient, constant eta.
SolverRun run_mirror_descent(const core::DesignProblem& prob, const mirror::MirrorMap& psi,
                             const SolverConfig& cfg);

// Gradient descent on the reparameterization beta = u.*u - v.*v with
// u = v = init_scale * ones at the start (so beta starts at zero).
SolverRun run_hadamard_gd(const core::DesignProblem& prob, const SolverConfig& cfg,
                          double init_scale);

}  // namespace vrsmd::solvers
