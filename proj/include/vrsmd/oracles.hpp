#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "vrsmd/core.hpp"
#include "vrsmd/mirror.hpp"
#include "vrsmd/solvers.hpp"

namespace vrsmd::oracles {

/// Exhaustive certification refused because the instance is too large; a
/// sampled constant would not certify anything.
class BudgetError : public std::runtime_error {
 public:
  explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

struct InterpolantCertificate {
  Vector beta_star;
  double feasibility_residual = 0.0;  // ||X beta* - P_col(X) y||_2
  double dual_range_residual = 0.0;   // ||grad psi(beta*) - P_col(X^T) grad psi(beta*)||_2
  double psi_value = 0.0;
  bool converged = false;
  int iterations = 0;
  std::string method;
  std::string message;
};

struct MirrorInterpolantOptions {
  int max_newton_iterations = 400;
  int max_fallback_iterations = 100000;
  double tolerance = 1e-11;  // relative feasibility target
};

// Minimum l2-norm interpolant X^+ y via the cached SVD.
Vector min_l2_interpolant(const core::DesignProblem& prob);

// Solves argmin psi(beta) s.t. X beta = P_col(X) y through the dual
// coefficients a (beta = (grad psi)^-1(X^T a)), by damped Newton with a
// high-accuracy full-batch mirror-descent fallback.
InterpolantCertificate min_mirror_interpolant(const core::DesignProblem& prob,
                                              const mirror::MirrorMap& psi,
                                              const MirrorInterpolantOptions& opts = {});

struct L1Interpolant {
  Vector beta;
  double l1_value = 0.0;
};

// Exact LP solution of argmin ||beta||_1 s.t. X beta = P_col(X) y
// (split beta = b+ - b-, simplex).  Reports one minimizer plus the optimal
// value; the minimizer is unique only under s-goodness.
L1Interpolant min_l1_interpolant(const core::DesignProblem& prob);

// kappa* = max over supports |I| <= s of max_{u in N(X)} ||u_I||_1/||u||_1,
// certified exhaustively (LPs over a null-space description, one per support
// and sign pattern).  X is s-good iff the returned kappa* < 1/2.
double check_s_good(const core::DesignProblem& prob, int s, int threads = 1);

// gamma = min over supports |I| = s of lambda_min(X_I^T X_I)/n, exhaustive.
double re_constant(const core::DesignProblem& prob, int s, int threads = 1);

// Largest delta for which the sparse-recovery bound guarantees l1 error xi.
double delta_bound(double xi, double kappa, double gamma, int s, int n, double y_norm, int p);

// The guaranteed l1 error for a given delta (inverse of delta_bound).
double predicted_l1_error(double delta, double kappa, double gamma, int s, int n, double y_norm,
                          int p);

struct RecoveryCertificate {
  double kappa = 0.0;
  double gamma = 0.0;
  int s = 0;
  double delta_max = 0.0;
  double predicted_xi = 0.0;
  bool s_good = false;
};

RecoveryCertificate certify_recovery(const core::DesignProblem& prob, int s, double xi,
                                     int threads = 1);

struct ConvergenceConstants {
  double tau = 0.0;           // (12 L eta^2/alpha + ell/(m mu)) / (eta - 12 L eta^2/alpha)
  double tau_prime = 0.0;     // ell/(m mu) replaced by ell n/(m s_m^2)
  double tau_double_prime = 0.0;  // the alpha = ell = 1 specialization
  double mu_ls = 0.0;         // least-squares PL/QG constant s_m^2/n
};

ConvergenceConstants convergence_constants(const core::DesignProblem& prob,
                                           const mirror::MirrorMap& psi,
                                           const solvers::SolverConfig& cfg, double mu, double ell,
                                           double radius_k = 1.0);

enum class BoundKind { eq6, eq11, eq13, eq16, eq18, cor1 };

struct BoundInputs {
  std::optional<double> alpha;
  std::optional<double> smooth_l;
  std::optional<double> eta;
  std::optional<double> inner_m;
  std::optional<double> outer_s;
  std::optional<double> total_t;  // m * S
  std::optional<double> b_norm;   // bound B on ||grad psi(output)||_2
  std::optional<double> s_min;    // smallest nonzero singular value
  std::optional<double> n;
  std::optional<double> bregman_init;  // D_psi(target, beta0)
  std::optional<double> f_gap_init;    // F(beta0) - F(target)
  std::optional<double> proj_y_sq;     // ||P_col(X) y||_2^2
  std::optional<double> tau_prime;
  std::optional<double> tau_double_prime;
};

// Numeric right-hand side of the named inequality, exactly as printed.
double theoretical_bound_rhs(BoundKind kind, const BoundInputs& in);

struct EpsilonReport {
  double epsilon = 0.0;
  double psi_gap = 0.0;
  double f_gap = 0.0;
  bool psi_ok = false;
  bool f_ok = false;
};

EpsilonReport epsilon_solution_check(const core::DesignProblem& prob, const mirror::MirrorMap& psi,
                                     const Vector& beta, const InterpolantCertificate& interpolant,
                                     double epsilon);

}  // namespace vrsmd::oracles
