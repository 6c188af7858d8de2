#include "vrsmd/oracles.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "vrsmd/parallel.hpp"
#include "vrsmd/simplex.hpp"

namespace vrsmd::oracles {

namespace {

using core::DesignProblem;
using mirror::MirrorMap;
using mirror::PowerNorm;

// Convex dual of the interpolation problem, phi(a) = psi*(X^T a) - a.(P y),
// with psi*(u) = <u, ginv(u)> - psi(ginv(u)); its gradient is
// g(a) = X ginv(X^T a) - P y.  Steps that leave the evaluable region (for
// example entropy after exp underflow) count as +infinity so the line search
// backs off.
double dual_objective(const DesignProblem& prob, const MirrorMap& psi, const Vector& a,
                      const Vector& y_proj) {
  const Vector u = prob.x().transpose() * a;
  Vector beta;
  double psi_beta;
  try {
    beta = psi.grad_inverse(u);
    psi_beta = psi.psi(beta);
  } catch (const std::domain_error&) {
    return std::numeric_limits<double>::infinity();
  }
  const double value = u.dot(beta) - psi_beta - a.dot(y_proj);
  return std::isfinite(value) ? value : std::numeric_limits<double>::infinity();
}

struct DualSolveState {
  Vector a;
  Vector beta;
  Vector residual;  // X beta - y_proj
  double residual_norm = 0.0;
  int iterations = 0;
};

// Damped Newton on g(a) = 0 with an Armijo line search on phi; returns the
// best point visited.
DualSolveState newton_solve(const DesignProblem& prob, const MirrorMap& psi, Vector a0,
                            const Vector& y_proj, int max_iterations, double tol_abs) {
  DualSolveState st;
  st.a = std::move(a0);
  st.beta = psi.grad_inverse(prob.x().transpose() * st.a);
  st.residual = prob.x() * st.beta - y_proj;
  st.residual_norm = st.residual.norm();

  Vector best_a = st.a;
  double best_norm = st.residual_norm;
  double phi = dual_objective(prob, psi, st.a, y_proj);
  double damping = 0.0;

  for (int it = 0; it < max_iterations && st.residual_norm > tol_abs; ++it) {
    ++st.iterations;
    Matrix j(prob.n(), prob.n());
    if (psi.inverse_jacobian_is_diagonal()) {
      const Vector d = psi.inverse_jacobian_diag(prob.x().transpose() * st.a);
      j = prob.x() * d.asDiagonal() * prob.x().transpose();
    } else {
      j = prob.x() * psi.inverse_jacobian(prob.x().transpose() * st.a) * prob.x().transpose();
    }

    Vector step;
    const double jscale = std::max(1.0, j.diagonal().cwiseAbs().maxCoeff());
    for (;;) {
      Matrix jd = j;
      if (damping > 0.0) jd.diagonal().array() += damping * jscale;
      Eigen::LDLT<Matrix> ldlt(jd);
      step = -ldlt.solve(st.residual);
      if (step.allFinite() && st.residual.dot(step) < 0.0) break;  // descent for phi
      damping = damping == 0.0 ? 1e-10 : damping * 100.0;
      if (damping > 1e12) { step = -st.residual; break; }  // gradient direction
    }

    // Armijo backtracking on phi.
    const double slope = st.residual.dot(step);
    double t = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls) {
      const Vector a_try = st.a + t * step;
      const double phi_try = dual_objective(prob, psi, a_try, y_proj);
      if (std::isfinite(phi_try) && phi_try <= phi + 1e-4 * t * slope) {
        st.a = a_try;
        phi = phi_try;
        moved = true;
        break;
      }
      t *= 0.5;
    }
    if (!moved) break;

    st.beta = psi.grad_inverse(prob.x().transpose() * st.a);
    st.residual = prob.x() * st.beta - y_proj;
    st.residual_norm = st.residual.norm();
    if (st.residual_norm < best_norm) {
      best_norm = st.residual_norm;
      best_a = st.a;
      damping = std::max(0.0, damping * 0.1);
      if (damping < 1e-14) damping = 0.0;
    } else {
      damping = damping == 0.0 ? 1e-8 : damping * 10.0;
    }
  }

  if (best_norm < st.residual_norm) {
    st.a = best_a;
    st.beta = psi.grad_inverse(prob.x().transpose() * st.a);
    st.residual = prob.x() * st.beta - y_proj;
    st.residual_norm = st.residual.norm();
  }
  return st;
}

// Gradient descent on phi with backtracking: the full-batch mirror-descent
// fallback for ill-conditioned Jacobians.
DualSolveState fallback_solve(const DesignProblem& prob, const MirrorMap& psi, DualSolveState st,
                              const Vector& y_proj, int max_iterations, double tol_abs) {
  double phi = dual_objective(prob, psi, st.a, y_proj);
  double step = 1.0 / std::max(1.0, prob.smoothness_l());
  for (int it = 0; it < max_iterations && st.residual_norm > tol_abs; ++it) {
    ++st.iterations;
    bool moved = false;
    for (int ls = 0; ls < 80; ++ls) {
      const Vector a_try = st.a - step * st.residual;
      const double phi_try = dual_objective(prob, psi, a_try, y_proj);
      if (std::isfinite(phi_try) &&
          phi_try <= phi - 1e-4 * step * st.residual.squaredNorm()) {
        st.a = a_try;
        phi = phi_try;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
    st.beta = psi.grad_inverse(prob.x().transpose() * st.a);
    st.residual = prob.x() * st.beta - y_proj;
    st.residual_norm = st.residual.norm();
    step *= 2.0;
  }
  return st;
}

std::vector<std::vector<int>> enumerate_supports(int p, int s) {
  std::vector<std::vector<int>> out;
  std::vector<int> idx(static_cast<std::size_t>(s));
  for (int i = 0; i < s; ++i) idx[static_cast<std::size_t>(i)] = i;
  for (;;) {
    out.push_back(idx);
    int k = s - 1;
    while (k >= 0 && idx[static_cast<std::size_t>(k)] == p - s + k) --k;
    if (k < 0) break;
    ++idx[static_cast<std::size_t>(k)];
    for (int j = k + 1; j < s; ++j)
      idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
  return out;
}

double binomial_count(int p, int s) {
  double c = 1.0;
  for (int i = 0; i < s; ++i) c = c * static_cast<double>(p - i) / static_cast<double>(i + 1);
  return c;
}

}  // namespace

Vector min_l2_interpolant(const DesignProblem& prob) { return prob.pinv_apply(prob.y()); }

InterpolantCertificate min_mirror_interpolant(const DesignProblem& prob, const MirrorMap& psi,
                                              const MirrorInterpolantOptions& opts) {
  const Vector y_proj = prob.project_col_x(prob.y());
  const double tol_abs = opts.tolerance * std::max(1.0, y_proj.norm());

  DualSolveState st;
  st.a = Vector::Zero(prob.n());
  std::string method = "newton";

  // Steep inverse maps (PowerNorm with small delta) get a continuation path:
  // solve at a milder delta first and re-target the dual coefficients.
  const auto* power = dynamic_cast<const PowerNorm*>(&psi);
  if (power != nullptr && power->delta() < 0.2) {
    std::vector<double> path;
    for (double d = 0.4; d > power->delta() * 1.3; d *= 0.6) path.push_back(d);
    Vector a = Vector::Zero(prob.n());
    int used = 0;
    for (std::size_t k = 0; k < path.size(); ++k) {
      PowerNorm stage(path[k]);
      DualSolveState stage_state =
          newton_solve(prob, stage, a, y_proj, opts.max_newton_iterations, tol_abs);
      used += stage_state.iterations;
      // Re-target: a_next ~ argmin ||X^T a - grad psi_next(beta_stage)||.
      const double next_delta = k + 1 < path.size() ? path[k + 1] : power->delta();
      PowerNorm next(next_delta);
      a = prob.pinv_t_apply(next.grad(stage_state.beta));
    }
    st = newton_solve(prob, psi, a, y_proj, opts.max_newton_iterations, tol_abs);
    st.iterations += used;
    method = "newton+continuation";
  } else {
    st = newton_solve(prob, psi, st.a, y_proj, opts.max_newton_iterations, tol_abs);
  }

  if (st.residual_norm > tol_abs) {
    st = fallback_solve(prob, psi, std::move(st), y_proj, opts.max_fallback_iterations, tol_abs);
    method += "+fallback";
  }

  InterpolantCertificate cert;
  cert.beta_star = st.beta;
  cert.feasibility_residual = st.residual_norm;
  // grad psi(beta*) = X^T a by construction; fall back to the dual point when
  // beta* left the map's domain (underflow on a failed solve).
  const Vector theta =
      psi.in_domain(st.beta) ? psi.grad(st.beta) : Vector(prob.x().transpose() * st.a);
  cert.dual_range_residual = (theta - prob.project_row_x(theta)).norm();
  cert.psi_value = psi.in_domain(st.beta) ? psi.psi(st.beta)
                                          : std::numeric_limits<double>::quiet_NaN();
  cert.converged = st.residual_norm <= tol_abs;
  cert.iterations = st.iterations;
  cert.method = method;
  if (!cert.converged) {
    std::ostringstream os;
    os << "dual solve stopped with feasibility residual " << st.residual_norm << " (target "
       << tol_abs << ")";
    cert.message = os.str();
  }
  return cert;
}

L1Interpolant min_l1_interpolant(const DesignProblem& prob) {
  const Index p = prob.p();
  const Index r = prob.rank();
  // Full-row-rank restatement of X beta = P_col(X) y: U_r^T X beta = U_r^T y.
  const Matrix a_eq = prob.basis_col().transpose() * prob.x();
  const Vector b_eq = prob.basis_col().transpose() * prob.y();

  Matrix a(r, 2 * p);
  a.leftCols(p) = a_eq;
  a.rightCols(p) = -a_eq;
  const Vector c = Vector::Ones(2 * p);

  const LpResult lp = solve_lp(a, b_eq, c);
  if (lp.status != LpStatus::optimal)
    throw std::runtime_error("min_l1_interpolant: LP solver failed (status not optimal)");

  L1Interpolant out;
  out.beta = lp.x.head(p) - lp.x.tail(p);
  out.l1_value = lp.objective;
  return out;
}

double check_s_good(const DesignProblem& prob, int s, int threads) {
  const int p = static_cast<int>(prob.p());
  const int null_dim = static_cast<int>(prob.p() - prob.rank());
  if (s < 1 || s > p) throw std::invalid_argument("check_s_good: s out of range");
  if (null_dim > 6 || p > 20)
    throw BudgetError("check_s_good: not certifiable at desk scale (need dim N(X) <= 6, p <= 20)");
  if (null_dim == 0) return 0.0;

  // u in N(X)  <=>  V_r^T u = 0; budget row ||u||_1 <= 1 via the split
  // u = u+ - u-.  For each support and sign pattern, maximize tau.u_I.
  const Matrix vr_t = prob.basis_row().transpose();  // r x p
  const Index r = vr_t.rows();
  Matrix a(r + 1, 2 * p + 1);
  a.setZero();
  a.block(0, 0, r, p) = vr_t;
  a.block(0, p, r, p) = -vr_t;
  a.row(r).head(2 * p).setOnes();
  a(r, 2 * p) = 1.0;
  Vector b = Vector::Zero(r + 1);
  b(r) = 1.0;

  const auto supports = enumerate_supports(p, s);
  const int patterns = 1 << (s - 1);  // tau and -tau give the same value
  std::vector<double> kappa_per_support(supports.size(), 0.0);

  parallel_for(supports.size(), threads, [&](std::size_t k) {
    const auto& support = supports[k];
    double best = 0.0;
    for (int mask = 0; mask < patterns; ++mask) {
      Vector c = Vector::Zero(2 * p + 1);
      for (int j = 0; j < s; ++j) {
        const double tau = (j > 0 && ((mask >> (j - 1)) & 1)) ? -1.0 : 1.0;
        c(support[static_cast<std::size_t>(j)]) = -tau;      // u+ part (maximize)
        c(p + support[static_cast<std::size_t>(j)]) = tau;   // u- part
      }
      const LpResult lp = solve_lp(a, b, c);
      if (lp.status != LpStatus::optimal)
        throw std::runtime_error("check_s_good: support LP failed");
      best = std::max(best, -lp.objective);
    }
    kappa_per_support[k] = best;
  });

  double kappa = 0.0;
  for (const double v : kappa_per_support) kappa = std::max(kappa, v);
  return kappa;
}

double re_constant(const DesignProblem& prob, int s, int threads) {
  const int p = static_cast<int>(prob.p());
  if (s < 1 || s > p) throw std::invalid_argument("re_constant: s out of range");
  if (p > 20 || binomial_count(p, s) > 1e6)
    throw BudgetError("re_constant: not certifiable at desk scale (support enumeration too large)");

  const auto supports = enumerate_supports(p, s);
  std::vector<double> lambda_min(supports.size(), 0.0);
  parallel_for(supports.size(), threads, [&](std::size_t k) {
    const auto& support = supports[k];
    Matrix xi(prob.n(), s);
    for (int j = 0; j < s; ++j) xi.col(j) = prob.x().col(support[static_cast<std::size_t>(j)]);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(xi.transpose() * xi);
    lambda_min[k] = eig.eigenvalues().minCoeff();
  });

  double min_lambda = lambda_min.empty() ? 0.0 : lambda_min.front();
  for (const double v : lambda_min) min_lambda = std::min(min_lambda, v);
  return min_lambda / static_cast<double>(prob.n());
}

namespace {

double recovery_amplifier(double kappa, double gamma, int s, int n, double y_norm) {
  return (1.0 - 2.0 * kappa) * std::sqrt(static_cast<double>(n) * gamma) /
         (std::sqrt(static_cast<double>(s)) * y_norm);
}

}  // namespace

double delta_bound(double xi, double kappa, double gamma, int s, int n, double y_norm, int p) {
  if (!(kappa >= 0.0) || kappa >= 0.5)
    throw std::invalid_argument("delta_bound: theorem inapplicable, needs kappa < 1/2");
  if (!(gamma > 0.0) || !(xi > 0.0) || !(y_norm > 0.0) || s < 1 || n < 1 || p < 2)
    throw std::invalid_argument("delta_bound: invalid inputs");
  const double inner = std::log1p(recovery_amplifier(kappa, gamma, s, n, y_norm) * xi);
  const double denom = std::log(static_cast<double>(p)) - inner;
  if (!(denom > 0.0))
    throw std::invalid_argument("delta_bound: xi too large for this p (nonpositive denominator)");
  return inner / denom;
}

double predicted_l1_error(double delta, double kappa, double gamma, int s, int n, double y_norm,
                          int p) {
  if (!(kappa >= 0.0) || kappa >= 0.5)
    throw std::invalid_argument("predicted_l1_error: theorem inapplicable, needs kappa < 1/2");
  if (!(gamma > 0.0) || !(delta >= 0.0) || !(y_norm > 0.0) || s < 1 || n < 1 || p < 2)
    throw std::invalid_argument("predicted_l1_error: invalid inputs");
  const double amp = recovery_amplifier(kappa, gamma, s, n, y_norm);
  return (std::pow(static_cast<double>(p), delta / (1.0 + delta)) - 1.0) / amp;
}

RecoveryCertificate certify_recovery(const DesignProblem& prob, int s, double xi, int threads) {
  RecoveryCertificate cert;
  cert.s = s;
  cert.kappa = check_s_good(prob, s, threads);
  cert.gamma = re_constant(prob, s, threads);
  cert.s_good = cert.kappa < 0.5;
  if (cert.s_good && cert.gamma > 0.0) {
    cert.delta_max = delta_bound(xi, cert.kappa, cert.gamma, s, static_cast<int>(prob.n()),
                                 prob.y().norm(), static_cast<int>(prob.p()));
    cert.predicted_xi = predicted_l1_error(cert.delta_max, cert.kappa, cert.gamma, s,
                                           static_cast<int>(prob.n()), prob.y().norm(),
                                           static_cast<int>(prob.p()));
  }
  return cert;
}

ConvergenceConstants convergence_constants(const DesignProblem& prob, const MirrorMap& psi,
                                           const solvers::SolverConfig& cfg, double mu, double ell,
                                           double radius_k) {
  if (!(mu > 0.0) || !(ell > 0.0)) throw std::invalid_argument("convergence_constants: mu, ell > 0");
  const double alpha = psi.strong_convexity_alpha(radius_k);
  const double l = prob.smoothness_l();
  const double eta = cfg.eta;
  const double m = static_cast<double>(cfg.inner_m);
  const double n = static_cast<double>(prob.n());
  const double sm2 = prob.smallest_singular() * prob.smallest_singular();

  const double denom = eta - 12.0 * l * eta * eta / alpha;
  if (!(denom > 0.0))
    throw std::invalid_argument("convergence_constants: eta too large for linear-rate regime");
  const double denom_l2 = eta - 12.0 * l * eta * eta;
  if (!(denom_l2 > 0.0))
    throw std::invalid_argument("convergence_constants: eta too large for linear-rate regime");

  ConvergenceConstants out;
  out.mu_ls = sm2 / n;
  out.tau = (12.0 * l * eta * eta / alpha + ell / (m * mu)) / denom;
  out.tau_prime = (12.0 * l * eta * eta / alpha + ell * n / (m * sm2)) / denom;
  out.tau_double_prime = (12.0 * l * eta * eta + n / (m * sm2)) / denom_l2;
  return out;
}

namespace {

double need(const std::optional<double>& v, const char* name) {
  if (!v) throw std::invalid_argument(std::string("theoretical_bound_rhs: missing constant ") + name);
  return *v;
}

}  // namespace

double theoretical_bound_rhs(BoundKind kind, const BoundInputs& in) {
  switch (kind) {
    case BoundKind::eq6: {
      const double alpha = need(in.alpha, "alpha");
      const double l = need(in.smooth_l, "smooth_l");
      const double eta = need(in.eta, "eta");
      const double t = need(in.total_t, "total_t");
      const double m = need(in.inner_m, "inner_m");
      const double d = need(in.bregman_init, "bregman_init");
      const double f_gap = need(in.f_gap_init, "f_gap_init");
      return alpha / ((alpha * eta - 24.0 * l * eta * eta) * t) *
             (d + 12.0 * l * eta * eta * m / alpha * f_gap);
    }
    case BoundKind::eq11: {
      const double alpha = need(in.alpha, "alpha");
      const double l = need(in.smooth_l, "smooth_l");
      const double eta = need(in.eta, "eta");
      const double t = need(in.total_t, "total_t");
      const double m = need(in.inner_m, "inner_m");
      const double d = need(in.bregman_init, "bregman_init");
      const double f_gap = need(in.f_gap_init, "f_gap_init");
      const double b = need(in.b_norm, "b_norm");
      const double sm = need(in.s_min, "s_min");
      const double n = need(in.n, "n");
      return b / sm *
             std::sqrt(alpha / ((alpha * eta - 24.0 * l * eta * eta) * t) *
                       (2.0 * n * d + 24.0 * n * l * eta * eta * m / alpha * f_gap));
    }
    case BoundKind::eq13: {
      // As printed: the F-gap denominator uses 8 L eta^2 where eq6 uses 24.
      const double alpha = need(in.alpha, "alpha");
      const double l = need(in.smooth_l, "smooth_l");
      const double eta = need(in.eta, "eta");
      const double t = need(in.total_t, "total_t");
      const double m = need(in.inner_m, "inner_m");
      const double d = need(in.bregman_init, "bregman_init");
      const double f_gap = need(in.f_gap_init, "f_gap_init");
      return alpha / ((alpha * eta - 8.0 * l * eta * eta) * t) *
             (d + 12.0 * l * eta * eta * m / alpha * f_gap);
    }
    case BoundKind::eq16: {
      const double b = need(in.b_norm, "b_norm");
      const double sm = need(in.s_min, "s_min");
      const double n = need(in.n, "n");
      const double tau_p = need(in.tau_prime, "tau_prime");
      const double s = need(in.outer_s, "outer_s");
      const double f_gap = need(in.f_gap_init, "f_gap_init");
      return b * std::pow(tau_p, s / 2.0) * std::sqrt(2.0 * n) / sm * std::sqrt(f_gap);
    }
    case BoundKind::eq18: {
      const double tau_p = need(in.tau_prime, "tau_prime");
      const double s = need(in.outer_s, "outer_s");
      const double f_gap = need(in.f_gap_init, "f_gap_init");
      return std::pow(tau_p, s) * f_gap;
    }
    case BoundKind::cor1: {
      const double tau_pp = need(in.tau_double_prime, "tau_double_prime");
      const double s = need(in.outer_s, "outer_s");
      const double sm = need(in.s_min, "s_min");
      const double proj = need(in.proj_y_sq, "proj_y_sq");
      return std::pow(tau_pp, s) / (sm * sm) * proj;
    }
  }
  throw std::logic_error("theoretical_bound_rhs: unknown kind");
}

EpsilonReport epsilon_solution_check(const DesignProblem& prob, const MirrorMap& psi,
                                     const Vector& beta, const InterpolantCertificate& interpolant,
                                     double epsilon) {
  EpsilonReport rep;
  rep.epsilon = epsilon;
  rep.psi_gap = psi.psi(beta) - interpolant.psi_value;
  rep.f_gap = core::objective_value(prob, beta) - core::objective_value(prob, interpolant.beta_star);
  rep.psi_ok = rep.psi_gap <= epsilon;
  rep.f_ok = rep.f_gap <= epsilon;
  return rep;
}

}  // namespace vrsmd::oracles
