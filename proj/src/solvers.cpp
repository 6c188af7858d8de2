#include "vrsmd/solvers.hpp"

#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "vrsmd/rng.hpp"

namespace vrsmd::solvers {

namespace {

using core::DesignProblem;
using mirror::MirrorMap;

void validate_config(const DesignProblem& prob, const SolverConfig& cfg) {
  if (!(cfg.eta > 0.0)) throw std::invalid_argument("SolverConfig: eta must be positive");
  if (cfg.inner_m < 1) throw std::invalid_argument("SolverConfig: inner_m must be >= 1");
  if (cfg.outer_s < 1) throw std::invalid_argument("SolverConfig: outer_s must be >= 1");
  if (cfg.record_every < 1) throw std::invalid_argument("SolverConfig: record_every must be >= 1");
  if (cfg.init_dual_coeff.size() != 0 && cfg.init_dual_coeff.size() != prob.n())
    throw std::invalid_argument("SolverConfig: init_dual_coeff must have length n");
}

Vector initial_beta(const DesignProblem& prob, const MirrorMap& psi, const SolverConfig& cfg) {
  Vector a = cfg.init_dual_coeff.size() == 0 ? Vector::Zero(prob.n()) : cfg.init_dual_coeff;
  return psi.grad_inverse(prob.x().transpose() * a);
}

// Shared run state for the mirror-descent family.  Tracks the dual iterate
// alongside beta and folds every consumed RNG draw into a transcript hash.
class MirrorLoop {
 public:
  MirrorLoop(const DesignProblem& prob, const MirrorMap& psi, const SolverConfig& cfg)
      : prob_(prob), psi_(psi), cfg_(cfg), rng_(cfg.seed) {
    beta_ = initial_beta(prob, psi, cfg);
    theta_ = prob.x().transpose() * (cfg.init_dual_coeff.size() == 0 ? Vector::Zero(prob.n())
                                                                     : cfg.init_dual_coeff);
    run_.trace.reserve(static_cast<std::size_t>(
        (static_cast<long long>(cfg.inner_m) * cfg.outer_s + cfg.record_every - 1) /
        cfg.record_every));
    if (cfg.keep_iterates)
      run_.iterates.reserve(static_cast<std::size_t>(cfg.inner_m) * static_cast<std::size_t>(cfg.outer_s));
  }

  std::uint64_t draw(std::uint64_t n) {
    const std::uint64_t v = rng_.uniform_index(n);
    transcript_ = fnv1a64(&v, sizeof(v), transcript_);
    return v;
  }

  const Vector& beta() const { return beta_; }
  const Vector& theta() const { return theta_; }

  void dual_step(const Vector& direction) {
    theta_ -= cfg_.eta * direction;
    beta_ = psi_.grad_inverse(theta_);
  }

  void reset_to(const Vector& beta) {
    beta_ = beta;
    theta_ = psi_.grad(beta_);
  }

  bool finite() const { return theta_.allFinite() && beta_.allFinite(); }

  // Records the current iterate as step (s, t); returns false when the trace
  // values could not be computed (mirror domain violation).
  bool record(int s, int t, long long global_step) {
    if ((global_step - 1) % cfg_.record_every != 0) return true;
    TraceRecord rec;
    rec.outer = s;
    rec.inner = t;
    try {
      rec.objective = core::objective_value(prob_, beta_);
      rec.psi_value = psi_.psi(beta_);
    } catch (const std::domain_error& e) {
      fail_domain(s, t, e.what());
      return false;
    }
    rec.dual_residual = (theta_ - prob_.project_row_x(theta_)).norm();
    rec.inf_norm = beta_.lpNorm<Eigen::Infinity>();
    rec.dual_norm = theta_.norm();
    run_.b_observed = std::max(run_.b_observed, rec.dual_norm);
    run_.k_observed = std::max(run_.k_observed, rec.inf_norm);
    run_.trace.push_back(rec);
    return true;
  }

  void fail_non_finite(int s, int t) {
    std::ostringstream os;
    os << "non-finite iterate at outer " << s << ", inner " << t << "; keeping last finite iterate";
    run_.status = RunStatus::aborted_non_finite;
    run_.message = os.str();
  }

  void fail_domain(int s, int t, const std::string& what) {
    std::ostringstream os;
    os << "mirror domain violation at outer " << s << ", inner " << t << ": " << what;
    run_.status = RunStatus::domain_violation;
    run_.message = os.str();
  }

  SolverRun take(Vector final_beta) {
    run_.final_beta = std::move(final_beta);
    run_.rng_transcript_hash = transcript_;
    return std::move(run_);
  }

  SolverRun run_;

 private:
  const DesignProblem& prob_;
  const MirrorMap& psi_;
  const SolverConfig& cfg_;
  CounterRng rng_;
  std::uint64_t transcript_ = fnv1a64("", 0);
  Vector beta_;
  Vector theta_;
};

void warn_on_large_eta(const DesignProblem& prob, const MirrorMap& psi, const SolverConfig& cfg,
                       const Vector& beta0, SolverRun& run) {
  // The threshold needs a box radius; use the starting iterate's scale as a
  // proxy since K is only known post hoc.
  const double k_proxy = std::max(1.0, beta0.lpNorm<Eigen::Infinity>());
  try {
    const double bound = step_size_bound(psi.strong_convexity_alpha(k_proxy), prob.smoothness_l());
    if (cfg.eta >= bound) {
      std::ostringstream os;
      os << "eta = " << cfg.eta << " is at or above the sufficient stability threshold "
         << bound << " (alpha/(24 L) at K = " << k_proxy << ")";
      run.warnings.push_back(os.str());
    }
  } catch (const std::exception&) {
    // maps without a finite alpha at this radius: nothing to warn about
  }
}

}  // namespace

Vector variance_reduced_direction(const DesignProblem& prob, Index i, const Vector& beta,
                                  const Vector& snapshot, const Vector& snapshot_grad) {
  if (i < 0 || i >= prob.n()) throw std::out_of_range("variance_reduced_direction: index out of range");
  return core::sample_gradient(prob, i, beta) - core::sample_gradient(prob, i, snapshot) +
         snapshot_grad;
}

double step_size_bound(double alpha, double smoothness_l) {
  if (!(alpha > 0.0) || !(smoothness_l > 0.0))
    throw std::invalid_argument("step_size_bound: alpha and L must be positive");
  return alpha / (24.0 * smoothness_l);
}

SolverRun run_vrsmd(const DesignProblem& prob, const MirrorMap& psi, const SolverConfig& cfg) {
  validate_config(prob, cfg);
  const auto t_start = std::chrono::steady_clock::now();
  const int m = cfg.inner_m;
  const int big_s = cfg.outer_s;
  const auto total = static_cast<long long>(m) * big_s;

  MirrorLoop loop(prob, psi, cfg);
  warn_on_large_eta(prob, psi, cfg, loop.beta(), loop.run_);

  // Option I output index comes from its own sub-stream so the sample stream
  // matches Option II draw for draw.
  long long output_index = -1;
  if (cfg.option == OptionVariant::option_i) {
    CounterRng out_rng(derive_seed(cfg.seed, "option-i-output"));
    output_index = static_cast<long long>(out_rng.uniform_index(static_cast<std::uint64_t>(total)));
  }

  Vector snapshot = loop.beta();
  Vector option_i_output = loop.beta();
  std::vector<Vector> inner_iterates(static_cast<std::size_t>(m));

  for (int s = 1; s <= big_s; ++s) {
    const Vector snapshot_grad = core::full_gradient(prob, snapshot);
    for (int t = 1; t <= m; ++t) {
      const long long g = static_cast<long long>(s - 1) * m + t;
      inner_iterates[static_cast<std::size_t>(t - 1)] = loop.beta();
      if (cfg.keep_iterates) loop.run_.iterates.push_back(loop.beta());
      if (g - 1 == output_index) option_i_output = loop.beta();

      const auto i = static_cast<Index>(loop.draw(static_cast<std::uint64_t>(prob.n())));
      const Vector v = variance_reduced_direction(prob, i, loop.beta(), snapshot, snapshot_grad);
      loop.dual_step(v);
      if (!loop.finite()) {
        loop.fail_non_finite(s, t);
        return loop.take(inner_iterates[static_cast<std::size_t>(t - 1)]);
      }
      if (!loop.record(s, t, g)) return loop.take(loop.beta());
    }
    const auto j = static_cast<std::size_t>(loop.draw(static_cast<std::uint64_t>(m)));
    snapshot = inner_iterates[j];
    loop.run_.outer_estimates.push_back(cfg.option == OptionVariant::option_ii ? snapshot
                                                                               : loop.beta());
    if (cfg.option == OptionVariant::option_ii) loop.reset_to(snapshot);
  }

  Vector out = cfg.option == OptionVariant::option_i ? option_i_output : snapshot;
  SolverRun run = loop.take(std::move(out));
  run.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return run;
}

SolverRun run_smd(const DesignProblem& prob, const MirrorMap& psi, const SolverConfig& cfg) {
  validate_config(prob, cfg);
  const auto t_start = std::chrono::steady_clock::now();
  const int m = cfg.inner_m;
  const int big_s = cfg.outer_s;

  MirrorLoop loop(prob, psi, cfg);
  warn_on_large_eta(prob, psi, cfg, loop.beta(), loop.run_);

  for (int s = 1; s <= big_s; ++s) {
    for (int t = 1; t <= m; ++t) {
      const long long g = static_cast<long long>(s - 1) * m + t;
      if (cfg.keep_iterates) loop.run_.iterates.push_back(loop.beta());
      const auto i = static_cast<Index>(loop.draw(static_cast<std::uint64_t>(prob.n())));
      const Vector v = core::sample_gradient(prob, i, loop.beta());
      loop.dual_step(v);
      if (!loop.finite()) {
        loop.fail_non_finite(s, t);
        return loop.take(loop.run_.iterates.empty() ? loop.beta() : loop.run_.iterates.back());
      }
      if (!loop.record(s, t, g)) return loop.take(loop.beta());
    }
    loop.run_.outer_estimates.push_back(loop.beta());
  }
  SolverRun run = loop.take(loop.beta());
  run.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return run;
}

SolverRun run_mirror_descent(const DesignProblem& prob, const MirrorMap& psi,
                             const SolverConfig& cfg) {
  validate_config(prob, cfg);
  const auto t_start = std::chrono::steady_clock::now();
  const int m = cfg.inner_m;
  const int big_s = cfg.outer_s;

  MirrorLoop loop(prob, psi, cfg);
  warn_on_large_eta(prob, psi, cfg, loop.beta(), loop.run_);

  Vector last_finite = loop.beta();
  for (int s = 1; s <= big_s; ++s) {
    for (int t = 1; t <= m; ++t) {
      const long long g = static_cast<long long>(s - 1) * m + t;
      if (cfg.keep_iterates) loop.run_.iterates.push_back(loop.beta());
      last_finite = loop.beta();
      const Vector v = core::full_gradient(prob, loop.beta());
      loop.dual_step(v);
      if (!loop.finite()) {
        loop.fail_non_finite(s, t);
        return loop.take(last_finite);
      }
      if (!loop.record(s, t, g)) return loop.take(loop.beta());
    }
    loop.run_.outer_estimates.push_back(loop.beta());
  }
  SolverRun run = loop.take(loop.beta());
  run.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return run;
}

SolverRun run_hadamard_gd(const DesignProblem& prob, const SolverConfig& cfg, double init_scale) {
  validate_config(prob, cfg);
  if (!(init_scale >= 0.0)) throw std::invalid_argument("run_hadamard_gd: init_scale must be >= 0");
  const auto t_start = std::chrono::steady_clock::now();
  const int m = cfg.inner_m;
  const int big_s = cfg.outer_s;
  const double n = static_cast<double>(prob.n());

  SolverRun run;
  Vector u = Vector::Constant(prob.p(), init_scale);
  Vector v = Vector::Constant(prob.p(), init_scale);
  Vector beta = u.cwiseProduct(u) - v.cwiseProduct(v);
  Vector last_finite = beta;

  for (int s = 1; s <= big_s; ++s) {
    for (int t = 1; t <= m; ++t) {
      const long long g = static_cast<long long>(s - 1) * m + t;
      if (cfg.keep_iterates) run.iterates.push_back(beta);
      last_finite = beta;
      const Vector residual_grad = prob.x().transpose() * ((prob.x() * beta - prob.y()) / n);
      u -= cfg.eta * (2.0 * u.cwiseProduct(residual_grad));
      v -= cfg.eta * (-2.0 * v.cwiseProduct(residual_grad));
      beta = u.cwiseProduct(u) - v.cwiseProduct(v);
      if (!beta.allFinite()) {
        std::ostringstream os;
        os << "non-finite iterate at outer " << s << ", inner " << t;
        run.status = RunStatus::aborted_non_finite;
        run.message = os.str();
        run.final_beta = last_finite;
        return run;
      }
      if ((g - 1) % cfg.record_every == 0) {
        TraceRecord rec;
        rec.outer = s;
        rec.inner = t;
        rec.objective = core::objective_value(prob, beta);
        rec.psi_value = 0.0;
        rec.dual_residual = 0.0;
        rec.inf_norm = beta.lpNorm<Eigen::Infinity>();
        run.k_observed = std::max(run.k_observed, rec.inf_norm);
        run.trace.push_back(rec);
      }
    }
    run.outer_estimates.push_back(beta);
  }
  run.final_beta = beta;
  run.rng_transcript_hash = fnv1a64("", 0);
  run.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return run;
}

}  // namespace vrsmd::solvers
