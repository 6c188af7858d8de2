#include "vrsmd/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include "vrsmd/parallel.hpp"
#include "vrsmd/rng.hpp"

namespace vrsmd::experiments {

namespace {

using core::DesignProblem;
using core::SparseGroundTruth;
using mirror::PowerNorm;
using solvers::SolverConfig;
using solvers::SolverRun;

std::string delta_label(double delta) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "delta=%.17g", delta);
  return buf;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

SimulatedData simulate_raw(const SimulationSpec& spec) {
  if (spec.n < 1 || spec.p < 1) throw std::invalid_argument("SimulationSpec: n, p must be >= 1");
  if (spec.s < 0 || spec.s > spec.p) throw std::invalid_argument("SimulationSpec: need 0 <= s <= p");
  if (!(spec.rho >= 0.0) || !(spec.rho < 1.0))
    throw std::invalid_argument("SimulationSpec: need 0 <= rho < 1");
  if (!(spec.noise_sd >= 0.0)) throw std::invalid_argument("SimulationSpec: noise_sd must be >= 0");

  CounterRng rng(derive_seed(spec.seed, "simulate"));
  const Index n = spec.n;
  const Index p = spec.p;

  // Draw order is fixed: W row-major, then beta, then noise.
  Matrix w(n, p);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j) w(i, j) = rng.normal();

  SimulatedData out;
  // Sigma^{1/2} = a I + b 1 1^T in closed form for the equicorrelation
  // structure; avoids an explicit eigendecomposition.
  const Index dim = spec.cov == CovMode::rows ? n : p;
  const double a = std::sqrt(1.0 - spec.rho);
  const double b =
      (std::sqrt(1.0 - spec.rho + static_cast<double>(dim) * spec.rho) - a) / static_cast<double>(dim);
  if (spec.cov == CovMode::rows) {
    const Eigen::RowVectorXd col_sums = w.colwise().sum();
    out.x = a * w + b * Vector::Ones(n) * col_sums;
  } else {
    const Vector row_sums = w.rowwise().sum();
    out.x = a * w + b * row_sums * Eigen::RowVectorXd::Ones(p);
  }

  out.beta_true = Vector::Zero(p);
  for (int j = 0; j < spec.s; ++j) out.beta_true(j) = rng.normal();

  out.y = out.x * out.beta_true;
  if (spec.noise_sd > 0.0) {
    for (Index i = 0; i < n; ++i) out.y(i) += spec.noise_sd * rng.normal();
  }
  return out;
}

std::pair<DesignProblem, SparseGroundTruth> simulate_sparse_data(const SimulationSpec& spec) {
  SimulatedData data = simulate_raw(spec);
  SparseGroundTruth truth;
  truth.beta_o = std::move(data.beta_true);
  truth.support_size = spec.s;
  return {DesignProblem(std::move(data.x), std::move(data.y)), std::move(truth)};
}

std::vector<std::vector<int>> make_folds(int n, int k, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("make_folds: k must be >= 2");
  if (k > n) throw std::invalid_argument("make_folds: k must be <= n");
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  CounterRng rng(seed);
  for (int i = n - 1; i > 0; --i)
    std::swap(order[static_cast<std::size_t>(i)],
              order[static_cast<std::size_t>(rng.uniform_index(static_cast<std::uint64_t>(i + 1)))]);

  std::vector<std::vector<int>> folds(static_cast<std::size_t>(k));
  int pos = 0;
  for (int f = 0; f < k; ++f) {
    const int size = n / k + (f < n % k ? 1 : 0);
    folds[static_cast<std::size_t>(f)] =
        std::vector<int>(order.begin() + pos, order.begin() + pos + size);
    pos += size;
  }
  return folds;
}

CvResult kfold_early_stopping(const DesignProblem& prob, const mirror::MirrorMap& psi,
                              const SolverConfig& cfg, int k, int threads) {
  const int n = static_cast<int>(prob.n());
  const auto folds = make_folds(n, k, derive_seed(cfg.seed, "cv-folds"));

  std::vector<std::vector<double>> fold_curves(static_cast<std::size_t>(k));
  parallel_for(static_cast<std::size_t>(k), threads, [&](std::size_t f) {
    const auto& heldout = folds[f];
    if (heldout.empty()) throw std::invalid_argument("kfold_early_stopping: empty fold");
    std::vector<int> train;
    train.reserve(static_cast<std::size_t>(n) - heldout.size());
    for (int f2 = 0; f2 < k; ++f2) {
      if (static_cast<std::size_t>(f2) == f) continue;
      const auto& other = folds[static_cast<std::size_t>(f2)];
      train.insert(train.end(), other.begin(), other.end());
    }
    std::sort(train.begin(), train.end());
    if (train.empty()) throw std::invalid_argument("kfold_early_stopping: empty training set");

    DesignProblem sub = subproblem(prob, train);
    SolverConfig fold_cfg = cfg;
    fold_cfg.seed = derive_seed(cfg.seed, "cv-fold-" + std::to_string(f));
    fold_cfg.keep_iterates = false;
    const SolverRun run = solvers::run_vrsmd(sub, psi, fold_cfg);

    std::vector<double> curve;
    curve.reserve(run.outer_estimates.size());
    for (const Vector& beta : run.outer_estimates) {
      double sq = 0.0;
      for (const int row : heldout) {
        const double r = prob.x().row(row).dot(beta) - prob.y()(row);
        sq += r * r;
      }
      curve.push_back(sq / static_cast<double>(heldout.size()));
    }
    fold_curves[f] = std::move(curve);
  });

  CvResult out;
  out.curve.assign(static_cast<std::size_t>(cfg.outer_s), 0.0);
  for (const auto& curve : fold_curves) {
    if (curve.size() != out.curve.size())
      throw std::logic_error("kfold_early_stopping: inconsistent curve lengths");
    for (std::size_t s = 0; s < curve.size(); ++s) out.curve[s] += curve[s];
  }
  for (double& v : out.curve) v /= static_cast<double>(k);

  std::size_t best = 0;
  for (std::size_t s = 1; s < out.curve.size(); ++s)
    if (out.curve[s] < out.curve[best]) best = s;  // ties keep the smaller index
  out.best_outer = static_cast<int>(best) + 1;
  return out;
}

WilcoxonResult wilcoxon_signed_rank(const Vector& a, const Vector& b, Alternative alternative) {
  if (a.size() != b.size()) throw std::invalid_argument("wilcoxon_signed_rank: length mismatch");

  std::vector<double> diffs;
  diffs.reserve(static_cast<std::size_t>(a.size()));
  for (Index i = 0; i < a.size(); ++i) {
    const double d = a(i) - b(i);
    if (d != 0.0) diffs.push_back(d);
  }

  WilcoxonResult res;
  if (diffs.empty()) {
    res.all_zero = true;
    res.p_value = 1.0;
    res.warning = "all differences are zero; p = 1 by convention";
    return res;
  }
  const int n = static_cast<int>(diffs.size());
  if (n < 5)
    throw std::invalid_argument("wilcoxon_signed_rank: need >= 5 nonzero differences");
  res.n_used = n;

  // Midranks of |d|, doubled so tied ranks stay integral.
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int l, int r) {
    return std::abs(diffs[static_cast<std::size_t>(l)]) < std::abs(diffs[static_cast<std::size_t>(r)]);
  });
  std::vector<long long> rank2(static_cast<std::size_t>(n), 0);
  std::vector<int> tie_sizes;
  int i = 0;
  while (i < n) {
    int j = i;
    while (j + 1 < n && std::abs(diffs[static_cast<std::size_t>(order[static_cast<std::size_t>(j + 1)])]) ==
                            std::abs(diffs[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])]))
      ++j;
    // ranks i+1 .. j+1 share the midrank; doubled midrank = (i+1) + (j+1)
    const long long doubled = static_cast<long long>(i + 1) + static_cast<long long>(j + 1);
    for (int t = i; t <= j; ++t) rank2[static_cast<std::size_t>(order[static_cast<std::size_t>(t)])] = doubled;
    tie_sizes.push_back(j - i + 1);
    i = j + 1;
  }

  long long w2 = 0;  // doubled W+
  for (int t = 0; t < n; ++t)
    if (diffs[static_cast<std::size_t>(t)] > 0.0) w2 += rank2[static_cast<std::size_t>(t)];
  res.w_plus = static_cast<double>(w2) / 2.0;

  double p_greater;
  double p_less;
  if (n <= 20) {
    res.exact = true;
    // Enumerate the null distribution of the doubled statistic by DP over
    // the 2^n equally likely sign assignments.
    const long long total2 = std::accumulate(rank2.begin(), rank2.end(), 0ll);
    std::vector<double> dp(static_cast<std::size_t>(total2) + 1, 0.0);
    dp[0] = 1.0;
    for (int t = 0; t < n; ++t) {
      const long long r = rank2[static_cast<std::size_t>(t)];
      for (long long k = total2 - r; k >= 0; --k)
        if (dp[static_cast<std::size_t>(k)] != 0.0)
          dp[static_cast<std::size_t>(k + r)] += dp[static_cast<std::size_t>(k)];
    }
    const double denom = std::ldexp(1.0, n);  // 2^n
    double ge = 0.0;
    double le = 0.0;
    for (long long k = 0; k <= total2; ++k) {
      if (k >= w2) ge += dp[static_cast<std::size_t>(k)];
      if (k <= w2) le += dp[static_cast<std::size_t>(k)];
    }
    p_greater = ge / denom;
    p_less = le / denom;
  } else {
    const double nn = static_cast<double>(n);
    const double mean = nn * (nn + 1.0) / 4.0;
    double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0;
    for (const int t : tie_sizes) {
      const double td = t;
      var -= (td * td * td - td) / 48.0;
    }
    const double sd = std::sqrt(var);
    p_greater = 1.0 - normal_cdf((res.w_plus - mean - 0.5) / sd);
    p_less = normal_cdf((res.w_plus - mean + 0.5) / sd);
  }

  switch (alternative) {
    case Alternative::greater: res.p_value = p_greater; break;
    case Alternative::less: res.p_value = p_less; break;
    case Alternative::two_sided: res.p_value = std::min(1.0, 2.0 * std::min(p_greater, p_less)); break;
  }
  return res;
}

SweepReport delta_sweep(const DesignProblem& prob, const SparseGroundTruth& truth,
                        const std::vector<double>& deltas, const SolverConfig& cfg, int threads) {
  if (deltas.empty()) throw std::invalid_argument("delta_sweep: empty delta list");
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (!(deltas[i] > 0.0)) throw std::invalid_argument("delta_sweep: deltas must be positive");
    if (i > 0 && !(deltas[i] > deltas[i - 1]))
      throw std::invalid_argument("delta_sweep: deltas must be sorted ascending");
  }
  if (truth.beta_o.size() != prob.p())
    throw std::invalid_argument("delta_sweep: ground-truth length mismatch");

  SweepReport report;
  report.entries.resize(deltas.size());
  parallel_for(deltas.size(), threads, [&](std::size_t k) {
    SweepEntry& entry = report.entries[k];
    entry.delta = deltas[k];
    try {
      PowerNorm map(entry.delta);
      SolverConfig run_cfg = cfg;
      run_cfg.seed = derive_seed(cfg.seed, delta_label(entry.delta));
      entry.run = solvers::run_vrsmd(prob, map, run_cfg);
      if (entry.run.status != solvers::RunStatus::ok) {
        entry.failed = true;
        entry.error = entry.run.message;
      }
      entry.l1_error = (entry.run.final_beta - truth.beta_o).lpNorm<1>();
    } catch (const std::exception& e) {
      entry.failed = true;
      entry.error = e.what();
    }
  });
  return report;
}

TrainTestSplit split_rows(int n, double train_ratio, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("split_rows: need n >= 2");
  if (!(train_ratio > 0.0) || !(train_ratio < 1.0))
    throw std::invalid_argument("split_rows: train_ratio in (0,1)");
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  CounterRng rng(derive_seed(seed, "train-test-split"));
  for (int i = n - 1; i > 0; --i)
    std::swap(order[static_cast<std::size_t>(i)],
              order[static_cast<std::size_t>(rng.uniform_index(static_cast<std::uint64_t>(i + 1)))]);
  int train_n = static_cast<int>(std::lround(train_ratio * n));
  train_n = std::clamp(train_n, 1, n - 1);
  TrainTestSplit split;
  split.train_rows.assign(order.begin(), order.begin() + train_n);
  split.test_rows.assign(order.begin() + train_n, order.end());
  std::sort(split.train_rows.begin(), split.train_rows.end());
  std::sort(split.test_rows.begin(), split.test_rows.end());
  return split;
}

DesignProblem subproblem(const DesignProblem& prob, const std::vector<int>& rows) {
  if (rows.empty()) throw std::invalid_argument("subproblem: empty row set");
  Matrix x(static_cast<Index>(rows.size()), prob.p());
  Vector y(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    x.row(static_cast<Index>(i)) = prob.x().row(rows[i]);
    y(static_cast<Index>(i)) = prob.y()(rows[i]);
  }
  return DesignProblem(std::move(x), std::move(y));
}

namespace {

double test_mse(const DesignProblem& prob, const std::vector<int>& rows, const Vector& beta) {
  double sq = 0.0;
  for (const int r : rows) {
    const double d = prob.x().row(r).dot(beta) - prob.y()(r);
    sq += d * d;
  }
  return sq / static_cast<double>(rows.size());
}

CompareArmResult arm_metrics(const DesignProblem& full, const DesignProblem& train,
                             const std::vector<int>& test_rows, const Vector* beta_true,
                             const SolverRun& run) {
  CompareArmResult res;
  res.train_objective = core::objective_value(train, run.final_beta);
  res.test_mse = test_mse(full, test_rows, run.final_beta);
  if (beta_true != nullptr) {
    res.l1_error = (run.final_beta - *beta_true).lpNorm<1>();
    res.l2_error = (run.final_beta - *beta_true).norm();
  }
  res.wall_seconds = run.wall_seconds;
  return res;
}

}  // namespace

CompareReport compare_vrsmd_hadamard(const DesignProblem& prob, const Vector* beta_true,
                                     const CompareConfig& cfg, int threads) {
  if (cfg.repeats < 1) throw std::invalid_argument("compare: repeats must be >= 1");
  CompareReport report;
  report.baseline_name = cfg.baseline_self ? "self" : "hadamard";
  report.vrsmd.resize(static_cast<std::size_t>(cfg.repeats));
  report.baseline.resize(static_cast<std::size_t>(cfg.repeats));
  report.vrsmd_runs.resize(static_cast<std::size_t>(cfg.repeats));
  report.baseline_runs.resize(static_cast<std::size_t>(cfg.repeats));

  const PowerNorm map(cfg.power_delta);
  parallel_for(static_cast<std::size_t>(cfg.repeats), threads, [&](std::size_t r) {
    const std::uint64_t rep_seed = derive_seed(cfg.solver.seed, "repeat-" + std::to_string(r));
    const TrainTestSplit split =
        split_rows(static_cast<int>(prob.n()), cfg.train_ratio, rep_seed);
    const DesignProblem train = subproblem(prob, split.train_rows);

    SolverConfig vcfg = cfg.solver;
    vcfg.seed = derive_seed(rep_seed, "vrsmd");
    SolverRun vrun = solvers::run_vrsmd(train, map, vcfg);
    report.vrsmd[r] = arm_metrics(prob, train, split.test_rows, beta_true, vrun);
    report.vrsmd_runs[r] = std::move(vrun);

    SolverRun brun;
    if (cfg.baseline_self) {
      brun = solvers::run_vrsmd(train, map, vcfg);
    } else {
      SolverConfig hcfg = cfg.solver;
      hcfg.seed = derive_seed(rep_seed, "hadamard");
      hcfg.eta = cfg.hadamard_eta > 0.0 ? cfg.hadamard_eta : cfg.solver.eta;
      brun = solvers::run_hadamard_gd(train, hcfg, cfg.hadamard_init_scale);
    }
    report.baseline[r] = arm_metrics(prob, train, split.test_rows, beta_true, brun);
    report.baseline_runs[r] = std::move(brun);
  });

  Vector base_time(cfg.repeats), v_time(cfg.repeats), base_err(cfg.repeats), v_err(cfg.repeats);
  for (int r = 0; r < cfg.repeats; ++r) {
    v_time(r) = report.vrsmd[static_cast<std::size_t>(r)].wall_seconds;
    base_time(r) = report.baseline[static_cast<std::size_t>(r)].wall_seconds;
    v_err(r) = report.vrsmd[static_cast<std::size_t>(r)].test_mse;
    base_err(r) = report.baseline[static_cast<std::size_t>(r)].test_mse;
  }
  const auto safe_p = [](const Vector& a, const Vector& b, Alternative alt) {
    try {
      return wilcoxon_signed_rank(a, b, alt).p_value;
    } catch (const std::invalid_argument&) {
      return 1.0;  // too few nonzero differences to test
    }
  };
  report.p_time_one_sided = safe_p(base_time, v_time, Alternative::greater);
  report.p_error_two_sided = safe_p(base_err, v_err, Alternative::two_sided);
  return report;
}

}  // namespace vrsmd::experiments
