#include "vrsmd/simplex.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace vrsmd::oracles {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kZeroTol = 1e-10;

// Tableau with rows = constraints, one extra objective row, columns =
// variables plus the rhs column.  basis[r] is the variable basic in row r.
struct Tableau {
  Matrix t;
  std::vector<Eigen::Index> basis;

  Eigen::Index rows() const { return t.rows() - 1; }
  Eigen::Index cols() const { return t.cols() - 1; }

  void pivot(Eigen::Index row, Eigen::Index col) {
    t.row(row) /= t(row, col);
    for (Eigen::Index r = 0; r < t.rows(); ++r) {
      if (r == row) continue;
      const double f = t(r, col);
      if (f != 0.0) t.row(r) -= f * t.row(row);
    }
    basis[static_cast<std::size_t>(row)] = col;
  }

  // Bland's rule: entering = lowest-index column with negative reduced cost;
  // leaving = min-ratio row, ties broken by the lowest basic variable index.
  // `allowed` limits the entering candidates.
  LpStatus iterate(const std::vector<bool>& allowed) {
    const Eigen::Index obj = rows();
    for (;;) {
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < cols(); ++j) {
        if (!allowed[static_cast<std::size_t>(j)]) continue;
        if (t(obj, j) < -kPivotTol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return LpStatus::optimal;

      Eigen::Index leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (Eigen::Index r = 0; r < rows(); ++r) {
        const double a = t(r, enter);
        if (a > kPivotTol) {
          const double ratio = t(r, cols()) / a;
          if (ratio < best_ratio - kZeroTol ||
              (ratio < best_ratio + kZeroTol && leave >= 0 &&
               basis[static_cast<std::size_t>(r)] < basis[static_cast<std::size_t>(leave)])) {
            best_ratio = ratio;
            leave = r;
          }
        }
      }
      if (leave < 0) return LpStatus::unbounded;
      pivot(leave, enter);
    }
  }
};

}  // namespace

LpResult solve_lp(const Matrix& a_in, const Vector& b_in, const Vector& c) {
  const Eigen::Index m = a_in.rows();
  const Eigen::Index n = a_in.cols();
  if (b_in.size() != m || c.size() != n) throw std::invalid_argument("solve_lp: shape mismatch");

  // Flip rows so the rhs is nonnegative, then append one artificial per row.
  Matrix a = a_in;
  Vector b = b_in;
  for (Eigen::Index r = 0; r < m; ++r) {
    if (b(r) < 0.0) {
      a.row(r) *= -1.0;
      b(r) *= -1.0;
    }
  }

  Tableau tab;
  tab.t = Matrix::Zero(m + 1, n + m + 1);
  tab.t.block(0, 0, m, n) = a;
  tab.t.block(0, n, m, m) = Matrix::Identity(m, m);
  tab.t.col(n + m).head(m) = b;
  tab.basis.resize(static_cast<std::size_t>(m));
  for (Eigen::Index r = 0; r < m; ++r) tab.basis[static_cast<std::size_t>(r)] = n + r;

  // Phase 1: minimize the artificial sum.
  for (Eigen::Index j = 0; j < n; ++j) tab.t(m, j) = -a.col(j).sum();
  tab.t(m, n + m) = -b.sum();

  std::vector<bool> allowed(static_cast<std::size_t>(n + m), false);
  for (Eigen::Index j = 0; j < n; ++j) allowed[static_cast<std::size_t>(j)] = true;

  LpResult result;
  if (tab.iterate(allowed) != LpStatus::optimal)
    throw std::runtime_error("solve_lp: phase 1 unbounded (cannot happen)");
  if (tab.t(m, n + m) < -1e-7) {
    result.status = LpStatus::infeasible;
    return result;
  }

  // Drive leftover artificials out of the basis; a row with no usable pivot
  // is redundant and gets neutralized.
  std::vector<bool> active_row(static_cast<std::size_t>(m), true);
  for (Eigen::Index r = 0; r < m; ++r) {
    if (tab.basis[static_cast<std::size_t>(r)] < n) continue;
    Eigen::Index col = -1;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (std::abs(tab.t(r, j)) > kPivotTol) {
        col = j;
        break;
      }
    }
    if (col >= 0) {
      tab.pivot(r, col);
    } else {
      active_row[static_cast<std::size_t>(r)] = false;
      tab.t.row(r).setZero();
    }
  }

  // Phase 2 objective: reduced costs of c against the current basis.
  tab.t.row(m).setZero();
  for (Eigen::Index j = 0; j < n; ++j) tab.t(m, j) = c(j);
  for (Eigen::Index r = 0; r < m; ++r) {
    if (!active_row[static_cast<std::size_t>(r)]) continue;
    const Eigen::Index bj = tab.basis[static_cast<std::size_t>(r)];
    if (bj < n && c(bj) != 0.0) tab.t.row(m) -= c(bj) * tab.t.row(r);
  }

  const LpStatus st = tab.iterate(allowed);
  if (st == LpStatus::unbounded) {
    result.status = LpStatus::unbounded;
    return result;
  }

  result.status = LpStatus::optimal;
  result.x = Vector::Zero(n);
  for (Eigen::Index r = 0; r < m; ++r) {
    const Eigen::Index bj = tab.basis[static_cast<std::size_t>(r)];
    if (active_row[static_cast<std::size_t>(r)] && bj < n) result.x(bj) = tab.t(r, n + m);
  }
  result.objective = c.dot(result.x);
  return result;
}

}  // namespace vrsmd::oracles
