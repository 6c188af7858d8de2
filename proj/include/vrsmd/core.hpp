#pragma once

#include <Eigen/Dense>
#include <memory>
#include <mutex>
#include <string>

namespace vrsmd {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

namespace core {

/// Finite-sum least-squares problem: rows of `x` are the samples x_i,
/// F(beta) = ||X beta - y||^2 / (2n).  The SVD is computed once at
/// construction and every spectral quantity is derived from it.
/// Immutable after construction; safe for concurrent reads.
class DesignProblem {
 public:
  DesignProblem(Matrix x, Vector y);

  Index n() const { return x_.rows(); }
  Index p() const { return x_.cols(); }
  const Matrix& x() const { return x_; }
  const Vector& y() const { return y_; }

  // L = max_i ||x_i||_2^2
  double smoothness_l() const { return smoothness_l_; }

  Index rank() const { return rank_; }
  // Smallest nonzero singular value s_m.
  double smallest_singular() const { return singular_values_(rank_ - 1); }
  const Vector& singular_values() const { return singular_values_; }

  // Orthonormal bases for col(X) (n x r) and col(X^T) (p x r).
  const Matrix& basis_col() const { return basis_col_; }
  const Matrix& basis_row() const { return basis_row_; }
  // Orthonormal bases for N(X) (p x (p-r)) and N(X^T) (n x (n-r)),
  // completed lazily from the thin SVD factors.
  const Matrix& null_basis_x() const;
  const Matrix& null_basis_xt() const;

  // Orthogonal projections (applied through the thin bases).
  Vector project_col_x(const Vector& v) const { return basis_col_ * (basis_col_.transpose() * v); }
  Vector project_row_x(const Vector& v) const { return basis_row_ * (basis_row_.transpose() * v); }

  // Dense projectors, mostly for tests and certificates.
  Matrix projector_col_x() const { return basis_col_ * basis_col_.transpose(); }
  Matrix projector_row_x() const { return basis_row_ * basis_row_.transpose(); }

  // X^+ v via the cached SVD.
  Vector pinv_apply(const Vector& v) const;
  // (X^T)^+ v, i.e. least-squares coefficients a with X^T a ~ v.
  Vector pinv_t_apply(const Vector& v) const;

 private:
  struct LazyNullBases {
    std::once_flag x_once;
    std::once_flag xt_once;
    Matrix x;
    Matrix xt;
  };

  Matrix x_;
  Vector y_;
  double smoothness_l_;
  Index rank_;
  Vector singular_values_;  // the r nonzero ones, non-increasing
  Matrix basis_col_;        // U_r
  Matrix basis_row_;        // V_r
  std::unique_ptr<LazyNullBases> lazy_;
};

/// Sparse generating model: y = X beta_o (noiseless) with s nonzeros.
struct SparseGroundTruth {
  Vector beta_o;
  int support_size = 0;
};

struct SpectralFacts {
  double s_m;
  Index rank;
  Matrix projector_col_x;
  Matrix projector_row_x;
};

// F(beta) = ||X beta - y||^2 / (2n)
double objective_value(const DesignProblem& prob, const Vector& beta);

// grad f_i(beta) = x_i (x_i^T beta - y_i), 0-based i.
Vector sample_gradient(const DesignProblem& prob, Index i, const Vector& beta);

// grad F(beta) = X^T (X beta - y) / n
Vector full_gradient(const DesignProblem& prob, const Vector& beta);

SpectralFacts spectral_facts(const DesignProblem& prob);

// CSV layout: first column y, remaining columns the row x_i^T.
DesignProblem load_problem_csv(const std::string& path, bool has_header);
void save_problem_csv(const DesignProblem& prob, const std::string& path, bool write_header);

Matrix load_matrix_csv(const std::string& path, bool has_header);
void save_matrix_csv(const Matrix& m, const std::string& path);

}  // namespace core
}  // namespace vrsmd
