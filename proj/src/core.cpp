#include "vrsmd/core.hpp"

#include <Eigen/SVD>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace vrsmd::core {

namespace {

// Orthonormal completion of a p x r orthonormal block to a basis of R^p;
// returns the trailing p-r columns.
Matrix orthonormal_complement(const Matrix& q) {
  const Index p = q.rows();
  const Index r = q.cols();
  if (r >= p) return Matrix(p, 0);
  Eigen::HouseholderQR<Matrix> qr(q);
  Matrix full = qr.householderQ() * Matrix::Identity(p, p);
  return full.rightCols(p - r);
}

}  // namespace

DesignProblem::DesignProblem(Matrix x, Vector y) : x_(std::move(x)), y_(std::move(y)) {
  if (x_.rows() == 0 || x_.cols() == 0)
    throw std::invalid_argument("DesignProblem: empty design matrix");
  if (y_.size() != x_.rows())
    throw std::invalid_argument("DesignProblem: y length must equal the number of rows of X");

  smoothness_l_ = 0.0;
  for (Index i = 0; i < x_.rows(); ++i)
    smoothness_l_ = std::max(smoothness_l_, x_.row(i).squaredNorm());

  Eigen::BDCSVD<Matrix> svd(x_, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) <= 0.0)
    throw std::invalid_argument("DesignProblem: all-zero design matrix is degenerate");

  // Scale-relative rank cutoff.
  const double cutoff = 1e-10 * sv(0);
  rank_ = 0;
  while (rank_ < sv.size() && sv(rank_) > cutoff) ++rank_;
  if (rank_ == 0) throw std::invalid_argument("DesignProblem: all-zero design matrix is degenerate");

  singular_values_ = sv.head(rank_);
  basis_col_ = svd.matrixU().leftCols(rank_);
  basis_row_ = svd.matrixV().leftCols(rank_);
  lazy_ = std::make_unique<LazyNullBases>();
}

const Matrix& DesignProblem::null_basis_x() const {
  std::call_once(lazy_->x_once, [this] { lazy_->x = orthonormal_complement(basis_row_); });
  return lazy_->x;
}

const Matrix& DesignProblem::null_basis_xt() const {
  std::call_once(lazy_->xt_once, [this] { lazy_->xt = orthonormal_complement(basis_col_); });
  return lazy_->xt;
}

Vector DesignProblem::pinv_apply(const Vector& v) const {
  if (v.size() != n()) throw std::invalid_argument("pinv_apply: length mismatch");
  Vector coef = basis_col_.transpose() * v;
  coef.array() /= singular_values_.array();
  return basis_row_ * coef;
}

Vector DesignProblem::pinv_t_apply(const Vector& v) const {
  if (v.size() != p()) throw std::invalid_argument("pinv_t_apply: length mismatch");
  Vector coef = basis_row_.transpose() * v;
  coef.array() /= singular_values_.array();
  return basis_col_ * coef;
}

double objective_value(const DesignProblem& prob, const Vector& beta) {
  if (beta.size() != prob.p()) throw std::invalid_argument("objective_value: beta length mismatch");
  return (prob.x() * beta - prob.y()).squaredNorm() / (2.0 * static_cast<double>(prob.n()));
}

Vector sample_gradient(const DesignProblem& prob, Index i, const Vector& beta) {
  if (i < 0 || i >= prob.n()) throw std::out_of_range("sample_gradient: sample index out of range");
  if (beta.size() != prob.p()) throw std::invalid_argument("sample_gradient: beta length mismatch");
  return prob.x().row(i).transpose() * (prob.x().row(i).dot(beta) - prob.y()(i));
}

Vector full_gradient(const DesignProblem& prob, const Vector& beta) {
  if (beta.size() != prob.p()) throw std::invalid_argument("full_gradient: beta length mismatch");
  Vector residual = prob.x() * beta - prob.y();
  return prob.x().transpose() * (residual / static_cast<double>(prob.n()));
}

SpectralFacts spectral_facts(const DesignProblem& prob) {
  return SpectralFacts{prob.smallest_singular(), prob.rank(), prob.projector_col_x(),
                       prob.projector_row_x()};
}

namespace {

std::vector<std::vector<double>> read_csv_rows(const std::string& path, bool has_header) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open CSV file: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first && has_header) {
      first = false;
      continue;
    }
    first = false;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw std::runtime_error("malformed CSV cell '" + cell + "' in " + path);
      }
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::runtime_error("ragged CSV rows in " + path);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("empty CSV file: " + path);
  return rows;
}

void write_double(std::FILE* f, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  std::fputs(buf, f);
}

}  // namespace

DesignProblem load_problem_csv(const std::string& path, bool has_header) {
  auto rows = read_csv_rows(path, has_header);
  const Index n = static_cast<Index>(rows.size());
  const Index cols = static_cast<Index>(rows.front().size());
  if (cols < 2) throw std::runtime_error("problem CSV needs y plus at least one feature column");
  Matrix x(n, cols - 1);
  Vector y(n);
  for (Index i = 0; i < n; ++i) {
    y(i) = rows[i][0];
    for (Index j = 1; j < cols; ++j) x(i, j - 1) = rows[i][static_cast<std::size_t>(j)];
  }
  return DesignProblem(std::move(x), std::move(y));
}

void save_problem_csv(const DesignProblem& prob, const std::string& path, bool write_header) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw std::runtime_error("cannot write CSV file: " + path);
  if (write_header) {
    std::fputs("y", f);
    for (Index j = 0; j < prob.p(); ++j) std::fprintf(f, ",x%lld", static_cast<long long>(j));
    std::fputc('\n', f);
  }
  for (Index i = 0; i < prob.n(); ++i) {
    write_double(f, prob.y()(i));
    for (Index j = 0; j < prob.p(); ++j) {
      std::fputc(',', f);
      write_double(f, prob.x()(i, j));
    }
    std::fputc('\n', f);
  }
  std::fclose(f);
}

Matrix load_matrix_csv(const std::string& path, bool has_header) {
  auto rows = read_csv_rows(path, has_header);
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return m;
}

void save_matrix_csv(const Matrix& m, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw std::runtime_error("cannot write CSV file: " + path);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) std::fputc(',', f);
      write_double(f, m(i, j));
    }
    std::fputc('\n', f);
  }
  std::fclose(f);
}

}  // namespace vrsmd::core
