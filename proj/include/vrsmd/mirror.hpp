#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <string>

#include "vrsmd/core.hpp"

namespace vrsmd::mirror {

/// Strictly convex differentiable map psi with an explicit gradient inverse,
/// so solvers can step in the dual space and map back.  Implementations are
/// immutable value objects.
///
/// Constants are reported with respect to ||.||_2 on the box
/// { ||beta||_inf <= radius }.
class MirrorMap {
 public:
  virtual ~MirrorMap() = default;

  virtual std::string name() const = 0;
  virtual double psi(const Vector& beta) const = 0;
  virtual Vector grad(const Vector& beta) const = 0;
  virtual Vector grad_inverse(const Vector& u) const = 0;

  virtual double strong_convexity_alpha(double radius) const = 0;
  // nullopt means the gradient Lipschitz constant is unbounded near zero;
  // callers must then bound the iterates away from zero (see the annulus
  // variant).
  virtual std::optional<double> smoothness_ell(double radius) const = 0;
  virtual double smoothness_ell_on_annulus(double inner, double outer) const;

  virtual bool in_domain(const Vector& beta) const;

  // Derivative of grad_inverse, needed by the interpolant oracle's Newton
  // solve.  Elementwise maps expose the diagonal; QuadraticForm is dense.
  virtual bool inverse_jacobian_is_diagonal() const { return true; }
  virtual Vector inverse_jacobian_diag(const Vector& u) const;
  virtual Matrix inverse_jacobian(const Vector& u) const;
};

/// psi = ||.||_2^2 / 2; gradient is the identity, alpha = ell = 1.
class SquaredL2 final : public MirrorMap {
 public:
  std::string name() const override { return "l2"; }
  double psi(const Vector& beta) const override { return 0.5 * beta.squaredNorm(); }
  Vector grad(const Vector& beta) const override { return beta; }
  Vector grad_inverse(const Vector& u) const override { return u; }
  double strong_convexity_alpha(double radius) const override;
  std::optional<double> smoothness_ell(double /*radius*/) const override { return 1.0; }
  Vector inverse_jacobian_diag(const Vector& u) const override { return Vector::Ones(u.size()); }
};

/// psi = ||.||_{1+delta}^{1+delta}, delta > 0.  Small delta approximates the
/// l1 norm; the gradient at zero is taken as its continuous extension 0, and
/// for delta < 1 the map is smooth only away from zero.
class PowerNorm final : public MirrorMap {
 public:
  explicit PowerNorm(double delta);
  double delta() const { return delta_; }
  std::string name() const override;
  double psi(const Vector& beta) const override;
  Vector grad(const Vector& beta) const override;
  Vector grad_inverse(const Vector& u) const override;
  double strong_convexity_alpha(double radius) const override;
  std::optional<double> smoothness_ell(double radius) const override;
  double smoothness_ell_on_annulus(double inner, double outer) const override;
  Vector inverse_jacobian_diag(const Vector& u) const override;

 private:
  double delta_;
};

/// psi = beta^T H beta with H positive definite.
class QuadraticForm final : public MirrorMap {
 public:
  explicit QuadraticForm(Matrix h);
  const Matrix& h() const { return h_; }
  std::string name() const override { return "quad"; }
  double psi(const Vector& beta) const override { return beta.dot(h_ * beta); }
  Vector grad(const Vector& beta) const override { return 2.0 * (h_ * beta); }
  Vector grad_inverse(const Vector& u) const override { return 0.5 * solver_.solve(u); }
  double strong_convexity_alpha(double radius) const override;
  std::optional<double> smoothness_ell(double /*radius*/) const override { return 2.0 * eig_max_; }
  bool inverse_jacobian_is_diagonal() const override { return false; }
  Matrix inverse_jacobian(const Vector& u) const override;

 private:
  Matrix h_;
  Eigen::LDLT<Matrix> solver_;
  double eig_min_ = 0.0;
  double eig_max_ = 0.0;
};

/// psi = sum_i beta_i log beta_i - beta_i on the strictly positive orthant.
/// Domain violations raise std::domain_error; clamping would corrupt
/// Bregman values.
class NegativeEntropy final : public MirrorMap {
 public:
  std::string name() const override { return "entropy"; }
  double psi(const Vector& beta) const override;
  Vector grad(const Vector& beta) const override;
  Vector grad_inverse(const Vector& u) const override { return u.array().exp(); }
  double strong_convexity_alpha(double radius) const override;
  std::optional<double> smoothness_ell(double /*radius*/) const override { return std::nullopt; }
  double smoothness_ell_on_annulus(double inner, double outer) const override;
  bool in_domain(const Vector& beta) const override;
  Vector inverse_jacobian_diag(const Vector& u) const override { return u.array().exp(); }
};

// D_psi(u, w) = psi(u) - psi(w) - <grad psi(w), u - w>; nonnegative, zero iff
// u == w (strict convexity).
double bregman_divergence(const MirrorMap& psi, const Vector& u, const Vector& w);

}  // namespace vrsmd::mirror
