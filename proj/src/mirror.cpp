#include "vrsmd/mirror.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace vrsmd::mirror {

namespace {

void require_positive_radius(double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("mirror map: radius K must be positive");
}

}  // namespace

double MirrorMap::smoothness_ell_on_annulus(double inner, double outer) const {
  auto ell = smoothness_ell(outer);
  if (!ell) throw std::invalid_argument(name() + ": smoothness unbounded near zero; no annulus rule");
  (void)inner;
  return *ell;
}

bool MirrorMap::in_domain(const Vector& beta) const { return beta.allFinite(); }

Vector MirrorMap::inverse_jacobian_diag(const Vector&) const {
  throw std::logic_error(name() + ": inverse Jacobian diagonal not available");
}

Matrix MirrorMap::inverse_jacobian(const Vector& u) const {
  return inverse_jacobian_diag(u).asDiagonal();
}

double SquaredL2::strong_convexity_alpha(double radius) const {
  require_positive_radius(radius);
  return 1.0;
}

PowerNorm::PowerNorm(double delta) : delta_(delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("PowerNorm: delta must be > 0");
}

std::string PowerNorm::name() const {
  std::ostringstream os;
  os << "power:" << delta_;
  return os.str();
}

double PowerNorm::psi(const Vector& beta) const {
  const double q = 1.0 + delta_;
  double acc = 0.0;
  for (Index i = 0; i < beta.size(); ++i) acc += std::pow(std::abs(beta(i)), q);
  return acc;
}

Vector PowerNorm::grad(const Vector& beta) const {
  const double q = 1.0 + delta_;
  Vector g(beta.size());
  for (Index i = 0; i < beta.size(); ++i) {
    const double b = beta(i);
    // continuous extension at 0
    g(i) = b == 0.0 ? 0.0 : q * std::copysign(std::pow(std::abs(b), delta_), b);
  }
  return g;
}

Vector PowerNorm::grad_inverse(const Vector& u) const {
  const double q = 1.0 + delta_;
  Vector b(u.size());
  for (Index i = 0; i < u.size(); ++i) {
    const double v = u(i);
    b(i) = v == 0.0 ? 0.0 : std::copysign(std::pow(std::abs(v) / q, 1.0 / delta_), v);
  }
  return b;
}

double PowerNorm::strong_convexity_alpha(double radius) const {
  require_positive_radius(radius);
  return (1.0 + delta_) * delta_ / std::pow(radius, 1.0 - delta_);
}

std::optional<double> PowerNorm::smoothness_ell(double radius) const {
  require_positive_radius(radius);
  if (delta_ < 1.0) return std::nullopt;  // Hessian blows up at 0
  return (1.0 + delta_) * delta_ * std::pow(radius, delta_ - 1.0);
}

double PowerNorm::smoothness_ell_on_annulus(double inner, double outer) const {
  if (!(inner > 0.0) || !(outer >= inner))
    throw std::invalid_argument("PowerNorm: annulus needs 0 < inner <= outer");
  const double at = delta_ < 1.0 ? inner : outer;
  return (1.0 + delta_) * delta_ * std::pow(at, delta_ - 1.0);
}

Vector PowerNorm::inverse_jacobian_diag(const Vector& u) const {
  const double q = 1.0 + delta_;
  const double expo = (1.0 - delta_) / delta_;
  Vector d(u.size());
  for (Index i = 0; i < u.size(); ++i) {
    const double a = std::abs(u(i));
    if (a == 0.0) {
      // derivative of the inverse at 0: zero for delta < 1, 1/q at delta = 1,
      // unbounded for delta > 1 (floored for the Newton caller).
      d(i) = delta_ < 1.0 ? 0.0 : (delta_ == 1.0 ? 1.0 / (q * delta_) : 1e300);
    } else {
      d(i) = std::pow(a / q, expo) / (delta_ * q);
    }
  }
  return d;
}

QuadraticForm::QuadraticForm(Matrix h) : h_(std::move(h)) {
  if (h_.rows() != h_.cols()) throw std::invalid_argument("QuadraticForm: H must be square");
  if (!h_.isApprox(h_.transpose(), 1e-12)) throw std::invalid_argument("QuadraticForm: H must be symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(h_);
  eig_min_ = eig.eigenvalues().minCoeff();
  eig_max_ = eig.eigenvalues().maxCoeff();
  if (!(eig_min_ > 0.0)) throw std::invalid_argument("QuadraticForm: H must be positive definite");
  solver_.compute(h_);
}

double QuadraticForm::strong_convexity_alpha(double radius) const {
  require_positive_radius(radius);
  return 2.0 * eig_min_;
}

Matrix QuadraticForm::inverse_jacobian(const Vector& u) const {
  return 0.5 * solver_.solve(Matrix::Identity(u.size(), u.size()));
}

namespace {

[[noreturn]] void entropy_domain_error(Index i, double value) {
  std::ostringstream os;
  os << "NegativeEntropy: nonpositive entry beta[" << i << "] = " << value;
  throw std::domain_error(os.str());
}

}  // namespace

double NegativeEntropy::psi(const Vector& beta) const {
  double acc = 0.0;
  for (Index i = 0; i < beta.size(); ++i) {
    if (!(beta(i) > 0.0)) entropy_domain_error(i, beta(i));
    acc += beta(i) * std::log(beta(i)) - beta(i);
  }
  return acc;
}

Vector NegativeEntropy::grad(const Vector& beta) const {
  Vector g(beta.size());
  for (Index i = 0; i < beta.size(); ++i) {
    if (!(beta(i) > 0.0)) entropy_domain_error(i, beta(i));
    g(i) = std::log(beta(i));
  }
  return g;
}

double NegativeEntropy::strong_convexity_alpha(double radius) const {
  require_positive_radius(radius);
  return 1.0 / radius;
}

double NegativeEntropy::smoothness_ell_on_annulus(double inner, double outer) const {
  if (!(inner > 0.0) || !(outer >= inner))
    throw std::invalid_argument("NegativeEntropy: annulus needs 0 < inner <= outer");
  return 1.0 / inner;
}

bool NegativeEntropy::in_domain(const Vector& beta) const {
  return beta.allFinite() && (beta.array() > 0.0).all();
}

double bregman_divergence(const MirrorMap& psi, const Vector& u, const Vector& w) {
  if (u.size() != w.size()) throw std::invalid_argument("bregman_divergence: length mismatch");
  if (!psi.in_domain(u) || !psi.in_domain(w))
    throw std::domain_error("bregman_divergence: point outside the mirror map domain");
  return psi.psi(u) - psi.psi(w) - psi.grad(w).dot(u - w);
}

}  // namespace vrsmd::mirror
