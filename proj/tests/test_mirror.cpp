#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <memory>
#include <vector>

#include "test_util.hpp"
#include "vrsmd/mirror.hpp"

using namespace vrsmd;
using namespace vrsmd::mirror;
using testutil::gaussian_vector;

namespace {

// A point of the map's domain inside the inf-norm box of radius k,
// bounded away from zero where the Hessian misbehaves.
Vector domain_point(const MirrorMap& map, Index p, double k, std::uint64_t seed) {
  CounterRng rng(seed);
  Vector v(p);
  const bool positive = map.name() == "entropy";
  for (Index i = 0; i < p; ++i) {
    double t = 0.05 + 0.95 * rng.uniform01();  // in [0.05, 1]
    if (!positive && rng.uniform01() < 0.5) t = -t;
    v(i) = k * t;
  }
  return v;
}

std::vector<std::unique_ptr<MirrorMap>> all_maps() {
  std::vector<std::unique_ptr<MirrorMap>> maps;
  maps.push_back(std::make_unique<SquaredL2>());
  maps.push_back(std::make_unique<PowerNorm>(0.5));
  maps.push_back(std::make_unique<PowerNorm>(1.0));
  Matrix h(3, 3);
  h << 2, 0.3, 0, 0.3, 1, 0.1, 0, 0.1, 3;
  maps.push_back(std::make_unique<QuadraticForm>(h));
  maps.push_back(std::make_unique<NegativeEntropy>());
  return maps;
}

}  // namespace

TEST_CASE("bregman divergence values") {
  SquaredL2 l2;
  const Vector u = (Vector(2) << 3, -1).finished();
  CHECK(bregman_divergence(l2, u, u) == doctest::Approx(0.0));
  CHECK(bregman_divergence(l2, (Vector(2) << 1, 0).finished(), Vector::Zero(2)) ==
        doctest::Approx(0.5));

  NegativeEntropy entropy;
  const Vector one = Vector::Ones(1);
  const Vector e = Vector::Constant(1, std::exp(1.0));
  CHECK(bregman_divergence(entropy, one, e) == doctest::Approx(0.7182818284590451).epsilon(1e-12));
  CHECK_THROWS_AS(bregman_divergence(entropy, -one, e), std::domain_error);
  CHECK_THROWS_AS(bregman_divergence(l2, one, Vector::Zero(2)), std::invalid_argument);
}

TEST_CASE("gradient / inverse round trips from the worked examples") {
  PowerNorm p1(1.0);
  CHECK(p1.grad(Vector::Constant(1, 3.0))(0) == doctest::Approx(6.0));
  CHECK(p1.grad_inverse(Vector::Constant(1, 6.0))(0) == doctest::Approx(3.0));

  PowerNorm phalf(0.5);
  CHECK(phalf.grad(Vector::Constant(1, 4.0))(0) == doctest::Approx(3.0));
  CHECK(phalf.grad_inverse(Vector::Constant(1, 3.0))(0) == doctest::Approx(4.0));
  CHECK(phalf.grad_inverse(Vector::Zero(1))(0) == 0.0);  // analytic limit at 0

  NegativeEntropy entropy;
  const Vector b = (Vector(2) << 1.0, std::exp(1.0)).finished();
  const Vector g = entropy.grad(b);
  CHECK(g(0) == doctest::Approx(0.0));
  CHECK(g(1) == doctest::Approx(1.0));
  CHECK((entropy.grad_inverse(g) - b).lpNorm<Eigen::Infinity>() <= 1e-12);
  CHECK_THROWS_AS(entropy.grad(Vector::Zero(2)), std::domain_error);
}

TEST_CASE("round trip identity on random domain points") {
  for (const auto& map : all_maps()) {
    CAPTURE(map->name());
    for (int rep = 0; rep < 25; ++rep) {
      const Vector beta = domain_point(*map, 3, 2.0, 1000 + rep);
      const Vector back = map->grad_inverse(map->grad(beta));
      CHECK((back - beta).lpNorm<Eigen::Infinity>() <= 1e-10);
    }
  }
}

TEST_CASE("strong convexity constants") {
  SquaredL2 l2;
  CHECK(l2.strong_convexity_alpha(10.0) == 1.0);
  CHECK(PowerNorm(0.5).strong_convexity_alpha(4.0) == doctest::Approx(0.375).epsilon(1e-12));
  Matrix h = Matrix::Zero(2, 2);
  h(0, 0) = 1;
  h(1, 1) = 3;
  CHECK(QuadraticForm(h).strong_convexity_alpha(1.0) == doctest::Approx(2.0));
  CHECK_THROWS_AS(l2.strong_convexity_alpha(0.0), std::invalid_argument);
  CHECK_THROWS_AS(PowerNorm(0.5).strong_convexity_alpha(-1.0), std::invalid_argument);
}

TEST_CASE("strong convexity inequality sampled on the box") {
  const double k = 1.5;
  for (const auto& map : all_maps()) {
    CAPTURE(map->name());
    const double alpha = map->strong_convexity_alpha(k);
    for (int rep = 0; rep < 100; ++rep) {
      const Vector u = domain_point(*map, 3, k, 2000 + rep);
      const Vector w = domain_point(*map, 3, k, 5000 + rep);
      const double lhs = map->psi(u);
      const double rhs = map->psi(w) + map->grad(w).dot(u - w) + 0.5 * alpha * (u - w).squaredNorm();
      CHECK(lhs >= rhs - 1e-9);
    }
  }
}

TEST_CASE("strict convexity: positive divergence at distinct points") {
  for (const auto& map : all_maps()) {
    CAPTURE(map->name());
    for (int rep = 0; rep < 20; ++rep) {
      const Vector u = domain_point(*map, 4, 2.0, 7000 + rep);
      Vector w = domain_point(*map, 4, 2.0, 8000 + rep);
      if ((u - w).norm() < 1e-12) continue;
      CHECK(bregman_divergence(*map, u, w) > 0.0);
    }
  }
}

TEST_CASE("gradient finite-difference check") {
  for (const auto& map : all_maps()) {
    CAPTURE(map->name());
    for (int rep = 0; rep < 10; ++rep) {
      const Vector beta = domain_point(*map, 4, 1.0, 9000 + rep);
      const Vector g = map->grad(beta);
      for (Index j = 0; j < beta.size(); ++j) {
        const double h = 1e-6 * std::max(1.0, std::abs(beta(j)));
        Vector bp = beta, bm = beta;
        bp(j) += h;
        bm(j) -= h;
        const double fd = (map->psi(bp) - map->psi(bm)) / (2.0 * h);
        CHECK(fd == doctest::Approx(g(j)).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("power norm approaches the l1 norm as delta shrinks") {
  const Vector beta = (Vector(3) << 0.7, -0.2, 1.4).finished();
  const double l1 = beta.lpNorm<1>();
  double prev_gap = 1e100;
  for (const double delta : {1e-1, 1e-2, 1e-3}) {
    const double gap = std::abs(PowerNorm(delta).psi(beta) - l1);
    CHECK(gap < prev_gap);
    prev_gap = gap;
  }
  CHECK(prev_gap <= 5e-3);
}

TEST_CASE("smoothness reporting") {
  CHECK(SquaredL2().smoothness_ell(1.0) == 1.0);
  CHECK_FALSE(PowerNorm(0.5).smoothness_ell(2.0).has_value());  // unbounded near zero
  CHECK(PowerNorm(1.0).smoothness_ell(2.0) == doctest::Approx(2.0));
  CHECK(PowerNorm(0.5).smoothness_ell_on_annulus(0.25, 2.0) ==
        doctest::Approx(0.75 / std::sqrt(0.25)));
  CHECK_FALSE(NegativeEntropy().smoothness_ell(1.0).has_value());
  CHECK(NegativeEntropy().smoothness_ell_on_annulus(0.1, 1.0) == doctest::Approx(10.0));
}

TEST_CASE("quadratic form validation and inverse") {
  Matrix bad = Matrix::Zero(2, 2);
  bad(0, 0) = 1;
  bad(1, 1) = -1;
  CHECK_THROWS_AS(QuadraticForm{bad}, std::invalid_argument);

  Matrix h(2, 2);
  h << 4, 1, 1, 2;
  QuadraticForm q(h);
  const Vector beta = (Vector(2) << 0.3, -1.2).finished();
  CHECK((q.grad_inverse(q.grad(beta)) - beta).lpNorm<Eigen::Infinity>() <= 1e-12);
  // inverse Jacobian is H^{-1}/2
  const Matrix j = q.inverse_jacobian(Vector::Zero(2));
  CHECK((h * j * 2.0 - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-12);
}
