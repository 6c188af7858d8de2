#pragma once

#include <cstring>

#include "vrsmd/core.hpp"
#include "vrsmd/rng.hpp"

namespace testutil {

using vrsmd::CounterRng;
using vrsmd::Index;
using vrsmd::Matrix;
using vrsmd::Vector;

inline Matrix gaussian_matrix(Index n, Index p, std::uint64_t seed) {
  CounterRng rng(seed);
  Matrix m(n, p);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j) m(i, j) = rng.normal();
  return m;
}

inline Vector gaussian_vector(Index p, std::uint64_t seed) {
  CounterRng rng(seed);
  Vector v(p);
  for (Index i = 0; i < p; ++i) v(i) = rng.normal();
  return v;
}

inline bool bitwise_equal(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) return false;
  return std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

inline bool bitwise_equal(double a, double b) {
  return std::memcmp(&a, &b, sizeof(double)) == 0;
}

// The shared desk fixture behind the sparse-recovery criteria: a 12x16
// column-scaled Gaussian design with a 2-sparse truth whose scale keeps the
// recovery bound's delta in a practical range.
struct RecoveryFixture {
  Matrix x;
  Vector y;
  Vector beta_o;
};

inline RecoveryFixture recovery_fixture() {
  RecoveryFixture f;
  f.x = gaussian_matrix(12, 16, 14);
  f.x /= std::sqrt(12.0);
  CounterRng brng(vrsmd::derive_seed(14, "beta"));
  f.beta_o = Vector::Zero(16);
  f.beta_o(0) = 0.035 * (1.0 + 0.2 * brng.uniform01());
  f.beta_o(1) = -0.030 * (1.0 + 0.2 * brng.uniform01());
  f.y = f.x * f.beta_o;
  return f;
}

}  // namespace testutil
