#pragma once

#include "vrsmd/core.hpp"

namespace vrsmd::oracles {

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  Vector x;
  double objective = 0.0;
};

// Solves  min c^T x  s.t.  A x = b, x >= 0  with a dense two-phase tableau
// simplex using Bland's rule (anti-cycling).  Exact at desk scale; rows of A
// may be linearly dependent (redundant rows are dropped in phase 1).
LpResult solve_lp(const Matrix& a, const Vector& b, const Vector& c);

}  // namespace vrsmd::oracles
