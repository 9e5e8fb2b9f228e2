#pragma once

#include "qps/types.hpp"

#include <functional>

namespace qps {

struct SmwResult {
  CVector u;
  CVector core;  // c = (D^{-1} + Z^H S^{-1} Z)^{-1} Z^H S^{-1} rhs, so that S u + Z c = rhs
  double core_rcond = 1.0;
};

using SolveFn = std::function<CVector(const CVector&)>;

// (S + Z D Z^H)^{-1} rhs via the rank-|J| update, given S^{-1} as a callable and the diagonal of D^{-1}.
// D^{-1} entries may be 0 (limit form). Raises a singular error when the core matrix is numerically singular.
SmwResult smw_solve(const SolveFn& solve_s, const CMatrix& Z, const CVector& d_inv, const CVector& rhs,
                    double min_core_rcond = 1e-14);

// Dense helper: S given explicitly.
SmwResult smw_solve_dense(const CMatrix& S, const CMatrix& Z, const CVector& d_inv, const CVector& rhs);

}  // namespace qps
