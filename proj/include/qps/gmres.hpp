#pragma once

#include "qps/types.hpp"

#include <functional>
#include <vector>

namespace qps {

struct GmresOptions {
  double tol = 1e-8;  // relative residual
  int restart = 30;
  int max_iter = 200;
};

struct GmresResult {
  CVector x;
  int iterations = 0;
  std::vector<double> history;  // relative residual after each iteration
  bool converged = false;
  bool breakdown = false;       // Krylov space exhausted before reaching the tolerance
};

// Restarted GMRES with modified Gram-Schmidt and Givens rotations, zero initial guess.
GmresResult gmres(const std::function<CVector(const CVector&)>& apply, const CVector& b, const GmresOptions& opts = {});

}  // namespace qps
