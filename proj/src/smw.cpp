#include "qps/smw.hpp"

#include <sstream>

namespace qps {

SmwResult smw_solve(const SolveFn& solve_s, const CMatrix& Z, const CVector& d_inv, const CVector& rhs,
                    double min_core_rcond) {
  SmwResult r;
  CVector y = solve_s(rhs);
  const Eigen::Index nj = Z.cols();
  if (nj == 0) {
    r.u = std::move(y);
    r.core.resize(0);
    return r;
  }
  if (d_inv.size() != nj || Z.rows() != rhs.size()) fail(ErrorCode::invalid_argument, "rank update shape mismatch");
  CMatrix sz(Z.rows(), nj);
  for (Eigen::Index j = 0; j < nj; ++j) sz.col(j) = solve_s(Z.col(j));
  CMatrix core = Z.adjoint() * sz;
  core.diagonal() += d_inv;
  Eigen::PartialPivLU<CMatrix> lu(core);
  r.core_rcond = lu.rcond();
  if (!(r.core_rcond >= min_core_rcond)) {
    std::ostringstream os;
    os << "rank-update core matrix is numerically singular (rcond " << r.core_rcond << ")";
    fail(ErrorCode::singular, os.str());
  }
  r.core = lu.solve(Z.adjoint() * y);
  r.u = y - sz * r.core;
  return r;
}

SmwResult smw_solve_dense(const CMatrix& S, const CMatrix& Z, const CVector& d_inv, const CVector& rhs) {
  Eigen::PartialPivLU<CMatrix> lu(S);
  return smw_solve([&](const CVector& b) -> CVector { return lu.solve(b); }, Z, d_inv, rhs);
}

}  // namespace qps
