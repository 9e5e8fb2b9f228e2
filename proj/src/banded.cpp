#include "qps/banded.hpp"

#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <sstream>

namespace qps {

BandMatrix::BandMatrix(int n, int kl, int ku) : n_(n), kl_(kl), ku_(ku), ab_(static_cast<size_t>(n) * (2 * kl + ku + 1)) {
  if (n < 1 || kl < 0 || ku < 0) fail(ErrorCode::invalid_argument, "invalid band matrix shape");
}

void BandMatrix::add(int i, int j, Complex v) {
  if (!in_band(i, j)) fail(ErrorCode::invalid_argument, "band matrix entry outside the band");
  ab_[static_cast<size_t>(j) * ldab() + kl_ + ku_ + i - j] += v;
}

Complex BandMatrix::get(int i, int j) const {
  if (!in_band(i, j)) return {};
  return ab_[static_cast<size_t>(j) * ldab() + kl_ + ku_ + i - j];
}

CVector BandMatrix::apply(const CVector& x) const {
  CVector y = CVector::Zero(n_);
  for (int j = 0; j < n_; ++j) {
    const Complex xj = x(j);
    if (xj == Complex{}) continue;
    const Complex* col = &ab_[static_cast<size_t>(j) * ldab() + kl_ + ku_ - j];
    for (int i = std::max(0, j - ku_); i <= std::min(n_ - 1, j + kl_); ++i) y(i) += col[i] * xj;
  }
  return y;
}

CVector BandMatrix::apply_adjoint(const CVector& x) const {
  CVector y = CVector::Zero(n_);
  for (int j = 0; j < n_; ++j) {
    const Complex* col = &ab_[static_cast<size_t>(j) * ldab() + kl_ + ku_ - j];
    Complex s{};
    for (int i = std::max(0, j - ku_); i <= std::min(n_ - 1, j + kl_); ++i) s += std::conj(col[i]) * x(i);
    y(j) = s;
  }
  return y;
}

double BandMatrix::norm1() const {
  double best = 0.0;
  for (int j = 0; j < n_; ++j) {
    double s = 0.0;
    for (int i = std::max(0, j - ku_); i <= std::min(n_ - 1, j + kl_); ++i) s += std::abs(get(i, j));
    best = std::max(best, s);
  }
  return best;
}

CMatrix BandMatrix::dense() const {
  CMatrix a = CMatrix::Zero(n_, n_);
  for (int j = 0; j < n_; ++j)
    for (int i = std::max(0, j - ku_); i <= std::min(n_ - 1, j + kl_); ++i) a(i, j) = get(i, j);
  return a;
}

BandLU::BandLU(BandMatrix a) : lu_(std::move(a)), ipiv_(lu_.size()) {
  anorm_ = lu_.norm1();
  const int n = lu_.size();
  const lapack_int info =
      LAPACKE_zgbtrf(LAPACK_COL_MAJOR, n, n, lu_.kl(), lu_.ku(), lu_.storage().data(), lu_.ldab(), ipiv_.data());
  if (info != 0) {
    std::ostringstream os;
    os << "banded factorization failed (zgbtrf info " << info << ")";
    fail(ErrorCode::singular, os.str());
  }
}

void BandLU::solve_in_place(CVector& b, bool adjoint) const {
  const int n = lu_.size();
  const lapack_int info = LAPACKE_zgbtrs(LAPACK_COL_MAJOR, adjoint ? 'C' : 'N', n, lu_.kl(), lu_.ku(), 1,
                                         lu_.storage().data(), lu_.ldab(), ipiv_.data(), b.data(), n);
  if (info != 0) fail(ErrorCode::singular, "banded solve failed");
}

CVector BandLU::solve(const CVector& b, bool adjoint) const {
  CVector x = b;
  solve_in_place(x, adjoint);
  return x;
}

double BandLU::rcond() const {
  double rc = 0.0;
  const lapack_int info = LAPACKE_zgbcon(LAPACK_COL_MAJOR, '1', lu_.size(), lu_.kl(), lu_.ku(), lu_.storage().data(),
                                         lu_.ldab(), ipiv_.data(), anorm_, &rc);
  if (info != 0) fail(ErrorCode::singular, "condition estimate failed");
  return rc;
}

}  // namespace qps
