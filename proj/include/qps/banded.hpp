#pragma once

#include "qps/types.hpp"

#include <vector>

namespace qps {

// Complex band matrix in LAPACK general-band layout (ldab = 2 kl + ku + 1, column major).
class BandMatrix {
 public:
  BandMatrix() = default;
  BandMatrix(int n, int kl, int ku);

  int size() const { return n_; }
  int kl() const { return kl_; }
  int ku() const { return ku_; }
  bool in_band(int i, int j) const { return i - j <= kl_ && j - i <= ku_; }
  void add(int i, int j, Complex v);
  Complex get(int i, int j) const;
  CVector apply(const CVector& x) const;
  CVector apply_adjoint(const CVector& x) const;
  double norm1() const;
  CMatrix dense() const;

  std::vector<Complex>& storage() { return ab_; }
  const std::vector<Complex>& storage() const { return ab_; }
  int ldab() const { return 2 * kl_ + ku_ + 1; }

 private:
  int n_ = 0, kl_ = 0, ku_ = 0;
  std::vector<Complex> ab_;
};

// LU factorization with partial pivoting (zgbtrf) plus 1-norm condition estimate (zgbcon).
class BandLU {
 public:
  BandLU() = default;
  explicit BandLU(BandMatrix a);

  void solve_in_place(CVector& b, bool adjoint = false) const;
  CVector solve(const CVector& b, bool adjoint = false) const;
  double rcond() const;
  double norm1() const { return anorm_; }

 private:
  BandMatrix lu_;
  std::vector<int> ipiv_;
  double anorm_ = 0.0;
};

}  // namespace qps
