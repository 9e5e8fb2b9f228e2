#pragma once

#include "qps/types.hpp"

#include <compare>
#include <vector>

namespace qps {

struct WaveParameters {
  double k = 1.0;
  double omega = 1.0;
  double eps_plus = 1.0;
  double mu_plus = 1.0;

  static WaveParameters from_wavenumber(double k);
  static WaveParameters from_material(double omega, double eps_plus, double mu_plus);
  void validate() const;
};

struct LatticeIndex {
  int j1 = 0;
  int j2 = 0;
  auto operator<=>(const LatticeIndex&) const = default;
};

// Point of the closed Brillouin cell [-1/2,1/2]^2.
class QuasiPeriodicity {
 public:
  QuasiPeriodicity() = default;
  explicit QuasiPeriodicity(Vec2 alpha);
  QuasiPeriodicity(double a1, double a2) : QuasiPeriodicity(Vec2{a1, a2}) {}
  const Vec2& alpha() const { return alpha_; }

 private:
  Vec2 alpha_{};
};

// Square root of k^2 - |a|^2 with Im >= 0, Re >= 0 on the real branch; exactly 0 at cutoff.
Complex beta(double k, Vec2 a);

// Truncated transverse lattice |j|_inf <= M, row-major in (j1, j2).
class ModeSet {
 public:
  ModeSet(double k, const QuasiPeriodicity& alpha, int M);

  int truncation() const { return M_; }
  int size() const { return static_cast<int>(modes_.size()); }
  double k() const { return k_; }
  const Vec2& alpha() const { return alpha_; }
  const LatticeIndex& mode(int m) const { return modes_[m]; }
  const Vec2& alpha_j(int m) const { return alpha_j_[m]; }
  Complex beta_j(int m) const { return beta_j_[m]; }
  const std::vector<LatticeIndex>& modes() const { return modes_; }
  int position(LatticeIndex j) const;  // -1 when outside the truncation

  static int count(int M) { return (2 * M + 1) * (2 * M + 1); }
  static int position(int M, LatticeIndex j);

 private:
  double k_;
  Vec2 alpha_;
  int M_;
  std::vector<LatticeIndex> modes_;
  std::vector<Vec2> alpha_j_;
  std::vector<Complex> beta_j_;
};

struct CutoffClassification {
  std::vector<LatticeIndex> singular_modes;
  std::vector<int> singular_positions;  // positions in the matching ModeSet
  std::vector<double> distance;         // |k - |alpha_j|| for every mode
  double cutoff_tol = 0.0;
  bool too_many_singular = false;
  bool touches_cell_boundary = false;

  bool empty() const { return singular_modes.empty(); }
  bool is_singular(int position) const;
};

CutoffClassification singular_set(double k, const QuasiPeriodicity& alpha, int M, double cutoff_tol,
                                  double max_singular_fraction = 0.25);

double cutoff_constant(double k, const QuasiPeriodicity& alpha, int M);

}  // namespace qps
