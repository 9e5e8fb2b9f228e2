#pragma once

#include "qps/discretization.hpp"
#include "qps/lattice_modes.hpp"
#include "qps/media.hpp"
#include "qps/types.hpp"

#include <functional>
#include <string>
#include <vector>

namespace qps {

struct OracleReport {
  std::string name;
  std::string inputs_digest;
  std::vector<double> reference;
  std::vector<double> candidate;
  double discrepancy = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  bool skipped = false;
  std::string note;
};

std::string digest(const std::string& text);

// Random diagonally dominant S (n x n), random Z (n x rank), random diagonal D; compares the rank-update
// solution against a dense factorization of S + Z D Z^H. Reports the relative discrepancy.
OracleReport dense_smw_oracle(int n, int rank, unsigned seed, double tolerance = 1e-10);

struct AffineFit {
  CVector a;
  CVector b;
  double relative_residual = 0.0;
  bool rank_deficient = false;
};

// Least-squares fit u_i = a + s_i b in every coordinate.
AffineFit affine_fit(const std::vector<Complex>& s, const std::vector<CVector>& u);

// Fit u(t) = a + b sqrt(t); needs at least 4 distinct offsets.
OracleReport sqrt_fit_oracle(const std::vector<double>& t, const std::vector<CVector>& u, double tolerance = 1e-6);

struct ManufacturedOptions {
  double k = 1.0;
  double R = 2.0;
  double delta = 0.25;
  Vec2 alpha{};
};

// Closed-form field and load per lattice mode in free space (eps = mu = 1).
struct ManufacturedCase {
  std::string name;
  double k = 1.0;
  Vec2 alpha{};
  int min_modes = 0;  // smallest truncation M containing every active mode
  PeriodicMedium medium;
  std::function<Field3(LatticeIndex, double)> exact;
  std::function<Field3(LatticeIndex, double)> load;

  ModalField load_samples(const Discretization& disc) const;
  ModalField exact_samples(const Discretization& disc, const std::vector<double>& z) const;
  double relative_l2_error(const Discretization& disc, const CVector& coeffs) const;
};

// outgoing_mode, two_mode_superposition, gradient_null_test
ManufacturedCase manufactured_case(const std::string& name, const ManufacturedOptions& opts = {});

}  // namespace qps
