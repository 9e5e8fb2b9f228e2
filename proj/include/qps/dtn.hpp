#pragma once

#include "qps/lattice_modes.hpp"
#include "qps/types.hpp"

#include <vector>

namespace qps {

// Tangential trace coefficients at x3 = R, one 2-vector per mode of a ModeSet.
using TraceCoefficients = std::vector<Eigen::Vector2cd>;

struct DtnMultipliers {
  std::vector<Complex> t;                 // i beta_j
  std::vector<Eigen::Matrix2cd> n;        // -i alpha_j alpha_j^T / beta_j, zero for singular modes
  std::vector<bool> singular;
  std::vector<Vec2> alpha_j;
  std::vector<Complex> beta_j;
};

// Raises a cutoff error if a mode with beta_j = 0 is not listed as singular.
DtnMultipliers make_multipliers(const ModeSet& modes, const CutoffClassification& cls);

TraceCoefficients t_apply(const DtnMultipliers& mult, const TraceCoefficients& phi);
TraceCoefficients n_apply_regular(const DtnMultipliers& mult, const TraceCoefficients& phi);
// Full N including singular modes; every mode must have beta_j != 0.
TraceCoefficients n_apply_full(const DtnMultipliers& mult, const TraceCoefficients& phi);

// alpha_j . u_j
Complex singular_functional(Vec2 alpha_j, const Eigen::Vector2cd& u_j);

// Diagonal entries -i / (2 pi beta_j) for the singular modes.
CVector d_matrix(double k, const std::vector<Vec2>& singular_alpha_j);
// Diagonal of D^{-1} = 2 pi i beta_j, exactly 0 at cutoff.
CVector d_inverse(double k, const std::vector<Vec2>& singular_alpha_j);

struct ContinuousMultipliers {
  Complex t;
  Eigen::Matrix2cd n;
};

ContinuousMultipliers continuous_multipliers(double k, Vec2 xi);

// <a, b> = sum_j b_j^H a_j
Complex trace_pairing(const TraceCoefficients& a, const TraceCoefficients& b);
// sum_j (1 + |alpha_j|^2)^{-1/2} |phi_j|^2
double hminus_half_norm_sq(const ModeSet& modes, const TraceCoefficients& phi);

}  // namespace qps
