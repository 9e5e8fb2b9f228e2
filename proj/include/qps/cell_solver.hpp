#pragma once

#include "qps/banded.hpp"
#include "qps/discretization.hpp"
#include "qps/dtn.hpp"
#include "qps/lattice_modes.hpp"
#include "qps/media.hpp"
#include "qps/smw.hpp"

#include <optional>
#include <vector>

namespace qps {

enum class FormKind {
  physical,         // nu curl.curl - k^2 eps mass + boundary terms
  physical_volume,  // volume terms of the physical form only
  curl_only,        // nu curl.curl
  coercive,         // nu curl.curl + rho mass + (N - T) + 2 pi C(k, alpha) H^{-1/2} shift
  gram,             // curl.curl + mass with unit coefficients (H(curl) inner product)
};

struct AssemblyOptions {
  FormKind form = FormKind::physical;
  bool split_singular = true;  // singular modes leave their N multiplier to the rank update
  double rho = 0.0;            // coercive form only
};

// Galerkin matrix of the regular form s_alpha (or a variant selected by AssemblyOptions).
// Transversely homogeneous media give one band block per mode, otherwise a single coupled band matrix.
class CellOperator {
 public:
  CellOperator(const Discretization& disc, const MediumSamples& medium, double k, const QuasiPeriodicity& alpha,
               const CutoffClassification& cls, const AssemblyOptions& opts = {});

  const Discretization& discretization() const { return disc_; }
  const ModeSet& modes() const { return modes_; }
  const CutoffClassification& classification() const { return cls_; }
  const DtnMultipliers& multipliers() const { return mult_; }
  double k() const { return k_; }
  bool decoupled() const { return decoupled_; }

  CVector apply(const CVector& u, bool adjoint = false) const;
  CMatrix dense() const;
  double norm1() const;

  void factor();
  bool factored() const { return !lu_.empty(); }
  CVector solve(const CVector& rhs, bool adjoint = false) const;
  // 1-norm condition estimate of the factored matrix.
  double condition_estimate() const;

  // Copy with Z diag(d) Z^H added (the unsplit direct operator when d = D).
  CellOperator with_update(const CMatrix& Z, const CVector& d) const;

  // Rough memory of the factorization in bytes.
  size_t factor_bytes() const;

 private:
  int block_of(int mode) const { return decoupled_ ? mode : 0; }
  int local_index(int mode, int comp, int level) const;

  Discretization disc_;
  ModeSet modes_;
  CutoffClassification cls_;
  DtnMultipliers mult_;
  double k_;
  bool decoupled_;
  std::vector<BandMatrix> blocks_;
  std::vector<BandLU> lu_;
};

struct RankUpdate {
  CMatrix Z;                 // columns sqrt(2 pi) alpha_j on the top tangential unknowns of mode j
  CVector d_inv;             // 2 pi i beta_j
  std::vector<int> positions;
  std::vector<Vec2> alpha_j;
  std::vector<Complex> beta_j;

  int rank() const { return static_cast<int>(positions.size()); }
  CVector d() const;  // -i / (2 pi beta_j); cutoff error at beta_j = 0
};

RankUpdate make_rank_update(const Discretization& disc, const ModeSet& modes, const CutoffClassification& cls);

struct CellSolution {
  Vec2 alpha;
  double k = 0.0;
  int M = 0;
  CVector coeffs;
  TraceCoefficients trace;
  std::vector<int> singular_positions;
  CVector core;                            // rank-update coefficients c
  std::vector<Complex> singular_amplitude; // l_j(u) = alpha_j . u_j for singular modes, equal to sqrt(2 pi) i beta_j c_j
  std::vector<Complex> vertical_ratio;     // per mode: E3 amplitude above R per unit exponential
  double residual = 0.0;
  double core_rcond = 1.0;
  bool direct = false;
};

CellSolution solve_smw(const CellOperator& S, const RankUpdate& U, const CVector& rhs, bool adjoint = false);
// Factors S + Z D Z^H; requires beta_j != 0 for every singular mode.
CellSolution solve_direct(const CellOperator& S, const RankUpdate& U, const CVector& rhs);

// One alpha: regular operator, factorization and rank update.
class CellProblem {
 public:
  CellProblem(const Discretization& disc, const MediumSamples& medium, double k, const QuasiPeriodicity& alpha,
              double cutoff_tol);
  CellSolution solve(const CVector& rhs, bool adjoint = false) const { return solve_smw(op_, update_, rhs, adjoint); }
  const CellOperator& op() const { return op_; }
  const RankUpdate& update() const { return update_; }

 private:
  CellOperator op_;
  RankUpdate update_;
};

// Dual depth-H^1 norm of w -> -<eps u + f / k^2, grad w>, w = psi(z) e^{-i alpha_m . x} with psi
// continuous piecewise quadratic, psi(0) = psi(R) = 0. f holds modal samples on the depth quadrature points.
double divergence_residual(const Discretization& disc, const MediumSamples& medium, const CellSolution& u,
                           const ModalField& f, double k);

struct CoercivityReport {
  double rho = 0.0;
  double cutoff_constant = 0.0;
  double min_eigenvalue = 0.0;      // min of Re a^rho(u,u) / |u|^2_{H(curl)} over the discrete space
  double min_rayleigh_sample = 0.0; // over random discrete fields
  double min_boundary_margin = 0.0; // min over random traces of Re<(N-T)phi,phi> + C' |phi|^2_{-1/2}, scaled
  bool boundary_bound_holds = false;
  bool coercive = false;
};

CoercivityReport coercivity_check(const Discretization& disc, const MediumSamples& medium, const QuasiPeriodicity& alpha,
                                  double k, double rho, int samples = 64, unsigned seed = 7);

struct EnergyReport {
  Complex source_work;     // <f, u> = F^H U
  double im_a = 0.0;       // Im a(u, u), a(u, u) = U^H (S + Z D Z^H) U
  double flux = 0.0;       // outgoing modal flux: sum over propagating modes of beta |u_j|^2 + |alpha_j.u_j|^2 / beta
  double absorption = 0.0; // -Im of the volume part of a(u, u)
  double mismatch = 0.0;   // |Im <f,u> - flux - absorption|
  double t_real = 0.0, t_imag = 0.0;  // Re, Im <T u, u>
  double n_real = 0.0, n_imag = 0.0;  // Re, Im <N u, u>
  bool signs_ok = false;
};

EnergyReport energy_identity_check(const CellOperator& S, const RankUpdate& U, const CellSolution& u, const CVector& rhs,
                                   const MediumSamples& medium);

}  // namespace qps
