#pragma once

#include "qps/bloch.hpp"
#include "qps/cell_solver.hpp"
#include "qps/gmres.hpp"

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <vector>

namespace qps {

using VectorField = std::function<Field3(double, double, double)>;

// Volume current on the strip. f is evaluated in global coordinates and must vanish outside `cells`
// and above z_max. closed_form, when set, replaces the lattice sum: it returns the modal coefficients of the
// transformed source at the requested depths.
struct SourceSpec {
  VectorField f;
  std::vector<LatticeIndex> cells;
  double z_max = 0.0;
  std::function<ModalField(Vec2 alpha, int M, const std::vector<double>& z)> closed_form;
  std::string name = "zero";

  bool empty() const { return !closed_form && (!f || cells.empty()); }
};

// polarization * (1 - r^2/radius^2)^3 around center (reference cell coordinates), repeated on every listed cell.
SourceSpec make_bump_source(Vec3 center, double radius, Field3 polarization,
                            std::vector<LatticeIndex> cells = {LatticeIndex{0, 0}});

// Load vector of the transformed source at one alpha. modal, when given, receives the transformed source on
// every depth quadrature point.
CVector transformed_source_load(const Discretization& disc, const PeriodicMedium& medium, const SourceSpec& source,
                                Vec2 alpha, int grid, ModalField* modal = nullptr);

struct StripOptions {
  double cutoff_tol = 1e-6;
  int threads = 1;
  int grid = 16;  // transverse samples per axis for sources, defects and output cells
  std::vector<LatticeIndex> output_cells{LatticeIndex{0, 0}};
  std::vector<double> output_depths;  // empty: the depth nodes
  bool keep_family = false;
  GmresOptions gmres;
  size_t cache_bytes = size_t{1} << 30;  // memory for reusing factorizations across passes
};

struct AlphaNodeResult {
  Vec2 alpha;
  double weight = 0.0;
  int rank = 0;
  double core_rcond = 1.0;
  double residual = 0.0;
  double norm_sq = 0.0;       // discrete H(curl) norm squared of u_alpha
  double weighted_sq = 0.0;   // sum_j |alpha_j . u_j|^2 / |beta_j|
  Complex source_work;        // F^H U
  double flux = 0.0;          // outgoing modal flux
  std::vector<Eigen::Vector2cd> trace;
  std::vector<Complex> vertical;  // E3 amplitude above the domain per mode
};

struct DefectReport {
  bool active = false;
  int iterations = 0;
  std::vector<double> history;
  bool converged = false;
  int unknowns = 0;
};

struct StripSolution {
  double k = 0.0;
  int M = 0;
  double R = 0.0;
  int grid = 0;
  std::vector<double> depths;
  std::map<LatticeIndex, GridField> cells;  // synthesized field on the output cells
  std::vector<AlphaNodeResult> nodes;
  std::vector<CellSolution> family;          // only with keep_family
  double source_norm = 0.0;                  // L2 norm of the strip source
  double weighted_norm_sq = 0.0;
  DefectReport defect;
  GridField defect_field;                    // central-cell field on the defect sample points
  double seconds = 0.0;
};

double weighted_norm(const StripSolution& u);

// Field above the domain, x3 >= R. The strip version sums the radiated modes of every node.
Field3 extend_field(const StripSolution& u, Vec3 x);
Field3 extend_field(const CellSolution& u, Vec3 x, double R);

// Outgoing modal flux of a cell solution: sum over propagating modes of beta |u_j|^2 + |alpha_j . u_j|^2 / beta.
double outgoing_flux(const ModeSet& modes, const RankUpdate& U, const CellSolution& u);

class StripSolver {
 public:
  StripSolver(const Discretization& disc, const PeriodicMedium& medium, double k, const AlphaQuadrature& quad,
              const StripOptions& opts = {});
  ~StripSolver();

  StripSolution solve_periodic(const SourceSpec& source) const;
  // Solves (Id - k^2 M_q) U = U_inc on the central cell, then synthesizes with the load f + k^2 q U.
  StripSolution solve_perturbed(const SourceSpec& source, const DefectPerturbation& defect) const;
  // First-order expansion in q: the load f + k^2 q U_inc.
  StripSolution solve_born(const SourceSpec& source, const DefectPerturbation& defect) const;

  const Discretization& discretization() const { return disc_; }
  const MediumSamples& samples() const { return samples_; }
  const AlphaQuadrature& quadrature() const { return quad_; }
  const StripOptions& options() const { return opts_; }
  int cached_factorizations() const;

  struct Impl;

 private:
  Discretization disc_;
  PeriodicMedium medium_;
  double k_;
  AlphaQuadrature quad_;
  StripOptions opts_;
  MediumSamples samples_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace qps
