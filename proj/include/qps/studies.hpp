#pragma once

#include "qps/cell_solver.hpp"
#include "qps/oracles.hpp"
#include "qps/scenario.hpp"
#include "qps/strip_solver.hpp"

#include <memory>
#include <vector>

namespace qps {

// A single quasi-periodic solve set up from a scenario.
struct CellRun {
  Discretization disc;
  PeriodicMedium medium;
  MediumSamples samples;
  std::shared_ptr<CellProblem> problem;
  CVector rhs;
  ModalField load;  // transformed source on every depth quadrature point
  CellSolution solution;
  std::shared_ptr<ManufacturedCase> manufactured;
};

CellRun run_cell(const Scenario& s);
CellRun run_cell(const Scenario& s, Vec2 alpha, int N);

struct StripRun {
  AlphaQuadrature quad;
  ValidationReport validation;
  StripSolution solution;
};

// Periodic or perturbed strip solve as the scenario's defect says.
StripRun run_strip(const Scenario& s);

struct AlphaPathPoint {
  double offset = 0.0;
  Vec2 alpha;
  Complex beta;              // beta of the approached mode
  CVector u;                 // rank-update path coefficients
  double norm = 0.0;         // discrete H(curl) norm of the rank-update path solution
  double norm_direct = 0.0;  // same for the unsplit direct solve
  double cond_smw = 0.0;     // max(cond S, 1 / rcond of the core matrix)
  double cond_direct = 0.0;  // cond of S + Z D Z^H
  double residual = 0.0;
  double seconds = 0.0;
};

struct AlphaPathResult {
  std::vector<AlphaPathPoint> points;
  int fit_points = 0;          // the fit uses the last fit_points offsets
  AffineFit fit;               // u = u1 + beta u2
  std::vector<double> fit_error;  // per point |u - u1 - beta u2| / |u|
};

// Walks alpha(t) = cutoff_alpha - t (cutoff_alpha + j) / |cutoff_alpha + j| toward the cutoff circle of mode j.
AlphaPathResult alpha_path_sweep(const Scenario& s, int fit_points = 5);

struct ConvergencePoint {
  int N = 0;
  double h = 0.0;
  double l2_error = 0.0;
  double divergence = 0.0;
  double energy_mismatch = 0.0;
  double seconds = 0.0;
};

struct ConvergenceResult {
  std::vector<ConvergencePoint> points;
  std::vector<double> l2_order;         // log2 of successive error ratios
  std::vector<double> divergence_ratio; // successive divergence residual ratios
};

// Manufactured case of the scenario at each depth element count.
ConvergenceResult convergence_study(const Scenario& s);

}  // namespace qps
