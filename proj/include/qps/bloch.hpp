#pragma once

#include "qps/lattice_modes.hpp"
#include "qps/types.hpp"

#include <functional>
#include <map>
#include <vector>

namespace qps {

// Cell index -> samples of a field on the reference cell (all vectors share one layout).
struct CellIndexedField {
  std::map<LatticeIndex, CVector> cells;
};

// Sum_j f_j e^{2 pi i alpha.j}.
CVector bloch_forward(const CellIndexedField& f, Vec2 alpha);

// Pointwise transform of a strip function whose support lies in the listed cells; x may be any point.
Complex bloch_forward_at(const std::function<Complex(double, double, double)>& f,
                         const std::vector<LatticeIndex>& support, Vec2 alpha, Vec3 x);

struct QuadraturePoint {
  double x;
  double w;
};

// Gauss-Legendre rule on [-1, 1].
std::vector<QuadraturePoint> gauss_legendre(int n);

// Composite Gauss rule on [a, b] with n_panels panels; panels adjacent to a singular point are split
// dyadically `levels` times toward it.
std::vector<QuadraturePoint> graded_rule_1d(double a, double b, int n_panels, const std::vector<double>& singular_points,
                                            int levels, int order);

struct CutoffArc {
  LatticeIndex mode;  // circle |alpha + j| = k, centre -j
  Vec2 center;
  double radius;
};

struct QuadratureOptions {
  int n_base = 16;         // panels per axis
  int order = 4;           // Gauss points per axis on unrefined panels
  int refined_order = 3;   // Gauss points per axis on refined panels
  int levels = 4;          // dyadic refinement levels toward each arc
  double cutoff_tol = 0.0; // nodes are kept outside this band around every arc
};

struct AlphaQuadrature {
  std::vector<Vec2> nodes;
  std::vector<double> weights;
  std::vector<CutoffArc> arcs;
  std::vector<int> leaves_per_level;  // grading descriptor
  QuadratureOptions options;
  double k = 0.0;
  int M = 0;
  int moved_nodes = 0;  // nodes pushed out of a cutoff band

  int size() const { return static_cast<int>(nodes.size()); }
  double weight_sum() const;
};

AlphaQuadrature build_alpha_quadrature(double k, int M, const QuadratureOptions& opts = {});

// Sum_q w_q u_q e^{-2 pi i alpha_q.j}.
CVector bloch_inverse(const std::vector<CVector>& family, const AlphaQuadrature& quad, LatticeIndex target);

inline Complex bloch_phase(Vec2 alpha, LatticeIndex j) {
  return std::polar(1.0, kTwoPi * (alpha.x * j.j1 + alpha.y * j.j2));
}

}  // namespace qps
