#pragma once

#include "qps/lattice_modes.hpp"
#include "qps/media.hpp"
#include "qps/types.hpp"

#include <vector>

namespace qps {

// Fourier modes |j|_inf <= M times a uniform depth grid 0 = z_0 < ... < z_N = R.
// E1, E2 are continuous piecewise linear with zero value at z_0; E3 is piecewise constant.
// Unknowns are ordered by depth level i = 1..N: (E1, E2 at node z_i, E3 on cell (z_{i-1}, z_i)) for every mode.
struct Discretization {
  int M = 0;
  int N = 1;
  double R = 1.0;

  Discretization() = default;
  Discretization(int M, int N, double R);

  int modes() const { return ModeSet::count(M); }
  double h() const { return R / N; }
  double node(int i) const { return R * i / N; }
  int level_size() const { return 3 * modes(); }
  int unknowns() const { return 3 * N * modes(); }
  // comp 0, 1: tangential value at node i (1..N); comp 2: vertical value on cell i (1..N).
  int index(int mode, int comp, int i) const { return (i - 1) * level_size() + 3 * mode + comp; }
  DepthQuadrature quadrature() const { return DepthQuadrature::gauss(N, R, 3); }
};

// Modal samples (mode, depth point, component) of a vector field.
class ModalField {
 public:
  ModalField() = default;
  ModalField(int modes, int points) : nm_(modes), np_(points), v_(static_cast<size_t>(modes) * points * 3) {}
  int modes() const { return nm_; }
  int points() const { return np_; }
  Complex& operator()(int m, int g, int c) { return v_[(static_cast<size_t>(m) * np_ + g) * 3 + c]; }
  Complex operator()(int m, int g, int c) const { return v_[(static_cast<size_t>(m) * np_ + g) * 3 + c]; }
  std::vector<Complex>& data() { return v_; }
  const std::vector<Complex>& data() const { return v_; }

 private:
  int nm_ = 0, np_ = 0;
  std::vector<Complex> v_;
};

// Field samples on the ng x ng transverse grid at a list of depths: layout ((n1 ng + n2) np + g) 3 + c.
class GridField {
 public:
  GridField() = default;
  GridField(int ng, int points) : ng_(ng), np_(points), v_(static_cast<size_t>(ng) * ng * points * 3) {}
  int grid() const { return ng_; }
  int points() const { return np_; }
  Complex& operator()(int n1, int n2, int g, int c) { return v_[((static_cast<size_t>(n1) * ng_ + n2) * np_ + g) * 3 + c]; }
  Complex operator()(int n1, int n2, int g, int c) const {
    return v_[((static_cast<size_t>(n1) * ng_ + n2) * np_ + g) * 3 + c];
  }
  std::vector<Complex>& data() { return v_; }
  const std::vector<Complex>& data() const { return v_; }

 private:
  int ng_ = 0, np_ = 0;
  std::vector<Complex> v_;
};

// Load vector F_i = cell average of f . conj(psi_i) from modal samples on the depth quadrature points.
CVector load_vector(const Discretization& disc, const ModalField& f);
// Same, for f sampled only on the listed depth quadrature points (sample p sits at points[p]).
CVector load_vector_partial(const Discretization& disc, const ModalField& f, const std::vector<int>& points);

// Finite element field of every mode at arbitrary depths.
ModalField evaluate_modal(const Discretization& disc, const CVector& coeffs, const std::vector<double>& z);

// Coefficients g_m = (1/ng^2) sum_x g(x) e^{i alpha_m . x} of an alpha-quasi-periodic grid field.
ModalField project_to_modes(const GridField& g, Vec2 alpha, int M);
// g(x) = sum_m g_m e^{-i alpha_m . x} on the grid.
GridField synthesize_on_grid(const ModalField& f, Vec2 alpha, int M, int ng);

}  // namespace qps
