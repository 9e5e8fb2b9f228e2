#include "qps/discretization.hpp"

#include <algorithm>

namespace qps {

Discretization::Discretization(int M_, int N_, double R_) : M(M_), N(N_), R(R_) {
  if (M < 0) fail(ErrorCode::invalid_argument, "mode truncation must be nonnegative");
  if (N < 1) fail(ErrorCode::invalid_argument, "need at least one depth element");
  if (!(R > 0.0)) fail(ErrorCode::invalid_argument, "domain height must be positive");
}

namespace {

// Adds the contribution of sample p of f, located at depth quadrature point g.
void accumulate_point(const Discretization& disc, const DepthQuadrature& dq, const ModalField& f, int p, int g, CVector& F) {
  const int e = dq.element[g];
  const double h = disc.h();
  const double t = (dq.z[g] - disc.node(e)) / h;
  const double w = dq.w[g];
  for (int m = 0; m < f.modes(); ++m) {
    for (int c = 0; c < 2; ++c) {
      const Complex v = w * f(m, p, c);
      if (e >= 1) F(disc.index(m, c, e)) += v * (1.0 - t);
      F(disc.index(m, c, e + 1)) += v * t;
    }
    F(disc.index(m, 2, e + 1)) += w * f(m, p, 2);
  }
}

}  // namespace

CVector load_vector(const Discretization& disc, const ModalField& f) {
  const DepthQuadrature dq = disc.quadrature();
  if (f.modes() != disc.modes() || f.points() != dq.size())
    fail(ErrorCode::invalid_argument, "modal load does not match the discretization");
  CVector F = CVector::Zero(disc.unknowns());
  for (int g = 0; g < dq.size(); ++g) accumulate_point(disc, dq, f, g, g, F);
  return F;
}

CVector load_vector_partial(const Discretization& disc, const ModalField& f, const std::vector<int>& points) {
  const DepthQuadrature dq = disc.quadrature();
  if (f.modes() != disc.modes() || f.points() != static_cast<int>(points.size()))
    fail(ErrorCode::invalid_argument, "modal load does not match the discretization");
  CVector F = CVector::Zero(disc.unknowns());
  for (size_t p = 0; p < points.size(); ++p) accumulate_point(disc, dq, f, static_cast<int>(p), points[p], F);
  return F;
}

ModalField evaluate_modal(const Discretization& disc, const CVector& coeffs, const std::vector<double>& z) {
  const int nm = disc.modes();
  ModalField out(nm, static_cast<int>(z.size()));
  const double h = disc.h();
  for (size_t p = 0; p < z.size(); ++p) {
    const double zz = std::clamp(z[p], 0.0, disc.R);
    const int e = std::min(static_cast<int>(zz / h), disc.N - 1);
    const double t = (zz - disc.node(e)) / h;
    for (int m = 0; m < nm; ++m) {
      for (int c = 0; c < 2; ++c) {
        const Complex left = e >= 1 ? coeffs(disc.index(m, c, e)) : Complex{};
        out(m, static_cast<int>(p), c) = left * (1.0 - t) + coeffs(disc.index(m, c, e + 1)) * t;
      }
      out(m, static_cast<int>(p), 2) = coeffs(disc.index(m, 2, e + 1));
    }
  }
  return out;
}

namespace {

// phase(m, n) = e^{i (a + m) x_n}, m = -M..M
std::vector<Complex> axis_phases(double a, int M, int ng) {
  const int nmode = 2 * M + 1;
  std::vector<Complex> ph(static_cast<size_t>(nmode) * ng);
  for (int m = 0; m < nmode; ++m)
    for (int n = 0; n < ng; ++n) ph[m * ng + n] = std::polar(1.0, (a + m - M) * grid_point(n, ng));
  return ph;
}

}  // namespace

ModalField project_to_modes(const GridField& g, Vec2 alpha, int M) {
  const int ng = g.grid(), np = g.points(), side = 2 * M + 1;
  const auto p1 = axis_phases(alpha.x, M, ng), p2 = axis_phases(alpha.y, M, ng);
  const size_t slab = static_cast<size_t>(np) * 3;
  std::vector<Complex> partial(static_cast<size_t>(ng) * side * slab);  // (n1, m2, g, c)
  const Complex* src = g.data().data();
  for (int n1 = 0; n1 < ng; ++n1)
    for (int m2 = 0; m2 < side; ++m2) {
      Complex* dst = &partial[(static_cast<size_t>(n1) * side + m2) * slab];
      for (int n2 = 0; n2 < ng; ++n2) {
        const Complex ph = p2[m2 * ng + n2];
        const Complex* s = src + (static_cast<size_t>(n1) * ng + n2) * slab;
        for (size_t q = 0; q < slab; ++q) dst[q] += s[q] * ph;
      }
    }
  ModalField out(side * side, np);
  const double scale = 1.0 / (static_cast<double>(ng) * ng);
  Complex* o = out.data().data();
  for (int m1 = 0; m1 < side; ++m1)
    for (int m2 = 0; m2 < side; ++m2) {
      Complex* dst = o + (static_cast<size_t>(m1) * side + m2) * slab;
      for (int n1 = 0; n1 < ng; ++n1) {
        const Complex ph = p1[m1 * ng + n1] * scale;
        const Complex* s = &partial[(static_cast<size_t>(n1) * side + m2) * slab];
        for (size_t q = 0; q < slab; ++q) dst[q] += s[q] * ph;
      }
    }
  return out;
}

GridField synthesize_on_grid(const ModalField& f, Vec2 alpha, int M, int ng) {
  const int np = f.points(), side = 2 * M + 1;
  const auto p1 = axis_phases(alpha.x, M, ng), p2 = axis_phases(alpha.y, M, ng);
  const size_t slab = static_cast<size_t>(np) * 3;
  std::vector<Complex> partial(static_cast<size_t>(side) * ng * slab);  // (m1, n2, g, c)
  const Complex* src = f.data().data();
  for (int m1 = 0; m1 < side; ++m1)
    for (int n2 = 0; n2 < ng; ++n2) {
      Complex* dst = &partial[(static_cast<size_t>(m1) * ng + n2) * slab];
      for (int m2 = 0; m2 < side; ++m2) {
        const Complex ph = std::conj(p2[m2 * ng + n2]);
        const Complex* s = src + (static_cast<size_t>(m1) * side + m2) * slab;
        for (size_t q = 0; q < slab; ++q) dst[q] += s[q] * ph;
      }
    }
  GridField out(ng, np);
  Complex* o = out.data().data();
  for (int n1 = 0; n1 < ng; ++n1)
    for (int n2 = 0; n2 < ng; ++n2) {
      Complex* dst = o + (static_cast<size_t>(n1) * ng + n2) * slab;
      for (int m1 = 0; m1 < side; ++m1) {
        const Complex ph = std::conj(p1[m1 * ng + n1]);
        const Complex* s = &partial[(static_cast<size_t>(m1) * ng + n2) * slab];
        for (size_t q = 0; q < slab; ++q) dst[q] += s[q] * ph;
      }
    }
  return out;
}

}  // namespace qps
