#include "qps/bloch.hpp"

#include <doctest.h>

#include <random>

using namespace qps;

namespace {

CVector random_vector(std::mt19937& rng, int n) {
  std::normal_distribution<double> d;
  CVector v(n);
  for (int i = 0; i < n; ++i) v[i] = {d(rng), d(rng)};
  return v;
}

CellIndexedField random_block(std::mt19937& rng, int n) {
  CellIndexedField f;
  for (int a = -1; a <= 1; ++a)
    for (int b = -1; b <= 1; ++b) f.cells[{a, b}] = random_vector(rng, n);
  return f;
}

}  // namespace

TEST_CASE("forward transform examples") {
  std::mt19937 rng(1);
  const CVector f0 = random_vector(rng, 5), f1 = random_vector(rng, 5);
  CellIndexedField single;
  single.cells[{0, 0}] = f0;
  for (Vec2 a : {Vec2{0.0, 0.0}, Vec2{0.31, -0.2}, Vec2{-0.5, 0.5}}) CHECK((bloch_forward(single, a) - f0).norm() == 0.0);

  CellIndexedField two = single;
  two.cells[{1, 0}] = f1;
  const Vec2 a{0.37, 0.11};
  const CVector expect = f0 + std::exp(Complex(0.0, kTwoPi * a.x)) * f1;
  CHECK((bloch_forward(two, a) - expect).norm() < 1e-15 * expect.norm());
}

TEST_CASE("forward transform matches direct summation on a 3x3 block") {
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (int trial = 0; trial < 20; ++trial) {
    const CellIndexedField f = random_block(rng, 7);
    const Vec2 a{u(rng), u(rng)};
    CVector direct = CVector::Zero(7);
    for (const auto& [j, v] : f.cells)
      direct += Complex(std::cos(kTwoPi * (a.x * j.j1 + a.y * j.j2)), std::sin(kTwoPi * (a.x * j.j1 + a.y * j.j2))) * v;
    CHECK((bloch_forward(f, a) - direct).norm() <= 1e-14 * direct.norm());
  }
}

TEST_CASE("pointwise transform is alpha quasi-periodic") {
  const auto f = [](double x1, double x2, double x3) {
    return Complex(std::exp(-0.1 * (x1 * x1 + x2 * x2)) * (1.0 + x3), 0.3 * x1);
  };
  const std::vector<LatticeIndex> support{{-1, 0}, {0, 0}, {1, 0}, {0, 1}, {1, 1}};
  const Vec2 a{0.23, -0.41};
  for (Vec3 x : {Vec3{0.5, -1.0, 0.2}, Vec3{-3.0, 2.5, 0.7}}) {
    const Complex v = bloch_forward_at(f, support, a, x);
    const Complex s1 = bloch_forward_at(f, support, a, {x.x + kTwoPi, x.y, x.z});
    const Complex s2 = bloch_forward_at(f, support, a, {x.x, x.y - kTwoPi, x.z});
    CHECK(std::abs(s1 - std::exp(Complex(0.0, -kTwoPi * a.x)) * v) < 1e-14);
    CHECK(std::abs(s2 - std::exp(Complex(0.0, kTwoPi * a.y)) * v) < 1e-14);
  }
}

TEST_CASE("Gauss-Legendre rules integrate polynomials exactly") {
  for (int n : {1, 2, 3, 4, 7}) {
    const auto g = gauss_legendre(n);
    for (int p = 0; p < 2 * n; ++p) {
      double s = 0.0;
      for (const auto& q : g) s += q.w * std::pow(q.x, p);
      CHECK(s == doctest::Approx(p % 2 ? 0.0 : 2.0 / (p + 1)).epsilon(1e-14));
    }
  }
}

TEST_CASE("graded rule integrates sqrt(t)") {
  double plain = 0.0, graded = 0.0;
  for (const auto& q : graded_rule_1d(0.0, 1.0, 64, {}, 0, 4)) plain += q.w * std::sqrt(q.x);
  for (const auto& q : graded_rule_1d(0.0, 1.0, 64, {0.0}, 8, 4)) graded += q.w * std::sqrt(q.x);
  CHECK(std::abs(graded - 2.0 / 3.0) < 1e-6);
  CHECK(std::abs(graded - 2.0 / 3.0) < std::abs(plain - 2.0 / 3.0));
}

TEST_CASE("Brillouin-cell quadrature") {
  QuadratureOptions plain;
  plain.n_base = 6;
  plain.levels = 0;
  const auto t = build_alpha_quadrature(0.3, 1, plain);
  CHECK(t.size() == 6 * 6 * plain.order * plain.order);
  CHECK(t.weight_sum() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(t.leaves_per_level.size() <= 1);

  for (double k : {0.3, 0.6, 1.3, 2.7}) {
    const auto q = build_alpha_quadrature(k, 2, {8, 4, 3, 2, 1e-6});
    CHECK(std::abs(q.weight_sum() - 1.0) < 1e-12);
    CHECK(!q.arcs.empty());
    for (const Vec2& a : q.nodes) {
      CHECK(std::abs(a.x) <= 0.5);
      CHECK(std::abs(a.y) <= 0.5);
    }
  }
  // k = 0.6 meets the circles of modes (0,0), (+-1,0), (0,+-1).
  CHECK(build_alpha_quadrature(0.6, 1, {8, 4, 3, 2, 1e-6}).arcs.size() == 5);
}

TEST_CASE("inverse transform examples") {
  const auto q = build_alpha_quadrature(1.3, 2);
  std::mt19937 rng(5);
  const CVector g = random_vector(rng, 4);
  std::vector<CVector> constant(q.size(), g), shifted;
  for (const Vec2& a : q.nodes) shifted.push_back(std::exp(Complex(0.0, kTwoPi * a.x)) * g);
  CHECK((bloch_inverse(constant, q, {0, 0}) - g).norm() < 1e-12 * g.norm());
  CHECK((bloch_inverse(shifted, q, {1, 0}) - g).norm() < 1e-8 * g.norm());
  CHECK(bloch_inverse(shifted, q, {0, 0}).norm() < 1e-8 * g.norm());
}

TEST_CASE("round trip and Parseval on random finite support") {
  const auto q = build_alpha_quadrature(1.3, 2);
  std::mt19937 rng(9);
  const CellIndexedField f = random_block(rng, 6);
  std::vector<CVector> family;
  double parseval = 0.0, cells = 0.0;
  for (size_t i = 0; i < q.nodes.size(); ++i) {
    family.push_back(bloch_forward(f, q.nodes[i]));
    parseval += q.weights[i] * family.back().squaredNorm();
  }
  double err = 0.0;
  for (const auto& [j, v] : f.cells) {
    err = std::max(err, (bloch_inverse(family, q, j) - v).norm() / v.norm());
    cells += v.squaredNorm();
  }
  CHECK(err < 1e-8);
  CHECK(std::abs(parseval - cells) < 1e-6 * cells);
  // Outside the support the inverse vanishes.
  CHECK(bloch_inverse(family, q, {2, 0}).norm() < 1e-8);
}
