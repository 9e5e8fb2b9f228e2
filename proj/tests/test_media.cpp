#include "qps/bloch.hpp"
#include "qps/media.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <random>

using namespace qps;

namespace {

std::vector<Complex> sample(const std::function<Complex(double, double)>& f, int ng) {
  std::vector<Complex> s(ng * ng);
  for (int a = 0; a < ng; ++a)
    for (int b = 0; b < ng; ++b) s[a * ng + b] = f(grid_point(a, ng), grid_point(b, ng));
  return s;
}

// (1 / 4 pi^2) int f e^{i p.x} over the cell by composite Gauss-Legendre, independent of the grid transform.
Complex quadrature_coeff(const std::function<Complex(double, double)>& f, int p1, int p2) {
  const auto g = gauss_legendre(10);
  const int panels = 24;
  const double h = kTwoPi / panels;
  Complex sum{};
  for (int a = 0; a < panels; ++a)
    for (const auto& qa : g)
      for (int b = 0; b < panels; ++b)
        for (const auto& qb : g) {
          const double x1 = -kPi + h * (a + 0.5 * (qa.x + 1.0));
          const double x2 = -kPi + h * (b + 0.5 * (qb.x + 1.0));
          sum += 0.25 * h * h * qa.w * qb.w * f(x1, x2) * std::polar(1.0, p1 * x1 + p2 * x2);
        }
  return sum / (kTwoPi * kTwoPi);
}

}  // namespace

TEST_CASE("fourier coefficients of simple fields") {
  const int ng = 16;
  const auto c = fourier_coeffs(sample([](double, double) { return Complex(2.0, -1.0); }, ng), ng, 3);
  for (int p1 = -3; p1 <= 3; ++p1)
    for (int p2 = -3; p2 <= 3; ++p2)
      CHECK(std::abs(c(p1, p2) - (p1 == 0 && p2 == 0 ? Complex(2.0, -1.0) : Complex{})) < 1e-14);

  const auto d = fourier_coeffs(sample([](double x1, double) { return Complex(std::cos(x1)); }, ng), ng, 3);
  CHECK(std::abs(d(1, 0) - 0.5) < 1e-14);
  CHECK(std::abs(d(-1, 0) - 0.5) < 1e-14);
  CHECK(std::abs(d(0, 0)) < 1e-14);
  CHECK(std::abs(d(2, 0)) < 1e-14);
}

TEST_CASE("fourier coefficients of exp(sin(x1 + x2)) against a Gauss quadrature oracle") {
  const auto f = [](double x1, double x2) { return Complex(std::exp(std::sin(x1 + x2))); };
  const int ng = 64;
  const auto c = fourier_coeffs(sample(f, ng), ng, 3);
  double err = 0.0;
  for (int p1 = -3; p1 <= 3; ++p1)
    for (int p2 = -3; p2 <= 3; ++p2) err = std::max(err, std::abs(c(p1, p2) - quadrature_coeff(f, p1, p2)));
  CHECK(err < 1e-10);
  // Jacobi-Anger: the coefficient of e^{-i(x1 + x2)} is i I1(1).
  CHECK(std::abs(c(1, 1) - Complex(0.0, 0.5651591039924850)) < 1e-12);
}

TEST_CASE("fourier round trip on the truncated index set") {
  std::mt19937 rng(11);
  std::normal_distribution<double> n;
  const int B = 3, ng = 12;
  CoefficientArray c(B);
  for (int p1 = -B; p1 <= B; ++p1)
    for (int p2 = -B; p2 <= B; ++p2) c(p1, p2) = {n(rng), n(rng)};
  const auto f = [&](double x1, double x2) {
    Complex s{};
    for (int p1 = -B; p1 <= B; ++p1)
      for (int p2 = -B; p2 <= B; ++p2) s += c(p1, p2) * std::polar(1.0, -(p1 * x1 + p2 * x2));
    return s;
  };
  const auto back = fourier_coeffs(sample(f, ng), ng, B);
  for (int p1 = -B; p1 <= B; ++p1)
    for (int p2 = -B; p2 <= B; ++p2) CHECK(std::abs(back(p1, p2) - c(p1, p2)) < 1e-12);
}

TEST_CASE("media are periodic in x1 and x2") {
  const PeriodicMedium m = make_lamellar_medium(2.0, 1.5, 0.3, 0.6, 1.1, {2.25, 0.05});
  for (double x : {-3.0, -0.4, 1.2, 2.9}) {
    CHECK(std::abs(m.eps(x, 0.3, 0.8) - m.eps(x + kTwoPi, 0.3, 0.8)) < 1e-13);
    CHECK(std::abs(m.eps(0.3, x, 0.8) - m.eps(0.3, x - kTwoPi, 0.8)) < 1e-13);
  }
  CHECK(m.eps(0.0, 0.0, 0.8) == Complex(2.25, 0.05));
  CHECK(m.eps(kPi, 0.0, 0.8) == Complex(1.0, 0.0));
  CHECK(m.eps(0.0, 0.0, 1.3) == Complex(1.0, 0.0));
}

TEST_CASE("assumption checks") {
  DefectPerturbation none;
  const auto vacuum = validate_assumptions(make_constant_medium(1.0, 1.0, 0.1), none);
  CHECK(vacuum.ok());
  CHECK_FALSE(vacuum.ball_condition());

  const AbsorptionBall ball{{0.0, 0.0, 0.4}, 0.2};
  const PeriodicMedium lossy = add_inclusion(make_constant_medium(1.0, 0.8, 0.2), ball, {0.0, 1.0});
  const auto r = validate_assumptions(lossy, none, ball);
  CHECK(r.ok());
  CHECK(r.ball_condition());

  PeriodicMedium neg = make_constant_medium(1.0, 0.8, 0.2);
  neg.eps_r = [](double, double, double z) { return z < 0.3 ? Complex(-1.0) : Complex(1.0); };
  const auto bad = validate_assumptions(neg, none);
  CHECK_FALSE(bad.ok());
  bool named = false;
  for (const auto& i : bad.items) named |= i.name == "eps_real_lower_bound" && i.status == CheckStatus::error;
  CHECK(named);

  // Inhomogeneity reaching into the margin below R0.
  const PeriodicMedium high = make_layered_medium(1.0, 0.8, 0.2, 0.75, 2.0);
  CHECK_FALSE(validate_assumptions(high, none).ok());

  // Defect above R0.
  CHECK_FALSE(validate_assumptions(make_constant_medium(1.0, 0.8, 0.2), make_bump_defect({0, 0, 0.7}, 0.2, 0.1)).ok());
}

TEST_CASE("gridded medium round trip") {
  const PeriodicMedium m = make_lamellar_medium(1.0, 0.8, 0.2, 0.2, 0.5, {2.25, 0.0});
  const auto path = (std::filesystem::temp_directory_path() / "qps_test_grid.bin").string();
  save_gridded_medium(path, m, 16, 16, 40);
  const PeriodicMedium g = load_gridded_medium(path, 0.2);
  std::remove(path.c_str());
  CHECK(g.R == doctest::Approx(1.0));
  CHECK(g.R0 == doctest::Approx(0.8));
  // At cell centres the trilinear interpolant reproduces the samples.
  const double h1 = kTwoPi / 16, hz = 1.0 / 40;
  for (int a : {0, 5, 11})
    for (int z : {3, 10, 30}) {
      const double x = -kPi + (a + 0.5) * h1, zz = (z + 0.5) * hz;
      CHECK(std::abs(g.eps(x, -kPi + 0.5 * h1, zz) - m.eps(x, -kPi + 0.5 * h1, zz)) < 1e-12);
    }
  CHECK_THROWS_AS(load_gridded_medium(path, 0.2), Error);
}
