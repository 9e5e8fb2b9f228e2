#include "qps/lattice_modes.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace qps;

namespace {

bool same_set(std::vector<LatticeIndex> a, std::vector<LatticeIndex> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b;
}

}  // namespace

TEST_CASE("beta on the three branches") {
  CHECK(beta(2.0, {0.0, 0.0}) == Complex(2.0, 0.0));
  CHECK(beta(1.0, {1.0, 0.0}) == Complex(0.0, 0.0));
  const Complex b = beta(1.0, {1.25, 0.0});
  CHECK(b.real() == doctest::Approx(0.0));
  CHECK(b.imag() == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("beta branch is continuous across the cutoff circle") {
  const double k = 1.3;
  for (double t : {1e-2, 1e-5, 1e-9}) {
    const Complex in = beta(k, {k - t, 0.0});
    const Complex out = beta(k, {k + t, 0.0});
    CHECK(in.imag() == 0.0);
    CHECK(in.real() > 0.0);
    CHECK(out.real() == 0.0);
    CHECK(out.imag() > 0.0);
    CHECK(std::abs(in - out) < 3.0 * std::sqrt(2.0 * k * t));
  }
}

TEST_CASE("beta is even in alpha_j") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 200; ++i) {
    const Vec2 a{u(rng), u(rng)};
    CHECK(beta(1.7, a) == beta(1.7, Vec2{-a.x, -a.y}));
  }
}

TEST_CASE("singular set examples") {
  const auto a = singular_set(1.0, QuasiPeriodicity(0.0, 0.0), 2, 1e-8, 1.0);
  CHECK(same_set(a.singular_modes, {{1, 0}, {-1, 0}, {0, 1}, {0, -1}}));

  const auto b = singular_set(1.5, QuasiPeriodicity(0.5, 0.0), 3, 1e-8, 1.0);
  CHECK(same_set(b.singular_modes, {{1, 0}, {-2, 0}}));
  CHECK(b.touches_cell_boundary);

    const auto c = singular_set(0.9, QuasiPeriodicity(0.1, 0.1), 2, 1e-8);
  CHECK(c.empty());
  double dmin = 1e9;
  for (int j1 = -2; j1 <= 2; ++j1)
    for (int j2 = -2; j2 <= 2; ++j2) dmin = std::min(dmin, std::abs(0.9 - std::hypot(0.1 + j1, 0.1 + j2)));
  CHECK(dmin == doctest::Approx(std::sqrt(0.82) - 0.9));
}

TEST_CASE("singular set with zero tolerance finds the exact cutoff modes") {
  const auto s = singular_set(5.0, QuasiPeriodicity(0.0, 0.0), 5, 0.0, 1.0);
  // 3-4-5 and 5-0 lattice points
  CHECK(s.singular_modes.size() == 12);
}

TEST_CASE("cutoff constant") {
  CHECK(cutoff_constant(0.5, QuasiPeriodicity(0.0, 0.0), 3) == doctest::Approx(0.25 / kPi).epsilon(1e-14));
  CHECK(cutoff_constant(0.5, QuasiPeriodicity(0.0, 0.0), 0) == doctest::Approx(0.25 / kPi).epsilon(1e-14));
  // Divergence like |k - |alpha_j||^{-1/2} toward the cutoff of mode (1, 0) at alpha = (0.3, 0).
  const double c1 = cutoff_constant(1.3, QuasiPeriodicity(0.3 - 1e-6, 0.0), 1);
  const double c2 = cutoff_constant(1.3, QuasiPeriodicity(0.3 - 1e-8, 0.0), 1);
  CHECK(c2 / c1 == doctest::Approx(10.0).epsilon(1e-3));
}

TEST_CASE("mode set layout") {
  const ModeSet m(1.0, QuasiPeriodicity(0.2, -0.1), 2);
  CHECK(m.size() == 25);
  for (int p = 0; p < m.size(); ++p) CHECK(m.position(m.mode(p)) == p);
  CHECK(m.position(LatticeIndex{3, 0}) == -1);
  CHECK(m.alpha_j(m.position({1, -2})).x == doctest::Approx(1.2));
  CHECK(m.alpha_j(m.position({1, -2})).y == doctest::Approx(-2.1));
}

TEST_CASE("invalid inputs") {
  CHECK_THROWS_AS(singular_set(1.0, QuasiPeriodicity(0.0, 0.0), 1, -1.0), Error);
  CHECK_THROWS_AS(QuasiPeriodicity(0.7, 0.0), Error);
  CHECK_THROWS_AS(ModeSet(1.0, QuasiPeriodicity(0.0, 0.0), -1), Error);
  CHECK_THROWS_AS(WaveParameters::from_wavenumber(-1.0).validate(), Error);
}
