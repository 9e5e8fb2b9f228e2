#include "qps/dtn.hpp"

#include <doctest.h>

#include <random>

using namespace qps;

namespace {

TraceCoefficients unit_on(const ModeSet& modes, LatticeIndex j, Eigen::Vector2cd v) {
  TraceCoefficients phi(modes.size(), Eigen::Vector2cd::Zero());
  phi[modes.position(j)] = v;
  return phi;
}

TraceCoefficients random_trace(std::mt19937& rng, int n) {
  std::normal_distribution<double> d;
  TraceCoefficients phi(n);
  for (auto& p : phi) p = Eigen::Vector2cd(Complex(d(rng), d(rng)), Complex(d(rng), d(rng)));
  return phi;
}

}  // namespace

TEST_CASE("T multiplier examples") {
  const ModeSet m0(2.0, QuasiPeriodicity(0.0, 0.0), 0);
  const auto t0 = t_apply(make_multipliers(m0, singular_set(2.0, QuasiPeriodicity(0.0, 0.0), 0, 1e-6)),
                          unit_on(m0, {0, 0}, {1.0, 0.0}));
  CHECK(std::abs(t0[0](0) - Complex(0.0, 2.0)) < 1e-15);
  CHECK(std::abs(t0[0](1)) == 0.0);

  const QuasiPeriodicity a(0.25, 0.0);
  const ModeSet m1(1.0, a, 1);
  const auto mult = make_multipliers(m1, singular_set(1.0, a, 1, 1e-6));
  const int p = m1.position({1, 0});
  const auto t1 = t_apply(mult, unit_on(m1, {1, 0}, {0.0, 1.0}));
  CHECK(std::abs(t1[p](1) - Complex(-0.75, 0.0)) < 1e-15);
  CHECK(std::abs(t1[p](0)) == 0.0);

  const auto n1 = n_apply_regular(mult, unit_on(m1, {1, 0}, {1.0, 0.0}));
  CHECK(std::abs(n1[p](0) - Complex(-25.0 / 12.0, 0.0)) < 1e-14);
  CHECK(std::abs(n1[p](1)) < 1e-15);
}

TEST_CASE("N vanishes on the mode alpha_j = 0") {
  const ModeSet m(1.7, QuasiPeriodicity(0.0, 0.0), 0);
  const auto mult = make_multipliers(m, singular_set(1.7, QuasiPeriodicity(0.0, 0.0), 0, 1e-6));
  const auto n = n_apply_regular(mult, unit_on(m, {0, 0}, {Complex(0.3, 1.0), Complex(-2.0, 0.5)}));
  CHECK(n[0].norm() == 0.0);
}

TEST_CASE("singular functional and D entries") {
  CHECK(singular_functional({1.0, 0.0}, {1.0, 0.0}) == Complex(1.0));
  CHECK(singular_functional({1.0, 0.0}, {0.0, 1.0}) == Complex(0.0));
  CHECK(std::abs(singular_functional({0.6, 0.8}, {1.0, 1.0}) - 1.4) < 1e-15);

  const CVector d1 = d_matrix(1.0, {{1.25, 0.0}});
  CHECK(std::abs(d1[0] - Complex(-1.0 / (1.5 * kPi), 0.0)) < 1e-15);
  const CVector d2 = d_matrix(2.0, {{0.0, 0.0}});
  CHECK(std::abs(d2[0] - Complex(0.0, -1.0 / (4.0 * kPi))) < 1e-15);
  // D grows like 1/|beta| toward the cutoff, D^{-1} goes to zero.
  const double r = std::abs(d_matrix(1.0, {{1.0 - 1e-8, 0.0}})[0]) / std::abs(d_matrix(1.0, {{1.0 - 1e-6, 0.0}})[0]);
  CHECK(r == doctest::Approx(10.0).epsilon(1e-4));
  CHECK(d_inverse(1.0, {{1.0, 0.0}})[0] == Complex(0.0));
  CHECK_THROWS_AS(d_matrix(1.0, {{1.0, 0.0}}), Error);
}

TEST_CASE("continuous multipliers") {
  const auto a = continuous_multipliers(1.0, {0.0, 0.0});
  CHECK(std::abs(a.t - Complex(0.0, 1.0)) < 1e-15);
  CHECK(a.n.norm() == 0.0);
  const auto b = continuous_multipliers(1.0, {1.25, 0.0});
  CHECK(std::abs(b.t - Complex(-0.75, 0.0)) < 1e-15);
  CHECK(std::abs(b.n(0, 0) - Complex(-25.0 / 12.0, 0.0)) < 1e-14);
  CHECK_THROWS_AS(continuous_multipliers(1.0, {0.6, 0.8}), Error);

  std::mt19937 rng(4);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 500; ++i) {
    const Vec2 xi{u(rng), u(rng)};
    const auto c = continuous_multipliers(1.5, xi);
    const auto phi = random_trace(rng, 1)[0];
    const Complex tp = c.t * phi.squaredNorm();
    const Complex np = phi.dot(c.n * phi);
    CHECK(tp.real() <= 1e-12 * phi.squaredNorm());
    CHECK(tp.imag() >= -1e-12 * phi.squaredNorm());
    CHECK(np.real() <= 1e-12 * phi.squaredNorm());
    CHECK(np.imag() <= 1e-12 * phi.squaredNorm());
  }
}

TEST_CASE("sign inequalities and split consistency on random traces") {
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> u(-0.5, 0.5), uk(0.2, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double k = uk(rng);
    const QuasiPeriodicity a(u(rng), u(rng));
    const int M = trial % 4;
    const ModeSet modes(k, a, M);
    const auto cls = singular_set(k, a, M, 0.05, 1.0);
    const auto mult = make_multipliers(modes, cls);
    const auto phi = random_trace(rng, modes.size());
    const double n2 = trace_pairing(phi, phi).real();
    const Complex t = trace_pairing(t_apply(mult, phi), phi);
    CHECK(t.real() <= 1e-12 * n2);
    CHECK(t.imag() >= -1e-12 * n2);

    // N = N_regular + Z D Z^H with Z = sqrt(2 pi) alpha_j on each singular mode.
    auto full = n_apply_full(mult, phi);
    auto split = n_apply_regular(mult, phi);
    std::vector<Vec2> aj;
    for (int p : cls.singular_positions) aj.push_back(modes.alpha_j(p));
    const CVector d = d_matrix(k, aj);
    for (size_t s = 0; s < aj.size(); ++s) {
      const int p = cls.singular_positions[s];
      const Eigen::Vector2cd z(std::sqrt(kTwoPi) * aj[s].x, std::sqrt(kTwoPi) * aj[s].y);
      split[p] += z * d[s] * z.dot(phi[p]);
    }
    double diff = 0.0, ref = 0.0;
    for (int p = 0; p < modes.size(); ++p) {
      diff += (full[p] - split[p]).squaredNorm();
      ref += full[p].squaredNorm();
    }
    CHECK(std::sqrt(diff) <= 1e-12 * std::sqrt(ref) + 1e-300);
    const Complex n = trace_pairing(full, phi);
    CHECK(n.real() <= 1e-12 * n2);
    CHECK(n.imag() <= 1e-12 * n2);
  }
}

TEST_CASE("a mode exactly at cutoff must be singular") {
  const QuasiPeriodicity a(0.0, 0.0);
  const ModeSet modes(1.0, a, 1);
  CutoffClassification none;
  none.distance.assign(modes.size(), 1.0);
  CHECK_THROWS_AS(make_multipliers(modes, none), Error);
}
