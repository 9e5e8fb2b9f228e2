#include "qps/banded.hpp"
#include "qps/gmres.hpp"
#include "qps/oracles.hpp"
#include "qps/parallel.hpp"

#include <doctest.h>

#include <atomic>
#include <random>

using namespace qps;

TEST_CASE("dense rank-update oracle") {
  const OracleReport r = dense_smw_oracle(40, 2, 17);
  CHECK(r.passed);
  CHECK(r.discrepancy < 1e-10);
  CHECK(r.inputs_digest == dense_smw_oracle(40, 2, 17).inputs_digest);
  CHECK(r.inputs_digest != dense_smw_oracle(40, 2, 18).inputs_digest);
}

TEST_CASE("square-root fit oracle") {
  const std::vector<double> t{1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  std::vector<CVector> exact, linear;
  for (double x : t) {
    CVector v(2);
    v << Complex(1.0, 2.0) + Complex(3.0, -1.0) * std::sqrt(x), Complex(-0.5) + Complex(0.0, 0.25) * std::sqrt(x);
    exact.push_back(v);
    v(0) += 5.0 * x;
    linear.push_back(v);
  }
  const OracleReport a = sqrt_fit_oracle(t, exact);
  CHECK(a.passed);
  CHECK(a.discrepancy < 1e-13);
  CHECK(a.candidate[0] == doctest::Approx(1.0));
  CHECK(a.candidate[1] == doctest::Approx(3.0));

  // An O(t) remainder is visible at large offsets.
  const OracleReport b = sqrt_fit_oracle(t, linear, 1e-6);
  CHECK_FALSE(b.passed);
  CHECK(b.discrepancy > 1e-4);

  const OracleReport c = sqrt_fit_oracle({1e-2, 1e-3, 1e-3}, {exact[0], exact[1], exact[1]});
  CHECK(c.skipped);
}

TEST_CASE("affine fit recovers exact data") {
  const std::vector<Complex> s{Complex(0.1, 0.0), Complex(0.0, 0.2), Complex(0.05, 0.05), Complex(0.3, -0.1)};
  std::vector<CVector> u;
  for (Complex x : s) {
    CVector v(3);
    v << 1.0 + 2.0 * x, Complex(0.0, 1.0) - x, 4.0 * x;
    u.push_back(v);
  }
  const AffineFit f = affine_fit(s, u);
  CHECK(f.relative_residual < 1e-14);
  CHECK(std::abs(f.b(0) - 2.0) < 1e-13);
  CHECK(std::abs(f.a(1) - Complex(0.0, 1.0)) < 1e-13);
}

TEST_CASE("manufactured cases") {
  ManufacturedOptions o;
  o.k = 1.2;
  o.R = 2.0;
  o.delta = 0.25;
  o.alpha = {0.1, 0.2};
  for (const char* name : {"outgoing_mode", "two_mode_superposition", "gradient_null_test"}) {
    const ManufacturedCase mc = manufactured_case(name, o);
    // The load vanishes in the free-space margin.
    for (double z : {1.8, 1.9, 2.0}) {
      const Field3 f = mc.load({0, 0}, z);
      for (const Complex& c : f) CHECK(std::abs(c) < 1e-15);
    }
  }
  const ManufacturedCase two = manufactured_case("two_mode_superposition", o);
  CHECK(two.min_modes == 1);
  // Above the load the outgoing mode is e^{i beta z} times its amplitude at the top.
  const ManufacturedCase one = manufactured_case("outgoing_mode", o);
  const Complex b = beta(1.2, {0.1, 0.2});
  const Field3 e1 = one.exact({0, 0}, 1.9), e2 = one.exact({0, 0}, 2.0);
  CHECK(std::abs(e2[0] - std::exp(kI * b * 0.1) * e1[0]) < 1e-14);
  CHECK_THROWS_AS(manufactured_case("nope", o), Error);
  o.alpha = {0.0, 0.0};
  o.k = 1.0;
  CHECK_THROWS_AS(manufactured_case("two_mode_superposition", o), Error);
}

TEST_CASE("band LU against dense") {
  std::mt19937 rng(21);
  std::normal_distribution<double> n;
  BandMatrix A(30, 3, 2);
  for (int i = 0; i < 30; ++i)
    for (int j = std::max(0, i - 3); j <= std::min(29, i + 2); ++j) A.add(i, j, Complex(n(rng), n(rng)) + (i == j ? 6.0 : 0.0));
  CVector b(30);
  for (int i = 0; i < 30; ++i) b(i) = {n(rng), n(rng)};
  const CMatrix D = A.dense();
  const BandLU lu(A);
  CHECK((D * lu.solve(b) - b).norm() < 1e-12 * b.norm());
  CHECK((D.adjoint() * lu.solve(b, true) - b).norm() < 1e-12 * b.norm());
  CHECK((A.apply(b) - D * b).norm() < 1e-13 * (D * b).norm());
  CHECK((A.apply_adjoint(b) - D.adjoint() * b).norm() < 1e-13 * b.norm() * D.norm());
  const double cond = D.norm() > 0 ? 1.0 / lu.rcond() : 0.0;
  CHECK(cond > 1.0);
  CHECK(cond < 1e4);
}

TEST_CASE("GMRES") {
  std::mt19937 rng(5);
  std::normal_distribution<double> n;
  const int sz = 60;
  CMatrix A = CMatrix::Identity(sz, sz);
  for (int i = 0; i < sz; ++i)
    for (int j = 0; j < sz; ++j) A(i, j) += 0.3 / std::sqrt(sz) * Complex(n(rng), n(rng));
  CVector b(sz);
  for (int i = 0; i < sz; ++i) b(i) = {n(rng), n(rng)};
  const GmresResult r = gmres([&](const CVector& x) { return CVector(A * x); }, b);
  CHECK(r.converged);
  CHECK((A * r.x - b).norm() <= 1e-8 * b.norm());
  CHECK(r.history.size() == static_cast<size_t>(r.iterations));
  for (size_t i = 1; i < r.history.size(); ++i) CHECK(r.history[i] <= r.history[i - 1] * (1.0 + 1e-12));

  // Identity: one step.
  const GmresResult id = gmres([](const CVector& x) { return x; }, b);
  CHECK(id.iterations == 1);
  CHECK((id.x - b).norm() < 1e-14 * b.norm());

  // Zero right-hand side.
  const GmresResult z = gmres([&](const CVector& x) { return CVector(A * x); }, CVector::Zero(sz));
  CHECK(z.converged);
  CHECK(z.x.norm() == 0.0);

  GmresOptions tight;
  tight.max_iter = 2;
  tight.restart = 2;
  CHECK_FALSE(gmres([&](const CVector& x) { return CVector(A * x); }, b, tight).converged);
}

TEST_CASE("parallel_for covers every index and rethrows the first failure") {
  std::vector<std::atomic<int>> hits(100);
  parallel_for(100, 4, [&](int i) { hits[i]++; });
  for (auto& h : hits) CHECK(h.load() == 1);
  try {
    parallel_for(50, 3, [](int i) {
      if (i == 7 || i == 31) throw Error(ErrorCode::singular, std::to_string(i));
    });
    FAIL("no exception");
  } catch (const Error& e) {
    CHECK(std::string(e.what()) == "7");
  }
}
