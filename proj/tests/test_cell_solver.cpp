#include "qps/cell_solver.hpp"
#include "qps/oracles.hpp"
#include "qps/studies.hpp"

#include <doctest.h>

#include <random>

using namespace qps;

namespace {

PeriodicMedium constant_medium(Complex eps, Complex mu, double R) {
  PeriodicMedium m = make_constant_medium(R, R, 0.0);
  m.eps_r = [eps](double, double, double) { return eps; };
  m.mu_r = [mu](double, double, double) { return mu; };
  return m;
}

// Linear polynomial c0 + c1 t on an element, t in [0, 1].
struct Lin {
  Complex c0, c1;
};

// int_0^h conj(p) q dz, exact.
Complex pair(const Lin& p, const Lin& q, double h) {
  return h * (std::conj(p.c0) * q.c0 + 0.5 * (std::conj(p.c0) * q.c1 + std::conj(p.c1) * q.c0) +
              std::conj(p.c1) * q.c1 / 3.0);
}

// Closed-form Galerkin matrix of the single-mode form with constant eps, nu = 1/mu.
CMatrix hand_assembly(int N, double R, double k, Vec2 a, Complex eps, Complex nu) {
  const double h = R / N;
  CMatrix A = CMatrix::Zero(3 * N, 3 * N);
  auto idx = [](int comp, int level) { return (level - 1) * 3 + comp; };
  for (int e = 0; e < N; ++e) {
    // Local basis: E1 at nodes e, e+1; E2 at nodes e, e+1; E3 on the element.
    struct Basis {
      int row;
      std::array<Lin, 3> value, curl;
    };
    std::vector<Basis> basis;
    for (int side = 0; side < 2; ++side) {
      const int level = e + side;
      if (level == 0) continue;
      const Lin phi = side == 0 ? Lin{1.0, -1.0} : Lin{0.0, 1.0};
      const Complex dphi = side == 0 ? -1.0 / h : 1.0 / h;
      // E1 = phi: curl = (0, phi', i a2 phi)
      basis.push_back({idx(0, level), {phi, Lin{}, Lin{}}, {Lin{}, Lin{dphi, 0.0}, Lin{kI * a.y * phi.c0, kI * a.y * phi.c1}}});
      // E2 = phi: curl = (-phi', 0, -i a1 phi)
      basis.push_back(
          {idx(1, level), {Lin{}, phi, Lin{}}, {Lin{-dphi, 0.0}, Lin{}, Lin{-kI * a.x * phi.c0, -kI * a.x * phi.c1}}});
    }
    // E3 = 1: curl = (-i a2, i a1, 0)
    basis.push_back({idx(2, e + 1), {Lin{}, Lin{}, Lin{1.0, 0.0}}, {Lin{-kI * a.y, 0.0}, Lin{kI * a.x, 0.0}, Lin{}}});
    for (const auto& p : basis)
      for (const auto& q : basis) {
        Complex v{};
        for (int c = 0; c < 3; ++c) v += nu * pair(p.curl[c], q.curl[c], h) - k * k * eps * pair(p.value[c], q.value[c], h);
        A(p.row, q.row) += v;
      }
  }
  const Complex b = beta(k, a);
  Eigen::Matrix2cd n;
  n << a.x * a.x, a.x * a.y, a.y * a.x, a.y * a.y;
  n *= -kI / b;
  const Eigen::Matrix2cd top = n - kI * b * Eigen::Matrix2cd::Identity();
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) A(idx(r, N), idx(c, N)) += top(r, c);
  return A;
}

Scenario cutoff_scenario(double cutoff_tol) {
  Scenario s = builtin_scenario("wood_anomaly");
  s.cutoff_tol = cutoff_tol;
  return s;
}

}  // namespace

TEST_CASE("two-element single-mode assembly matches the closed-form element integrals") {
  const double R = 1.0, k = 1.1;
  const Complex eps(2.0, 0.1), mu(1.5, 0.0);
  const Vec2 a{0.2, -0.3};
  const Discretization disc(0, 2, R);
  const MediumSamples s = sample_medium(constant_medium(eps, mu, R), disc.quadrature(), 4, 0);
  const QuasiPeriodicity qa(a);
  const CellOperator op(disc, s, k, qa, singular_set(k, qa, 0, 1e-6));
  const CMatrix ref = hand_assembly(2, R, k, a, eps, 1.0 / mu);
  CHECK(op.dense().rows() == 6);
  CHECK((op.dense() - ref).cwiseAbs().maxCoeff() < 1e-12 * ref.cwiseAbs().maxCoeff());
}

TEST_CASE("free space couples no modes") {
  const Discretization disc(2, 6, 1.0);
  const MediumSamples s = sample_medium(make_constant_medium(1.0, 1.0, 0.0), disc.quadrature(), 12, 4);
  const QuasiPeriodicity qa(0.1, 0.2);
  const CellOperator op(disc, s, 0.9, qa, singular_set(0.9, qa, 2, 1e-6));
  CHECK(op.decoupled());
  const CMatrix A = op.dense();
  double off = 0.0;
  for (int r = 0; r < A.rows(); ++r)
    for (int c = 0; c < A.cols(); ++c)
      if ((r % disc.level_size()) / 3 != (c % disc.level_size()) / 3) off = std::max(off, std::abs(A(r, c)));
  CHECK(off == 0.0);
}

TEST_CASE("curl part is Hermitian positive semidefinite for real mu") {
  const Discretization disc(1, 5, 1.0);
  PeriodicMedium m = make_lamellar_medium(1.0, 0.8, 0.2, 0.2, 0.6, 2.25);
  m.mu_r = [](double x1, double, double z) { return Complex(1.0 + 0.3 * std::cos(x1) * (z < 0.5)); };
  const MediumSamples s = sample_medium(m, disc.quadrature(), 16, 2);
  const QuasiPeriodicity qa(0.3, -0.1);
  AssemblyOptions o;
  o.form = FormKind::curl_only;
  const CellOperator op(disc, s, 1.0, qa, singular_set(1.0, qa, 1, 1e-6), o);
  CHECK_FALSE(op.decoupled());
  const CMatrix A = op.dense();
  CHECK((A - A.adjoint()).norm() < 1e-12 * A.norm());
  const Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (A + A.adjoint()));
  CHECK(es.eigenvalues().minCoeff() > -1e-10 * A.norm());
}

TEST_CASE("rank update examples") {
  CMatrix S(1, 1), Z(1, 1);
  S(0, 0) = 2.0;
  Z(0, 0) = 1.0;
  CVector d_inv(1), rhs(1);
  d_inv(0) = 1.0 / 3.0;
  rhs(0) = 1.0;
  CHECK(std::abs(smw_solve_dense(S, Z, d_inv, rhs).u(0) - 0.2) < 1e-15);

  std::mt19937 rng(3);
  std::normal_distribution<double> n;
  CMatrix S4 = CMatrix::Identity(4, 4) * 5.0;
  CVector b(4);
  for (int i = 0; i < 4; ++i) {
    b(i) = {n(rng), n(rng)};
    for (int j = 0; j < 4; ++j) S4(i, j) += Complex(n(rng), n(rng));
  }
  const CVector plain = S4.partialPivLu().solve(b);
  CHECK((smw_solve_dense(S4, CMatrix(4, 0), CVector(0), b).u - plain).norm() < 1e-14 * plain.norm());

  for (unsigned seed = 1; seed <= 5; ++seed) CHECK(dense_smw_oracle(40, 1 + seed % 3, seed).passed);
}

TEST_CASE("direct and rank-update paths agree away from the cutoff") {
  // alpha = (0.2, 0): mode (1, 0) sits 0.1 from its cutoff circle.
  const Scenario s = cutoff_scenario(0.15);
  const CellRun run = run_cell(s, {0.2, 0.0}, s.N);
  CHECK(run.problem->update().rank() >= 1);
  const CellSolution a = run.solution;
  const CellSolution b = solve_direct(run.problem->op(), run.problem->update(), run.rhs);
  CHECK((a.coeffs - b.coeffs).norm() < 1e-9 * a.coeffs.norm());

  // Without singular modes both paths are the plain solve.
  const CellRun far = run_cell(cutoff_scenario(1e-6), {0.2, 0.0}, s.N);
  CHECK(far.problem->update().rank() == 0);
  const CellSolution c = solve_direct(far.problem->op(), far.problem->update(), far.rhs);
  CHECK((far.solution.coeffs - c.coeffs).norm() == 0.0);
}

TEST_CASE("conditioning near the cutoff") {
  const AlphaPathResult p = alpha_path_sweep(builtin_scenario("wood_anomaly"));
  const AlphaPathPoint& last = p.points.back();
  CHECK(last.offset == doctest::Approx(1e-10));
  CHECK(last.cond_direct / last.cond_smw >= 1e3);
  CHECK(p.fit.relative_residual < 1e-6);
}

TEST_CASE("adjoint solves are reciprocal") {
  Scenario s = builtin_scenario("lamellar_grating");
  s.solve = "cell";
  s.alpha = {0.17, -0.05};
  const CellRun run = run_cell(s);
  std::mt19937 rng(12);
  std::normal_distribution<double> n;
  CVector g(run.rhs.size());
  for (int i = 0; i < g.size(); ++i) g(i) = {n(rng), n(rng)};
  const CVector u = run.problem->solve(run.rhs).coeffs;
  const CVector v = run.problem->solve(g, true).coeffs;
  CHECK(std::abs(g.dot(u) - v.dot(run.rhs)) < 1e-10 * g.norm() * u.norm());
}

TEST_CASE("divergence residual") {
  const Discretization disc(1, 8, 1.0);
  const MediumSamples s = sample_medium(make_constant_medium(1.0, 1.0, 0.0), disc.quadrature(), 8, 2);
  CellSolution zero;
  zero.alpha = {0.2, 0.1};
  zero.k = 1.0;
  zero.M = 1;
  zero.coeffs = CVector::Zero(disc.unknowns());
  CHECK(divergence_residual(disc, s, zero, ModalField(disc.modes(), disc.quadrature().size()), 1.0) == 0.0);

  // Outgoing mode and gradient pair: the residual falls with h.
  for (const char* name : {"outgoing_mode", "gradient_null_test"}) {
    Scenario sc = builtin_scenario("homogeneous_outgoing");
    sc.manufactured = name;
    sc.alpha = {0.3, 0.0};
    sc.k = 1.2;
    sc.convergence_elems = {16, 32, 64};
    const ConvergenceResult c = convergence_study(sc);
    for (double r : c.divergence_ratio) CHECK(r >= 1.8);
  }
}

TEST_CASE("coercivity diagnostic") {
  const Discretization disc(1, 6, 1.0);
  const MediumSamples s = sample_medium(make_constant_medium(1.0, 1.0, 0.0), disc.quadrature(), 8, 2);
  const QuasiPeriodicity qa(0.15, 0.05);
  const CoercivityReport big = coercivity_check(disc, s, qa, 1.0, 10.0);
  CHECK(big.coercive);
  CHECK(big.boundary_bound_holds);
  CHECK(big.min_eigenvalue > 0.0);
  const CoercivityReport none = coercivity_check(disc, s, qa, 6.0, 0.0);
  CHECK(none.boundary_bound_holds);
}

TEST_CASE("energy identity") {
  Scenario s = builtin_scenario("energy_balance");
  s.solve = "cell";
  s.alpha = {0.1, 0.05};
  const CellRun run = run_cell(s);
  const EnergyReport e =
      energy_identity_check(run.problem->op(), run.problem->update(), run.solution, run.rhs, run.samples);
  CHECK(e.signs_ok);
  CHECK(e.flux > 0.0);
  CHECK(std::abs(e.absorption) < 1e-12 * e.flux);
  CHECK(std::abs(e.source_work.imag() - e.flux) <= 1e-6 * std::abs(e.source_work));

  CellSolution zero = run.solution;
  zero.coeffs.setZero();
  for (auto& t : zero.trace) t.setZero();
  const EnergyReport z = energy_identity_check(run.problem->op(), run.problem->update(), zero,
                                               CVector::Zero(run.rhs.size()), run.samples);
  CHECK(z.source_work == Complex{});
  CHECK(z.flux == 0.0);
  CHECK(z.mismatch == 0.0);
}
