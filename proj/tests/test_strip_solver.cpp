#include "qps/strip_solver.hpp"
#include "qps/studies.hpp"

#include <doctest.h>

using namespace qps;

namespace {

struct Setup {
  Discretization disc{1, 8, 1.0};
  PeriodicMedium medium = make_lamellar_medium(1.0, 0.8, 0.2, 0.2, 0.5, 2.25);
  AlphaQuadrature quad;
  StripOptions opts;

  explicit Setup(int n_base = 4, int levels = 0) {
    QuadratureOptions q;
    q.n_base = n_base;
    q.levels = levels;
    q.cutoff_tol = 1e-6;
    quad = build_alpha_quadrature(0.4, 1, q);
    opts.grid = 8;
    opts.output_cells = {{-1, 0}, {0, 0}, {1, 0}};
  }
  StripSolver solver() const { return StripSolver(disc, medium, 0.4, quad, opts); }
};

SourceSpec bump(std::vector<LatticeIndex> cells = {{0, 0}}) {
  return make_bump_source({0.0, 0.0, 0.3}, 0.25, {Complex(1.0), Complex(0.0), Complex(0.5)}, std::move(cells));
}

double max_diff(const GridField& a, const GridField& b) {
  double d = 0.0;
  for (size_t i = 0; i < a.data().size(); ++i) d = std::max(d, std::abs(a.data()[i] - b.data()[i]));
  return d;
}

double max_abs(const GridField& a) {
  double d = 0.0;
  for (const Complex& v : a.data()) d = std::max(d, std::abs(v));
  return d;
}

}  // namespace

TEST_CASE("zero source gives the zero field") {
  const Setup s;
  const StripSolution u = s.solver().solve_periodic(SourceSpec{});
  for (const auto& [j, f] : u.cells) CHECK(max_abs(f) == 0.0);
  CHECK(weighted_norm(u) == 0.0);
  CHECK(u.source_norm == 0.0);
}

TEST_CASE("zero defect reproduces the periodic solve bit for bit") {
  const Setup s;
  const StripSolver solver = s.solver();
  const StripSolution a = solver.solve_periodic(bump());
  const StripSolution b = solver.solve_perturbed(bump(), DefectPerturbation{});
  for (const auto& [j, f] : a.cells) CHECK(f.data() == b.cells.at(j).data());
  CHECK(a.weighted_norm_sq == b.weighted_norm_sq);
}

TEST_CASE("shifting the source by one period shifts the field by one cell") {
  Setup s;
  const StripSolver solver = s.solver();
  const StripSolution a = solver.solve_periodic(bump({{0, 0}}));
  const StripSolution b = solver.solve_periodic(bump({{1, 0}}));
  const double scale = max_abs(a.cells.at({0, 0}));
  CHECK(scale > 0.0);
  CHECK(max_diff(a.cells.at({0, 0}), b.cells.at({1, 0})) < 1e-12 * scale);
  CHECK(max_diff(a.cells.at({-1, 0}), b.cells.at({0, 0})) < 1e-12 * scale);
}

TEST_CASE("results do not depend on the thread count") {
  Setup s;
  const StripSolution one = s.solver().solve_periodic(bump());
  s.opts.threads = 4;
  const StripSolution four = s.solver().solve_periodic(bump());
  for (const auto& [j, f] : one.cells) CHECK(f.data() == four.cells.at(j).data());
  CHECK(one.weighted_norm_sq == four.weighted_norm_sq);
}

TEST_CASE("source above the free-space margin is rejected") {
  const Setup s;
  const SourceSpec high = make_bump_source({0.0, 0.0, 0.75}, 0.2, {Complex(1.0), Complex(0.0), Complex(0.0)});
  CHECK_THROWS_AS(s.solver().solve_periodic(high), Error);
  Setup low;
  low.opts.grid = 2;
  CHECK_THROWS_AS(low.solver(), Error);
}

TEST_CASE("a coarse and a refined Brillouin-cell rule agree") {
  const StripSolution coarse = Setup(4, 1).solver().solve_periodic(bump());
  const StripSolution fine = Setup(8, 2).solver().solve_periodic(bump());
  const double scale = max_abs(fine.cells.at({0, 0}));
  CHECK(max_diff(coarse.cells.at({0, 0}), fine.cells.at({0, 0})) < 1e-3 * scale);
}

TEST_CASE("field extension") {
  // One propagating mode with unit tangential trace.
  CellSolution u;
  u.alpha = {0.1, 0.0};
  u.k = 1.0;
  u.M = 1;
  const ModeSet modes(1.0, QuasiPeriodicity(u.alpha), 1);
  u.trace.assign(modes.size(), Eigen::Vector2cd::Zero());
  u.vertical_ratio.assign(modes.size(), Complex{});
  const int p0 = modes.position({0, 0});
  u.trace[p0] = Eigen::Vector2cd(1.0, 0.0);
  u.vertical_ratio[p0] = 0.1 / modes.beta_j(p0);
  const Field3 top = extend_field(u, {0.0, 0.0, 2.0}, 2.0);
  CHECK(std::abs(top[0] - 1.0) < 1e-15);
  CHECK(std::abs(top[1]) == 0.0);
  const Field3 up = extend_field(u, {0.0, 0.0, 2.5}, 2.0);
  CHECK(std::abs(up[0]) == doctest::Approx(1.0));

  // One evanescent mode: exponential decay at rate |beta|.
  const int p1 = modes.position({1, 0});
  u.trace[p0].setZero();
  u.vertical_ratio[p0] = 0.0;
  u.trace[p1] = Eigen::Vector2cd(0.0, 1.0);
  const double decay = modes.beta_j(p1).imag();
  const double r = std::abs(extend_field(u, {0.3, 0.2, 2.7}, 2.0)[1]) / std::abs(extend_field(u, {0.3, 0.2, 2.2}, 2.0)[1]);
  CHECK(r == doctest::Approx(std::exp(-decay * 0.5)).epsilon(1e-13));
  CHECK_THROWS_AS(extend_field(u, {0.0, 0.0, 1.9}, 2.0), Error);

  // A mode at cutoff with a nonzero amplitude and no rank-update treatment has no extension.
  CellSolution c;
  c.alpha = {0.0, 0.0};
  c.k = 1.0;
  c.M = 1;
  const ModeSet cm(1.0, QuasiPeriodicity(c.alpha), 1);
  c.trace.assign(cm.size(), Eigen::Vector2cd::Zero());
  c.vertical_ratio.assign(cm.size(), Complex{});
  c.trace[cm.position({1, 0})] = Eigen::Vector2cd(1.0, 0.0);
  CHECK_THROWS_AS(extend_field(c, {0.0, 0.0, 2.0}, 2.0), Error);
}

TEST_CASE("extended solution fields are divergence free") {
  Scenario sc = builtin_scenario("lamellar_grating");
  sc.solve = "cell";
  sc.alpha = {0.21, 0.13};
  const CellRun run = run_cell(sc);
  const ModeSet& modes = run.problem->op().modes();
  for (int m = 0; m < modes.size(); ++m) {
    const Vec2 a = modes.alpha_j(m);
    const Complex div = -kI * (a.x * run.solution.trace[m](0) + a.y * run.solution.trace[m](1)) +
                        kI * modes.beta_j(m) * run.solution.vertical_ratio[m];
    CHECK(std::abs(div) < 1e-12 * (1.0 + run.solution.trace[m].norm()));
  }
}

TEST_CASE("absorbing defect does not add radiated power") {
  Setup s;
  const StripSolver solver = s.solver();
  const StripSolution a = solver.solve_periodic(bump());
  const DefectPerturbation q = make_bump_defect({0.0, 0.0, 0.35}, 0.2, Complex(0.0, 0.5));
  const StripSolution b = solver.solve_perturbed(bump(), q);
  CHECK(b.defect.active);
  CHECK(b.defect.converged);
  double fa = 0.0, fb = 0.0;
  for (const auto& n : a.nodes) fa += n.weight * n.flux;
  for (const auto& n : b.nodes) fb += n.weight * n.flux;
  CHECK(fa > 0.0);
  CHECK(fb <= fa * (1.0 + 1e-12));
}
