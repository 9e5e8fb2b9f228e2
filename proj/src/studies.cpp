#include "qps/studies.hpp"

#include <chrono>
#include <cmath>

namespace qps {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double gram_norm(const CellOperator& S, const MediumSamples& samples, const CVector& u) {
  const CellOperator G(S.discretization(), samples, S.k(), QuasiPeriodicity(S.modes().alpha()), S.classification(),
                       {FormKind::gram, true, 0.0});
  return std::sqrt(std::max(0.0, std::real(u.dot(G.apply(u)))));
}

}  // namespace

CellRun run_cell(const Scenario& s) { return run_cell(s, s.alpha, s.N); }

StripRun run_strip(const Scenario& s) {
  const Discretization disc(s.M, s.N, s.R);
  QuadratureOptions qo = s.quad;
  qo.cutoff_tol = s.cutoff_tol;
  StripOptions so;
  so.cutoff_tol = s.cutoff_tol;
  so.threads = s.threads;
  so.grid = s.grid;
  so.output_cells = s.output_cells;
  so.gmres = s.gmres;
  const PeriodicMedium medium = make_medium(s);
  const DefectPerturbation defect = make_defect(s);
  StripRun run{build_alpha_quadrature(s.k, s.M, qo), validate_assumptions(medium, defect), {}};
  if (!run.validation.ok()) fail(ErrorCode::assumption, run.validation.summary());
  const StripSolver solver(disc, medium, s.k, run.quad, so);
  const SourceSpec src = make_source(s);
  run.solution = s.defect == "none" ? solver.solve_periodic(src) : solver.solve_perturbed(src, defect);
  return run;
}

CellRun run_cell(const Scenario& s, Vec2 alpha, int N) {
  CellRun run;
  run.disc = Discretization(s.M, N, s.R);
  const DepthQuadrature dq = run.disc.quadrature();
  if (s.source == "manufactured") {
    ManufacturedOptions mo;
    mo.k = s.k;
    mo.R = s.R;
    mo.delta = s.delta;
    mo.alpha = alpha;
    run.manufactured = std::make_shared<ManufacturedCase>(manufactured_case(s.manufactured, mo));
    if (s.M < run.manufactured->min_modes)
      fail(ErrorCode::config, "modes: the manufactured case needs at least " +
                                  std::to_string(run.manufactured->min_modes));
    run.medium = run.manufactured->medium;
  } else {
    run.medium = make_medium(s);
  }
  run.samples = sample_medium(run.medium, dq, std::max(s.grid, 4 * s.M + 1), 2 * s.M);
  run.problem = std::make_shared<CellProblem>(run.disc, run.samples, s.k, QuasiPeriodicity(alpha), s.cutoff_tol);
  if (run.manufactured) {
    run.load = run.manufactured->load_samples(run.disc);
    run.rhs = load_vector(run.disc, run.load);
  } else {
    run.rhs = transformed_source_load(run.disc, run.medium, make_source(s), alpha, s.grid, &run.load);
  }
  run.solution = run.problem->solve(run.rhs);
  return run;
}

AlphaPathResult alpha_path_sweep(const Scenario& s, int fit_points) {
  const Vec2 aj{s.cutoff_alpha.x + s.cutoff_mode.j1, s.cutoff_alpha.y + s.cutoff_mode.j2};
  const double r = aj.norm();
  if (!(r > 0.0)) fail(ErrorCode::config, "sweep.cutoff_mode: the path needs a mode with alpha_j != 0");
  const Vec2 dir{aj.x / r, aj.y / r};
  const Discretization disc(s.M, s.N, s.R);
  const PeriodicMedium medium = make_medium(s);
  const MediumSamples samples = sample_medium(medium, disc.quadrature(), std::max(s.grid, 4 * s.M + 1), 2 * s.M);
  const SourceSpec source = make_source(s);

  AlphaPathResult res;
  for (double t : s.offsets) {
    const auto t0 = std::chrono::steady_clock::now();
    AlphaPathPoint p;
    p.offset = t;
    p.alpha = Vec2{s.cutoff_alpha.x - t * dir.x, s.cutoff_alpha.y - t * dir.y};
    const QuasiPeriodicity qp(p.alpha);
    const CellProblem prob(disc, samples, s.k, qp, s.cutoff_tol);
    const ModeSet& modes = prob.op().modes();
    const int pos = modes.position(s.cutoff_mode);
    if (!prob.op().classification().is_singular(pos))
      fail(ErrorCode::config, "cutoff_tol: the approached mode is not in the singular set along the path");
    p.beta = modes.beta_j(pos);
    const CVector F = transformed_source_load(disc, medium, source, p.alpha, s.grid);
    const CellSolution sol = prob.solve(F);
    p.u = sol.coeffs;
    p.residual = sol.residual;
    p.norm = gram_norm(prob.op(), samples, sol.coeffs);
    p.cond_smw = std::max(prob.op().condition_estimate(), sol.core_rcond > 0.0 ? 1.0 / sol.core_rcond : HUGE_VAL);

    const RankUpdate& U = prob.update();
    CellOperator full = prob.op().with_update(U.Z, U.d());
    full.factor();
    p.cond_direct = full.condition_estimate();
    p.norm_direct = gram_norm(prob.op(), samples, full.solve(F));
    p.seconds = seconds_since(t0);
    res.points.push_back(std::move(p));
  }

  const int n = static_cast<int>(res.points.size());
  res.fit_points = std::min(fit_points, n);
  if (res.fit_points >= 3) {
    std::vector<Complex> b;
    std::vector<CVector> u;
    for (int i = n - res.fit_points; i < n; ++i) {
      b.push_back(res.points[i].beta);
      u.push_back(res.points[i].u);
    }
    res.fit = affine_fit(b, u);
    for (const AlphaPathPoint& p : res.points) {
      const CVector model = res.fit.a + p.beta * res.fit.b;
      res.fit_error.push_back((p.u - model).norm() / std::max(p.u.norm(), 1e-300));
    }
  }
  return res;
}

ConvergenceResult convergence_study(const Scenario& s) {
  if (s.source != "manufactured") fail(ErrorCode::config, "source: the convergence study needs a manufactured source");
  ConvergenceResult res;
  for (int N : s.convergence_elems) {
    const auto t0 = std::chrono::steady_clock::now();
    const CellRun run = run_cell(s, s.alpha, N);
    ConvergencePoint p;
    p.N = N;
    p.h = run.disc.h();
    p.l2_error = run.manufactured->relative_l2_error(run.disc, run.solution.coeffs);
    p.divergence = divergence_residual(run.disc, run.samples, run.solution, run.load, s.k);
    p.energy_mismatch =
        energy_identity_check(run.problem->op(), run.problem->update(), run.solution, run.rhs, run.samples).mismatch;
    p.seconds = seconds_since(t0);
    res.points.push_back(p);
  }
  for (size_t i = 1; i < res.points.size(); ++i) {
    const ConvergencePoint& a = res.points[i - 1];
    const ConvergencePoint& b = res.points[i];
    res.l2_order.push_back(std::log(a.l2_error / b.l2_error) / std::log(a.h / b.h));
    res.divergence_ratio.push_back(a.divergence / b.divergence);
  }
  return res;
}

}  // namespace qps
