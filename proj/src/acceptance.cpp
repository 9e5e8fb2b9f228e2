#include "qps/acceptance.hpp"

#include "qps/bloch.hpp"
#include "qps/dtn.hpp"
#include "qps/oracles.hpp"
#include "qps/strip_solver.hpp"
#include "qps/studies.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>

namespace qps {

namespace {

// Pinned tolerances.
constexpr double kSmwTol = 1e-10;
constexpr double kSignTol = 1e-12;
constexpr double kOrderTarget = 2.0;
constexpr double kOrderBand = 0.2;
constexpr double kFinestError = 1e-4;
constexpr double kRoundTripTol = 1e-8;
constexpr double kParsevalTol = 1e-6;
constexpr double kPlateauTol = 0.01;
constexpr double kConditionGap = 1e3;
constexpr double kFitTol = 1e-6;
constexpr double kBornBand = 0.3;
constexpr double kEnergyTol = 1e-6;
constexpr double kZeroTol = 1e-10;
constexpr double kDivergenceFactor = 1.8;

using Clock = std::chrono::steady_clock;

struct Timer {
  Clock::time_point t0 = Clock::now();
  double seconds() const { return std::chrono::duration<double>(Clock::now() - t0).count(); }
};

CriterionResult start(const std::string& id, const std::string& title, double limit) {
  CriterionResult r;
  r.id = id;
  r.title = title;
  r.time_limit = limit;
  return r;
}

void finish(CriterionResult& r, bool ok, const Timer& t) {
  r.seconds = t.seconds();
  r.passed = ok && r.seconds < r.time_limit;
  if (ok && !r.passed) r.detail += (r.detail.empty() ? "" : "; ") + std::string("time limit exceeded");
}

double field_distance(const StripSolution& a, const StripSolution& b, double* norm_a = nullptr) {
  double e = 0.0, n = 0.0;
  for (const auto& [j, f] : a.cells) {
    const auto& g = b.cells.at(j);
    for (size_t i = 0; i < f.data().size(); ++i) {
      e += std::norm(f.data()[i] - g.data()[i]);
      n += std::norm(f.data()[i]);
    }
  }
  if (norm_a) *norm_a = std::sqrt(n);
  return std::sqrt(e);
}

bool identical(const StripSolution& a, const StripSolution& b) {
  if (a.cells.size() != b.cells.size() || a.nodes.size() != b.nodes.size()) return false;
  for (const auto& [j, f] : a.cells)
    if (f.data() != b.cells.at(j).data()) return false;
  for (size_t q = 0; q < a.nodes.size(); ++q)
    if (a.nodes[q].trace != b.nodes[q].trace || a.nodes[q].vertical != b.nodes[q].vertical) return false;
  return true;
}

StripSolver make_strip_solver(const Scenario& s, int threads) {
  const Discretization disc(s.M, s.N, s.R);
  QuadratureOptions qo = s.quad;
  qo.cutoff_tol = s.cutoff_tol;
  StripOptions so;
  so.cutoff_tol = s.cutoff_tol;
  so.threads = threads;
  so.grid = s.grid;
  so.output_cells = s.output_cells;
  so.gmres = s.gmres;
  return StripSolver(disc, make_medium(s), s.k, build_alpha_quadrature(s.k, s.M, qo), so);
}

}  // namespace

CriterionResult check_smw_identity(const AcceptanceOptions&) {
  Timer t;
  CriterionResult r = start("A1", "rank-update identity against dense inversion", 10.0);
  double worst = 0.0;
  int evaluated = 0, skipped = 0;
  for (unsigned seed = 1; seed <= 100; ++seed) {
    const int rank = 1 + static_cast<int>(seed % 3);
    const OracleReport rep = dense_smw_oracle(40, rank, seed, kSmwTol);
    if (rep.skipped) {
      ++skipped;
      continue;
    }
    ++evaluated;
    worst = std::max(worst, rep.discrepancy);
  }
  r.values = {{"max_rel_error", worst}, {"instances", evaluated}, {"skipped", skipped}};
  finish(r, evaluated == 100 && worst <= kSmwTol, t);
  return r;
}

CriterionResult check_dtn_signs(const AcceptanceOptions&) {
  Timer t;
  CriterionResult r = start("A2", "sign inequalities of T and N", 5.0);
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> kdist(0.05, 6.0), adist(-0.5, 0.5), n01(-1.0, 1.0);
  std::uniform_int_distribution<int> mdist(0, 4);
  double worst[4] = {-HUGE_VAL, -HUGE_VAL, -HUGE_VAL, -HUGE_VAL};
  int violations = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const double k = kdist(rng);
    const QuasiPeriodicity alpha(adist(rng), adist(rng));
    const ModeSet modes(k, alpha, mdist(rng));
    const DtnMultipliers mult = make_multipliers(modes, singular_set(k, alpha, modes.truncation(), 0.0));
    TraceCoefficients phi(modes.size());
    double nrm = 0.0;
    for (auto& p : phi) {
      p = Eigen::Vector2cd(Complex(n01(rng), n01(rng)), Complex(n01(rng), n01(rng)));
      nrm += p.squaredNorm();
    }
    const Complex tp = trace_pairing(t_apply(mult, phi), phi);
    const Complex np = trace_pairing(n_apply_full(mult, phi), phi);
    // Each entry is <= 0 when the inequality holds.
    const double m[4] = {tp.real() / nrm, -tp.imag() / nrm, np.real() / nrm, np.imag() / nrm};
    for (int i = 0; i < 4; ++i) {
      worst[i] = std::max(worst[i], m[i]);
      if (m[i] > kSignTol) ++violations;
    }
  }
  r.values = {{"max_re_T", worst[0]}, {"max_minus_im_T", worst[1]}, {"max_re_N", worst[2]},
              {"max_im_N", worst[3]}, {"violations", violations}};
  finish(r, violations == 0, t);
  return r;
}

CriterionResult check_manufactured_mode(const AcceptanceOptions&) {
  Timer t;
  CriterionResult r = start("A3", "manufactured outgoing mode, second-order convergence", 30.0);
  Scenario s = builtin_scenario("homogeneous_outgoing");
  s.convergence_elems = {32, 64, 128};
  const ConvergenceResult c = convergence_study(s);
  bool ok = true;
  for (size_t i = 0; i < c.l2_order.size(); ++i) {
    r.values.push_back({"order_" + std::to_string(c.points[i].N) + "_" + std::to_string(c.points[i + 1].N), c.l2_order[i]});
    ok = ok && std::abs(c.l2_order[i] - kOrderTarget) <= kOrderBand;
  }
  const double finest = c.points.back().l2_error;
  r.values.push_back({"finest_rel_error", finest});
  finish(r, ok && finest <= kFinestError, t);
  return r;
}

CriterionResult check_bloch_round_trip(const AcceptanceOptions&) {
  Timer t;
  CriterionResult r = start("A4", "Bloch round trip and Parseval on 3x3 cells", 5.0);
  const AlphaQuadrature quad = build_alpha_quadrature(1.3, 2);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  CellIndexedField f;
  double energy = 0.0;
  for (int a = -1; a <= 1; ++a)
    for (int b = -1; b <= 1; ++b) {
      CVector v(64);
      for (auto& x : v) x = Complex(g(rng), g(rng));
      energy += v.squaredNorm();
      f.cells[{a, b}] = v;
    }
  std::vector<CVector> family;
  family.reserve(quad.size());
  double transformed = 0.0;
  for (int q = 0; q < quad.size(); ++q) {
    family.push_back(bloch_forward(f, quad.nodes[q]));
    transformed += quad.weights[q] * family.back().squaredNorm();
  }
  double worst = 0.0;
  for (const auto& [j, v] : f.cells) worst = std::max(worst, (bloch_inverse(family, quad, j) - v).norm() / v.norm());
  // Cells outside the support must come back empty.
  const double outside = bloch_inverse(family, quad, {2, 0}).norm() / std::sqrt(energy);
  const double parseval = std::abs(transformed - energy) / energy;
  r.values = {{"round_trip", worst}, {"outside", outside}, {"parseval", parseval}, {"nodes", quad.size()}};
  finish(r, worst <= kRoundTripTol && outside <= kRoundTripTol && parseval <= kParsevalTol, t);
  return r;
}

CriterionResult check_near_cutoff(const AcceptanceOptions&) {
  Timer t;
  CriterionResult r = start("A5", "bounded solution and conditioning gap near a cutoff", 60.0);
  const AlphaPathResult p = alpha_path_sweep(builtin_scenario("near_cutoff"));
  const size_t n = p.points.size();
  double lo = HUGE_VAL, hi = 0.0;
  for (size_t i = n - 3; i < n; ++i) {
    lo = std::min(lo, p.points[i].norm);
    hi = std::max(hi, p.points[i].norm);
  }
  const double spread = (hi - lo) / hi;
  const AlphaPathPoint* at = nullptr;
  for (const auto& pt : p.points)
    if (std::abs(pt.offset - 1e-8) <= 1e-20) at = &pt;
  const double gap = at ? at->cond_direct / at->cond_smw : 0.0;
  r.values = {{"norm_spread_last3", spread}, {"cond_direct_1e-8", at ? at->cond_direct : 0.0},
              {"cond_smw_1e-8", at ? at->cond_smw : 0.0}, {"cond_ratio_1e-8", gap}};
  if (!at) r.detail = "offset 1e-8 missing from the path";
  finish(r, spread < kPlateauTol && gap >= kConditionGap, t);
  return r;
}

CriterionResult check_sqrt_decomposition(const AcceptanceOptions&) {
  Timer t;
  CriterionResult r = start("A6", "u = u1 + beta u2 fit near a cutoff", 60.0);
  const AlphaPathResult p = alpha_path_sweep(builtin_scenario("near_cutoff"), 5);
  r.values = {{"fit_points", p.fit_points},
              {"smallest_offset", p.points.back().offset},
              {"largest_fit_offset", p.points[p.points.size() - p.fit_points].offset},
              {"fit_rel_residual", p.fit.relative_residual}};
  finish(r, p.fit_points == 5 && !p.fit.rank_deficient && p.fit.relative_residual <= kFitTol, t);
  return r;
}

CriterionResult check_defect(const AcceptanceOptions& opts) {
  Timer t;
  CriterionResult r = start("A7", "defect reduction and Born order", 180.0);
  const Scenario s = builtin_scenario("defect_born");
  const StripSolver solver = make_strip_solver(s, opts.threads);
  const SourceSpec src = make_source(s);
  const StripSolution base = solver.solve_periodic(src);
  const StripSolution zero = solver.solve_perturbed(src, make_bump_defect(s.defect_center, s.defect_radius, 0.0));
  const bool exact = identical(base, zero);
  std::vector<double> err;
  for (double scale : {1.0, 0.5, 0.25}) {
    const DefectPerturbation q = make_bump_defect(s.defect_center, s.defect_radius, scale * s.defect_amplitude);
    const StripSolution full = solver.solve_perturbed(src, q);
    const StripSolution born = solver.solve_born(src, q);
    err.push_back(field_distance(full, born));
  }
  const double p1 = std::log2(err[0] / err[1]), p2 = std::log2(err[1] / err[2]);
  r.values = {{"q0_identical", exact ? 1.0 : 0.0}, {"born_err_1", err[0]}, {"born_err_2", err[1]},
              {"born_err_3", err[2]}, {"order_1", p1}, {"order_2", p2}, {"nodes", solver.quadrature().size()}};
  finish(r, exact && std::abs(p1 - 2.0) <= kBornBand && std::abs(p2 - 2.0) <= kBornBand, t);
  return r;
}

CriterionResult check_energy_balance(const AcceptanceOptions& opts) {
  Timer t;
  CriterionResult r = start("A8", "energy balance and uniqueness", 30.0);
  Scenario s = builtin_scenario("energy_balance");
  const StripSolution u = make_strip_solver(s, opts.threads).solve_periodic(make_source(s));
  Complex work{};
  double flux = 0.0;
  int propagating_families = 0;
  for (const AlphaNodeResult& n : u.nodes) {
    work += n.weight * n.source_work;
    flux += n.weight * n.flux;
  }
  {
    // Count lattice modes that propagate for some node.
    std::vector<bool> seen(ModeSet::count(s.M), false);
    for (const AlphaNodeResult& n : u.nodes) {
      const ModeSet modes(s.k, QuasiPeriodicity(n.alpha), s.M);
      for (int m = 0; m < modes.size(); ++m)
        if (modes.beta_j(m).imag() == 0.0 && modes.beta_j(m).real() > 0.0) seen[m] = true;
    }
    for (bool b : seen) propagating_families += b;
  }
  const double mismatch = std::abs(work.imag() - flux) / std::abs(work);

  // Absorbing inclusion, no source.
  s.inclusion_radius = 0.2;
  s.inclusion_center = {0.0, 0.0, 0.3};
  s.inclusion_eps = Complex(0.0, 0.5);
  s.source = "none";
  const PeriodicMedium lossy = make_medium(s);
  const ValidationReport vr =
      validate_assumptions(lossy, DefectPerturbation{}, AbsorptionBall{s.inclusion_center, s.inclusion_radius});
  const StripSolution zero = make_strip_solver(s, opts.threads).solve_periodic(SourceSpec{});
  double unorm = 0.0;
  for (const auto& [j, f] : zero.cells)
    for (const Complex& v : f.data()) unorm += std::norm(v);
  unorm = std::sqrt(unorm);
  double min_rcond = 1.0;
  for (const AlphaNodeResult& n : zero.nodes) min_rcond = std::min(min_rcond, n.core_rcond);
  r.values = {{"im_work", work.imag()},   {"flux", flux},         {"rel_mismatch", mismatch},
              {"propagating_families", propagating_families}, {"zero_load_norm", unorm},
              {"zero_load_weighted_norm", weighted_norm(zero)}, {"ball_condition", vr.ball_condition() ? 1.0 : 0.0},
              {"zero_load_min_core_rcond", min_rcond}};
  finish(r, propagating_families == 1 && mismatch <= kEnergyTol && unorm <= kZeroTol && weighted_norm(zero) <= kZeroTol &&
                vr.ball_condition(),
         t);
  return r;
}

CriterionResult check_divergence(const AcceptanceOptions&) {
  Timer t;
  CriterionResult r = start("A9", "divergence residual decay under depth refinement", 30.0);
  Scenario s = builtin_scenario("homogeneous_outgoing");
  s.alpha = {0.3, 0.0};
  s.convergence_elems = {32, 64, 128};
  const ConvergenceResult c = convergence_study(s);
  bool ok = true;
  for (size_t i = 0; i < c.divergence_ratio.size(); ++i) {
    r.values.push_back({"ratio_" + std::to_string(c.points[i].N) + "_" + std::to_string(c.points[i + 1].N),
                        c.divergence_ratio[i]});
    ok = ok && c.divergence_ratio[i] >= kDivergenceFactor;
  }
  r.values.push_back({"finest_residual", c.points.back().divergence});
  finish(r, ok, t);
  return r;
}

std::vector<std::string> acceptance_ids() { return {"A1", "A2", "A3", "A4", "A5", "A6", "A7", "A8", "A9"}; }

CriterionResult run_criterion(const std::string& id, const AcceptanceOptions& opts) {
  try {
    if (id == "A1") return check_smw_identity(opts);
    if (id == "A2") return check_dtn_signs(opts);
    if (id == "A3") return check_manufactured_mode(opts);
    if (id == "A4") return check_bloch_round_trip(opts);
    if (id == "A5") return check_near_cutoff(opts);
    if (id == "A6") return check_sqrt_decomposition(opts);
    if (id == "A7") return check_defect(opts);
    if (id == "A8") return check_energy_balance(opts);
    if (id == "A9") return check_divergence(opts);
  } catch (const Error& e) {
    CriterionResult r;
    r.id = id;
    r.title = "raised " + std::string(error_code_name(e.code()));
    r.detail = e.what();
    return r;
  }
  fail(ErrorCode::invalid_argument, "unknown criterion " + id);
}

std::string format_result(const CriterionResult& r) {
  std::string s = (r.passed ? "PASS " : "FAIL ") + r.id + " " + r.title + " (";
  char buf[64];
  for (size_t i = 0; i < r.values.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%s%.4g", i ? ", " : "", r.values[i].second);
    s += (i ? ", " : "") + r.values[i].first + "=" + (buf + (i ? 2 : 0));
  }
  std::snprintf(buf, sizeof buf, "%s%.2f s", r.values.empty() ? "" : ", ", r.seconds);
  s += buf;
  s += ")";
  if (!r.detail.empty()) s += " " + r.detail;
  return s;
}

}  // namespace qps
