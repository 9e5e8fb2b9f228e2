#include "qps/run.hpp"

#include "qps/acceptance.hpp"
#include "qps/io.hpp"
#include "qps/oracles.hpp"
#include "qps/studies.hpp"

#include <json.hpp>

#include <chrono>
#include <filesystem>

#ifndef QPS_VERSION
#define QPS_VERSION "0.0.0"
#endif

namespace qps {

namespace {

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

json cjson(Complex z) { return json::array({z.real(), z.imag()}); }

void say(const RunOptions& o, const std::string& s) {
  if (o.log) o.log(s);
}

std::string cell_file(LatticeIndex j) {
  return "fields_cell_" + std::to_string(j.j1) + "_" + std::to_string(j.j2) + ".bin";
}

json scenario_json(const Scenario& s) {
  json j = json::object();
  for (const ConfigKey& k : config_keys()) j[k.key] = get_scenario_value(s, k.key);
  return j;
}

std::vector<double> node_depths(const Discretization& disc) {
  std::vector<double> z;
  for (int i = 0; i <= disc.N; ++i) z.push_back(disc.node(i));
  return z;
}

void plane_rows(CsvTable& t, const Scenario& s, const std::function<Field3(Vec3)>& eval) {
  for (double z : s.planes)
    for (int a = 0; a < s.plane_grid; ++a)
      for (int b = 0; b < s.plane_grid; ++b) {
        const Vec3 x{grid_point(a, s.plane_grid), grid_point(b, s.plane_grid), z};
        const Field3 e = eval(x);
        t.add(std::vector<double>{z, x.x, x.y, e[0].real(), e[0].imag(), e[1].real(), e[1].imag(), e[2].real(),
                                  e[2].imag()});
      }
}

const std::vector<std::string> kPlaneHeader{"x3", "x1", "x2", "e1_re", "e1_im", "e2_re", "e2_im", "e3_re", "e3_im"};

json solve_cell(const Scenario& s, const std::string& dir, json& files) {
  const CellRun run = run_cell(s);
  const CellSolution& u = run.solution;
  const Discretization& disc = run.disc;
  const std::vector<double> depths = node_depths(disc);
  const GridField ref = synthesize_on_grid(evaluate_modal(disc, u.coeffs, depths), s.alpha, s.M, s.grid);
  for (const LatticeIndex& j : s.output_cells) {
    GridField f = ref;
    const Complex ph = std::conj(bloch_phase(s.alpha, j));
    for (Complex& v : f.data()) v *= ph;
    write_field_file(join_path(dir, cell_file(j)), j, f, depths);
    files.push_back(cell_file(j));
  }

  const ModeSet& modes = run.problem->op().modes();
  CsvTable mt({"j1", "j2", "alpha1", "alpha2", "beta_re", "beta_im", "singular", "u1_re", "u1_im", "u2_re", "u2_im",
               "u3_re", "u3_im"});
  for (int m = 0; m < modes.size(); ++m) {
    const bool sing = std::find(u.singular_positions.begin(), u.singular_positions.end(), m) != u.singular_positions.end();
    const auto& tr = u.trace[m];
    mt.add(std::vector<double>{double(modes.mode(m).j1), double(modes.mode(m).j2), modes.alpha_j(m).x,
                               modes.alpha_j(m).y, modes.beta_j(m).real(), modes.beta_j(m).imag(), sing ? 1.0 : 0.0,
                               tr(0).real(), tr(0).imag(), tr(1).real(), tr(1).imag(), u.vertical_ratio[m].real(),
                               u.vertical_ratio[m].imag()});
  }
  mt.write(join_path(dir, "tables/modes.csv"));
  files.push_back("tables/modes.csv");
  if (!s.planes.empty()) {
    CsvTable pt(kPlaneHeader);
    plane_rows(pt, s, [&](Vec3 x) { return extend_field(u, x, s.R); });
    pt.write(join_path(dir, "tables/planes.csv"));
    files.push_back("tables/planes.csv");
  }

  const EnergyReport e = energy_identity_check(run.problem->op(), run.problem->update(), u, run.rhs, run.samples);
  json r;
  r["alpha"] = {s.alpha.x, s.alpha.y};
  r["unknowns"] = disc.unknowns();
  r["singular_modes"] = static_cast<int>(u.singular_positions.size());
  r["relative_residual"] = u.residual;
  r["core_rcond"] = u.core_rcond;
  r["condition_estimate"] = run.problem->op().condition_estimate();
  r["coefficient_norm"] = u.coeffs.norm();
  r["energy"] = {{"source_work", cjson(e.source_work)}, {"flux", e.flux}, {"absorption", e.absorption},
                 {"mismatch", e.mismatch},           {"signs_ok", e.signs_ok}};
  r["divergence_residual"] = divergence_residual(disc, run.samples, u, run.load, s.k);
  if (run.manufactured) r["manufactured_rel_l2_error"] = run.manufactured->relative_l2_error(disc, u.coeffs);
  return r;
}

json solve_strip(const Scenario& s, const std::string& dir, json& files, const RunOptions& o) {
  say(o, "strip solve: " + s.name);
  const StripRun run = run_strip(s);
  const StripSolution& u = run.solution;
  const AlphaQuadrature& quad = run.quad;
  const Discretization disc(s.M, s.N, s.R);
  const std::vector<double> depths = node_depths(disc);
  for (const auto& [j, f] : u.cells) {
    write_field_file(join_path(dir, cell_file(j)), j, f, depths);
    files.push_back(cell_file(j));
  }
  CsvTable nt({"alpha1", "alpha2", "weight", "rank", "core_rcond", "residual", "norm_sq", "weighted_sq", "work_re",
               "work_im", "flux"});
  Complex work{};
  double flux = 0.0;
  int max_rank = 0;
  double min_rcond = 1.0, max_res = 0.0;
  for (const AlphaNodeResult& n : u.nodes) {
    nt.add(std::vector<double>{n.alpha.x, n.alpha.y, n.weight, double(n.rank), n.core_rcond, n.residual, n.norm_sq,
                               n.weighted_sq, n.source_work.real(), n.source_work.imag(), n.flux});
    work += n.weight * n.source_work;
    flux += n.weight * n.flux;
    max_rank = std::max(max_rank, n.rank);
    min_rcond = std::min(min_rcond, n.core_rcond);
    max_res = std::max(max_res, n.residual);
  }
  nt.write(join_path(dir, "tables/alpha_nodes.csv"));
  files.push_back("tables/alpha_nodes.csv");
  if (!s.planes.empty()) {
    CsvTable pt(kPlaneHeader);
    plane_rows(pt, s, [&](Vec3 x) { return extend_field(u, x); });
    pt.write(join_path(dir, "tables/planes.csv"));
    files.push_back("tables/planes.csv");
  }
  json r;
  r["alpha_nodes"] = quad.size();
  r["moved_nodes"] = quad.moved_nodes;
  r["quadrature_weight_sum"] = quad.weight_sum();
  r["unknowns_per_alpha"] = disc.unknowns();
  r["max_rank"] = max_rank;
  r["min_core_rcond"] = min_rcond;
  r["max_relative_residual"] = max_res;
  r["source_norm"] = u.source_norm;
  r["weighted_norm"] = weighted_norm(u);
  r["bound_ratio"] = u.source_norm > 0.0 ? weighted_norm(u) / u.source_norm : 0.0;
  r["source_work"] = cjson(work);
  r["outgoing_flux"] = flux;
  r["validation"] = run.validation.summary();
  if (u.defect.active) {
    CsvTable ht({"iteration", "relative_residual"});
    for (size_t i = 0; i < u.defect.history.size(); ++i) ht.add(std::vector<double>{double(i + 1), u.defect.history[i]});
    ht.write(join_path(dir, "tables/defect_history.csv"));
    files.push_back("tables/defect_history.csv");
    r["defect"] = {{"unknowns", u.defect.unknowns},
                   {"iterations", u.defect.iterations},
                   {"converged", u.defect.converged},
                   {"final_residual", u.defect.history.empty() ? 0.0 : u.defect.history.back()}};
  }
  return r;
}

json sweep_alpha_path(const Scenario& s, const std::string& dir, json& files) {
  const AlphaPathResult p = alpha_path_sweep(s);
  CsvTable t({"offset", "alpha1", "alpha2", "beta_re", "beta_im", "norm", "norm_direct", "cond_smw", "cond_direct",
              "residual", "coeff_norm", "in_fit", "fit_coeff_norm", "fit_rel_error"});
  const int n = static_cast<int>(p.points.size());
  for (int i = 0; i < n; ++i) {
    const AlphaPathPoint& q = p.points[i];
    const bool fitted = p.fit_points >= 3;
    const double fit_norm = fitted ? (p.fit.a + q.beta * p.fit.b).norm() : 0.0;
    t.add(std::vector<double>{q.offset, q.alpha.x, q.alpha.y, q.beta.real(), q.beta.imag(), q.norm, q.norm_direct,
                              q.cond_smw, q.cond_direct, q.residual, q.u.norm(), i >= n - p.fit_points ? 1.0 : 0.0, fit_norm,
                              fitted ? p.fit_error[i] : 0.0});
  }
  t.write(join_path(dir, "tables/alpha_path.csv"));
  files.push_back("tables/alpha_path.csv");
  return {{"points", n}, {"fit_points", p.fit_points}, {"fit_rel_residual", p.fit.relative_residual},
          {"fit_rank_deficient", p.fit.rank_deficient}};
}

json sweep_convergence(const Scenario& s, const std::string& dir, json& files) {
  const ConvergenceResult c = convergence_study(s);
  CsvTable t({"depth_elems", "h", "rel_l2_error", "order", "divergence_residual", "divergence_ratio", "energy_mismatch"});
  for (size_t i = 0; i < c.points.size(); ++i) {
    const ConvergencePoint& q = c.points[i];
    t.add(std::vector<double>{double(q.N), q.h, q.l2_error, i ? c.l2_order[i - 1] : 0.0, q.divergence,
                              i ? c.divergence_ratio[i - 1] : 0.0, q.energy_mismatch});
  }
  t.write(join_path(dir, "tables/convergence.csv"));
  files.push_back("tables/convergence.csv");
  json r = {{"points", c.points.size()}};
  r["orders"] = c.l2_order;
  r["divergence_ratios"] = c.divergence_ratio;
  return r;
}

json run_checks(const std::vector<std::string>& ids, const std::string& dir, json& files, const RunOptions& o,
                int threads, int& failed) {
  CsvTable t({"id", "passed", "time_limit", "values"});
  json arr = json::array();
  AcceptanceOptions ao;
  ao.threads = threads;
  for (const std::string& id : ids) {
    const CriterionResult c = run_criterion(id, ao);
    say(o, format_result(c));
    failed += !c.passed;
    json v = json::object();
    std::string vals;
    for (const auto& [k, x] : c.values) {
      v[k] = x;
      vals += (vals.empty() ? "" : ";") + k + "=" + csv_number(x);
    }
    arr.push_back({{"id", c.id}, {"title", c.title}, {"passed", c.passed}, {"seconds", c.seconds},
                   {"time_limit", c.time_limit}, {"values", v}, {"detail", c.detail}});
    t.add(std::vector<std::string>{c.id, c.passed ? "1" : "0", csv_number(c.time_limit), vals});
  }
  t.write(join_path(dir, "tables/acceptance.csv"));
  files.push_back("tables/acceptance.csv");
  return arr;
}

json oracle_json(const OracleReport& r) {
  return {{"name", r.name},           {"inputs_digest", r.inputs_digest}, {"discrepancy", r.discrepancy},
          {"tolerance", r.tolerance}, {"passed", r.passed},               {"skipped", r.skipped},
          {"note", r.note}};
}

json base_manifest() {
  json m;
  m["program"] = "qpscatter";
  m["version"] = QPS_VERSION;
  m["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
               std::to_string(EIGEN_MINOR_VERSION);
  return m;
}

}  // namespace

std::vector<std::string> scenario_suite(const std::string& name) {
  if (name == "homogeneous_outgoing") return {"A1", "A2", "A3", "A9"};
  if (name == "near_cutoff") return {"A1", "A2", "A5", "A6"};
  if (name == "defect_born") return {"A1", "A2", "A4", "A7"};
  if (name == "energy_balance") return {"A1", "A2", "A8"};
  return {"A1", "A2", "A4"};
}

RunReport run_scenario(const Scenario& s, const RunOptions& o) {
  s.validate();
  const auto t0 = Clock::now();
  const std::string& dir = o.output_dir;
  std::filesystem::create_directories(dir);
  json m = base_manifest();
  m["scenario"] = scenario_json(s);
  m["config"] = serialize_scenario(s);
  m["tolerances"] = {{"cutoff_tol", s.cutoff_tol}, {"gmres_tol", s.gmres.tol}};
  json files = json::array();
  json timings = json::object();
  RunReport rep;

  auto t = Clock::now();
  if (s.sweep == "alpha-path") {
    m["sweep"] = sweep_alpha_path(s, dir, files);
  } else if (s.sweep == "convergence") {
    m["sweep"] = sweep_convergence(s, dir, files);
  } else if (s.solve == "strip") {
    m["results"] = solve_strip(s, dir, files, o);
  } else {
    m["results"] = solve_cell(s, dir, files);
  }
  timings["solve"] = since(t);

  if (o.check) {
    t = Clock::now();
    m["acceptance"] = run_checks(scenario_suite(s.name), dir, files, o, s.threads, rep.failed_criteria);
    json oracles = json::array();
    oracles.push_back(oracle_json(dense_smw_oracle(40, 2, s.seed)));
    std::vector<double> ts{1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
    std::vector<CVector> us;
    for (double x : ts) us.push_back(CVector::Constant(1, 3.0 + 2.0 * std::sqrt(x)));
    oracles.push_back(oracle_json(sqrt_fit_oracle(ts, us, 1e-12)));
    m["oracles"] = oracles;
    timings["check"] = since(t);
  }
  timings["total"] = since(t0);
  m["timings"] = timings;
  m["files"] = files;
  rep.manifest_path = join_path(dir, "manifest.json");
  write_text(rep.manifest_path, m.dump(2) + "\n");
  return rep;
}

RunReport run_acceptance(const std::vector<std::string>& ids, const RunOptions& o, int threads) {
  const auto t0 = Clock::now();
  std::filesystem::create_directories(o.output_dir);
  json m = base_manifest();
  json files = json::array();
  RunReport rep;
  m["acceptance"] = run_checks(ids.empty() ? acceptance_ids() : ids, o.output_dir, files, o, threads, rep.failed_criteria);
  m["timings"] = {{"total", since(t0)}};
  m["files"] = files;
  rep.manifest_path = join_path(o.output_dir, "manifest.json");
  write_text(rep.manifest_path, m.dump(2) + "\n");
  return rep;
}

}  // namespace qps
