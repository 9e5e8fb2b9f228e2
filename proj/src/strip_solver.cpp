#include "qps/strip_solver.hpp"

#include "qps/parallel.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <mutex>

namespace qps {

SourceSpec make_bump_source(Vec3 center, double radius, Field3 polarization, std::vector<LatticeIndex> cells) {
  if (!(radius > 0.0)) fail(ErrorCode::invalid_argument, "source radius must be positive");
  SourceSpec s;
  s.cells = std::move(cells);
  s.z_max = center.z + radius;
  s.name = "bump";
  s.f = [center, radius, polarization](double x1, double x2, double x3) {
    const double y1 = x1 - kTwoPi * std::round(x1 / kTwoPi) - center.x;
    const double y2 = x2 - kTwoPi * std::round(x2 / kTwoPi) - center.y;
    const double y3 = x3 - center.z;
    const double r2 = (y1 * y1 + y2 * y2 + y3 * y3) / (radius * radius);
    Field3 v{};
    if (r2 >= 1.0) return v;
    const double b = std::pow(1.0 - r2, 3);
    for (int c = 0; c < 3; ++c) v[c] = polarization[c] * b;
    return v;
  };
  return s;
}

double outgoing_flux(const ModeSet& modes, const RankUpdate& U, const CellSolution& u) {
  double flux = 0.0;
  for (int m = 0; m < modes.size(); ++m) {
    const Complex b = modes.beta_j(m);
    if (!(b.imag() == 0.0 && b.real() > 0.0)) continue;
    const Eigen::Vector2cd& p = u.trace[m];
    double nterm;
    auto it = std::find(U.positions.begin(), U.positions.end(), m);
    if (it != U.positions.end() && !u.direct) {
      nterm = kTwoPi * b.real() * std::norm(u.core(it - U.positions.begin()));
    } else {
      nterm = std::norm(singular_functional(modes.alpha_j(m), p)) / b.real();
    }
    flux += b.real() * p.squaredNorm() + nterm;
  }
  return flux;
}

double weighted_norm(const StripSolution& u) { return std::sqrt(std::max(0.0, u.weighted_norm_sq)); }

Field3 extend_field(const CellSolution& u, Vec3 x, double R) {
  if (x.z < R) fail(ErrorCode::invalid_argument, "field extension needs x3 >= R");
  const ModeSet modes(u.k, QuasiPeriodicity(u.alpha), u.M);
  Field3 out{};
  for (int m = 0; m < modes.size(); ++m) {
    const Complex b = modes.beta_j(m);
    const Vec2 a = modes.alpha_j(m);
    const bool singular =
        std::find(u.singular_positions.begin(), u.singular_positions.end(), m) != u.singular_positions.end();
    if (b == Complex{} && !singular && std::abs(singular_functional(a, u.trace[m])) > 0.0)
      fail(ErrorCode::cutoff, "mode at cutoff with nonvanishing amplitude");
    const Complex e = std::exp(kI * b * (x.z - R)) * std::polar(1.0, -(a.x * x.x + a.y * x.y));
    out[0] += u.trace[m](0) * e;
    out[1] += u.trace[m](1) * e;
    out[2] += u.vertical_ratio[m] * e;
  }
  return out;
}

Field3 extend_field(const StripSolution& u, Vec3 x) {
  if (x.z < u.R) fail(ErrorCode::invalid_argument, "field extension needs x3 >= R");
  Field3 out{};
  for (const AlphaNodeResult& node : u.nodes) {
    const ModeSet modes(u.k, QuasiPeriodicity(node.alpha), u.M);
    Complex s[3] = {};
    for (int m = 0; m < modes.size(); ++m) {
      const Vec2 a = modes.alpha_j(m);
      const Complex e = std::exp(kI * modes.beta_j(m) * (x.z - u.R)) * std::polar(1.0, -(a.x * x.x + a.y * x.y));
      s[0] += node.trace[m](0) * e;
      s[1] += node.trace[m](1) * e;
      s[2] += node.vertical[m] * e;
    }
    for (int c = 0; c < 3; ++c) out[c] += node.weight * s[c];
  }
  return out;
}

namespace {

// Depth quadrature points of the elements meeting [z0, z1].
std::vector<int> points_in_range(const Discretization& disc, const DepthQuadrature& dq, double z0, double z1) {
  std::vector<int> pts;
  for (int g = 0; g < dq.size(); ++g) {
    const int e = dq.element[g];
    if (disc.node(e) < z1 && disc.node(e + 1) > z0) pts.push_back(g);
  }
  return pts;
}

std::string alpha_text(Vec2 a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, " (alpha = %.17g, %.17g)", a.x, a.y);
  return buf;
}

}  // namespace

struct StripSolver::Impl {
  DepthQuadrature dq;
  std::vector<std::shared_ptr<const CellProblem>> cache;
  std::atomic<size_t> cached_bytes{0};
  std::atomic<int> cached_count{0};

  struct SourceData {
    bool active = false;
    std::vector<int> points;
    std::vector<double> z;
    std::vector<LatticeIndex> cells;
    std::vector<GridField> samples;
    const SourceSpec* spec = nullptr;
    double norm_sq = 0.0;
  };

  struct DefectData {
    std::vector<int> points;
    std::vector<double> z;
    std::vector<Complex> q;  // (n1, n2, g)
  };

  // What one sweep over the alpha nodes computes.
  struct Pass {
    const SourceData* source = nullptr;
    const DefectData* defect = nullptr;
    const GridField* defect_load = nullptr;  // k^2 q U on the defect points
    bool outputs = false;
    bool evaluate_defect = false;
  };

  struct PassResult {
    std::map<LatticeIndex, GridField> cells;
    GridField defect_field;
    std::vector<AlphaNodeResult> nodes;
    std::vector<CellSolution> family;
    double weighted_sq = 0.0;
  };
};

StripSolver::StripSolver(const Discretization& disc, const PeriodicMedium& medium, double k, const AlphaQuadrature& quad,
                         const StripOptions& opts)
    : disc_(disc), medium_(medium), k_(k), quad_(quad), opts_(opts), impl_(std::make_unique<Impl>()) {
  if (!(k > 0.0)) fail(ErrorCode::invalid_argument, "wavenumber must be positive");
  if (quad.size() == 0) fail(ErrorCode::invalid_argument, "empty alpha quadrature");
  if (opts.grid < 2 * disc.M + 1)
    fail(ErrorCode::aliasing, "transverse grid " + std::to_string(opts.grid) + " cannot resolve " +
                                  std::to_string(2 * disc.M + 1) + " modes per axis");
  if (std::abs(medium.R - disc.R) > 1e-12 * disc.R)
    fail(ErrorCode::invalid_argument, "medium height does not match the discretization");
  if (opts.threads < 1) fail(ErrorCode::invalid_argument, "threads must be positive");
  impl_->dq = disc.quadrature();
  const int bandwidth = 2 * disc.M;
  samples_ = sample_medium(medium, impl_->dq, std::max(opts.grid, 2 * bandwidth + 1), bandwidth);
  impl_->cache.resize(quad.size());
}

StripSolver::~StripSolver() = default;

int StripSolver::cached_factorizations() const { return impl_->cached_count.load(); }

namespace {

using Impl = StripSolver::Impl;

Impl::SourceData prepare_source(const Discretization& disc, const DepthQuadrature& dq, const PeriodicMedium& medium,
                                const SourceSpec& src, int ng) {
  Impl::SourceData d;
  d.spec = &src;
  if (src.empty()) return d;
  d.active = true;
  const double limit = medium.R0 - medium.delta;
  if (src.z_max > limit + 1e-12)
    fail(ErrorCode::assumption, "source extends above R0 - delta");
  d.points = points_in_range(disc, dq, 0.0, src.z_max);
  for (int g : d.points) d.z.push_back(dq.z[g]);
  if (src.closed_form) return d;
  const int np = static_cast<int>(d.points.size());
  d.cells = src.cells;
  for (const LatticeIndex& j : src.cells) {
    GridField g(ng, np);
    for (int n1 = 0; n1 < ng; ++n1)
      for (int n2 = 0; n2 < ng; ++n2) {
        const double x1 = grid_point(n1, ng) + kTwoPi * j.j1, x2 = grid_point(n2, ng) + kTwoPi * j.j2;
        for (int p = 0; p < np; ++p) {
          const Field3 v = src.f(x1, x2, d.z[p]);
          for (int c = 0; c < 3; ++c) {
            if (d.z[p] > src.z_max && v[c] != Complex{})
              fail(ErrorCode::assumption, "source does not vanish above its declared height");
            g(n1, n2, p, c) = v[c];
            d.norm_sq += dq.w[d.points[p]] * std::norm(v[c]) / (static_cast<double>(ng) * ng);
          }
        }
      }
    d.samples.push_back(std::move(g));
  }
  return d;
}

Impl::DefectData prepare_defect(const Discretization& disc, const DepthQuadrature& dq, const PeriodicMedium& medium,
                                const DefectPerturbation& q, int ng) {
  Impl::DefectData d;
  const double z0 = std::max(0.0, q.z_min()), z1 = std::min(disc.R, q.z_max());
  if (!(q.radius > 0.0) || !(z1 > z0)) return d;
  if (q.z_max() > medium.R0 + 1e-12) fail(ErrorCode::assumption, "defect extends above R0");
  d.points = points_in_range(disc, dq, z0, z1);
  for (int g : d.points) d.z.push_back(dq.z[g]);
  const int np = static_cast<int>(d.points.size());
  d.q.resize(static_cast<size_t>(ng) * ng * np);
  for (int n1 = 0; n1 < ng; ++n1)
    for (int n2 = 0; n2 < ng; ++n2)
      for (int p = 0; p < np; ++p)
        d.q[(static_cast<size_t>(n1) * ng + n2) * np + p] = q(grid_point(n1, ng), grid_point(n2, ng), d.z[p]);
  return d;
}

ModalField source_modes(const Discretization& disc, const Impl::SourceData& s, Vec2 alpha, int ng) {
  if (s.spec->closed_form) {
    ModalField mf = s.spec->closed_form(alpha, disc.M, s.z);
    if (mf.modes() != disc.modes() || mf.points() != static_cast<int>(s.z.size()))
      fail(ErrorCode::invalid_argument, "closed-form source has the wrong shape");
    return mf;
  }
  GridField g(ng, static_cast<int>(s.points.size()));
  std::vector<Complex>& out = g.data();
  for (size_t c = 0; c < s.cells.size(); ++c) {
    const Complex ph = bloch_phase(alpha, s.cells[c]);
    const std::vector<Complex>& in = s.samples[c].data();
    for (size_t i = 0; i < out.size(); ++i) out[i] += ph * in[i];
  }
  return project_to_modes(g, alpha, disc.M);
}

CVector source_load(const Discretization& disc, const Impl::SourceData& s, Vec2 alpha, int ng) {
  return load_vector_partial(disc, source_modes(disc, s, alpha, ng), s.points);
}

}  // namespace

CVector transformed_source_load(const Discretization& disc, const PeriodicMedium& medium, const SourceSpec& source,
                                Vec2 alpha, int grid, ModalField* modal) {
  const DepthQuadrature dq = disc.quadrature();
  if (modal) *modal = ModalField(disc.modes(), dq.size());
  const Impl::SourceData src = prepare_source(disc, dq, medium, source, grid);
  if (!src.active) return CVector::Zero(disc.unknowns());
  const ModalField mf = source_modes(disc, src, alpha, grid);
  if (modal)
    for (int m = 0; m < mf.modes(); ++m)
      for (size_t p = 0; p < src.points.size(); ++p)
        for (int c = 0; c < 3; ++c) (*modal)(m, src.points[p], c) = mf(m, static_cast<int>(p), c);
  return load_vector_partial(disc, mf, src.points);
}

namespace {

Impl::PassResult run_pass(const StripSolver& solver, Impl& impl, const PeriodicMedium& /*medium*/, double k,
                          const Impl::Pass& pass) {
  const Discretization& disc = solver.discretization();
  const AlphaQuadrature& quad = solver.quadrature();
  const StripOptions& opts = solver.options();
  const MediumSamples& samples = solver.samples();
  const int ng = opts.grid;
  const int nq = quad.size();
  std::vector<double> depths = opts.output_depths;
  if (depths.empty())
    for (int i = 0; i <= disc.N; ++i) depths.push_back(disc.node(i));
  const int ndef = pass.defect ? static_cast<int>(pass.defect->points.size()) : 0;

  Impl::PassResult res;
  if (pass.outputs) {
    for (const LatticeIndex& j : opts.output_cells) res.cells.emplace(j, GridField(ng, static_cast<int>(depths.size())));
    res.nodes.resize(nq);
  }
  if (pass.evaluate_defect) res.defect_field = GridField(ng, ndef);

  struct NodeOut {
    GridField field;
    GridField defect;
    CellSolution sol;
    double weighted = 0.0;
  };
  const int chunk = std::max(1, opts.threads) * 4;
  std::vector<NodeOut> buf(chunk);

  for (int start = 0; start < nq; start += chunk) {
    const int count = std::min(chunk, nq - start);
    parallel_for(count, opts.threads, [&](int t) {
      const int q = start + t;
      const Vec2 alpha = quad.nodes[q];
      NodeOut& out = buf[t];
      try {
        std::shared_ptr<const CellProblem> prob = impl.cache[q];
        if (!prob) {
          auto fresh = std::make_shared<const CellProblem>(disc, samples, k, QuasiPeriodicity(alpha), opts.cutoff_tol);
          const size_t bytes = fresh->op().factor_bytes();
          if (impl.cached_bytes.fetch_add(bytes) + bytes <= opts.cache_bytes) {
            impl.cache[q] = fresh;
            ++impl.cached_count;
          } else {
            impl.cached_bytes.fetch_sub(bytes);
          }
          prob = fresh;
        }
        CVector F = CVector::Zero(disc.unknowns());
        if (pass.source && pass.source->active) F = source_load(disc, *pass.source, alpha, ng);
        if (pass.defect_load && ndef > 0)
          F += load_vector_partial(disc, project_to_modes(*pass.defect_load, alpha, disc.M), pass.defect->points);
        out.sol = prob->solve(F);
        if (pass.evaluate_defect && ndef > 0)
          out.defect = synthesize_on_grid(evaluate_modal(disc, out.sol.coeffs, pass.defect->z), alpha, disc.M, ng);
        if (pass.outputs) {
          out.field = synthesize_on_grid(evaluate_modal(disc, out.sol.coeffs, depths), alpha, disc.M, ng);
          const CellOperator& S = prob->op();
          const RankUpdate& U = prob->update();
          const ModeSet& modes = S.modes();
          AlphaNodeResult& info = res.nodes[q];
          info.alpha = alpha;
          info.weight = quad.weights[q];
          info.rank = U.rank();
          info.core_rcond = out.sol.core_rcond;
          info.residual = out.sol.residual;
          const CellOperator gram(disc, samples, k, QuasiPeriodicity(alpha), S.classification(), {FormKind::gram, true, 0.0});
          info.norm_sq = std::real(out.sol.coeffs.dot(gram.apply(out.sol.coeffs)));
          double wsum = 0.0;
          for (int m = 0; m < modes.size(); ++m) {
            auto it = std::find(U.positions.begin(), U.positions.end(), m);
            const double ab = std::abs(modes.beta_j(m));
            if (it != U.positions.end())
              wsum += kTwoPi * ab * std::norm(out.sol.core(it - U.positions.begin()));
            else
              wsum += std::norm(singular_functional(modes.alpha_j(m), out.sol.trace[m])) / ab;
          }
          info.weighted_sq = wsum;
          info.source_work = F.dot(out.sol.coeffs);
          info.flux = outgoing_flux(modes, U, out.sol);
          info.trace = out.sol.trace;
          info.vertical = out.sol.vertical_ratio;
          out.weighted = quad.weights[q] * (info.norm_sq + wsum);
        }
      } catch (const NotConvergedError&) {
        throw;
      } catch (const Error& e) {
        throw Error(e.code(), e.what() + alpha_text(alpha));
      }
    });
    // Fixed-order reduction.
    for (int t = 0; t < count; ++t) {
      const int q = start + t;
      const double w = quad.weights[q];
      NodeOut& out = buf[t];
      if (pass.evaluate_defect && ndef > 0) {
        std::vector<Complex>& dst = res.defect_field.data();
        const std::vector<Complex>& src = out.defect.data();
        for (size_t i = 0; i < dst.size(); ++i) dst[i] += w * src[i];
      }
      if (pass.outputs) {
        for (auto& [j, field] : res.cells) {
          const Complex ph = w * std::conj(bloch_phase(quad.nodes[q], j));
          std::vector<Complex>& dst = field.data();
          const std::vector<Complex>& src = out.field.data();
          for (size_t i = 0; i < dst.size(); ++i) dst[i] += ph * src[i];
        }
        res.weighted_sq += out.weighted;
        if (opts.keep_family) res.family.push_back(std::move(out.sol));
      }
      out = NodeOut{};
    }
  }
  return res;
}

GridField defect_load(const Impl::DefectData& d, const GridField& U, double k, int ng) {
  GridField out(ng, static_cast<int>(d.points.size()));
  const int np = out.points();
  for (int n1 = 0; n1 < ng; ++n1)
    for (int n2 = 0; n2 < ng; ++n2)
      for (int p = 0; p < np; ++p) {
        const Complex s = k * k * d.q[(static_cast<size_t>(n1) * ng + n2) * np + p];
        for (int c = 0; c < 3; ++c) out(n1, n2, p, c) = s * U(n1, n2, p, c);
      }
  return out;
}

StripSolution assemble(const StripSolver& solver, Impl::PassResult&& r, double source_norm_sq,
                       std::chrono::steady_clock::time_point t0) {
  const Discretization& disc = solver.discretization();
  StripSolution s;
  s.M = disc.M;
  s.R = disc.R;
  s.grid = solver.options().grid;
  s.depths = solver.options().output_depths;
  if (s.depths.empty())
    for (int i = 0; i <= disc.N; ++i) s.depths.push_back(disc.node(i));
  s.cells = std::move(r.cells);
  s.nodes = std::move(r.nodes);
  s.family = std::move(r.family);
  s.weighted_norm_sq = r.weighted_sq;
  s.source_norm = std::sqrt(source_norm_sq);
  s.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return s;
}

}  // namespace

StripSolution StripSolver::solve_periodic(const SourceSpec& source) const {
  const auto t0 = std::chrono::steady_clock::now();
  const Impl::SourceData src = prepare_source(disc_, impl_->dq, medium_, source, opts_.grid);
  Impl::Pass pass;
  pass.source = &src;
  pass.outputs = true;
  StripSolution s = assemble(*this, run_pass(*this, *impl_, medium_, k_, pass), src.norm_sq, t0);
  s.k = k_;
  return s;
}

namespace {

StripSolution perturbed(const StripSolver& solver, Impl& impl, const PeriodicMedium& medium, double k,
                        const SourceSpec& source, const DefectPerturbation& defect, bool born) {
  const auto t0 = std::chrono::steady_clock::now();
  const Discretization& disc = solver.discretization();
  const int ng = solver.options().grid;
  const Impl::SourceData src = prepare_source(disc, impl.dq, medium, source, ng);
  const Impl::DefectData def = prepare_defect(disc, impl.dq, medium, defect, ng);

  Impl::Pass inc;
  inc.source = &src;
  inc.defect = &def;
  inc.evaluate_defect = true;
  const GridField U_inc = run_pass(solver, impl, medium, k, inc).defect_field;

  DefectReport report;
  report.active = true;
  report.unknowns = static_cast<int>(U_inc.data().size());
  GridField U = U_inc;
  if (!born && report.unknowns > 0) {
    const auto view = [&](const GridField& g) { return Eigen::Map<const CVector>(g.data().data(), g.data().size()); };
    auto apply = [&](const CVector& v) -> CVector {
      GridField V(ng, U_inc.points());
      std::copy(v.data(), v.data() + v.size(), V.data().begin());
      const GridField load = defect_load(def, V, k, ng);
      Impl::Pass p;
      p.defect = &def;
      p.defect_load = &load;
      p.evaluate_defect = true;
      const GridField MV = run_pass(solver, impl, medium, k, p).defect_field;
      return v - view(MV);
    };
    const GmresResult g = gmres(apply, view(U_inc), solver.options().gmres);
    report.iterations = g.iterations;
    report.history = g.history;
    report.converged = g.converged;
    if (!g.converged) {
      if (g.breakdown) fail(ErrorCode::singular, "defect system is numerically singular");
      throw NotConvergedError("defect iteration did not reach the tolerance", g.history);
    }
    std::copy(g.x.data(), g.x.data() + g.x.size(), U.data().begin());
  }

  const GridField load = defect_load(def, U, k, ng);
  Impl::Pass fin;
  fin.source = &src;
  fin.defect = &def;
  fin.defect_load = &load;
  fin.outputs = true;
  StripSolution s = assemble(solver, run_pass(solver, impl, medium, k, fin), src.norm_sq, t0);
  s.k = k;
  s.defect = std::move(report);
  s.defect_field = std::move(U);
  return s;
}

}  // namespace

StripSolution StripSolver::solve_perturbed(const SourceSpec& source, const DefectPerturbation& defect) const {
  return perturbed(*this, *impl_, medium_, k_, source, defect, false);
}

StripSolution StripSolver::solve_born(const SourceSpec& source, const DefectPerturbation& defect) const {
  return perturbed(*this, *impl_, medium_, k_, source, defect, true);
}

}  // namespace qps
