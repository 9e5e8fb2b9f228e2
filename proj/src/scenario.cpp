#include "qps/scenario.hpp"

#include "qps/oracles.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace qps {

namespace {

std::string fmt(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::vector<std::string> words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

double to_double(const std::string& w) {
  double v = 0.0;
  auto r = std::from_chars(w.data(), w.data() + w.size(), v);
  if (r.ec != std::errc{} || r.ptr != w.data() + w.size()) throw std::invalid_argument("not a number: " + w);
  return v;
}

long to_int(const std::string& w) {
  long v = 0;
  auto r = std::from_chars(w.data(), w.data() + w.size(), v);
  if (r.ec != std::errc{} || r.ptr != w.data() + w.size()) throw std::invalid_argument("not an integer: " + w);
  return v;
}

int one_int(const std::string& s) {
  const auto w = words(s);
  if (w.size() != 1) throw std::invalid_argument("expected one integer");
  return static_cast<int>(to_int(w[0]));
}

std::vector<double> doubles(const std::string& s, size_t n = 0) {
  std::vector<double> v;
  for (const auto& w : words(s)) v.push_back(to_double(w));
  if (n && v.size() != n) throw std::invalid_argument("expected " + std::to_string(n) + " numbers");
  return v;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + fmt(v[i]);
  return s;
}

struct Field {
  ConfigKey doc;
  std::function<void(Scenario&, const std::string&)> set;
  std::function<std::string(const Scenario&)> get;
};

Field real(std::string key, std::string unit, std::string help, double Scenario::*p) {
  return {{key, unit, help}, [p](Scenario& s, const std::string& v) { s.*p = doubles(v, 1)[0]; },
          [p](const Scenario& s) { return fmt(s.*p); }};
}

Field integer(std::string key, std::string unit, std::string help, int Scenario::*p) {
  return {{key, unit, help}, [p](Scenario& s, const std::string& v) {
            const auto w = words(v);
            if (w.size() != 1) throw std::invalid_argument("expected one integer");
            s.*p = static_cast<int>(to_int(w[0]));
          },
          [p](const Scenario& s) { return std::to_string(s.*p); }};
}

Field text(std::string key, std::string help, std::string Scenario::*p, std::vector<std::string> choices = {}) {
  return {{key, "-", help}, [p, choices](Scenario& s, const std::string& v) {
            const auto w = words(v);
            if (w.size() > 1) throw std::invalid_argument("expected a single word");
            const std::string val = w.empty() ? std::string() : w[0];
            if (!choices.empty() && std::find(choices.begin(), choices.end(), val) == choices.end()) {
              std::string all;
              for (const auto& c : choices) all += (all.empty() ? "" : ", ") + c;
              throw std::invalid_argument("expected one of: " + all);
            }
            s.*p = val;
          },
          [p](const Scenario& s) { return s.*p; }};
}

Field complex(std::string key, std::string help, Complex Scenario::*p) {
  return {{key, "-", help}, [p](Scenario& s, const std::string& v) {
            const auto d = doubles(v);
            if (d.size() < 1 || d.size() > 2) throw std::invalid_argument("expected 're' or 're im'");
            s.*p = Complex(d[0], d.size() == 2 ? d[1] : 0.0);
          },
          [p](const Scenario& s) { return fmt((s.*p).real()) + " " + fmt((s.*p).imag()); }};
}

Field vec3(std::string key, std::string unit, std::string help, Vec3 Scenario::*p) {
  return {{key, unit, help}, [p](Scenario& s, const std::string& v) {
            const auto d = doubles(v, 3);
            s.*p = Vec3{d[0], d[1], d[2]};
          },
          [p](const Scenario& s) { return join({(s.*p).x, (s.*p).y, (s.*p).z}); }};
}

Field vec2(std::string key, std::string unit, std::string help, Vec2 Scenario::*p) {
  return {{key, unit, help}, [p](Scenario& s, const std::string& v) {
            const auto d = doubles(v, 2);
            s.*p = Vec2{d[0], d[1]};
          },
          [p](const Scenario& s) { return join({(s.*p).x, (s.*p).y}); }};
}

Field index(std::string key, std::string help, LatticeIndex Scenario::*p) {
  return {{key, "-", help}, [p](Scenario& s, const std::string& v) {
            const auto w = words(v);
            if (w.size() != 2) throw std::invalid_argument("expected two integers");
            s.*p = LatticeIndex{static_cast<int>(to_int(w[0])), static_cast<int>(to_int(w[1]))};
          },
          [p](const Scenario& s) { return std::to_string((s.*p).j1) + " " + std::to_string((s.*p).j2); }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> f = [] {
    std::vector<Field> v;
    v.push_back(text("name", "scenario label", &Scenario::name));
    v.push_back(text("solve", "cell (one alpha) or strip", &Scenario::solve, {"cell", "strip"}));
    v.push_back(real("k", "1/length", "wavenumber above the structure", &Scenario::k));
    v.push_back(vec2("alpha", "-", "quasi-periodicity for cell solves, in [-1/2, 1/2]^2", &Scenario::alpha));
    v.push_back(real("height", "length", "top R of the computational domain", &Scenario::R));
    v.push_back(real("r0", "length", "top R0 of the inhomogeneity", &Scenario::R0));
    v.push_back(real("delta", "length", "free-space margin below R0", &Scenario::delta));
    v.push_back(text("medium", "constant, layered, lamellar or gridded", &Scenario::medium,
                     {"constant", "layered", "lamellar", "gridded"}));
    v.push_back(real("medium.layer_top", "length", "top of the layered slab", &Scenario::layer_top));
    v.push_back(real("medium.grating_bottom", "length", "bottom of the lamellar grating", &Scenario::grating_bottom));
    v.push_back(real("medium.grating_top", "length", "top of the lamellar grating", &Scenario::grating_top));
    v.push_back(complex("medium.eps", "relative permittivity of the slab or grating", &Scenario::medium_eps));
    v.push_back(complex("medium.mu", "relative permeability of the slab", &Scenario::medium_mu));
    v.push_back(text("medium.file", "gridded medium file", &Scenario::medium_file));
    v.push_back(real("inclusion.radius", "length", "radius of an inclusion added to the medium, 0 for none",
                     &Scenario::inclusion_radius));
    v.push_back(vec3("inclusion.center", "length", "inclusion centre", &Scenario::inclusion_center));
    v.push_back(complex("inclusion.eps", "permittivity added at the inclusion centre", &Scenario::inclusion_eps));
    v.push_back(text("defect", "none or bump", &Scenario::defect, {"none", "bump"}));
    v.push_back(vec3("defect.center", "length", "defect centre in the central cell", &Scenario::defect_center));
    v.push_back(real("defect.radius", "length", "defect support radius", &Scenario::defect_radius));
    v.push_back(complex("defect.amplitude", "peak permittivity change", &Scenario::defect_amplitude));
    v.push_back(text("source", "none, bump or manufactured", &Scenario::source, {"none", "bump", "manufactured"}));
    v.push_back(text("source.manufactured", "outgoing_mode, two_mode_superposition or gradient_null_test",
                     &Scenario::manufactured, {"outgoing_mode", "two_mode_superposition", "gradient_null_test"}));
    v.push_back(vec3("source.center", "length", "bump centre (reference cell)", &Scenario::source_center));
    v.push_back(real("source.radius", "length", "bump radius", &Scenario::source_radius));
    v.push_back(vec3("source.polarization", "current", "bump current direction and peak", &Scenario::source_polarization));
    v.push_back(integer("source.block", "cells", "bump repeated on cells |j|_inf <= block", &Scenario::source_block));
    v.push_back(integer("modes", "-", "mode truncation M, |j|_inf <= M", &Scenario::M));
    v.push_back(integer("depth_elems", "-", "depth elements N", &Scenario::N));
    v.push_back(integer("grid", "points", "transverse samples per axis", &Scenario::grid));
    v.push_back({{"quad.n_base", "-", "alpha panels per axis"},
                 [](Scenario& s, const std::string& w) { s.quad.n_base = one_int(w); },
                 [](const Scenario& s) { return std::to_string(s.quad.n_base); }});
    v.push_back({{"quad.order", "-", "Gauss points per axis on unrefined panels"},
                 [](Scenario& s, const std::string& w) { s.quad.order = one_int(w); },
                 [](const Scenario& s) { return std::to_string(s.quad.order); }});
    v.push_back({{"quad.refined_order", "-", "Gauss points per axis on refined panels"},
                 [](Scenario& s, const std::string& w) { s.quad.refined_order = one_int(w); },
                 [](const Scenario& s) { return std::to_string(s.quad.refined_order); }});
    v.push_back({{"quad.levels", "-", "dyadic grading levels toward cutoff circles"},
                 [](Scenario& s, const std::string& w) { s.quad.levels = one_int(w); },
                 [](const Scenario& s) { return std::to_string(s.quad.levels); }});
    v.push_back(real("cutoff_tol", "1/length", "distance to a cutoff circle below which a mode is singular",
                     &Scenario::cutoff_tol));
    v.push_back(integer("threads", "-", "worker threads", &Scenario::threads));
    v.push_back({{"gmres.tol", "-", "relative residual of the defect iteration"},
                 [](Scenario& s, const std::string& w) { s.gmres.tol = doubles(w, 1)[0]; },
                 [](const Scenario& s) { return fmt(s.gmres.tol); }});
    v.push_back({{"gmres.restart", "-", "Krylov restart length"},
                 [](Scenario& s, const std::string& w) { s.gmres.restart = one_int(w); },
                 [](const Scenario& s) { return std::to_string(s.gmres.restart); }});
    v.push_back({{"gmres.max_iter", "-", "iteration limit"},
                 [](Scenario& s, const std::string& w) { s.gmres.max_iter = one_int(w); },
                 [](const Scenario& s) { return std::to_string(s.gmres.max_iter); }});
    v.push_back({{"seed", "-", "random seed"},
                 [](Scenario& s, const std::string& w) { s.seed = static_cast<unsigned>(one_int(w)); },
                 [](const Scenario& s) { return std::to_string(s.seed); }});
    v.push_back({{"output.cells", "-", "cells to synthesize, 'j1 j2' pairs separated by ';'"},
                 [](Scenario& s, const std::string& w) {
                   std::vector<LatticeIndex> cells;
                   std::istringstream in(w);
                   for (std::string part; std::getline(in, part, ';');) {
                     const auto p = words(part);
                     if (p.empty()) continue;
                     if (p.size() != 2) throw std::invalid_argument("expected 'j1 j2' pairs");
                     cells.push_back({static_cast<int>(to_int(p[0])), static_cast<int>(to_int(p[1]))});
                   }
                   s.output_cells = cells;
                 },
                 [](const Scenario& s) {
                   std::string out;
                   for (size_t i = 0; i < s.output_cells.size(); ++i)
                     out += (i ? "; " : "") + std::to_string(s.output_cells[i].j1) + " " +
                            std::to_string(s.output_cells[i].j2);
                   return out;
                 }});
    v.push_back({{"output.planes", "length", "heights x3 >= R of evaluation planes"},
                 [](Scenario& s, const std::string& w) { s.planes = doubles(w); },
                 [](const Scenario& s) { return join(s.planes); }});
    v.push_back(integer("output.plane_grid", "points", "samples per axis on each plane", &Scenario::plane_grid));
    v.push_back(text("sweep", "none, alpha-path or convergence", &Scenario::sweep, {"none", "alpha-path", "convergence"}));
    v.push_back(index("sweep.cutoff_mode", "lattice mode whose cutoff circle is approached", &Scenario::cutoff_mode));
    v.push_back(vec2("sweep.cutoff_alpha", "-", "point of that circle at the end of the path", &Scenario::cutoff_alpha));
    v.push_back({{"sweep.offsets", "1/length", "distances to the circle along the path"},
                 [](Scenario& s, const std::string& w) { s.offsets = doubles(w); },
                 [](const Scenario& s) { return join(s.offsets); }});
    v.push_back({{"sweep.depth_elems", "-", "depth element counts of the convergence study"},
                 [](Scenario& s, const std::string& w) {
                   s.convergence_elems.clear();
                   for (const auto& x : words(w)) s.convergence_elems.push_back(static_cast<int>(to_int(x)));
                 },
                 [](const Scenario& s) {
                   std::string out;
                   for (size_t i = 0; i < s.convergence_elems.size(); ++i)
                     out += (i ? " " : "") + std::to_string(s.convergence_elems[i]);
                   return out;
                 }});
    return v;
  }();
  return f;
}

const Field& field(const std::string& key) {
  for (const Field& f : fields())
    if (f.doc.key == key) return f;
  fail(ErrorCode::config, "unknown key '" + key + "'");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

void check(bool ok, const std::string& field, const std::string& what) {
  if (!ok) fail(ErrorCode::config, field + ": " + what);
}

}  // namespace

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> k;
    for (const Field& f : fields()) k.push_back(f.doc);
    return k;
  }();
  return keys;
}

void set_scenario_value(Scenario& s, const std::string& key, const std::string& value) {
  const Field& f = field(key);
  try {
    f.set(s, value);
  } catch (const std::exception& e) {
    fail(ErrorCode::config, "'" + key + "': " + e.what());
  }
}

std::string get_scenario_value(const Scenario& s, const std::string& key) { return field(key).get(s); }

Scenario parse_scenario(const std::string& text) {
  Scenario s;
  std::istringstream in(text);
  int line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(ErrorCode::config, "line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    try {
      set_scenario_value(s, key, trim(line.substr(eq + 1)));
    } catch (const Error& e) {
      fail(ErrorCode::config, "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  s.validate();
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(ErrorCode::io, "cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_scenario(ss.str());
}

std::string serialize_scenario(const Scenario& s) {
  std::string out;
  for (const Field& f : fields()) out += f.doc.key + " = " + f.get(s) + "\n";
  return out;
}

void Scenario::validate() const {
  check(solve == "cell" || solve == "strip", "solve", "must be cell or strip");
  check(k > 0.0 && std::isfinite(k), "k", "must be positive");
  check(std::abs(alpha.x) <= 0.5 && std::abs(alpha.y) <= 0.5, "alpha", "must lie in [-1/2, 1/2]^2");
  check(R > 0.0, "height", "must be positive");
  check(R0 > 0.0 && R0 <= R, "r0", "must lie in (0, height]");
  check(delta >= 0.0 && delta < R0, "delta", "must lie in [0, r0)");
  check(M >= 0 && M <= 32, "modes", "must lie in [0, 32]");
  check(N >= 1 && N <= 1 << 16, "depth_elems", "must lie in [1, 65536]");
  check(grid >= 2 * M + 1 && grid <= 1024, "grid", "must be at least 2 modes + 1");
  check(quad.n_base >= 1 && quad.order >= 1 && quad.refined_order >= 1 && quad.levels >= 0, "quad",
        "panel counts and orders must be positive");
  check(cutoff_tol >= 0.0, "cutoff_tol", "must be nonnegative");
  check(threads >= 1, "threads", "must be positive");
  check(gmres.tol > 0.0 && gmres.restart >= 1 && gmres.max_iter >= 1, "gmres", "tolerance and limits must be positive");
  if (medium == "gridded") check(!medium_file.empty(), "medium.file", "required for gridded media");
  if (medium == "lamellar") check(grating_bottom < grating_top, "medium.grating_top", "must exceed the grating bottom");
  check(inclusion_radius >= 0.0, "inclusion.radius", "must be nonnegative");
  if (defect == "bump") check(defect_radius > 0.0, "defect.radius", "must be positive");
  if (source == "bump") {
    check(source_radius > 0.0, "source.radius", "must be positive");
    check(source_center.z + source_radius <= R0 - delta + 1e-12, "source.radius",
          "source must stay below r0 - delta");
    check(source_block >= 0 && source_block <= 16, "source.block", "must lie in [0, 16]");
  }
  if (source == "manufactured") check(solve == "cell" && medium == "constant", "source", "manufactured cases are cell solves in free space");
  check(plane_grid >= 1, "output.plane_grid", "must be positive");
  for (double z : planes) check(z >= R, "output.planes", "planes must lie at or above height");
  if (sweep == "alpha-path") {
    check(!offsets.empty(), "sweep.offsets", "need at least one offset");
    for (double t : offsets) check(t > 0.0, "sweep.offsets", "offsets must be positive");
    const Vec2 aj{cutoff_alpha.x + cutoff_mode.j1, cutoff_alpha.y + cutoff_mode.j2};
    check(std::abs(aj.norm() - k) <= 1e-12 * k, "sweep.cutoff_alpha", "must lie on the cutoff circle of sweep.cutoff_mode");
    check(std::abs(cutoff_mode.j1) <= M && std::abs(cutoff_mode.j2) <= M, "sweep.cutoff_mode", "must lie inside the mode truncation");
  }
  for (int n : convergence_elems) check(n >= 1, "sweep.depth_elems", "must be positive");
}

std::vector<std::string> builtin_scenarios() {
  return {"homogeneous_outgoing", "near_cutoff", "defect_born", "energy_balance", "lamellar_grating", "wood_anomaly"};
}

Scenario builtin_scenario(const std::string& name) {
  Scenario s;
  s.name = name;
  if (name == "homogeneous_outgoing") {
    s.k = 1.0;
    s.R = 2.0;
    s.R0 = 2.0;
    s.delta = 0.25;
    s.source = "manufactured";
    s.M = 0;
    s.N = 128;
    s.grid = 4;
    s.convergence_elems = {32, 64, 128};
  } else if (name == "near_cutoff") {
    s.k = 6.5;
    s.R = 1.0;
    s.R0 = 0.8;
    s.delta = 0.2;
    s.medium = "layered";
    s.layer_top = 0.5;
    s.medium_eps = 2.0;
    s.source = "bump";
    s.source_center = {0.0, 0.0, 0.3};
    s.source_radius = 0.25;
    s.source_polarization = {1.0, 0.5, 0.25};
    s.M = 6;
    s.N = 16;
    s.grid = 16;
    s.cutoff_tol = 0.1;
    s.alpha = {0.49, 0.0};
    s.sweep = "alpha-path";
    s.cutoff_mode = {6, 0};
    s.cutoff_alpha = {0.5, 0.0};
    s.offsets = {1e-2, 3e-3, 1e-3, 3e-4, 1e-4, 3e-5, 1e-5, 3e-6, 1e-6, 3e-7, 1e-7, 3e-8, 1e-8, 3e-9, 1e-9, 3e-10, 1e-10};
  } else if (name == "wood_anomaly") {
    s.k = 1.3;
    s.R = 1.0;
    s.R0 = 0.8;
    s.delta = 0.2;
    s.medium = "layered";
    s.layer_top = 0.5;
    s.medium_eps = 2.0;
    s.source = "bump";
    s.source_center = {0.0, 0.0, 0.3};
    s.source_radius = 0.25;
    s.source_polarization = {1.0, 0.5, 0.25};
    s.M = 2;
    s.N = 16;
    s.grid = 8;
    s.cutoff_tol = 0.1;
    s.alpha = {0.29, 0.0};
    s.sweep = "alpha-path";
    s.cutoff_mode = {1, 0};
    s.cutoff_alpha = {0.3, 0.0};
    s.offsets = {1e-2, 3e-3, 1e-3, 3e-4, 1e-4, 3e-5, 1e-5, 3e-6, 1e-6, 3e-7, 1e-7, 3e-8, 1e-8, 3e-9, 1e-9, 3e-10, 1e-10};
  } else if (name == "defect_born") {
    s.solve = "strip";
    s.k = 1.3;
    s.R = 4.0;
    s.R0 = 3.5;
    s.delta = 0.5;
    s.medium = "layered";
    s.layer_top = 1.0;
    s.medium_eps = 2.0;
    s.defect = "bump";
    s.defect_center = {1.5, 1.0, 1.6};
    s.defect_radius = 1.2;
    s.defect_amplitude = Complex(0.0, 0.4);
    s.source = "bump";
    s.source_center = {0.0, 0.0, 1.5};
    s.source_radius = 1.2;
    s.source_polarization = {1.0, 0.5, 0.0};
    s.M = 2;
    s.N = 32;
    s.grid = 8;
    s.quad.n_base = 8;
    s.quad.order = 4;
    s.quad.levels = 0;
    s.output_cells = {{0, 0}, {1, 0}};
    s.planes = {4.5};
  } else if (name == "energy_balance") {
    s.solve = "strip";
    s.k = 0.4;
    s.R = 1.0;
    s.R0 = 0.8;
    s.delta = 0.2;
    s.medium = "lamellar";
    s.grating_bottom = 0.2;
    s.grating_top = 0.5;
    s.medium_eps = 2.25;
    s.source = "bump";
    s.source_center = {0.0, 0.0, 0.3};
    s.source_radius = 0.25;
    s.source_polarization = {1.0, 0.0, 0.5};
    s.M = 1;
    s.N = 16;
    s.grid = 8;
    s.quad.n_base = 4;
    s.quad.levels = 1;
  } else if (name == "lamellar_grating") {
    s.solve = "strip";
    s.k = 1.2;
    s.R = 2.0;
    s.R0 = 1.5;
    s.delta = 0.3;
    s.medium = "lamellar";
    s.grating_bottom = 0.6;
    s.grating_top = 1.1;
    s.medium_eps = Complex(2.25, 0.05);
    s.source = "bump";
    s.source_center = {0.0, 0.0, 0.5};
    s.source_radius = 0.4;
    s.source_polarization = {0.0, 1.0, 0.0};
    s.M = 1;
    s.N = 16;
    s.grid = 8;
    s.quad.n_base = 6;
    s.quad.levels = 1;
    s.output_cells = {{-1, 0}, {0, 0}, {1, 0}};
    s.planes = {2.5};
  } else {
    fail(ErrorCode::config, "unknown scenario '" + name + "'");
  }
  s.validate();
  return s;
}

PeriodicMedium make_medium(const Scenario& s) {
  PeriodicMedium m;
  if (s.medium == "constant") {
    m = make_constant_medium(s.R, s.R0, s.delta);
  } else if (s.medium == "layered") {
    m = make_layered_medium(s.R, s.R0, s.delta, s.layer_top, s.medium_eps, s.medium_mu);
  } else if (s.medium == "lamellar") {
    m = make_lamellar_medium(s.R, s.R0, s.delta, s.grating_bottom, s.grating_top, s.medium_eps);
  } else if (s.medium == "gridded") {
    m = load_gridded_medium(s.medium_file, s.delta);
    if (std::abs(m.R - s.R) > 1e-12 * s.R) fail(ErrorCode::config, "medium.file: height does not match 'height'");
  } else {
    fail(ErrorCode::config, "medium: unknown profile '" + s.medium + "'");
  }
  if (s.inclusion_radius > 0.0) m = add_inclusion(m, AbsorptionBall{s.inclusion_center, s.inclusion_radius}, s.inclusion_eps);
  return m;
}

DefectPerturbation make_defect(const Scenario& s) {
  if (s.defect == "none") return DefectPerturbation{};
  return make_bump_defect(s.defect_center, s.defect_radius, s.defect_amplitude);
}

SourceSpec make_source(const Scenario& s) {
  if (s.source != "bump") return SourceSpec{};
  std::vector<LatticeIndex> cells;
  for (int a = -s.source_block; a <= s.source_block; ++a)
    for (int b = -s.source_block; b <= s.source_block; ++b) cells.push_back({a, b});
  const Vec3 p = s.source_polarization;
  return make_bump_source(s.source_center, s.source_radius, Field3{p.x, p.y, p.z}, cells);
}

}  // namespace qps
