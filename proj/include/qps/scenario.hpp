#pragma once

#include "qps/bloch.hpp"
#include "qps/gmres.hpp"
#include "qps/media.hpp"
#include "qps/strip_solver.hpp"

#include <string>
#include <vector>

namespace qps {

// Everything a run needs. Lengths are in units of the period / 2 pi (the cell is [-pi, pi]^2).
struct Scenario {
  std::string name = "custom";
  std::string solve = "cell";  // cell: one alpha; strip: full non-periodic problem

  double k = 1.0;
  Vec2 alpha{};

  double R = 1.0;
  double R0 = 1.0;
  double delta = 0.0;

  std::string medium = "constant";  // constant, layered, lamellar, gridded
  double layer_top = 0.0;
  double grating_bottom = 0.0;
  double grating_top = 0.0;
  Complex medium_eps{1.0};
  Complex medium_mu{1.0};
  std::string medium_file;
  double inclusion_radius = 0.0;  // optional absorbing inclusion added to the medium
  Vec3 inclusion_center{};
  Complex inclusion_eps{};

  std::string defect = "none";  // none, bump
  Vec3 defect_center{};
  double defect_radius = 0.0;
  Complex defect_amplitude{};

  std::string source = "none";  // none, bump, manufactured
  std::string manufactured = "outgoing_mode";
  Vec3 source_center{};
  double source_radius = 0.0;
  Vec3 source_polarization{1.0, 0.0, 0.0};
  int source_block = 0;  // the bump is repeated on cells |j|_inf <= source_block

  int M = 0;
  int N = 32;
  int grid = 16;

  QuadratureOptions quad{};
  double cutoff_tol = 1e-6;
  int threads = 1;
  GmresOptions gmres{};
  unsigned seed = 7;

  std::vector<LatticeIndex> output_cells{LatticeIndex{0, 0}};
  std::vector<double> planes;  // heights x3 > R of evaluation planes
  int plane_grid = 16;

  std::string sweep = "none";  // none, alpha-path, convergence
  LatticeIndex cutoff_mode{0, 0};
  Vec2 cutoff_alpha{};  // point of the cutoff circle approached by the alpha path
  std::vector<double> offsets{1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8, 1e-9, 1e-10};
  std::vector<int> convergence_elems{16, 32, 64, 128};

  // Range and consistency checks; raises a config error naming the field.
  void validate() const;
};

struct ConfigKey {
  std::string key;
  std::string unit;
  std::string help;
};

// Documented keys in file order.
const std::vector<ConfigKey>& config_keys();

// key = value lines, '#' comments. Unknown keys and bad values raise config errors with the line number.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);
std::string serialize_scenario(const Scenario& s);
void set_scenario_value(Scenario& s, const std::string& key, const std::string& value);
std::string get_scenario_value(const Scenario& s, const std::string& key);

std::vector<std::string> builtin_scenarios();
Scenario builtin_scenario(const std::string& name);

// Objects built from a scenario.
PeriodicMedium make_medium(const Scenario& s);
DefectPerturbation make_defect(const Scenario& s);
SourceSpec make_source(const Scenario& s);

}  // namespace qps
