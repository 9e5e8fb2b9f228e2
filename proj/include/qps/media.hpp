#pragma once

#include "qps/types.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace qps {

// Complex scalar field of (x1, x2, x3); x1, x2 are wrapped into the reference cell before evaluation.
using ScalarField = std::function<Complex(double, double, double)>;

double wrap_to_cell(double x);

struct PeriodicMedium {
  ScalarField eps_r;
  ScalarField mu_r;
  double R = 1.0;      // top of the computational domain
  double R0 = 1.0;     // top of the inhomogeneity
  double delta = 0.0;  // margin below R0 where the medium is already free space
  std::string name = "constant";

  Complex eps(double x1, double x2, double x3) const { return eps_r(wrap_to_cell(x1), wrap_to_cell(x2), x3); }
  Complex mu(double x1, double x2, double x3) const { return mu_r(wrap_to_cell(x1), wrap_to_cell(x2), x3); }
};

// Permittivity change supported in the central cell below R0.
struct DefectPerturbation {
  ScalarField q;
  Vec3 center{};
  double radius = 0.0;  // support radius of the bump, 0 for the zero defect
  Complex amplitude{};
  std::string name = "none";

  bool is_zero() const { return !q || amplitude == Complex{}; }
  Complex operator()(double x1, double x2, double x3) const { return is_zero() ? Complex{} : q(x1, x2, x3); }
  double z_min() const { return center.z - radius; }
  double z_max() const { return center.z + radius; }
};

// Transverse Fourier coefficients c_p, |p|_inf <= bandwidth, with field = sum_p c_p e^{-i p.x}.
class CoefficientArray {
 public:
  CoefficientArray() = default;
  explicit CoefficientArray(int bandwidth) : B_(bandwidth), c_((2 * bandwidth + 1) * (2 * bandwidth + 1)) {}
  int bandwidth() const { return B_; }
  Complex& operator()(int p1, int p2) { return c_[index(p1, p2)]; }
  Complex operator()(int p1, int p2) const {
    if (std::abs(p1) > B_ || std::abs(p2) > B_) return {};
    return c_[index(p1, p2)];
  }
  const std::vector<Complex>& data() const { return c_; }

 private:
  int index(int p1, int p2) const { return (p1 + B_) * (2 * B_ + 1) + (p2 + B_); }
  int B_ = 0;
  std::vector<Complex> c_;
};

// Uniform transverse grid x_n = -pi + 2 pi n / ng on the reference cell.
double grid_point(int n, int ng);

// samples are row-major (n1, n2) on the ng x ng grid.
CoefficientArray fourier_coeffs(const std::vector<Complex>& samples, int ng, int bandwidth);

// Depth quadrature: Gauss points per element on the uniform grid of [0, R].
struct DepthQuadrature {
  int elements = 0;
  double R = 0.0;
  int points_per_element = 3;
  std::vector<double> z;
  std::vector<double> w;
  std::vector<int> element;

  static DepthQuadrature gauss(int elements, double R, int points_per_element = 3);
  int size() const { return static_cast<int>(z.size()); }
};

struct MediumSamples {
  int bandwidth = 0;
  int grid = 0;
  bool homogeneous = true;         // every depth point is transversely constant
  std::vector<CoefficientArray> eps;  // per depth quadrature point
  std::vector<CoefficientArray> nu;   // coefficients of 1/mu_r
};

MediumSamples sample_medium(const PeriodicMedium& medium, const DepthQuadrature& dq, int ng, int bandwidth);

enum class CheckStatus { pass, warn, error };

struct ValidationItem {
  std::string name;
  CheckStatus status = CheckStatus::pass;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationItem> items;
  bool ok() const;           // no errors
  bool ball_condition() const;
  std::string summary() const;
};

// Region where Im eps_r > 0 is required for uniqueness.
struct AbsorptionBall {
  Vec3 center{};
  double radius = 0.0;
};

struct ValidationOptions {
  int grid = 16;
  int depth_points = 32;
  double eps_min = 1e-8;
  double mu_min = 1e-8;
};

ValidationReport validate_assumptions(const PeriodicMedium& medium, const DefectPerturbation& defect,
                                      const std::optional<AbsorptionBall>& ball = std::nullopt,
                                      const ValidationOptions& opts = {});

// Built-in profiles.
PeriodicMedium make_constant_medium(double R, double R0, double delta);
PeriodicMedium make_layered_medium(double R, double R0, double delta, double layer_top, Complex layer_eps,
                                   Complex layer_mu = 1.0);
// eps = 1 + (grating_eps - 1) * (1 + cos x1) / 2 for z in [z_bottom, z_top].
PeriodicMedium make_lamellar_medium(double R, double R0, double delta, double z_bottom, double z_top,
                                    Complex grating_eps);
// base with eps_r + extra * (1 - r^2/radius^2)^3 inside the ball.
PeriodicMedium add_inclusion(const PeriodicMedium& base, const AbsorptionBall& ball, Complex extra);
// Compact bump q = amplitude * (1 - r^2/radius^2)^3 around center, zero outside.
DefectPerturbation make_bump_defect(Vec3 center, double radius, Complex amplitude);

// Gridded data: header "QPSGRID1", int32 nx, ny, nz, double R, R0, then nx*ny*nz eps values followed by
// nx*ny*nz mu values (complex doubles, x fastest). Values are cell centred and interpolated trilinearly,
// periodically in x1 and x2.
PeriodicMedium load_gridded_medium(const std::string& path, double delta);
void save_gridded_medium(const std::string& path, const PeriodicMedium& medium, int nx, int ny, int nz);

}  // namespace qps
