#include "qps/media.hpp"

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>

namespace qps {

double wrap_to_cell(double x) {
  if (x >= -kPi && x < kPi) return x;
  double y = std::fmod(x + kPi, kTwoPi);
  if (y < 0.0) y += kTwoPi;
  return y - kPi;
}

double grid_point(int n, int ng) { return -kPi + kTwoPi * n / ng; }

CoefficientArray fourier_coeffs(const std::vector<Complex>& samples, int ng, int bandwidth) {
  if (bandwidth < 0) fail(ErrorCode::invalid_argument, "negative bandwidth");
  if (ng < 2 * bandwidth + 1) {
    std::ostringstream os;
    os << "transverse grid " << ng << " aliases bandwidth " << bandwidth << " (need at least "
       << 2 * bandwidth + 1 << " points per axis)";
    fail(ErrorCode::aliasing, os.str());
  }
  if (samples.size() != static_cast<size_t>(ng) * ng)
    fail(ErrorCode::invalid_argument, "sample count does not match the transverse grid");
  const int np = 2 * bandwidth + 1;
  // phase[p][n] = e^{i p x_n}
  std::vector<Complex> phase(static_cast<size_t>(np) * ng);
  for (int p = -bandwidth; p <= bandwidth; ++p)
    for (int n = 0; n < ng; ++n) phase[(p + bandwidth) * ng + n] = std::polar(1.0, p * grid_point(n, ng));
  std::vector<Complex> partial(static_cast<size_t>(ng) * np);  // (n1, p2)
  for (int n1 = 0; n1 < ng; ++n1)
    for (int p2 = 0; p2 < np; ++p2) {
      Complex s{};
      for (int n2 = 0; n2 < ng; ++n2) s += samples[n1 * ng + n2] * phase[p2 * ng + n2];
      partial[n1 * np + p2] = s;
    }
  CoefficientArray c(bandwidth);
  const double scale = 1.0 / (static_cast<double>(ng) * ng);
  for (int p1 = 0; p1 < np; ++p1)
    for (int p2 = 0; p2 < np; ++p2) {
      Complex s{};
      for (int n1 = 0; n1 < ng; ++n1) s += partial[n1 * np + p2] * phase[p1 * ng + n1];
      c(p1 - bandwidth, p2 - bandwidth) = s * scale;
    }
  return c;
}

DepthQuadrature DepthQuadrature::gauss(int elements, double R, int points_per_element) {
  if (elements < 1 || !(R > 0.0)) fail(ErrorCode::invalid_argument, "depth grid needs elements >= 1 and R > 0");
  DepthQuadrature dq;
  dq.elements = elements;
  dq.R = R;
  dq.points_per_element = points_per_element;
  std::vector<double> x, w;
  if (points_per_element == 1) {
    x = {0.0};
    w = {2.0};
  } else if (points_per_element == 2) {
    x = {-1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0)};
    w = {1.0, 1.0};
  } else if (points_per_element == 3) {
    x = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
    w = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  } else {
    fail(ErrorCode::invalid_argument, "depth quadrature supports 1 to 3 points per element");
  }
  const double h = R / elements;
  for (int e = 0; e < elements; ++e)
    for (size_t g = 0; g < x.size(); ++g) {
      dq.z.push_back(h * (e + 0.5 * (x[g] + 1.0)));
      dq.w.push_back(0.5 * h * w[g]);
      dq.element.push_back(e);
    }
  return dq;
}

namespace {

CoefficientArray coefficients_at_depth(const ScalarField& f, double z, int ng, int bandwidth, bool invert,
                                       bool& homogeneous) {
  std::vector<Complex> s(static_cast<size_t>(ng) * ng);
  for (int n1 = 0; n1 < ng; ++n1)
    for (int n2 = 0; n2 < ng; ++n2) {
      const Complex v = f(grid_point(n1, ng), grid_point(n2, ng), z);
      s[n1 * ng + n2] = invert ? 1.0 / v : v;
    }
  const bool constant = std::all_of(s.begin(), s.end(), [&](const Complex& v) { return v == s[0]; });
  if (constant) {
    if (ng < 2 * bandwidth + 1) fourier_coeffs(s, ng, bandwidth);  // raises the aliasing error
    CoefficientArray c(bandwidth);
    c(0, 0) = s[0];
    return c;
  }
  homogeneous = false;
  return fourier_coeffs(s, ng, bandwidth);
}

}  // namespace

MediumSamples sample_medium(const PeriodicMedium& medium, const DepthQuadrature& dq, int ng, int bandwidth) {
  MediumSamples ms;
  ms.bandwidth = bandwidth;
  ms.grid = ng;
  ms.eps.reserve(dq.size());
  ms.nu.reserve(dq.size());
  for (int g = 0; g < dq.size(); ++g) {
    ms.eps.push_back(coefficients_at_depth(medium.eps_r, dq.z[g], ng, bandwidth, false, ms.homogeneous));
    ms.nu.push_back(coefficients_at_depth(medium.mu_r, dq.z[g], ng, bandwidth, true, ms.homogeneous));
  }
  return ms;
}

bool ValidationReport::ok() const {
  return std::none_of(items.begin(), items.end(), [](const ValidationItem& i) { return i.status == CheckStatus::error; });
}

bool ValidationReport::ball_condition() const {
  for (const auto& i : items)
    if (i.name == "absorption_ball") return i.status == CheckStatus::pass;
  return false;
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  for (const auto& i : items) {
    const char* s = i.status == CheckStatus::pass ? "pass" : i.status == CheckStatus::warn ? "warn" : "error";
    os << i.name << ": " << s;
    if (!i.detail.empty()) os << " (" << i.detail << ")";
    os << "\n";
  }
  return os.str();
}

ValidationReport validate_assumptions(const PeriodicMedium& medium, const DefectPerturbation& defect,
                                      const std::optional<AbsorptionBall>& ball, const ValidationOptions& opts) {
  ValidationReport rep;
  const int ng = opts.grid;
  const int nz = opts.depth_points;
  double min_re_eps = 1e300, min_im_eps = 1e300, min_re_mu = 1e300, min_im_mu = 1e300, min_im_total = 1e300;
  double top_dev = 0.0;
  for (int iz = 0; iz < nz; ++iz) {
    const double z = medium.R * (iz + 0.5) / nz;
    for (int n1 = 0; n1 < ng; ++n1)
      for (int n2 = 0; n2 < ng; ++n2) {
        const double x1 = grid_point(n1, ng), x2 = grid_point(n2, ng);
        const Complex e = medium.eps(x1, x2, z), m = medium.mu(x1, x2, z);
        min_re_eps = std::min(min_re_eps, e.real());
        min_im_eps = std::min(min_im_eps, e.imag());
        min_re_mu = std::min(min_re_mu, m.real());
        min_im_mu = std::min(min_im_mu, m.imag());
        min_im_total = std::min(min_im_total, (e + defect(x1, x2, z)).imag());
        if (z >= medium.R0 - medium.delta)
          top_dev = std::max({top_dev, std::abs(e - 1.0), std::abs(m - 1.0)});
      }
  }
  auto add = [&](const std::string& name, bool good, const std::string& detail, CheckStatus bad = CheckStatus::error) {
    rep.items.push_back({name, good ? CheckStatus::pass : bad, detail});
  };
  auto num = [](double v) {
    std::ostringstream os;
    os << v;
    return os.str();
  };
  add("eps_real_lower_bound", min_re_eps >= opts.eps_min, "min Re eps_r = " + num(min_re_eps));
  add("eps_imag_nonnegative", min_im_eps >= 0.0, "min Im eps_r = " + num(min_im_eps));
  add("mu_real_lower_bound", min_re_mu >= opts.mu_min, "min Re mu_r = " + num(min_re_mu));
  add("mu_imag_nonnegative", min_im_mu >= 0.0, "min Im mu_r = " + num(min_im_mu));
  add("free_space_above_R0_minus_delta", top_dev <= 1e-12, "max deviation = " + num(top_dev));
  add("geometry", medium.R0 <= medium.R && medium.delta >= 0.0 && medium.delta < medium.R0,
      "R = " + num(medium.R) + ", R0 = " + num(medium.R0) + ", delta = " + num(medium.delta));
  if (!defect.is_zero()) {
    const Vec3& c = defect.center;
    const double r = defect.radius;
    const bool inside = c.x - r > -kPi && c.x + r < kPi && c.y - r > -kPi && c.y + r < kPi && c.z - r > 0.0 &&
                        c.z + r < medium.R0;
    add("defect_support", inside, "bump must lie inside the central cell below R0");
    add("defect_imag_nonnegative", min_im_total >= 0.0, "min Im(eps_r + q) = " + num(min_im_total));
  }
  bool found = false;
  std::string detail;
  auto stencil_absorbing = [&](Vec3 p, double s) {
    for (int a = -1; a <= 1; ++a)
      for (int b = -1; b <= 1; ++b)
        for (int d = -1; d <= 1; ++d) {
          const double z = p.z + d * s;
          if (z <= 0.0 || z >= medium.R) return false;
          if (!((medium.eps(p.x + a * s, p.y + b * s, z) + defect(p.x + a * s, p.y + b * s, z)).imag() > 0.0))
            return false;
        }
    return true;
  };
  if (ball) {
    found = ball->radius > 0.0 && stencil_absorbing(ball->center, 0.5 * ball->radius);
    detail = "prescribed ball";
  } else {
    const double s = std::min(kTwoPi / ng, medium.R / nz);
    for (int iz = 0; iz < nz && !found; ++iz)
      for (int n1 = 0; n1 < ng && !found; ++n1)
        for (int n2 = 0; n2 < ng && !found; ++n2)
          found = stencil_absorbing({grid_point(n1, ng), grid_point(n2, ng), medium.R * (iz + 0.5) / nz}, 0.5 * s);
    detail = found ? "found by sampling" : "no open ball with Im eps_r > 0 found";
  }
  add("absorption_ball", found, detail, CheckStatus::warn);
  return rep;
}

namespace {

ScalarField constant_field(Complex v) {
  return [v](double, double, double) { return v; };
}

}  // namespace

PeriodicMedium make_constant_medium(double R, double R0, double delta) {
  PeriodicMedium m;
  m.eps_r = constant_field(1.0);
  m.mu_r = constant_field(1.0);
  m.R = R;
  m.R0 = R0;
  m.delta = delta;
  m.name = "constant";
  return m;
}

PeriodicMedium make_layered_medium(double R, double R0, double delta, double layer_top, Complex layer_eps,
                                   Complex layer_mu) {
  PeriodicMedium m = make_constant_medium(R, R0, delta);
  m.eps_r = [=](double, double, double z) { return z < layer_top ? layer_eps : Complex{1.0}; };
  m.mu_r = [=](double, double, double z) { return z < layer_top ? layer_mu : Complex{1.0}; };
  m.name = "layered";
  return m;
}

PeriodicMedium make_lamellar_medium(double R, double R0, double delta, double z_bottom, double z_top,
                                    Complex grating_eps) {
  PeriodicMedium m = make_constant_medium(R, R0, delta);
  m.eps_r = [=](double x1, double, double z) {
    if (z < z_bottom || z > z_top) return Complex{1.0};
    return 1.0 + (grating_eps - 1.0) * 0.5 * (1.0 + std::cos(x1));
  };
  m.name = "lamellar";
  return m;
}

PeriodicMedium add_inclusion(const PeriodicMedium& base, const AbsorptionBall& ball, Complex extra) {
  if (!(ball.radius > 0.0)) fail(ErrorCode::invalid_argument, "inclusion radius must be positive");
  PeriodicMedium m = base;
  const ScalarField eps = base.eps_r;
  m.eps_r = [eps, ball, extra](double x1, double x2, double z) {
    const double d1 = x1 - ball.center.x, d2 = x2 - ball.center.y, d3 = z - ball.center.z;
    const double r2 = (d1 * d1 + d2 * d2 + d3 * d3) / (ball.radius * ball.radius);
    const Complex e = eps(x1, x2, z);
    return r2 < 1.0 ? e + extra * std::pow(1.0 - r2, 3) : e;
  };
  m.name = base.name + "+inclusion";
  return m;
}

DefectPerturbation make_bump_defect(Vec3 center, double radius, Complex amplitude) {
  DefectPerturbation d;
  d.center = center;
  d.radius = radius;
  d.amplitude = amplitude;
  d.name = "bump";
  d.q = [=](double x1, double x2, double x3) {
    const double dx = x1 - center.x, dy = x2 - center.y, dz = x3 - center.z;
    const double s = 1.0 - (dx * dx + dy * dy + dz * dz) / (radius * radius);
    if (s <= 0.0) return Complex{};
    return amplitude * (s * s * s);
  };
  return d;
}

namespace {

constexpr char kGridMagic[8] = {'Q', 'P', 'S', 'G', 'R', 'I', 'D', '1'};

struct Grid3 {
  int nx, ny, nz;
  double R;
  std::vector<Complex> v;

  Complex at(int i, int j, int k) const { return v[(static_cast<size_t>(k) * ny + j) * nx + i]; }

  Complex interpolate(double x1, double x2, double x3) const {
    auto coord = [](double t, int n, bool periodic, int& i0, int& i1, double& f) {
      double s = t - 0.5;
      if (!periodic) s = std::clamp(s, 0.0, static_cast<double>(n - 1));
      const double fl = std::floor(s);
      f = s - fl;
      i0 = static_cast<int>(fl);
      i1 = i0 + 1;
      if (periodic) {
        i0 = ((i0 % n) + n) % n;
        i1 = ((i1 % n) + n) % n;
      } else {
        i1 = std::min(i1, n - 1);
      }
    };
    int i0, i1, j0, j1, k0, k1;
    double fx, fy, fz;
    coord((wrap_to_cell(x1) + kPi) / kTwoPi * nx, nx, true, i0, i1, fx);
    coord((wrap_to_cell(x2) + kPi) / kTwoPi * ny, ny, true, j0, j1, fy);
    coord(x3 / R * nz, nz, false, k0, k1, fz);
    Complex r{};
    for (int c = 0; c < 8; ++c) {
      const int i = (c & 1) ? i1 : i0, j = (c & 2) ? j1 : j0, k = (c & 4) ? k1 : k0;
      const double w = ((c & 1) ? fx : 1 - fx) * ((c & 2) ? fy : 1 - fy) * ((c & 4) ? fz : 1 - fz);
      if (w != 0.0) r += w * at(i, j, k);
    }
    return r;
  }
};

}  // namespace

PeriodicMedium load_gridded_medium(const std::string& path, double delta) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io, "cannot open gridded medium file " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kGridMagic, 8) != 0) fail(ErrorCode::io, "bad gridded medium header in " + path);
  std::int32_t dims[3];
  double rr[2];
  in.read(reinterpret_cast<char*>(dims), sizeof dims);
  in.read(reinterpret_cast<char*>(rr), sizeof rr);
  if (!in || dims[0] < 1 || dims[1] < 1 || dims[2] < 1 || !(rr[0] > 0.0))
    fail(ErrorCode::io, "bad gridded medium dimensions in " + path);
  const size_t n = static_cast<size_t>(dims[0]) * dims[1] * dims[2];
  auto eps = std::make_shared<Grid3>(Grid3{dims[0], dims[1], dims[2], rr[0], std::vector<Complex>(n)});
  auto mu = std::make_shared<Grid3>(*eps);
  in.read(reinterpret_cast<char*>(eps->v.data()), static_cast<std::streamsize>(n * sizeof(Complex)));
  in.read(reinterpret_cast<char*>(mu->v.data()), static_cast<std::streamsize>(n * sizeof(Complex)));
  if (!in) fail(ErrorCode::io, "truncated gridded medium data in " + path);
  PeriodicMedium m = make_constant_medium(rr[0], rr[1], delta);
  m.eps_r = [eps](double x1, double x2, double x3) { return eps->interpolate(x1, x2, x3); };
  m.mu_r = [mu](double x1, double x2, double x3) { return mu->interpolate(x1, x2, x3); };
  m.name = "gridded";
  return m;
}

void save_gridded_medium(const std::string& path, const PeriodicMedium& medium, int nx, int ny, int nz) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::io, "cannot write gridded medium file " + path);
  out.write(kGridMagic, 8);
  const std::int32_t dims[3] = {nx, ny, nz};
  const double rr[2] = {medium.R, medium.R0};
  out.write(reinterpret_cast<const char*>(dims), sizeof dims);
  out.write(reinterpret_cast<const char*>(rr), sizeof rr);
  for (int which = 0; which < 2; ++which)
    for (int k = 0; k < nz; ++k)
      for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
          const double x1 = -kPi + kTwoPi * (i + 0.5) / nx, x2 = -kPi + kTwoPi * (j + 0.5) / ny;
          const double x3 = medium.R * (k + 0.5) / nz;
          const Complex v = which == 0 ? medium.eps(x1, x2, x3) : medium.mu(x1, x2, x3);
          out.write(reinterpret_cast<const char*>(&v), sizeof v);
        }
  if (!out) fail(ErrorCode::io, "failed writing " + path);
}

}  // namespace qps
