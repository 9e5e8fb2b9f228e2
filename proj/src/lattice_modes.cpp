#include "qps/lattice_modes.hpp"

#include <algorithm>
#include <sstream>

namespace qps {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::config: return "config";
    case ErrorCode::cutoff: return "cutoff";
    case ErrorCode::aliasing: return "aliasing";
    case ErrorCode::singular: return "singular";
    case ErrorCode::not_converged: return "not_converged";
    case ErrorCode::io: return "io";
    case ErrorCode::assumption: return "assumption";
  }
  return "unknown";
}

WaveParameters WaveParameters::from_wavenumber(double k) {
  WaveParameters w;
  w.k = k;
  w.omega = k;
  w.eps_plus = 1.0;
  w.mu_plus = 1.0;
  w.validate();
  return w;
}

WaveParameters WaveParameters::from_material(double omega, double eps_plus, double mu_plus) {
  WaveParameters w;
  w.omega = omega;
  w.eps_plus = eps_plus;
  w.mu_plus = mu_plus;
  w.k = omega * std::sqrt(eps_plus * mu_plus);
  w.validate();
  return w;
}

void WaveParameters::validate() const {
  if (!(k > 0.0) || !(omega > 0.0) || !(eps_plus > 0.0) || !(mu_plus > 0.0))
    fail(ErrorCode::invalid_argument, "wave parameters must be positive");
  const double k2 = omega * omega * mu_plus * eps_plus;
  if (std::abs(k * k - k2) > 1e-12 * k2)
    fail(ErrorCode::invalid_argument, "k^2 must equal omega^2 mu_plus eps_plus");
}

QuasiPeriodicity::QuasiPeriodicity(Vec2 alpha) : alpha_(alpha) {
  if (!(std::abs(alpha.x) <= 0.5) || !(std::abs(alpha.y) <= 0.5)) {
    std::ostringstream os;
    os << "quasi-periodicity (" << alpha.x << ", " << alpha.y << ") outside [-1/2,1/2]^2";
    fail(ErrorCode::invalid_argument, os.str());
  }
}

Complex beta(double k, Vec2 a) {
  const double r = a.norm();
  const double b2 = (k - r) * (k + r);
  if (b2 >= 0.0) return {std::sqrt(b2), 0.0};
  return {0.0, std::sqrt(-b2)};
}

ModeSet::ModeSet(double k, const QuasiPeriodicity& alpha, int M) : k_(k), alpha_(alpha.alpha()), M_(M) {
  if (M < 0) fail(ErrorCode::invalid_argument, "mode truncation must be nonnegative");
  if (!(k > 0.0)) fail(ErrorCode::invalid_argument, "wavenumber must be positive");
  modes_.reserve(count(M));
  for (int j1 = -M; j1 <= M; ++j1)
    for (int j2 = -M; j2 <= M; ++j2) {
      modes_.push_back({j1, j2});
      const Vec2 a{alpha_.x + j1, alpha_.y + j2};
      alpha_j_.push_back(a);
      beta_j_.push_back(beta(k, a));
    }
}

int ModeSet::position(int M, LatticeIndex j) {
  if (std::abs(j.j1) > M || std::abs(j.j2) > M) return -1;
  return (j.j1 + M) * (2 * M + 1) + (j.j2 + M);
}

int ModeSet::position(LatticeIndex j) const { return position(M_, j); }

bool CutoffClassification::is_singular(int position) const {
  return std::find(singular_positions.begin(), singular_positions.end(), position) != singular_positions.end();
}

CutoffClassification singular_set(double k, const QuasiPeriodicity& alpha, int M, double cutoff_tol,
                                  double max_singular_fraction) {
  if (cutoff_tol < 0.0) fail(ErrorCode::invalid_argument, "cutoff tolerance must be nonnegative");
  const ModeSet modes(k, alpha, M);
  CutoffClassification c;
  c.cutoff_tol = cutoff_tol;
  c.distance.resize(modes.size());
  for (int m = 0; m < modes.size(); ++m) {
    const double d = std::abs(k - modes.alpha_j(m).norm());
    c.distance[m] = d;
    if (d < cutoff_tol || d == 0.0) {
      c.singular_modes.push_back(modes.mode(m));
      c.singular_positions.push_back(m);
    }
  }
  c.too_many_singular = static_cast<double>(c.singular_modes.size()) > max_singular_fraction * modes.size();
  const Vec2& a = alpha.alpha();
  c.touches_cell_boundary = !c.empty() && (std::abs(a.x) == 0.5 || std::abs(a.y) == 0.5);
  return c;
}

double cutoff_constant(double k, const QuasiPeriodicity& alpha, int M) {
  const ModeSet modes(k, alpha, M);
  double sup = 0.0;
  for (int m = 0; m < modes.size(); ++m) {
    const Vec2& a = modes.alpha_j(m);
    const double r = a.norm();
    const double gap = std::abs((k - r) * (k + r));
    if (gap == 0.0) fail(ErrorCode::cutoff, "cutoff constant undefined: a mode lies on the cutoff circle");
    sup = std::max(sup, std::sqrt(1.0 + r * r) / std::sqrt(gap));
  }
  return k * k / kTwoPi * sup;
}

}  // namespace qps
