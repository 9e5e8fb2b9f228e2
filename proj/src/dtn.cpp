#include "qps/dtn.hpp"

namespace qps {

DtnMultipliers make_multipliers(const ModeSet& modes, const CutoffClassification& cls) {
  DtnMultipliers m;
  const int nm = modes.size();
  m.t.resize(nm);
  m.n.resize(nm);
  m.singular.resize(nm);
  m.alpha_j.resize(nm);
  m.beta_j.resize(nm);
  for (int j = 0; j < nm; ++j) {
    const Vec2 a = modes.alpha_j(j);
    const Complex b = modes.beta_j(j);
    m.alpha_j[j] = a;
    m.beta_j[j] = b;
    m.t[j] = kI * b;
    m.singular[j] = cls.is_singular(j);
    if (m.singular[j]) {
      m.n[j].setZero();
      continue;
    }
    if (b == Complex{}) fail(ErrorCode::cutoff, "mode at exact cutoff was not excluded from the regular boundary term");
    Eigen::Vector2cd av(a.x, a.y);
    m.n[j] = (-kI / b) * (av * av.transpose());
  }
  return m;
}

TraceCoefficients t_apply(const DtnMultipliers& mult, const TraceCoefficients& phi) {
  TraceCoefficients r(phi.size());
  for (size_t j = 0; j < phi.size(); ++j) r[j] = mult.t[j] * phi[j];
  return r;
}

TraceCoefficients n_apply_regular(const DtnMultipliers& mult, const TraceCoefficients& phi) {
  TraceCoefficients r(phi.size());
  for (size_t j = 0; j < phi.size(); ++j) r[j] = mult.n[j] * phi[j];
  return r;
}

TraceCoefficients n_apply_full(const DtnMultipliers& mult, const TraceCoefficients& phi) {
  TraceCoefficients r(phi.size());
  for (size_t j = 0; j < phi.size(); ++j) {
    const Complex b = mult.beta_j[j];
    if (b == Complex{}) fail(ErrorCode::cutoff, "N multiplier undefined at cutoff");
    const Vec2 a = mult.alpha_j[j];
    const Complex l = a.x * phi[j](0) + a.y * phi[j](1);
    r[j] = Eigen::Vector2cd(a.x, a.y) * (-kI * l / b);
  }
  return r;
}

Complex singular_functional(Vec2 alpha_j, const Eigen::Vector2cd& u_j) { return alpha_j.x * u_j(0) + alpha_j.y * u_j(1); }

CVector d_matrix(double k, const std::vector<Vec2>& singular_alpha_j) {
  CVector d(singular_alpha_j.size());
  for (size_t m = 0; m < singular_alpha_j.size(); ++m) {
    const Complex b = beta(k, singular_alpha_j[m]);
    if (b == Complex{}) fail(ErrorCode::cutoff, "D matrix entry undefined at exact cutoff; use the limit form");
    d(m) = -kI / (kTwoPi * b);
  }
  return d;
}

CVector d_inverse(double k, const std::vector<Vec2>& singular_alpha_j) {
  CVector d(singular_alpha_j.size());
  for (size_t m = 0; m < singular_alpha_j.size(); ++m) d(m) = kTwoPi * kI * beta(k, singular_alpha_j[m]);
  return d;
}

ContinuousMultipliers continuous_multipliers(double k, Vec2 xi) {
  const Complex b = beta(k, xi);
  if (b == Complex{}) fail(ErrorCode::cutoff, "continuous multipliers undefined on |xi| = k");
  Eigen::Vector2cd v(xi.x, xi.y);
  return {kI * b, (-kI / b) * (v * v.transpose())};
}

Complex trace_pairing(const TraceCoefficients& a, const TraceCoefficients& b) {
  Complex s{};
  for (size_t j = 0; j < a.size(); ++j) s += b[j].dot(a[j]);
  return s;
}

double hminus_half_norm_sq(const ModeSet& modes, const TraceCoefficients& phi) {
  double s = 0.0;
  for (int j = 0; j < modes.size(); ++j) {
    const Vec2& a = modes.alpha_j(j);
    s += phi[j].squaredNorm() / std::sqrt(1.0 + a.dot(a));
  }
  return s;
}

}  // namespace qps
