#include "qps/oracles.hpp"

#include "qps/bloch.hpp"
#include "qps/smw.hpp"

#include <cstdio>
#include <random>
#include <sstream>

namespace qps {

std::string digest(const std::string& text) {
  // FNV-1a, 64 bit
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

OracleReport dense_smw_oracle(int n, int rank, unsigned seed, double tolerance) {
  OracleReport rep;
  rep.name = "dense_smw";
  std::ostringstream in;
  in << "n=" << n << " rank=" << rank << " seed=" << seed;
  rep.inputs_digest = digest(in.str());
  rep.tolerance = tolerance;
  std::mt19937 rng(seed);
  std::normal_distribution<double> nd;
  auto rnd = [&] { return Complex(nd(rng), nd(rng)); };
  CMatrix S(n, n), Z(n, rank);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) S(i, j) = rnd();
  for (int i = 0; i < n; ++i) S(i, i) += 4.0 * n;  // diagonal dominance
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < rank; ++j) Z(i, j) = rnd();
  CVector d(rank), rhs(n);
  for (int j = 0; j < rank; ++j) d(j) = rnd();
  for (int i = 0; i < n; ++i) rhs(i) = rnd();
  for (int j = 0; j < rank; ++j)
    if (std::abs(d(j)) < 1e-3) {
      rep.skipped = true;
      rep.note = "diagonal entry of D too small to invert";
      return rep;
    }
  const CMatrix B = S + Z * d.asDiagonal() * Z.adjoint();
  Eigen::FullPivLU<CMatrix> full(B);
  if (!full.isInvertible()) {
    rep.skipped = true;
    rep.note = "S + Z D Z^H is singular";
    return rep;
  }
  const CVector ref = full.solve(rhs);
  SmwResult r;
  try {
    r = smw_solve_dense(S, Z, d.cwiseInverse(), rhs);
  } catch (const Error& e) {
    rep.skipped = true;
    rep.note = e.what();
    return rep;
  }
  for (int i = 0; i < n; ++i) {
    rep.reference.push_back(std::abs(ref(i)));
    rep.candidate.push_back(std::abs(r.u(i)));
  }
  rep.discrepancy = (r.u - ref).norm() / ref.norm();
  rep.passed = rep.discrepancy <= tolerance;
  return rep;
}

AffineFit affine_fit(const std::vector<Complex>& s, const std::vector<CVector>& u) {
  AffineFit fit;
  const int n = static_cast<int>(s.size());
  if (n < 2 || static_cast<int>(u.size()) != n) fail(ErrorCode::invalid_argument, "affine fit needs matching samples");
  CMatrix A(n, 2);
  for (int i = 0; i < n; ++i) {
    A(i, 0) = 1.0;
    A(i, 1) = s[i];
  }
  const Eigen::Index dim = u.front().size();
  CMatrix Y(n, dim);
  for (int i = 0; i < n; ++i) Y.row(i) = u[i].transpose();
  Eigen::ColPivHouseholderQR<CMatrix> qr(A);
  qr.setThreshold(1e-14);
  fit.rank_deficient = qr.rank() < 2;
  const CMatrix X = qr.solve(Y);
  fit.a = X.row(0).transpose();
  fit.b = X.row(1).transpose();
  const double ny = Y.norm();
  fit.relative_residual = ny > 0.0 ? (A * X - Y).norm() / ny : 0.0;
  return fit;
}

OracleReport sqrt_fit_oracle(const std::vector<double>& t, const std::vector<CVector>& u, double tolerance) {
  OracleReport rep;
  rep.name = "sqrt_fit";
  std::ostringstream in;
  in.precision(17);
  for (double x : t) in << x << ",";
  rep.inputs_digest = digest(in.str());
  rep.tolerance = tolerance;
  std::vector<double> sorted = t;
  std::sort(sorted.begin(), sorted.end());
  const bool distinct = std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
  if (t.size() < 4 || !distinct) {
    rep.skipped = true;
    rep.note = "rank deficient: need at least 4 distinct offsets";
    return rep;
  }
  std::vector<Complex> s;
  for (double x : t) s.emplace_back(std::sqrt(x));
  const AffineFit fit = affine_fit(s, u);
  if (fit.rank_deficient) {
    rep.skipped = true;
    rep.note = "rank deficient offsets";
    return rep;
  }
  for (Eigen::Index i = 0; i < fit.a.size(); ++i) {
    rep.candidate.push_back(fit.a(i).real());
    rep.candidate.push_back(fit.b(i).real());
  }
  rep.discrepancy = fit.relative_residual;
  rep.passed = rep.discrepancy <= tolerance;
  return rep;
}

namespace {

// Quintic smoothstep on [0, L] and its first two derivatives.
struct Smoothstep {
  double L;
  std::array<double, 3> operator()(double z) const {
    if (z >= L) return {1.0, 0.0, 0.0};
    if (z <= 0.0) return {0.0, 0.0, 0.0};
    const double t = z / L;
    return {t * t * t * (10.0 + t * (-15.0 + 6.0 * t)), 30.0 * t * t * (1.0 - t) * (1.0 - t) / L,
            60.0 * t * (1.0 - t) * (1.0 - 2.0 * t) / (L * L)};
  }
};

// E = (G, 0, (a1 / beta) G) e^{-i a.x}, G = s(z) e^{i beta z}; returns (field, load) components.
struct OutgoingMode {
  double k;
  Vec2 a;
  Smoothstep s;
  Complex amplitude;

  Field3 field(double z) const {
    const Complex b = beta(k, a);
    const Complex G = amplitude * s(z)[0] * std::exp(kI * b * z);
    return {G, 0.0, a.x / b * G};
  }

  Field3 load(double z) const {
    const Complex b = beta(k, a), e = amplitude * std::exp(kI * b * z), g = a.x / b;
    const auto [s0, s1, s2] = s(z);
    const Complex G = s0 * e, G1 = (s1 + kI * b * s0) * e, G2 = (s2 + 2.0 * kI * b * s1 - b * b * s0) * e;
    const Complex f1 = a.y * a.y * G - G2 - kI * a.x * g * G1 - k * k * G;
    const Complex f2 = -kI * a.y * g * G1 - a.x * a.y * G;
    const Complex f3 = -kI * a.x * G1 - a.x * b * G;
    return {f1, f2, f3};
  }
};

}  // namespace

ManufacturedCase manufactured_case(const std::string& name, const ManufacturedOptions& opts) {
  ManufacturedCase mc;
  mc.name = name;
  mc.k = opts.k;
  mc.alpha = opts.alpha;
  const double L = opts.R - opts.delta;
  if (!(L > 0.0)) fail(ErrorCode::invalid_argument, "manufactured case needs R > delta");
  mc.medium = make_constant_medium(opts.R, opts.R, opts.delta);
  const double k = opts.k;
  const Vec2 alpha = opts.alpha;
  if (name == "outgoing_mode" || name == "two_mode_superposition") {
    std::vector<std::pair<LatticeIndex, OutgoingMode>> parts;
    parts.push_back({{0, 0}, OutgoingMode{k, alpha, {L}, 1.0}});
    if (name == "two_mode_superposition") {
      parts.push_back({{1, 0}, OutgoingMode{k, alpha + Vec2{1.0, 0.0}, {L}, Complex(0.5, 0.25)}});
      mc.min_modes = 1;
    }
    for (const auto& p : parts)
      if (beta(k, p.second.a) == Complex{}) fail(ErrorCode::cutoff, "manufactured mode sits at cutoff");
    mc.exact = [parts](LatticeIndex j, double z) -> Field3 {
      for (const auto& p : parts)
        if (p.first == j) return p.second.field(z);
      return {};
    };
    mc.load = [parts](LatticeIndex j, double z) -> Field3 {
      for (const auto& p : parts)
        if (p.first == j) return p.second.load(z);
      return {};
    };
  } else if (name == "gradient_null_test") {
    // w = phi(z) e^{-i alpha.x}, phi = 64 (t (1 - t))^3 on [0, L], zero above.
    auto phi = [L](double z) -> std::array<double, 2> {
      if (z <= 0.0 || z >= L) return {0.0, 0.0};
      const double t = z / L, q = t * (1.0 - t);
      return {64.0 * q * q * q, 192.0 * q * q * (1.0 - 2.0 * t) / L};
    };
    mc.exact = [phi, alpha](LatticeIndex j, double z) -> Field3 {
      if (!(j == LatticeIndex{0, 0})) return {};
      const auto [p, dp] = phi(z);
      return {-kI * alpha.x * p, -kI * alpha.y * p, dp};
    };
    mc.load = [phi, alpha, k](LatticeIndex j, double z) -> Field3 {
      if (!(j == LatticeIndex{0, 0})) return {};
      const auto [p, dp] = phi(z);
      return {k * k * kI * alpha.x * p, k * k * kI * alpha.y * p, -k * k * dp};
    };
  } else {
    fail(ErrorCode::invalid_argument, "unknown manufactured case '" + name + "'");
  }
  return mc;
}

ModalField ManufacturedCase::load_samples(const Discretization& disc) const {
  const DepthQuadrature dq = disc.quadrature();
  const ModeSet modes(k, QuasiPeriodicity(alpha), disc.M);
  ModalField f(modes.size(), dq.size());
  for (int m = 0; m < modes.size(); ++m)
    for (int g = 0; g < dq.size(); ++g) {
      const Field3 v = load(modes.mode(m), dq.z[g]);
      for (int c = 0; c < 3; ++c) f(m, g, c) = v[c];
    }
  return f;
}

ModalField ManufacturedCase::exact_samples(const Discretization& disc, const std::vector<double>& z) const {
  const ModeSet modes(k, QuasiPeriodicity(alpha), disc.M);
  ModalField f(modes.size(), static_cast<int>(z.size()));
  for (int m = 0; m < modes.size(); ++m)
    for (size_t g = 0; g < z.size(); ++g) {
      const Field3 v = exact(modes.mode(m), z[g]);
      for (int c = 0; c < 3; ++c) f(m, static_cast<int>(g), c) = v[c];
    }
  return f;
}

double ManufacturedCase::relative_l2_error(const Discretization& disc, const CVector& coeffs) const {
  const auto g5 = gauss_legendre(5);
  std::vector<double> z, w;
  const double h = disc.h();
  for (int e = 0; e < disc.N; ++e)
    for (const auto& p : g5) {
      z.push_back(disc.node(e) + 0.5 * h * (p.x + 1.0));
      w.push_back(0.5 * h * p.w);
    }
  const ModalField uh = evaluate_modal(disc, coeffs, z);
  const ModalField ue = exact_samples(disc, z);
  double err = 0.0, ref = 0.0;
  for (int m = 0; m < uh.modes(); ++m)
    for (size_t g = 0; g < z.size(); ++g)
      for (int c = 0; c < 3; ++c) {
        const int gi = static_cast<int>(g);
        err += w[g] * std::norm(uh(m, gi, c) - ue(m, gi, c));
        ref += w[g] * std::norm(ue(m, gi, c));
      }
  return std::sqrt(err / ref);
}

}  // namespace qps
