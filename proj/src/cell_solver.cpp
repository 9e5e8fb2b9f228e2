#include "qps/cell_solver.hpp"

#include <algorithm>
#include <limits>
#include <random>

namespace qps {

namespace {

using Mat35 = Eigen::Matrix<Complex, 3, 5>;
using Mat55 = Eigen::Matrix<Complex, 5, 5>;

Mat35 curl_matrix(Vec2 a, double phi0, double phi1, double h) {
  const double d0 = -1.0 / h, d1 = 1.0 / h;
  Mat35 c = Mat35::Zero();
  c(0, 2) = -d0;
  c(0, 3) = -d1;
  c(0, 4) = -kI * a.y;
  c(1, 0) = d0;
  c(1, 1) = d1;
  c(1, 4) = kI * a.x;
  c(2, 0) = kI * a.y * phi0;
  c(2, 1) = kI * a.y * phi1;
  c(2, 2) = -kI * a.x * phi0;
  c(2, 3) = -kI * a.x * phi1;
  return c;
}

Mat35 value_matrix(double phi0, double phi1) {
  Mat35 v = Mat35::Zero();
  v(0, 0) = phi0;
  v(0, 1) = phi1;
  v(1, 2) = phi0;
  v(1, 3) = phi1;
  v(2, 4) = 1.0;
  return v;
}

struct LocalDof {
  int comp;
  int level;  // 0 means the fixed bottom node
};

constexpr LocalDof local_dof(int e, int l) {
  switch (l) {
    case 0: return {0, e};
    case 1: return {0, e + 1};
    case 2: return {1, e};
    case 3: return {1, e + 1};
    default: return {2, e + 1};
  }
}

}  // namespace

int CellOperator::local_index(int mode, int comp, int level) const {
  if (decoupled_) return (level - 1) * 3 + comp;
  return disc_.index(mode, comp, level);
}

CellOperator::CellOperator(const Discretization& disc, const MediumSamples& medium, double k, const QuasiPeriodicity& alpha,
                           const CutoffClassification& cls, const AssemblyOptions& opts)
    : disc_(disc), modes_(k, alpha, disc.M), cls_(cls), k_(k) {
  const int nm = modes_.size();
  const DepthQuadrature dq = disc.quadrature();
  if (static_cast<int>(medium.eps.size()) != dq.size())
    fail(ErrorCode::invalid_argument, "medium samples do not match the depth quadrature");
  const bool unit = opts.form == FormKind::gram;
  decoupled_ = unit || medium.homogeneous;
  if (!decoupled_ && medium.bandwidth < 2 * disc.M)
    fail(ErrorCode::aliasing, "medium bandwidth below 2M; mode products would be truncated");
  if (opts.form == FormKind::physical && opts.split_singular) {
    mult_ = make_multipliers(modes_, cls_);
  } else {
    CutoffClassification none = cls_;
    none.singular_modes.clear();
    none.singular_positions.clear();
    mult_ = make_multipliers(modes_, none);
  }

  const int level = 3 * nm;
  if (decoupled_) {
    blocks_.assign(nm, BandMatrix(3 * disc.N, 5, 5));
  } else {
    blocks_.assign(1, BandMatrix(disc.unknowns(), 2 * level - 1, 2 * level - 1));
  }

  Complex mass_scale{};
  double shift_mass = 0.0;
  switch (opts.form) {
    case FormKind::physical:
    case FormKind::physical_volume: mass_scale = -k * k; break;
    case FormKind::curl_only: break;
    case FormKind::coercive: shift_mass = opts.rho; break;
    case FormKind::gram: shift_mass = 1.0; break;
  }

  const double h = disc.h();
  std::vector<Mat35> C(nm);
  for (int g = 0; g < dq.size(); ++g) {
    const int e = dq.element[g];
    const double t = (dq.z[g] - disc.node(e)) / h;
    const double phi0 = 1.0 - t, phi1 = t, w = dq.w[g];
    const Mat35 V = value_matrix(phi0, phi1);
    const Mat55 VV = V.transpose() * V;
    for (int m = 0; m < nm; ++m) C[m] = curl_matrix(modes_.alpha_j(m), phi0, phi1, h);
    for (int m = 0; m < nm; ++m) {
      const LatticeIndex& pm = modes_.mode(m);
      for (int j = 0; j < nm; ++j) {
        if (decoupled_ && j != m) continue;
        const LatticeIndex& pj = modes_.mode(j);
        const int p1 = pm.j1 - pj.j1, p2 = pm.j2 - pj.j2;
        const Complex nu = unit ? Complex(m == j ? 1.0 : 0.0) : medium.nu[g](p1, p2);
        const Complex eps = unit ? Complex{} : medium.eps[g](p1, p2);
        const Complex cm = w * nu;
        const Complex mm = w * (mass_scale * eps + (m == j ? shift_mass : 0.0));
        if (cm == Complex{} && mm == Complex{}) continue;
        Mat55 B = Mat55::Zero();
        if (cm != Complex{}) B += cm * (C[m].adjoint() * C[j]);
        if (mm != Complex{}) B += mm * VV;
        BandMatrix& blk = blocks_[block_of(m)];
        for (int a = 0; a < 5; ++a) {
          const LocalDof ra = local_dof(e, a);
          if (ra.level == 0) continue;
          const int row = local_index(m, ra.comp, ra.level);
          for (int b = 0; b < 5; ++b) {
            const LocalDof cb = local_dof(e, b);
            if (cb.level == 0 || B(a, b) == Complex{}) continue;
            blk.add(row, local_index(j, cb.comp, cb.level), B(a, b));
          }
        }
      }
    }
  }

  const bool boundary = opts.form == FormKind::physical || opts.form == FormKind::coercive;
  if (!boundary) return;
  const double shift = opts.form == FormKind::coercive ? kTwoPi * cutoff_constant(k, alpha, disc.M) : 0.0;
  const int top = disc.N;
  for (int m = 0; m < nm; ++m) {
    Eigen::Matrix2cd b = mult_.n[m] - mult_.t[m] * Eigen::Matrix2cd::Identity();
    if (shift != 0.0) {
      const Vec2& a = modes_.alpha_j(m);
      b += (shift / std::sqrt(1.0 + a.dot(a))) * Eigen::Matrix2cd::Identity();
    }
    BandMatrix& blk = blocks_[block_of(m)];
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c)
        if (b(r, c) != Complex{}) blk.add(local_index(m, r, top), local_index(m, c, top), b(r, c));
  }
}

CVector CellOperator::apply(const CVector& u, bool adjoint) const {
  if (!decoupled_) return adjoint ? blocks_[0].apply_adjoint(u) : blocks_[0].apply(u);
  const int nm = modes_.size(), n = 3 * disc_.N;
  CVector y(u.size());
  CVector x(n);
  for (int m = 0; m < nm; ++m) {
    for (int l = 0; l < n; ++l) x(l) = u(disc_.index(m, l % 3, l / 3 + 1));
    const CVector ym = adjoint ? blocks_[m].apply_adjoint(x) : blocks_[m].apply(x);
    for (int l = 0; l < n; ++l) y(disc_.index(m, l % 3, l / 3 + 1)) = ym(l);
  }
  return y;
}

CMatrix CellOperator::dense() const {
  if (!decoupled_) return blocks_[0].dense();
  const int nm = modes_.size(), n = 3 * disc_.N;
  CMatrix a = CMatrix::Zero(disc_.unknowns(), disc_.unknowns());
  for (int m = 0; m < nm; ++m) {
    const CMatrix b = blocks_[m].dense();
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) a(disc_.index(m, r % 3, r / 3 + 1), disc_.index(m, c % 3, c / 3 + 1)) = b(r, c);
  }
  return a;
}

double CellOperator::norm1() const {
  double s = 0.0;
  for (const auto& b : blocks_) s = std::max(s, b.norm1());
  return s;
}

void CellOperator::factor() {
  if (factored()) return;
  lu_.reserve(blocks_.size());
  for (const auto& b : blocks_) lu_.emplace_back(b);
}

CVector CellOperator::solve(const CVector& rhs, bool adjoint) const {
  if (!factored()) fail(ErrorCode::invalid_argument, "cell operator is not factored");
  if (!decoupled_) return lu_[0].solve(rhs, adjoint);
  const int nm = modes_.size(), n = 3 * disc_.N;
  CVector y(rhs.size());
  CVector x(n);
  for (int m = 0; m < nm; ++m) {
    for (int l = 0; l < n; ++l) x(l) = rhs(disc_.index(m, l % 3, l / 3 + 1));
    lu_[m].solve_in_place(x, adjoint);
    for (int l = 0; l < n; ++l) y(disc_.index(m, l % 3, l / 3 + 1)) = x(l);
  }
  return y;
}

double CellOperator::condition_estimate() const {
  if (!factored()) fail(ErrorCode::invalid_argument, "cell operator is not factored");
  double anorm = 0.0, inv_norm = 0.0;
  for (const auto& lu : lu_) {
    anorm = std::max(anorm, lu.norm1());
    const double rc = lu.rcond();
    if (rc == 0.0) return std::numeric_limits<double>::infinity();
    inv_norm = std::max(inv_norm, 1.0 / (rc * lu.norm1()));
  }
  return anorm * inv_norm;
}

CellOperator CellOperator::with_update(const CMatrix& Z, const CVector& d) const {
  CellOperator out = *this;
  out.lu_.clear();
  const int level = disc_.level_size();
  for (Eigen::Index col = 0; col < Z.cols(); ++col) {
    std::vector<int> rows;
    for (Eigen::Index r = 0; r < Z.rows(); ++r)
      if (Z(r, col) != Complex{}) rows.push_back(static_cast<int>(r));
    for (int r : rows)
      for (int s : rows) {
        const int mr = (r % level) / 3, ms = (s % level) / 3;
        if (block_of(mr) != block_of(ms)) fail(ErrorCode::invalid_argument, "rank update couples decoupled blocks");
        out.blocks_[block_of(mr)].add(local_index(mr, r % 3, r / level + 1), local_index(ms, s % 3, s / level + 1),
                                      Z(r, col) * d(col) * std::conj(Z(s, col)));
      }
  }
  return out;
}

size_t CellOperator::factor_bytes() const {
  size_t s = 0;
  for (const auto& b : blocks_) s += b.storage().size() * sizeof(Complex) + b.size() * sizeof(int);
  return s;
}

CVector RankUpdate::d() const {
  CVector out(rank());
  for (int m = 0; m < rank(); ++m) {
    if (beta_j[m] == Complex{}) fail(ErrorCode::cutoff, "D entry undefined at exact cutoff");
    out(m) = -kI / (kTwoPi * beta_j[m]);
  }
  return out;
}

RankUpdate make_rank_update(const Discretization& disc, const ModeSet& modes, const CutoffClassification& cls) {
  RankUpdate u;
  const int r = static_cast<int>(cls.singular_positions.size());
  u.Z = CMatrix::Zero(disc.unknowns(), r);
  u.d_inv.resize(r);
  const double s = std::sqrt(kTwoPi);
  for (int c = 0; c < r; ++c) {
    const int m = cls.singular_positions[c];
    const Vec2 a = modes.alpha_j(m);
    u.positions.push_back(m);
    u.alpha_j.push_back(a);
    u.beta_j.push_back(modes.beta_j(m));
    u.Z(disc.index(m, 0, disc.N), c) = s * a.x;
    u.Z(disc.index(m, 1, disc.N), c) = s * a.y;
    u.d_inv(c) = kTwoPi * kI * modes.beta_j(m);
  }
  return u;
}

namespace {

void finish_solution(CellSolution& sol, const CellOperator& S) {
  const Discretization& disc = S.discretization();
  const ModeSet& modes = S.modes();
  sol.alpha = modes.alpha();
  sol.k = modes.k();
  sol.M = disc.M;
  const int nm = modes.size();
  sol.trace.resize(nm);
  sol.vertical_ratio.assign(nm, Complex{});
  for (int m = 0; m < nm; ++m) {
    sol.trace[m] = Eigen::Vector2cd(sol.coeffs(disc.index(m, 0, disc.N)), sol.coeffs(disc.index(m, 1, disc.N)));
    const Complex b = modes.beta_j(m);
    if (b != Complex{}) sol.vertical_ratio[m] = singular_functional(modes.alpha_j(m), sol.trace[m]) / b;
  }
}

}  // namespace

CellSolution solve_smw(const CellOperator& S, const RankUpdate& U, const CVector& rhs, bool adjoint) {
  const CVector d_inv = adjoint ? CVector(U.d_inv.conjugate()) : U.d_inv;
  const SmwResult r = smw_solve([&](const CVector& b) { return S.solve(b, adjoint); }, U.Z, d_inv, rhs);
  CellSolution sol;
  sol.coeffs = r.u;
  sol.core = r.core;
  sol.core_rcond = r.core_rcond;
  sol.singular_positions = U.positions;
  finish_solution(sol, S);
  const double s = std::sqrt(kTwoPi);
  for (int c = 0; c < U.rank(); ++c) {
    sol.singular_amplitude.push_back(s * kI * U.beta_j[c] * r.core(c));
    sol.vertical_ratio[U.positions[c]] = s * kI * r.core(c);
  }
  CVector res = S.apply(r.u, adjoint);
  if (U.rank() > 0) res += U.Z * r.core;
  res -= rhs;
  const double nr = rhs.norm();
  sol.residual = nr > 0.0 ? res.norm() / nr : res.norm();
  return sol;
}

CellSolution solve_direct(const CellOperator& S, const RankUpdate& U, const CVector& rhs) {
  CellOperator full = S.with_update(U.Z, U.d());
  full.factor();
  CellSolution sol;
  sol.coeffs = full.solve(rhs);
  sol.direct = true;
  sol.singular_positions = U.positions;
  finish_solution(sol, S);
  for (int c = 0; c < U.rank(); ++c)
    sol.singular_amplitude.push_back(singular_functional(U.alpha_j[c], sol.trace[U.positions[c]]));
  const CVector res = full.apply(sol.coeffs) - rhs;
  const double nr = rhs.norm();
  sol.residual = nr > 0.0 ? res.norm() / nr : res.norm();
  return sol;
}

CellProblem::CellProblem(const Discretization& disc, const MediumSamples& medium, double k, const QuasiPeriodicity& alpha,
                         double cutoff_tol)
    : op_(disc, medium, k, alpha, singular_set(k, alpha, disc.M, cutoff_tol)) {
  op_.factor();
  update_ = make_rank_update(disc, op_.modes(), op_.classification());
}

double divergence_residual(const Discretization& disc, const MediumSamples& medium, const CellSolution& u,
                           const ModalField& f, double k) {
  const DepthQuadrature dq = disc.quadrature();
  const ModeSet modes(u.k, QuasiPeriodicity(u.alpha), disc.M);
  const int nm = modes.size(), N = disc.N, nb = 2 * N - 1;
  const ModalField U = evaluate_modal(disc, u.coeffs, dq.z);
  const double h = disc.h();
  double total = 0.0;
  for (int m = 0; m < nm; ++m) {
    const Vec2 a = modes.alpha_j(m);
    CVector r = CVector::Zero(nb);
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(nb, nb);
    for (int g = 0; g < dq.size(); ++g) {
      const int e = dq.element[g];
      const double t = (dq.z[g] - disc.node(e)) / h, w = dq.w[g];
      Complex v[3];
      for (int c = 0; c < 3; ++c) {
        Complex s{};
        for (int j = 0; j < nm; ++j) {
          const Complex ce = medium.eps[g](modes.mode(m).j1 - modes.mode(j).j1, modes.mode(m).j2 - modes.mode(j).j2);
          if (ce != Complex{}) s += ce * U(j, g, c);
        }
        v[c] = s + f(m, g, c) / (k * k);
      }
      // local basis: hat at node e, hat at node e+1, bubble on e
      const double psi[3] = {1.0 - t, t, 4.0 * t * (1.0 - t)};
      const double dpsi[3] = {-1.0 / h, 1.0 / h, 4.0 * (1.0 - 2.0 * t) / h};
      const int idx[3] = {e >= 1 ? e - 1 : -1, e + 1 <= N - 1 ? e : -1, (N - 1) + e};
      for (int p = 0; p < 3; ++p) {
        if (idx[p] < 0) continue;
        r(idx[p]) -= w * (kI * a.x * psi[p] * v[0] + kI * a.y * psi[p] * v[1] + dpsi[p] * v[2]);
        for (int q = 0; q < 3; ++q) {
          if (idx[q] < 0) continue;
          G(idx[p], idx[q]) += w * (dpsi[p] * dpsi[q] + (1.0 + a.dot(a)) * psi[p] * psi[q]);
        }
      }
    }
    const Eigen::LLT<Eigen::MatrixXd> llt(G);
    const CVector y = llt.solve(r.real()).cast<Complex>() + kI * llt.solve(r.imag()).cast<Complex>();
    total += std::real(r.dot(y));
  }
  return std::sqrt(std::max(total, 0.0));
}

CoercivityReport coercivity_check(const Discretization& disc, const MediumSamples& medium, const QuasiPeriodicity& alpha,
                                  double k, double rho, int samples, unsigned seed) {
  CoercivityReport rep;
  rep.rho = rho;
  rep.cutoff_constant = cutoff_constant(k, alpha, disc.M);
  const CutoffClassification none = singular_set(k, alpha, disc.M, 0.0);
  if (!none.empty()) fail(ErrorCode::cutoff, "coercivity check requires alpha off the cutoff set");
  const CellOperator A(disc, medium, k, alpha, none, {FormKind::coercive, false, rho});
  const CellOperator G(disc, medium, k, alpha, none, {FormKind::gram, false, 0.0});
  const CMatrix a = A.dense();
  const CMatrix herm = 0.5 * (a + a.adjoint());
  const CMatrix gram = G.dense();
  Eigen::GeneralizedSelfAdjointEigenSolver<CMatrix> es(herm, gram, Eigen::EigenvaluesOnly);
  rep.min_eigenvalue = es.eigenvalues().minCoeff();

  std::mt19937 rng(seed);
  std::normal_distribution<double> nd;
  rep.min_rayleigh_sample = std::numeric_limits<double>::infinity();
  const int n = disc.unknowns();
  for (int s = 0; s < samples; ++s) {
    CVector u(n);
    for (int i = 0; i < n; ++i) u(i) = Complex(nd(rng), nd(rng));
    const double num = std::real(u.dot(a * u)), den = std::real(u.dot(gram * u));
    rep.min_rayleigh_sample = std::min(rep.min_rayleigh_sample, num / den);
  }

  const ModeSet& modes = A.modes();
  const DtnMultipliers& mult = A.multipliers();
  const double cc = kTwoPi * rep.cutoff_constant;
  rep.min_boundary_margin = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    TraceCoefficients phi(modes.size());
    for (auto& p : phi) p = Eigen::Vector2cd(Complex(nd(rng), nd(rng)), Complex(nd(rng), nd(rng)));
    const Complex nt = trace_pairing(n_apply_full(mult, phi), phi) - trace_pairing(t_apply(mult, phi), phi);
    const double norm = hminus_half_norm_sq(modes, phi);
    rep.min_boundary_margin = std::min(rep.min_boundary_margin, (nt.real() + cc * norm) / norm);
  }
  rep.boundary_bound_holds = rep.min_boundary_margin >= -1e-12;
  rep.coercive = rep.min_eigenvalue > 0.0;
  return rep;
}

EnergyReport energy_identity_check(const CellOperator& S, const RankUpdate& U, const CellSolution& u, const CVector& rhs,
                                   const MediumSamples& medium) {
  EnergyReport rep;
  const ModeSet& modes = S.modes();
  const CVector& x = u.coeffs;
  const bool stable = u.core.size() == U.rank() && !u.direct;
  Complex a = x.dot(S.apply(x));
  Complex rank_part{};
  std::vector<Complex> n_sing(U.rank());
  for (int c = 0; c < U.rank(); ++c) {
    Complex v;
    if (stable) {
      v = -kI * kTwoPi * std::conj(U.beta_j[c]) * std::norm(u.core(c));
    } else {
      const Complex l = singular_functional(U.alpha_j[c], u.trace[U.positions[c]]);
      v = -kI * std::norm(l) / U.beta_j[c];
    }
    n_sing[c] = v;
    rank_part += v;
  }
  if (!u.direct) a += rank_part;
  rep.im_a = a.imag();
  rep.source_work = rhs.dot(x);

  const CellOperator vol(S.discretization(), medium, S.k(), QuasiPeriodicity(modes.alpha()), S.classification(),
                         {FormKind::physical_volume, true, 0.0});
  rep.absorption = -std::imag(x.dot(vol.apply(x)));

  Complex tsum{}, nsum{};
  for (int m = 0; m < modes.size(); ++m) {
    const Complex b = modes.beta_j(m);
    const Eigen::Vector2cd& p = u.trace[m];
    tsum += kI * b * p.squaredNorm();
    auto it = std::find(U.positions.begin(), U.positions.end(), m);
    Complex nterm;
    if (it != U.positions.end()) {
      nterm = n_sing[it - U.positions.begin()];
    } else {
      nterm = -kI * std::norm(singular_functional(modes.alpha_j(m), p)) / b;
    }
    nsum += nterm;
    if (b.imag() == 0.0 && b.real() > 0.0) rep.flux += b.real() * p.squaredNorm() - nterm.imag();
  }
  rep.t_real = tsum.real();
  rep.t_imag = tsum.imag();
  rep.n_real = nsum.real();
  rep.n_imag = nsum.imag();
  const double scale = 1e-12 * std::max(1.0, x.squaredNorm());
  rep.signs_ok = rep.t_real <= scale && rep.t_imag >= -scale && rep.n_real <= scale && rep.n_imag <= scale;
  rep.mismatch = std::abs(rep.source_work.imag() - rep.flux - rep.absorption);
  return rep;
}

}  // namespace qps
