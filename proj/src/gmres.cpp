#include "qps/gmres.hpp"

namespace qps {

GmresResult gmres(const std::function<CVector(const CVector&)>& apply, const CVector& b, const GmresOptions& opts) {
  GmresResult res;
  const Eigen::Index n = b.size();
  res.x = CVector::Zero(n);
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    res.converged = true;
    return res;
  }
  const int m = std::max(1, opts.restart);
  CVector r = b;
  while (res.iterations < opts.max_iter) {
    const double beta = r.norm();
    std::vector<CVector> V;
    V.push_back(r / beta);
    CMatrix H = CMatrix::Zero(m + 1, m);
    std::vector<Complex> cs(m), sn(m);
    CVector g = CVector::Zero(m + 1);
    g(0) = beta;
    int j = 0;
    bool done = false;
    for (; j < m && res.iterations < opts.max_iter; ++j) {
      CVector w = apply(V[j]);
      for (int i = 0; i <= j; ++i) {
        H(i, j) = V[i].dot(w);
        w -= H(i, j) * V[i];
      }
      const double hn = w.norm();
      H(j + 1, j) = hn;
      for (int i = 0; i < j; ++i) {
        const Complex t = std::conj(cs[i]) * H(i, j) + std::conj(sn[i]) * H(i + 1, j);
        H(i + 1, j) = -sn[i] * H(i, j) + cs[i] * H(i + 1, j);
        H(i, j) = t;
      }
      const double d = std::hypot(std::abs(H(j, j)), hn);
      if (d == 0.0) {
        res.breakdown = true;
        done = true;
        break;
      }
      cs[j] = H(j, j) / d;
      sn[j] = hn / d;
      H(j, j) = d;
      H(j + 1, j) = 0.0;
      g(j + 1) = -sn[j] * g(j);
      g(j) = std::conj(cs[j]) * g(j);
      ++res.iterations;
      const double rel = std::abs(g(j + 1)) / bnorm;
      res.history.push_back(rel);
      if (rel <= opts.tol) {
        ++j;
        res.converged = true;
        done = true;
        break;
      }
      if (hn <= 1e-14 * beta) {
        ++j;
        res.breakdown = true;
        done = true;
        break;
      }
      V.push_back(w / hn);
    }
    if (j > 0) {
      const CVector y = H.topLeftCorner(j, j).triangularView<Eigen::Upper>().solve(g.head(j));
      for (int i = 0; i < j; ++i) res.x += y(i) * V[i];
    }
    if (done) break;
    r = b - apply(res.x);
  }
  return res;
}

}  // namespace qps
