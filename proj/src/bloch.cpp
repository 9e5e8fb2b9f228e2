#include "qps/bloch.hpp"

#include <algorithm>

namespace qps {

CVector bloch_forward(const CellIndexedField& f, Vec2 alpha) {
  if (f.cells.empty()) return {};
  CVector out = CVector::Zero(f.cells.begin()->second.size());
  for (const auto& [j, v] : f.cells) {
    if (v.size() != out.size()) fail(ErrorCode::invalid_argument, "cell fields must share one sample layout");
    out += bloch_phase(alpha, j) * v;
  }
  return out;
}

Complex bloch_forward_at(const std::function<Complex(double, double, double)>& f,
                         const std::vector<LatticeIndex>& support, Vec2 alpha, Vec3 x) {
  // x lies in cell c; the term j samples x + 2 pi j, which lies in cell c + j.
  const int c1 = static_cast<int>(std::floor((x.x + kPi) / kTwoPi));
  const int c2 = static_cast<int>(std::floor((x.y + kPi) / kTwoPi));
  Complex s{};
  for (const auto& cell : support) {
    const LatticeIndex j{cell.j1 - c1, cell.j2 - c2};
    s += f(x.x + kTwoPi * j.j1, x.y + kTwoPi * j.j2, x.z) * bloch_phase(alpha, j);
  }
  return s;
}

std::vector<QuadraturePoint> gauss_legendre(int n) {
  if (n < 1) fail(ErrorCode::invalid_argument, "Gauss rule needs at least one point");
  // Returns P_n(x) and P_n'(x).
  auto legendre = [n](double x) {
    double p0 = 1.0, p1 = x;
    for (int m = 2; m <= n; ++m) {
      const double p2 = ((2.0 * m - 1.0) * x * p1 - (m - 1.0) * p0) / m;
      p0 = p1;
      p1 = p2;
    }
    return std::pair{p1, n * (x * p1 - p0) / (x * x - 1.0)};
  };
  std::vector<QuadraturePoint> r(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre(x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r[i] = {-x, w};
    r[n - 1 - i] = {x, w};
  }
  if (n % 2 == 1) r[n / 2].x = 0.0;
  return r;
}

namespace {

void add_panel(std::vector<QuadraturePoint>& out, double a, double b, const std::vector<QuadraturePoint>& g) {
  const double h = 0.5 * (b - a);
  for (const auto& p : g) out.push_back({a + h * (p.x + 1.0), h * p.w});
}

}  // namespace

std::vector<QuadraturePoint> graded_rule_1d(double a, double b, int n_panels, const std::vector<double>& singular_points,
                                            int levels, int order) {
  if (n_panels < 1 || !(b > a)) fail(ErrorCode::invalid_argument, "graded rule needs a nonempty interval");
  const auto g = gauss_legendre(order);
  std::vector<QuadraturePoint> out;
  const double h = (b - a) / n_panels;
  for (int i = 0; i < n_panels; ++i) {
    double lo = a + i * h, hi = (i + 1 == n_panels) ? b : a + (i + 1) * h;
    auto touches = [&](double l, double r) {
      return std::any_of(singular_points.begin(), singular_points.end(), [&](double s) { return s >= l && s <= r; });
    };
    // Split toward each singular point inside the panel.
    std::vector<std::pair<double, double>> todo{{lo, hi}};
    for (int lev = 0; lev < levels; ++lev) {
      std::vector<std::pair<double, double>> next;
      for (auto [l, r] : todo) {
        if (!touches(l, r)) {
          add_panel(out, l, r, g);
          continue;
        }
        const double m = 0.5 * (l + r);
        next.push_back({l, m});
        next.push_back({m, r});
      }
      todo.swap(next);
    }
    for (auto [l, r] : todo) add_panel(out, l, r, g);
  }
  return out;
}

double AlphaQuadrature::weight_sum() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

namespace {

bool panel_meets_circle(double x0, double x1, double y0, double y1, const CutoffArc& c, double band) {
  const double dx = std::max({x0 - c.center.x, 0.0, c.center.x - x1});
  const double dy = std::max({y0 - c.center.y, 0.0, c.center.y - y1});
  const double dmin = std::hypot(dx, dy);
  const double fx = std::max(std::abs(x0 - c.center.x), std::abs(x1 - c.center.x));
  const double fy = std::max(std::abs(y0 - c.center.y), std::abs(y1 - c.center.y));
  const double dmax = std::hypot(fx, fy);
  return dmin <= c.radius + band && dmax >= c.radius - band;
}

struct Builder {
  const std::vector<CutoffArc>& arcs;
  const QuadratureOptions& opts;
  std::vector<QuadraturePoint> g_base, g_ref;
  AlphaQuadrature& q;

  void panel(double x0, double x1, double y0, double y1, int level) {
    bool hit = false;
    for (const auto& c : arcs)
      if (panel_meets_circle(x0, x1, y0, y1, c, opts.cutoff_tol)) {
        hit = true;
        break;
      }
    if (hit && level < opts.levels) {
      const double xm = 0.5 * (x0 + x1), ym = 0.5 * (y0 + y1);
      panel(x0, xm, y0, ym, level + 1);
      panel(x0, xm, ym, y1, level + 1);
      panel(xm, x1, y0, ym, level + 1);
      panel(xm, x1, ym, y1, level + 1);
      return;
    }
    ++q.leaves_per_level[level];
    const auto& g = level == 0 ? g_base : g_ref;
    const double hx = 0.5 * (x1 - x0), hy = 0.5 * (y1 - y0);
    for (const auto& a : g)
      for (const auto& b : g) {
        q.nodes.push_back({x0 + hx * (a.x + 1.0), y0 + hy * (b.x + 1.0)});
        q.weights.push_back(hx * hy * a.w * b.w);
      }
  }
};

}  // namespace

AlphaQuadrature build_alpha_quadrature(double k, int M, const QuadratureOptions& opts) {
  if (opts.n_base < 2) fail(ErrorCode::invalid_argument, "quadrature needs n_base >= 2");
  if (opts.order < 1 || opts.refined_order < 1 || opts.levels < 0)
    fail(ErrorCode::invalid_argument, "invalid quadrature order or grading levels");
  AlphaQuadrature q;
  q.options = opts;
  q.k = k;
  q.M = M;
  q.leaves_per_level.assign(opts.levels + 1, 0);
  for (int j1 = -M; j1 <= M; ++j1)
    for (int j2 = -M; j2 <= M; ++j2) {
      CutoffArc c{{j1, j2}, {static_cast<double>(-j1), static_cast<double>(-j2)}, k};
      if (panel_meets_circle(-0.5, 0.5, -0.5, 0.5, c, opts.cutoff_tol)) q.arcs.push_back(c);
    }
  Builder b{q.arcs, opts, gauss_legendre(opts.order), gauss_legendre(opts.refined_order), q};
  const double h = 1.0 / opts.n_base;
  for (int i = 0; i < opts.n_base; ++i)
    for (int j = 0; j < opts.n_base; ++j) b.panel(-0.5 + i * h, -0.5 + (i + 1) * h, -0.5 + j * h, -0.5 + (j + 1) * h, 0);
  if (opts.cutoff_tol > 0.0) {
    for (auto& a : q.nodes) {
      for (const auto& c : q.arcs) {
        const Vec2 d = a - c.center;
        const double r = d.norm();
        if (std::abs(r - c.radius) >= opts.cutoff_tol || r == 0.0) continue;
        const double target = r >= c.radius ? c.radius + 1.001 * opts.cutoff_tol : c.radius - 1.001 * opts.cutoff_tol;
        a = c.center + d * (target / r);
        a.x = std::clamp(a.x, -0.5, 0.5);
        a.y = std::clamp(a.y, -0.5, 0.5);
        ++q.moved_nodes;
      }
    }
  }
  return q;
}

CVector bloch_inverse(const std::vector<CVector>& family, const AlphaQuadrature& quad, LatticeIndex target) {
  if (family.size() != quad.nodes.size()) fail(ErrorCode::invalid_argument, "family does not match the quadrature");
  if (family.empty()) return {};
  CVector out = CVector::Zero(family.front().size());
  for (size_t q = 0; q < family.size(); ++q) out += (quad.weights[q] * std::conj(bloch_phase(quad.nodes[q], target))) * family[q];
  return out;
}

}  // namespace qps
