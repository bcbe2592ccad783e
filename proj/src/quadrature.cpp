#include "twodisk/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>

namespace twodisk {

namespace {

bool valid_gauss_size(int n) {
  return n == 2 || n == 4 || n == 8 || n == 16 || n == 32 || n == 64;
}

template <int N>
void gauss_fill(double a, double b, std::vector<double>& x, std::vector<double>& w) {
  using G = boost::math::quadrature::gauss<double, N>;
  const auto& xs = G::abscissa();  // nonnegative half, xs[0] = 0 for odd N
  const auto& ws = G::weights();
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  x.clear();
  w.clear();
  for (size_t i = xs.size(); i-- > 0;) {
    if (xs[i] == 0.0) continue;
    x.push_back(mid - half * xs[i]);
    w.push_back(half * ws[i]);
  }
  for (size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] == 0.0) {
      x.push_back(mid);
      w.push_back(half * ws[i]);
      continue;
    }
    x.push_back(mid + half * xs[i]);
    w.push_back(half * ws[i]);
  }
}

}  // namespace

void QuadratureGrid::validate() const {
  if (!valid_gauss_size(n_r) || !valid_gauss_size(near_n_r) || !valid_gauss_size(cell_gauss))
    throw Error(Status::invalid_argument, "radial Gauss sizes must be one of {2,4,8,16,32,64}");
  if (n_r < 8) throw Error(Status::invalid_argument, "n_r must be at least 8");
  if (n_theta < 8 || near_n_theta < 8)
    throw Error(Status::invalid_argument, "angular rule needs at least 8 points");
  if (max_depth < 2 || max_depth > 14)
    throw Error(Status::invalid_argument, "quadtree depth must lie in [2, 14]");
}

void gauss_legendre(int n, double a, double b, std::vector<double>& x, std::vector<double>& w) {
  switch (n) {
    case 2: gauss_fill<2>(a, b, x, w); return;
    case 4: gauss_fill<4>(a, b, x, w); return;
    case 8: gauss_fill<8>(a, b, x, w); return;
    case 16: gauss_fill<16>(a, b, x, w); return;
    case 32: gauss_fill<32>(a, b, x, w); return;
    case 64: gauss_fill<64>(a, b, x, w); return;
    default:
      throw Error(Status::invalid_argument, "unsupported Gauss-Legendre size");
  }
}

std::vector<QuadNode> disk_rule(const Disk& d, int n_r, int n_theta) {
  std::vector<double> rx, rw;
  gauss_legendre(n_r, 0.0, d.radius, rx, rw);
  std::vector<QuadNode> nodes;
  nodes.reserve(static_cast<size_t>(n_r) * n_theta);
  const double dth = 2.0 * M_PI / n_theta;
  for (int it = 0; it < n_theta; ++it) {
    double th = dth * it;
    double cth = std::cos(th), sth = std::sin(th);
    for (int ir = 0; ir < n_r; ++ir) {
      QuadNode nd;
      nd.y = d.center + Vec2{rx[ir] * cth, rx[ir] * sth};
      nd.w = rw[ir] * rx[ir] * dth;
      nodes.push_back(nd);
    }
  }
  return nodes;
}

std::vector<QuadNode> polar_rule_at(Vec2 x, const Disk& d, int n_r, int n_theta) {
  std::vector<QuadNode> nodes;
  Vec2 u = x - d.center;
  double dist = u.norm();
  std::vector<double> gx, gw;
  if (dist < d.radius) {
    // full angular sweep; ray length solves |u + R e(th)| = radius
    const double dth = 2.0 * M_PI / n_theta;
    nodes.reserve(static_cast<size_t>(n_r) * n_theta);
    for (int it = 0; it < n_theta; ++it) {
      double th = dth * it;
      Vec2 e{std::cos(th), std::sin(th)};
      double ue = u.dot(e);
      double R = -ue + std::sqrt(ue * ue + d.radius * d.radius - dist * dist);
      gauss_legendre(n_r, 0.0, R, gx, gw);
      for (int ir = 0; ir < n_r; ++ir)
        nodes.push_back({x + e * gx[ir], gw[ir] * gx[ir] * dth});
    }
    return nodes;
  }
  // outside: integrate over the subtended cone with Gauss in the angle
  double half = std::asin(std::min(1.0, d.radius / dist));
  double base = std::atan2(-u.y, -u.x);  // direction from x toward the center
  int na = 64;
  while (na > 4 && na > n_theta) na /= 2;
  std::vector<double> ax, aw;
  gauss_legendre(na, base - half, base + half, ax, aw);
  nodes.reserve(ax.size() * n_r);
  for (size_t it = 0; it < ax.size(); ++it) {
    Vec2 e{std::cos(ax[it]), std::sin(ax[it])};
    double proj = (-1.0) * (u.dot(e));  // = d_center * cos(phi) >= 0 on the cone
    double disc = d.radius * d.radius - (dist * dist - proj * proj);
    if (disc <= 0.0) continue;
    double s = std::sqrt(disc);
    gauss_legendre(n_r, proj - s, proj + s, gx, gw);
    for (int ir = 0; ir < n_r; ++ir)
      nodes.push_back({x + e * gx[ir], gw[ir] * gx[ir] * aw[it]});
  }
  return nodes;
}

namespace {

struct Cell {
  Vec2 lo, hi;
};

void emit_cell(const Cell& c, const Disk& d1, const Disk& d2, int cell_gauss,
               std::vector<QuadNode>& out) {
  std::vector<double> xx, xw, yx, yw;
  gauss_legendre(cell_gauss, c.lo.x, c.hi.x, xx, xw);
  gauss_legendre(cell_gauss, c.lo.y, c.hi.y, yx, yw);
  for (size_t i = 0; i < xx.size(); ++i)
    for (size_t j = 0; j < yx.size(); ++j) {
      Vec2 p{xx[i], yx[j]};
      if (d1.contains(p) || d2.contains(p)) continue;
      out.push_back({p, xw[i] * yw[j]});
    }
}

void subdivide(const Cell& c, const Disk& support, const Disk& d1, const Disk& d2, int cell_gauss,
               int depth, int max_depth, std::vector<QuadNode>& out) {
  Vec2 ctr{0.5 * (c.lo.x + c.hi.x), 0.5 * (c.lo.y + c.hi.y)};
  double halfdiag = 0.5 * std::hypot(c.hi.x - c.lo.x, c.hi.y - c.lo.y);
  if ((ctr - support.center).norm() - halfdiag > support.radius) return;  // outside support
  for (const Disk* d : {&d1, &d2}) {
    double dist = (ctr - d->center).norm();
    if (dist + halfdiag < d->radius) return;  // swallowed by an inclusion
  }
  bool crosses = false;
  for (const Disk* d : {&d1, &d2}) {
    double dist = (ctr - d->center).norm();
    if (std::abs(dist - d->radius) <= halfdiag) crosses = true;
  }
  if (!crosses || depth >= max_depth) {
    emit_cell(c, d1, d2, cell_gauss, out);
    return;
  }
  Cell q;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      q.lo = {i ? ctr.x : c.lo.x, j ? ctr.y : c.lo.y};
      q.hi = {i ? c.hi.x : ctr.x, j ? c.hi.y : ctr.y};
      subdivide(q, support, d1, d2, cell_gauss, depth + 1, max_depth, out);
    }
}

}  // namespace

std::vector<QuadNode> quadtree_region0_rule(const Disk& support, const Disk& d1, const Disk& d2,
                                            int cell_gauss, int max_depth) {
  std::vector<QuadNode> out;
  Cell root;
  root.lo = support.center - Vec2{support.radius, support.radius};
  root.hi = support.center + Vec2{support.radius, support.radius};
  // refine a few levels unconditionally so the support circle itself is resolved
  std::vector<Cell> stack{root};
  for (int pre = 0; pre < 3; ++pre) {
    std::vector<Cell> next;
    for (const Cell& c : stack) {
      Vec2 ctr{0.5 * (c.lo.x + c.hi.x), 0.5 * (c.lo.y + c.hi.y)};
      Cell q;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          q.lo = {i ? ctr.x : c.lo.x, j ? ctr.y : c.lo.y};
          q.hi = {i ? c.hi.x : ctr.x, j ? c.hi.y : ctr.y};
          next.push_back(q);
        }
    }
    stack.swap(next);
  }
  for (const Cell& c : stack) subdivide(c, support, d1, d2, cell_gauss, 3, max_depth, out);
  return out;
}

}  // namespace twodisk
