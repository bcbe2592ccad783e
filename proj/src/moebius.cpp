#include "twodisk/moebius.hpp"

#include <algorithm>
#include <cmath>

namespace twodisk {

namespace {

double max_abs(const ConjMoebius& m) {
  return std::max(std::max(std::abs(m.a), std::abs(m.b)), std::max(std::abs(m.c), std::abs(m.d)));
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

Complex ConjMoebius::apply(Complex z) const {
  Complex w = conj_first ? std::conj(z) : z;
  Complex den = c * w + d;
  double scale = std::abs(c) * std::abs(w) + std::abs(d);
  if (std::abs(den) <= 1e-14 * scale)
    throw Error(Status::pole, "map evaluated at (or too near) its pole");
  return (a * w + b) / den;
}

Complex ConjMoebius::rational_derivative(Complex arg, int m) const {
  if (m < 1) throw Error(Status::invalid_argument, "derivative order must be >= 1");
  if (std::abs(c) == 0.0) {
    if (m == 1) return a / d;
    return {0.0, 0.0};
  }
  Complex den = c * arg + d;
  double scale = std::abs(c) * std::abs(arg) + std::abs(d);
  if (std::abs(den) <= 1e-14 * scale)
    throw Error(Status::pole, "derivative evaluated too near the map's pole");
  Complex p = den * den;  // (c*arg + d)^(m+1)
  for (int i = 1; i < m; ++i) p *= den;
  double sign = (m % 2 == 0) ? -1.0 : 1.0;
  Complex cpow{1.0, 0.0};
  for (int i = 1; i < m; ++i) cpow *= c;
  return det() * sign * factorial(m) * cpow / p;
}

Vec2 ConjMoebius::pullback_gradient(Complex z, Vec2 g) const {
  Complex arg = conj_first ? std::conj(z) : z;
  Complex fp = rational_derivative(arg, 1);
  Complex gc = g.cplx();
  Complex out = conj_first ? fp * std::conj(gc) : std::conj(fp) * gc;
  return Vec2(out);
}

ConjMoebius inversion(int which, const TwoDiskConfig& cfg) {
  Disk d = cfg.disk(which);
  double cc = d.center.x;  // centers lie on the real axis
  ConjMoebius m;
  m.a = cc;
  m.b = d.radius * d.radius - cc * cc;
  m.c = 1.0;
  m.d = -cc;
  m.conj_first = true;
  return m;
}

ConjMoebius compose(const ConjMoebius& g, const ConjMoebius& f) {
  ConjMoebius mf = f;
  if (g.conj_first) {
    mf.a = std::conj(mf.a);
    mf.b = std::conj(mf.b);
    mf.c = std::conj(mf.c);
    mf.d = std::conj(mf.d);
  }
  ConjMoebius out;
  out.a = g.a * mf.a + g.b * mf.c;
  out.b = g.a * mf.b + g.b * mf.d;
  out.c = g.c * mf.a + g.d * mf.c;
  out.d = g.c * mf.b + g.d * mf.d;
  out.conj_first = g.conj_first != f.conj_first;
  double s = max_abs(out);
  if (s == 0.0) throw Error(Status::degenerate_map, "composition produced the zero matrix");
  out.a /= s;
  out.b /= s;
  out.c /= s;
  out.d /= s;
  if (std::abs(out.det()) < 1e-250)
    throw Error(Status::degenerate_map, "composition produced a singular map");
  return out;
}

CompositeSystem composite_system(Composite kind, const TwoDiskConfig& cfg) {
  CompositeSystem sys;
  sys.kind = kind;
  const int first = (kind == Composite::two_one) ? 1 : 2;
  const int second = (kind == Composite::two_one) ? 2 : 1;
  sys.step = compose(inversion(second, cfg), inversion(first, cfg));

  // Real coefficients: fixed points solve c z^2 + (d - a) z - b = 0.
  double A = sys.step.c.real();
  double B = (sys.step.d - sys.step.a).real();
  double C = -sys.step.b.real();
  double disc = B * B - 4.0 * A * C;
  if (!(disc > 0.0) || A == 0.0)
    throw Error(Status::degenerate_map, "composite has no pair of distinct real fixed points");
  double q = -0.5 * (B + std::copysign(std::sqrt(disc), B == 0.0 ? 1.0 : B));
  Complex z1 = q / A;
  Complex z2 = C / q;

  Disk d1 = cfg.disk(1), d2 = cfg.disk(2);
  bool z1_in_b1 = d1.contains(Vec2(z1));
  bool z2_in_b1 = d1.contains(Vec2(z2));
  if (z1_in_b1 == z2_in_b1 || !(z1_in_b1 ? d2.contains(Vec2(z2)) : d2.contains(Vec2(z1))))
    throw Error(Status::degenerate_map, "fixed points failed disk classification");
  sys.fixed_in_b1 = z1_in_b1 ? z1 : z2;
  sys.fixed_in_b2 = z1_in_b1 ? z2 : z1;

  auto multiplier_at = [&](Complex z) {
    Complex den = sys.step.c * z + sys.step.d;
    return (sys.step.det() / (den * den)).real();
  };
  // Attracting fixed point lies in the disk the composite maps into.
  sys.fixed_att = (kind == Composite::two_one) ? sys.fixed_in_b2 : sys.fixed_in_b1;
  sys.fixed_rep = (kind == Composite::two_one) ? sys.fixed_in_b1 : sys.fixed_in_b2;
  sys.multiplier = multiplier_at(sys.fixed_att);
  if (!(sys.multiplier > 0.0 && sys.multiplier < 1.0))
    throw Error(Status::degenerate_map, "attracting multiplier outside (0,1)");

  double dd = cfg.r1 + cfg.r2 + cfg.eps;
  if (kind == Composite::two_one) {
    sys.frame.scale = dd;
    sys.frame.shift = cfg.r1 * cfg.r1 - (cfg.r1 + cfg.eps / 2.0) * dd;
  } else {
    sys.frame.scale = -dd;
    sys.frame.shift = cfg.r2 * cfg.r2 - (cfg.r2 + cfg.eps / 2.0) * dd;
  }
  sys.norm_fixed_b1 = sys.frame.to_normalized(sys.fixed_in_b1).real();
  sys.norm_fixed_b2 = sys.frame.to_normalized(sys.fixed_in_b2).real();
  return sys;
}

ConjMoebius CompositeSystem::iterate_from_power(double mu_l) const {
  ConjMoebius m;
  m.a = fixed_att - fixed_rep * mu_l;
  m.b = fixed_att * fixed_rep * (mu_l - 1.0);
  m.c = 1.0 - mu_l;
  m.d = fixed_att * mu_l - fixed_rep;
  m.conj_first = false;
  return m;
}

ConjMoebius CompositeSystem::iterate(long l) const {
  if (l < 0) throw Error(Status::invalid_argument, "iterate count must be >= 0");
  if (l == 0) return ConjMoebius::identity();
  return iterate_from_power(std::pow(multiplier, static_cast<double>(l)));
}

Complex CompositeSystem::apply_iterate(long l, Complex z) const {
  if (l < 0) throw Error(Status::invalid_argument, "iterate count must be >= 0");
  if (l == 0) return z;
  double mu_l = std::pow(multiplier, static_cast<double>(l));
  Complex num = z - fixed_att;
  Complex den = z - fixed_rep;
  if (std::abs(den) <= 1e-300) return fixed_rep;  // repelling point is fixed
  Complex w = mu_l * (num / den);
  Complex one_minus = 1.0 - w;
  if (std::abs(one_minus) <= 1e-14 * (1.0 + std::abs(w)))
    throw Error(Status::pole, "iterate evaluated at its pole");
  return (fixed_att - fixed_rep * w) / one_minus;
}

Complex CompositeSystem::iterate_derivative(long l, int m, Complex z) const {
  return iterate(l).rational_derivative(z, m);
}

ConjMoebius iterate_closed_form(Composite kind, long l, const TwoDiskConfig& cfg) {
  return composite_system(kind, cfg).iterate(l);
}

std::pair<Vec2, Vec2> fixed_points(Composite kind, const TwoDiskConfig& cfg) {
  CompositeSystem sys = composite_system(kind, cfg);
  return {Vec2(sys.fixed_in_b1), Vec2(sys.fixed_in_b2)};
}

Complex iterate_derivative(Composite kind, long l, int m, Complex z, const TwoDiskConfig& cfg) {
  return composite_system(kind, cfg).iterate_derivative(l, m, z);
}

DecayCertificate decay_certificate(Composite kind, const TwoDiskConfig& cfg, int m, int l_max) {
  if (l_max < 5 || l_max > 10000)
    throw Error(Status::invalid_argument, "l_max must lie in [5, 10^4]");
  if (m < 1) throw Error(Status::invalid_argument, "derivative order must be >= 1");
  CompositeSystem sys = composite_system(kind, cfg);
  Disk target = cfg.disk(kind == Composite::two_one ? 2 : 1);

  std::vector<Complex> lattice;
  const double fractions[] = {0.2, 0.45, 0.7, 0.85, 0.95};
  for (double fr : fractions)
    for (int k = 0; k < 8; ++k) {
      double th = 2.0 * M_PI * k / 8.0;
      lattice.push_back(target.center.cplx() +
                        fr * target.radius * Complex{std::cos(th), std::sin(th)});
    }

  DecayCertificate cert;
  cert.m = m;
  double tau = cfg.gap_parameter();
  cert.ratio_bound = 1.0 / ((1.0 + tau) * (1.0 + tau)) + 0.01;
  for (int l = 0; l <= l_max; ++l) {
    double s = 0.0;
    for (Complex z : lattice) s = std::max(s, std::abs(sys.iterate_derivative(l, m, z)));
    if (s < 1e-290) break;  // underflow; geometric decay already established
    cert.sample.push_back(s);
  }
  for (size_t l = 0; l + 1 < cert.sample.size(); ++l)
    cert.ratio.push_back(cert.sample[l + 1] / cert.sample[l]);
  if (cert.ratio.empty())
    throw Error(Status::invalid_argument, "decay certificate needs at least two samples");
  size_t window = std::max<size_t>(5, cert.ratio.size() / 4);
  window = std::min(window, cert.ratio.size());
  cert.limsup_ratio = 0.0;
  for (size_t i = cert.ratio.size() - window; i < cert.ratio.size(); ++i)
    cert.limsup_ratio = std::max(cert.limsup_ratio, cert.ratio[i]);
  cert.ok = cert.limsup_ratio <= cert.ratio_bound;
  return cert;
}

}  // namespace twodisk
