#include "twodisk/source.hpp"

#include <cmath>

namespace twodisk {

namespace {

double bump_unit_integral() {
  // 2*pi * int_0^1 r * exp(-1/(1 - r^2)) dr, computed once.
  static const double value = [] {
    std::vector<double> x, w;
    gauss_legendre(64, 0.0, 1.0, x, w);
    double s = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
      double t = 1.0 - x[i] * x[i];
      s += w[i] * x[i] * std::exp(-1.0 / t);
    }
    return 2.0 * M_PI * s;
  }();
  return value;
}

int region_index(RegionTag t) { return static_cast<int>(t); }

}  // namespace

std::function<double(Vec2)> smooth_bump(Disk d, bool normalize) {
  double scale = normalize ? 1.0 / (d.radius * d.radius * bump_unit_integral()) : 1.0;
  return [d, scale](Vec2 p) {
    double rho2 = (p - d.center).norm2() / (d.radius * d.radius);
    if (rho2 >= 1.0) return 0.0;
    return scale * std::exp(-1.0 / (1.0 - rho2));
  };
}

Disk PiecewiseSource::overall_support() const {
  bool found = false;
  Disk acc;
  for (const auto& r : region) {
    if (!(r.has_f || r.has_f3)) continue;
    if (!found) {
      acc = r.support;
      found = true;
      continue;
    }
    Vec2 dvec = r.support.center - acc.center;
    double dist = dvec.norm();
    if (dist + r.support.radius <= acc.radius) continue;
    if (dist + acc.radius <= r.support.radius) {
      acc = r.support;
      continue;
    }
    double R = 0.5 * (dist + acc.radius + r.support.radius);
    Vec2 dir = dist > 0.0 ? dvec * (1.0 / dist) : Vec2{1.0, 0.0};
    acc.center = acc.center + dir * (R - acc.radius);
    acc.radius = R;
  }
  if (!found) throw Error(Status::invalid_argument, "source has no active components");
  return acc;
}

void PiecewiseSource::check_support(const TwoDiskConfig& cfg) const {
  for (int j = 0; j < 3; ++j) {
    const auto& r = region[j];
    if (!(r.has_f || r.has_f3)) continue;
    if (!(r.support.radius > 0.0))
      throw Error(Status::invalid_argument, "declared support radius must be positive");
    for (double factor : {1.02, 1.3, 2.0})
      for (int k = 0; k < 32; ++k) {
        double th = 2.0 * M_PI * (k + 0.37) / 32.0;
        Vec2 p = r.support.center +
                 Vec2{std::cos(th), std::sin(th)} * (r.support.radius * factor);
        if (static_cast<int>(cfg.classify(p, 0.0).tag) != j) continue;
        double mag = 0.0;
        if (r.has_f) mag += r.f(p).norm();
        if (r.has_f3) mag += std::abs(r.f3(p));
        if (mag > 1e-12)
          throw Error(Status::invalid_argument,
                      "source is nonzero outside its declared support disk");
      }
  }
}

PiecewiseSource lower_bound_source(const TwoDiskConfig& cfg, Vec2 center, double radius) {
  for (int i = 1; i <= 2; ++i) {
    Disk d = cfg.disk(i);
    if ((center - d.center).norm() < d.radius + radius)
      throw Error(Status::invalid_config,
                  "lower-bound bump must lie in the matrix region, clear of both disks");
  }
  PiecewiseSource src;
  auto bump = smooth_bump({center, radius}, true);
  auto& r0 = src.region[region_index(RegionTag::matrix)];
  r0.f = [bump](Vec2 p) { return Vec2{bump(p), 0.0}; };
  r0.has_f = true;
  r0.support = {center, radius};
  return src;
}

PiecewiseSource constant_disk1_source(const TwoDiskConfig& cfg) {
  PiecewiseSource src;
  auto& r1 = src.region[region_index(RegionTag::inclusion1)];
  r1.f = [](Vec2) { return Vec2{1.0, 0.0}; };
  r1.has_f = true;
  r1.support = cfg.disk(1);
  return src;
}

PiecewiseSource radial_bump_source(const TwoDiskConfig& cfg, Vec2 center, double radius,
                                   double amplitude) {
  RegionTag tag = cfg.classify(center).tag;
  for (int i = 1; i <= 2; ++i) {
    Disk d = cfg.disk(i);
    double dist = (center - d.center).norm();
    if (std::abs(dist - d.radius) < radius)
      throw Error(Status::invalid_config, "radial bump must not straddle an interface");
  }
  PiecewiseSource src;
  auto bump = smooth_bump({center, radius}, true);
  auto& r = src.region[region_index(tag)];
  r.f3 = [bump, amplitude](Vec2 p) { return amplitude * bump(p); };
  r.has_f3 = true;
  r.support = {center, radius};
  return src;
}

}  // namespace twodisk
