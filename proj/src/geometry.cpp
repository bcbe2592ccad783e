#include "twodisk/geometry.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace twodisk {

double Vec2::norm() const { return std::hypot(x, y); }

double Disk::boundary_distance(Vec2 p) const { return (p - center).norm() - radius; }

namespace {

void check_finite_positive(double v, const char* name) {
  if (!std::isfinite(v) || v <= 0.0)
    throw Error(Status::invalid_config, std::string(name) + " must be finite and positive");
}

TwoDiskConfig assemble(double eps, double r1, double r2, double k1, double k2) {
  TwoDiskConfig cfg;
  cfg.eps = eps;
  cfg.r1 = r1;
  cfg.r2 = r2;
  cfg.k1 = k1;
  cfg.k2 = k2;
  auto [a, b] = contrast(k1, k2);
  cfg.alpha = a;
  cfg.beta = b;
  cfg.c1 = {eps / 2.0 + r1, 0.0};
  cfg.c2 = {-eps / 2.0 - r2, 0.0};
  return cfg;
}

}  // namespace

std::pair<double, double> contrast(double k1, double k2) {
  check_finite_positive(k1, "k1");
  check_finite_positive(k2, "k2");
  return {(k1 - 1.0) / (k1 + 1.0), (k2 - 1.0) / (k2 + 1.0)};
}

TwoDiskConfig TwoDiskConfig::create(double eps, double r1, double r2, double k1, double k2) {
  check_finite_positive(eps, "eps");
  check_finite_positive(r1, "r1");
  check_finite_positive(r2, "r2");
  if (eps >= 0.5) throw Error(Status::invalid_config, "eps must lie in (0, 1/2)");
  if (r1 >= 10.0 || r2 >= 10.0) throw Error(Status::invalid_config, "radii must lie in (0, 10)");
  double rmin = r1 < r2 ? r1 : r2;
  if (eps > rmin / 10.0) {
    std::ostringstream os;
    os << "gap eps = " << eps << " too wide: requires eps <= min(r1,r2)/10 = " << rmin / 10.0;
    throw Error(Status::invalid_config, os.str());
  }
  return assemble(eps, r1, r2, k1, k2);
}

TwoDiskConfig TwoDiskConfig::create_unchecked(double eps, double r1, double r2, double k1,
                                              double k2) {
  check_finite_positive(eps, "eps");
  check_finite_positive(r1, "r1");
  check_finite_positive(r2, "r2");
  return assemble(eps, r1, r2, k1, k2);
}

Disk TwoDiskConfig::disk(int which) const {
  if (which == 1) return {c1, r1};
  if (which == 2) return {c2, r2};
  throw Error(Status::invalid_argument, "disk index must be 1 or 2");
}

Region TwoDiskConfig::classify(Vec2 p, double tol) const {
  if (tol < 0.0 || tol >= eps / 4.0)
    throw Error(Status::invalid_argument, "classification tolerance must lie in [0, eps/4)");
  Region reg;
  double d1 = (p - c1).norm();
  double d2 = (p - c2).norm();
  if (d1 < r1)
    reg.tag = RegionTag::inclusion1;
  else if (d2 < r2)
    reg.tag = RegionTag::inclusion2;
  else
    reg.tag = RegionTag::matrix;
  if (std::abs(d1 - r1) <= tol) {
    reg.on_boundary = true;
    reg.circle = 1;
  } else if (std::abs(d2 - r2) <= tol) {
    reg.on_boundary = true;
    reg.circle = 2;
  }
  return reg;
}

double TwoDiskConfig::coefficient_of(RegionTag t) const {
  switch (t) {
    case RegionTag::inclusion1: return k1;
    case RegionTag::inclusion2: return k2;
    default: return 1.0;
  }
}

double TwoDiskConfig::coefficient(Vec2 p, std::optional<RegionTag> side) const {
  if (side) return coefficient_of(*side);
  Region reg = classify(p, 0.0);
  if (reg.on_boundary)
    throw Error(Status::ambiguous_evaluation,
                "point lies on an interface circle; pass a side hint");
  return coefficient_of(reg.tag);
}

double TwoDiskConfig::gap_parameter() const {
  return std::sqrt(2.0 * (1.0 / r1 + 1.0 / r2) * eps);
}

}  // namespace twodisk
