#pragma once

#include <functional>

#include "twodisk/quadrature.hpp"

namespace twodisk {

/// Data for one region of the divergence-form right-hand side: a smooth vector
/// field f = (f1, f2) and a scalar volume term f3, plus the disk declared to
/// bound their supports within that region.
struct RegionSource {
  std::function<Vec2(Vec2)> f;
  std::function<double(Vec2)> f3;
  Disk support;
  bool has_f{false};
  bool has_f3{false};
};

struct PiecewiseSource {
  RegionSource region[3];  // indexed by RegionTag

  bool empty() const {
    for (const auto& r : region)
      if (r.has_f || r.has_f3) return false;
    return true;
  }
  /// Bounding disk of every declared support.
  Disk overall_support() const;
  /// Samples rings outside each declared support and rejects sources that are
  /// not actually supported where declared.
  void check_support(const TwoDiskConfig& cfg) const;
};

/// C-infinity bump exp(-1/(1 - |t|^2)) scaled to the given disk; unit integral
/// when normalize is true.
std::function<double(Vec2)> smooth_bump(Disk d, bool normalize);

/// The optimality example source: a unit-integral bump in the matrix region
/// (default B_{1/10}(-3, 0)), even in x2, pulling the field through the gap.
PiecewiseSource lower_bound_source(const TwoDiskConfig& cfg, Vec2 center = {-3.0, 0.0},
                                   double radius = 0.1);

/// Constant unit field e1 on inclusion 1.
PiecewiseSource constant_disk1_source(const TwoDiskConfig& cfg);

/// Radial scalar bump f3 with integral `amplitude`; the bump disk must sit
/// inside a single region.
PiecewiseSource radial_bump_source(const TwoDiskConfig& cfg, Vec2 center, double radius,
                                   double amplitude);

}  // namespace twodisk
