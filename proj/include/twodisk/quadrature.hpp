#pragma once

#include <vector>

#include "twodisk/geometry.hpp"

namespace twodisk {

/// Quadrature configuration for the log-kernel disk potentials. Radial rules
/// are Gauss-Legendre (sizes restricted to {2,4,8,16,32,64}), angular rules
/// periodic trapezoid. Targets far from a support disk use downgraded node
/// counts; targets inside or within the near cutoff switch to a polar rule
/// centered at the target, which cancels the kernel singularity exactly.
struct QuadratureGrid {
  int n_r{32};
  int n_theta{64};
  int near_n_r{16};
  int near_n_theta{32};
  int cell_gauss{4};
  int max_depth{9};
  double declared_tol{1e-9};
  double mid_dist{3.0};   // support radii; below: full rule
  double far_dist{10.0};  // support radii; below: half rule, above: quarter

  void validate() const;
};

struct QuadNode {
  Vec2 y;
  double w;
};

void gauss_legendre(int n, double a, double b, std::vector<double>& x, std::vector<double>& w);

/// Tensor Gauss(radius) x trapezoid(angle) rule; node weights sum to the disk
/// area to machine precision.
std::vector<QuadNode> disk_rule(const Disk& d, int n_r, int n_theta);

/// Polar rule centered at x covering disk d. Valid for x inside d (rays to the
/// boundary) and for x outside (rays through the subtended cone).
std::vector<QuadNode> polar_rule_at(Vec2 x, const Disk& d, int n_r, int n_theta);

/// Adaptive quadtree leaves over support minus the two inclusion disks; cells
/// crossing an interface are refined to max_depth, and nodes falling inside an
/// inclusion are dropped.
std::vector<QuadNode> quadtree_region0_rule(const Disk& support, const Disk& d1, const Disk& d2,
                                            int cell_gauss, int max_depth);

}  // namespace twodisk
