#pragma once

#include <vector>

#include "twodisk/geometry.hpp"

namespace twodisk {

/// Fractional-linear map z -> (a*w + b)/(c*w + d) with w = conj(z) when the
/// parity bit is set (anti-holomorphic) and w = z otherwise. Circle inversions
/// carry the parity bit; composing two of them clears it.
struct ConjMoebius {
  Complex a{1.0}, b{0.0}, c{0.0}, d{1.0};
  bool conj_first{false};

  static ConjMoebius identity() { return {}; }

  Complex det() const { return a * d - b * c; }

  /// Evaluate the map; throws Status::pole within 1e-14 * scale of the pole.
  Complex apply(Complex z) const;

  /// m-th complex derivative of the rational part at its own argument
  /// (i.e. at conj(z) for anti-holomorphic maps).
  Complex rational_derivative(Complex arg, int m = 1) const;

  /// (DF)^T g at z, with gradients encoded as Vec2. Used to pull potential
  /// gradients back through mapped evaluation points.
  Vec2 pullback_gradient(Complex z, Vec2 g) const;
};

/// Inversion across the boundary circle of disk 1 or 2. Involution, fixes the
/// circle pointwise, parity set, pole at the disk center.
ConjMoebius inversion(int which, const TwoDiskConfig& cfg);

/// g after f. Parity bits XOR; throws Status::degenerate_map if the product
/// matrix is singular.
ConjMoebius compose(const ConjMoebius& g, const ConjMoebius& f);

/// Composition order of the two inversions: two_one = inversion(2) after
/// inversion(1), mapping everything outside disk 1 into disk 2; one_two is the
/// mirror image.
enum class Composite { two_one, one_two };

/// Affine change of variables w = scale*z + shift in which the one-step
/// composite becomes w -> -(r1*r2)^2/w - b.
struct NormalizedFrame {
  Complex scale{1.0}, shift{0.0};
  Complex to_normalized(Complex z) const { return scale * z + shift; }
  Complex to_physical(Complex w) const { return (w - shift) / scale; }
};

/// Everything needed to apply (composite)^l in O(1): the physical one-step
/// map, its fixed points (attracting one inside the target disk), and the
/// multiplier mu in (0,1).
struct CompositeSystem {
  Composite kind{Composite::two_one};
  ConjMoebius step;
  Complex fixed_att, fixed_rep;
  double multiplier{0.0};
  Complex fixed_in_b1, fixed_in_b2;
  NormalizedFrame frame;
  double norm_fixed_b1{0.0}, norm_fixed_b2{0.0};

  /// Closed-form l-th iterate in physical coordinates; l = 0 is the identity.
  ConjMoebius iterate(long l) const;
  ConjMoebius iterate_from_power(double mu_l) const;
  Complex apply_iterate(long l, Complex z) const;
  Complex iterate_derivative(long l, int m, Complex z) const;
};

CompositeSystem composite_system(Composite kind, const TwoDiskConfig& cfg);

ConjMoebius iterate_closed_form(Composite kind, long l, const TwoDiskConfig& cfg);

/// Fixed points of the composite, returned as (point in disk 1, point in disk 2).
std::pair<Vec2, Vec2> fixed_points(Composite kind, const TwoDiskConfig& cfg);

Complex iterate_derivative(Composite kind, long l, int m, Complex z, const TwoDiskConfig& cfg);

struct DecayCertificate {
  int m{1};
  double ratio_bound{0.0};   // (1 + tau)^(-2) + 0.01
  double limsup_ratio{0.0};  // empirical tail ratio of lattice sup-norms
  bool ok{false};
  std::vector<double> sample;  // sup over lattice of |D^m iterate_l|, l = 0..l_max
  std::vector<double> ratio;   // sample[l+1]/sample[l]
};

/// Samples |D^m (composite)^l| over a lattice in the target disk and checks the
/// geometric decay ratio against the gap-parameter bound.
DecayCertificate decay_certificate(Composite kind, const TwoDiskConfig& cfg, int m, int l_max);

}  // namespace twodisk
