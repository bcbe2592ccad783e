#pragma once

#include <optional>

#include "twodisk/reflection.hpp"

namespace twodisk {

struct GreensEval {
  double value{0.0};
  Vec2 grad;
  int terms_used{0};
  double tail_estimate{0.0};
  Region x_region, y_region;
};

/// Auxiliary reflection-series kernel: harmonic in x away from y (and the two
/// disk centers), continuous across both interfaces together with its
/// coefficient-weighted normal derivative. In the same-inclusion branch the
/// center singularity is evaluated through the regrouping identity
/// log|inv_i(x) - y| = 2 log r_i - log|x - c_i| + log|1 + (c_i - y) conj(x - c_i)/r_i^2|,
/// so the inversion's pole is never touched; the kernel itself still diverges
/// at x = c_i exactly (the divergence only cancels in eval_G).
GreensEval eval_aux(Vec2 x, Vec2 y, const TwoDiskConfig& cfg, const SeriesPolicy& policy,
                    std::optional<RegionTag> x_region = std::nullopt,
                    std::optional<RegionTag> y_region = std::nullopt);

/// Green's function of div(a grad .) under the Delta log = delta convention:
/// the auxiliary kernel plus, for y inside an inclusion, a constant-in-y
/// multiple of the kernel sourced at that inclusion's center. Finite at both
/// disk centers.
GreensEval eval_G(Vec2 x, Vec2 y, const TwoDiskConfig& cfg, const SeriesPolicy& policy,
                  std::optional<RegionTag> x_region = std::nullopt,
                  std::optional<RegionTag> y_region = std::nullopt);

/// x-gradient of eval_G; the series is differentiated term by term through the
/// closed-form iterates.
GreensEval grad_G(Vec2 x, Vec2 y, const TwoDiskConfig& cfg, const SeriesPolicy& policy,
                  std::optional<RegionTag> x_region = std::nullopt,
                  std::optional<RegionTag> y_region = std::nullopt);

/// Value and gradient in one series walk.
GreensEval eval_G_full(Vec2 x, Vec2 y, const TwoDiskConfig& cfg, const SeriesPolicy& policy,
                       std::optional<RegionTag> x_region = std::nullopt,
                       std::optional<RegionTag> y_region = std::nullopt);

struct JumpReport {
  double value_jump{0.0};
  double flux_jump{0.0};
  double tail_estimate{0.0};
};

/// Richardson-extrapolated (two levels: h, h/2) interface jumps of G and of
/// the coefficient-weighted normal derivative at a point s on circle 1 or 2.
JumpReport interface_jump(Vec2 y, int circle, Vec2 s, const TwoDiskConfig& cfg,
                          const SeriesPolicy& policy, double h);

/// Contour integral of a * dG/dnu over the circle |x - y| = rho (256-point
/// trapezoid); equals 2*pi when the contour crosses no interface.
double flux_around_source(Vec2 y, double rho, const TwoDiskConfig& cfg,
                          const SeriesPolicy& policy);

}  // namespace twodisk
