#pragma once

#include <memory>
#include <optional>

#include "twodisk/greens.hpp"
#include "twodisk/source.hpp"

namespace twodisk {

struct EvalReport {
  double value{0.0};
  Vec2 grad;
  int terms_used{0};
  double tail_estimate{0.0};
  double quad_error{0.0};
  Region x_region;
};

struct TensorReport {
  int order{0};
  std::vector<double> entries;  // 2^order entries; bit i of the index picks the axis
  double norm{0.0};             // Frobenius
  double fd_error{0.0};         // Richardson discrepancy
  int terms_used{0};
  double tail_estimate{0.0};
  double quad_error{0.0};
};

/// h_j(x) = int_{region j} (y - x) . f(y) / |x - y|^2 dy  (the log kernel's
/// y-gradient against the vector data).
double potential_h(int region, Vec2 x, const PiecewiseSource& src, const TwoDiskConfig& cfg,
                   const QuadratureGrid& grid);
/// g_j(x) = int_{region j} log|x - y| f3(y) dy.
double potential_g(int region, Vec2 x, const PiecewiseSource& src, const TwoDiskConfig& cfg,
                   const QuadratureGrid& grid);
Vec2 potential_h_gradient(int region, Vec2 x, const PiecewiseSource& src,
                          const TwoDiskConfig& cfg, const QuadratureGrid& grid);
Vec2 potential_g_gradient(int region, Vec2 x, const PiecewiseSource& src,
                          const TwoDiskConfig& cfg, const QuadratureGrid& grid);

/// Evaluates the representation-formula solution of
///   div(a grad u) = 2*pi*(div f + f3)
/// (the whole-plane solution vanishing at infinity up to a constant) together
/// with its analytic gradient and Richardson-extrapolated higher derivatives.
/// Holds per-region quadrature tables and a bounded cache of potential
/// samples keyed by mapped evaluation points; safe to reuse across many
/// evaluation points of one configuration.
class SolutionEvaluator {
 public:
  SolutionEvaluator(const TwoDiskConfig& cfg, const PiecewiseSource& src,
                    const SeriesPolicy& policy, const QuadratureGrid& grid);
  ~SolutionEvaluator();
  SolutionEvaluator(SolutionEvaluator&&) noexcept;

  EvalReport value(Vec2 x, std::optional<RegionTag> region = std::nullopt) const;
  EvalReport gradient(Vec2 x, std::optional<RegionTag> region = std::nullopt) const;
  EvalReport value_and_gradient(Vec2 x, std::optional<RegionTag> region = std::nullopt) const;
  /// m-th derivative tensor (2 <= m <= 4) by Richardson-extrapolated central
  /// differences of the analytic gradient.
  TensorReport higher_derivative(Vec2 x, int m) const;

  const TwoDiskConfig& config() const;

  struct Impl;

 private:
  std::unique_ptr<Impl> impl_;
};

inline EvalReport solve_u(Vec2 x, const TwoDiskConfig& cfg, const PiecewiseSource& src,
                          const SeriesPolicy& policy, const QuadratureGrid& grid) {
  return SolutionEvaluator(cfg, src, policy, grid).value(x);
}
inline EvalReport grad_u(Vec2 x, const TwoDiskConfig& cfg, const PiecewiseSource& src,
                         const SeriesPolicy& policy, const QuadratureGrid& grid) {
  return SolutionEvaluator(cfg, src, policy, grid).gradient(x);
}
inline TensorReport higher_deriv_u(Vec2 x, int m, const TwoDiskConfig& cfg,
                                   const PiecewiseSource& src, const SeriesPolicy& policy,
                                   const QuadratureGrid& grid) {
  return SolutionEvaluator(cfg, src, policy, grid).higher_derivative(x, m);
}

}  // namespace twodisk
