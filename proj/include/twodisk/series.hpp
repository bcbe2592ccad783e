#pragma once

#include "twodisk/geometry.hpp"

namespace twodisk {

enum class TailMode { geometric_extrapolation, fixed_n };

/// Truncation control for the (alpha*beta)^l reflection series. Every
/// evaluation reports the estimated dropped tail.
struct SeriesPolicy {
  double tol{1e-10};
  int max_terms{100000};
  TailMode tail_mode{TailMode::geometric_extrapolation};
  /// Fixed-point splitting of value series kicks in when the a-priori term
  /// count exceeds this.
  int accel_threshold{10000};
};

enum class SeriesQuantity { value, gradient, derivative };

/// Smallest N with q^N * B <= tol, where q = |alpha*beta| for value series and
/// |alpha*beta| / (1 + tau)^2 for gradient/derivative series (tau the
/// effective gap parameter). Throws Status::truncation_failure if N would
/// exceed policy.max_terms.
int plan_truncation(const TwoDiskConfig& cfg, const SeriesPolicy& policy, SeriesQuantity quantity,
                    double running_bound = 1.0);

}  // namespace twodisk
