#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <type_traits>
#include <vector>

#include "twodisk/moebius.hpp"
#include "twodisk/series.hpp"

namespace twodisk {

// The auxiliary two-disk kernel is, in every (x-region, y-region) branch, a
// weighted sum of log-potentials evaluated at reflected images of x:
//
//   sum of closed terms  c * V(map(x))          map in {id, inversion1, inversion2}
// + sum over streams     c * (alpha*beta)^l * V(iterate_l(tail(x))),  l >= l_start
//
// where V is log|. - y| for the kernel itself, and a disk potential h_j / g_j
// when the same branch is integrated against source data. The tables below
// encode the branches once; evaluators plug in V.

enum class BaseMap : int { identity = 0, inv1 = 1, inv2 = 2 };

struct ClosedTerm {
  double coeff;
  BaseMap map;
};

struct TermStream {
  double coeff;
  Composite core;
  BaseMap tail;
  int l_start;
};

struct AuxBranch {
  std::vector<ClosedTerm> closed;
  std::vector<TermStream> streams;
};

/// Branch table for x in region xr, source point y in region yr.
AuxBranch aux_branch(RegionTag xr, RegionTag yr, const TwoDiskConfig& cfg);

struct SeriesStats {
  int terms_used{0};
  double tail_estimate{0.0};
};

template <class T>
inline double series_norm_of(const T& v) {
  if constexpr (std::is_same_v<T, double>)
    return std::abs(v);
  else
    return v.norm();
}

/// Walks the (alpha*beta)^l groups of a branch, summing whatever the term
/// functional produces (values or gradients), with geometric tail
/// extrapolation or a fixed term count. The closed-form iterates make each
/// group O(1) regardless of l.
class SeriesWalker {
 public:
  SeriesWalker(const TwoDiskConfig& cfg, const SeriesPolicy& policy)
      : cfg_(cfg), policy_(policy), ab_(cfg.alpha * cfg.beta) {}

  const CompositeSystem& system(Composite kind) {
    auto& slot = sys_[kind == Composite::two_one ? 0 : 1];
    if (!slot.has_value()) slot = composite_system(kind, cfg_);
    return *slot;
  }

  ConjMoebius base_map(BaseMap m) const {
    switch (m) {
      case BaseMap::inv1: return inversion(1, cfg_);
      case BaseMap::inv2: return inversion(2, cfg_);
      default: return ConjMoebius::identity();
    }
  }

  double ab() const { return ab_; }

  /// TermFn signature:
  ///   T term(double weight, Complex mapped_point, const ConjMoebius& iter,
  ///          const ConjMoebius* tail, Complex tail_point)
  /// Value functionals use (weight, mapped_point); gradient functionals pull
  /// the result back through iter (at tail_point) and tail (at x).
  ///
  /// limit_value, when given for a scalar series, is the term functional's
  /// value at a composite's attracting fixed point; it enables fixed-point
  /// splitting of slowly converging value series (the images of x converge to
  /// the fixed point geometrically, so term_l - limit is a fast series and the
  /// limit sums in closed form).
  template <class T, class TermFn>
  T run(const AuxBranch& branch, Complex x, SeriesStats& stats, TermFn&& term,
        const std::function<double(Complex)>* limit_value = nullptr) {
    T total = T{};
    stats = SeriesStats{};
    if (branch.streams.empty()) return total;

    struct StreamState {
      const TermStream* s;
      const CompositeSystem* sys;
      ConjMoebius tail_map;
      bool tail_is_id;
      Complex tail_point;
    };
    std::vector<StreamState> st;
    st.reserve(branch.streams.size());
    int min_start = branch.streams.front().l_start;
    int max_start = min_start;
    for (const auto& s : branch.streams) {
      StreamState ss;
      ss.s = &s;
      ss.sys = &system(s.core);
      ss.tail_is_id = (s.tail == BaseMap::identity);
      ss.tail_map = base_map(s.tail);
      ss.tail_point = ss.tail_is_id ? x : ss.tail_map.apply(x);
      st.push_back(ss);
      min_start = std::min(min_start, s.l_start);
      max_start = std::max(max_start, s.l_start);
    }

    const double ab = ab_;
    const bool fixed_n = policy_.tail_mode == TailMode::fixed_n;

    bool accel = false;
    double limit_sum = 0.0;
    int accel_start = 0;
    double ab_pow_accel = 0.0;
    if constexpr (std::is_same_v<T, double>) {
      if (limit_value && !fixed_n && std::abs(ab) > 0.0 && policy_.tol > 0.0) {
        double n_est = std::log(policy_.tol) / std::log(std::abs(ab));
        if (n_est > policy_.accel_threshold) {
          accel = true;
          accel_start = std::max(max_start, 2);
          for (const auto& ss : st) limit_sum += ss.s->coeff * (*limit_value)(ss.sys->fixed_att);
        }
      }
    }

    double mag2 = -1.0, mag1 = -1.0;  // previous two tracked magnitudes
    int below_tol_streak = 0;
    const double mu0 = system(Composite::two_one).multiplier;
    const double mu1 = system(Composite::one_two).multiplier;
    double ab_pow = 1.0, mu_pow0 = 1.0, mu_pow1 = 1.0;
    for (int k = 0; k < min_start; ++k) {
      ab_pow *= ab;
      mu_pow0 *= mu0;
      mu_pow1 *= mu1;
    }

    int groups_done = 0;
    for (int j = min_start;; ++j) {
      if (!fixed_n && j >= policy_.max_terms)
        throw TruncationFailure("reflection series did not converge within max_terms",
                                series_norm_of(total), mag1 >= 0.0 ? mag1 : 0.0, j);

      T group = T{};
      for (const auto& ss : st) {
        if (j < ss.s->l_start) continue;
        double mu_pow = (ss.s->core == Composite::two_one) ? mu_pow0 : mu_pow1;
        ConjMoebius iter = (j == 0) ? ConjMoebius::identity() : ss.sys->iterate_from_power(mu_pow);
        Complex w = (j == 0) ? ss.tail_point : iter.apply(ss.tail_point);
        group += term(ss.s->coeff * ab_pow, w, iter, ss.tail_is_id ? nullptr : &ss.tail_map,
                      ss.tail_point);
      }

      double track;
      if (accel && j >= accel_start) {
        if (j == accel_start) ab_pow_accel = ab_pow;
        if constexpr (std::is_same_v<T, double>) {
          double delta = group - ab_pow * limit_sum;
          total += delta;
          track = std::abs(delta);
        } else {
          total += group;
          track = series_norm_of(group);
        }
      } else {
        total += group;
        track = series_norm_of(group);
      }
      ++groups_done;

      bool stop = false;
      if (fixed_n) {
        stop = groups_done >= policy_.max_terms;
      } else if (j >= min_start + 2) {
        double rho = 0.0;
        if (mag2 > 0.0 && mag1 >= 0.0) rho = std::max(rho, mag1 / mag2);
        if (mag1 > 0.0) rho = std::max(rho, track / mag1);
        rho = std::min(rho, 0.9999);
        double tail = track * rho / (1.0 - rho);
        if (tail <= policy_.tol) {
          if (++below_tol_streak >= 2) {
            stats.tail_estimate = tail;
            stop = true;
          }
        } else {
          below_tol_streak = 0;
        }
      }
      mag2 = mag1;
      mag1 = track;

      if (stop) {
        stats.terms_used = groups_done;
        if (stats.tail_estimate == 0.0 && fixed_n && mag1 > 0.0 && mag2 > 0.0) {
          double rho = std::min(mag1 / mag2, 0.9999);
          stats.tail_estimate = mag1 * rho / (1.0 - rho);
        }
        if constexpr (std::is_same_v<T, double>) {
          if (accel && ab_pow_accel != 0.0) total += limit_sum * ab_pow_accel / (1.0 - ab);
        }
        return total;
      }
      ab_pow *= ab;
      mu_pow0 *= mu0;
      mu_pow1 *= mu1;
    }
  }

 private:
  const TwoDiskConfig& cfg_;
  const SeriesPolicy& policy_;
  double ab_;
  std::optional<CompositeSystem> sys_[2];
};

}  // namespace twodisk
