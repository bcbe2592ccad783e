#include "twodisk/reflection.hpp"

namespace twodisk {

AuxBranch aux_branch(RegionTag xr, RegionTag yr, const TwoDiskConfig& cfg) {
  const double a = cfg.alpha, b = cfg.beta;
  const double k1 = cfg.k1, k2 = cfg.k2;
  AuxBranch br;
  using C = Composite;
  using M = BaseMap;
  switch (yr) {
    case RegionTag::matrix:
      if (xr == RegionTag::matrix) {
        br.closed = {{1.0, M::identity}};
        br.streams = {{1.0, C::one_two, M::identity, 1},
                      {1.0, C::two_one, M::identity, 1},
                      {-b, C::two_one, M::inv2, 0},
                      {-a, C::one_two, M::inv1, 0}};
      } else if (xr == RegionTag::inclusion1) {
        br.streams = {{2.0 / (k1 + 1.0), C::one_two, M::identity, 0},
                      {-2.0 * b / (k1 + 1.0), C::two_one, M::inv2, 0}};
      } else {
        br.streams = {{2.0 / (k2 + 1.0), C::two_one, M::identity, 0},
                      {-2.0 * a / (k2 + 1.0), C::one_two, M::inv1, 0}};
      }
      break;
    case RegionTag::inclusion1:
      if (xr == RegionTag::inclusion1) {
        br.closed = {{1.0 / k1, M::identity}, {a / k1, M::inv1}};
        br.streams = {{-4.0 * b / ((k1 + 1.0) * (k1 + 1.0)), C::two_one, M::inv2, 0}};
      } else if (xr == RegionTag::matrix) {
        br.streams = {{2.0 / (k1 + 1.0), C::two_one, M::identity, 0},
                      {-2.0 * b / (k1 + 1.0), C::two_one, M::inv2, 0}};
      } else {
        br.streams = {{4.0 / ((k1 + 1.0) * (k2 + 1.0)), C::two_one, M::identity, 0}};
      }
      break;
    case RegionTag::inclusion2:
      if (xr == RegionTag::inclusion1) {
        br.streams = {{4.0 / ((k1 + 1.0) * (k2 + 1.0)), C::one_two, M::identity, 0}};
      } else if (xr == RegionTag::matrix) {
        br.streams = {{2.0 / (k2 + 1.0), C::one_two, M::identity, 0},
                      {-2.0 * a / (k2 + 1.0), C::one_two, M::inv1, 0}};
      } else {
        br.closed = {{1.0 / k2, M::identity}, {b / k2, M::inv2}};
        br.streams = {{-4.0 * a / ((k2 + 1.0) * (k2 + 1.0)), C::one_two, M::inv1, 0}};
      }
      break;
  }
  return br;
}

int plan_truncation(const TwoDiskConfig& cfg, const SeriesPolicy& policy, SeriesQuantity quantity,
                    double running_bound) {
  if (running_bound <= 0.0)
    throw Error(Status::invalid_argument, "running bound must be positive");
  double ab = std::abs(cfg.alpha * cfg.beta);
  if (ab >= 1.0) throw Error(Status::invalid_argument, "|alpha*beta| must be < 1");
  if (ab == 0.0) return 1;
  double q = ab;
  if (quantity != SeriesQuantity::value) {
    double tau = cfg.gap_parameter();
    q /= (1.0 + tau) * (1.0 + tau);
  }
  if (running_bound <= policy.tol) return 1;
  double n = std::ceil(std::log(policy.tol / running_bound) / std::log(q));
  if (n > static_cast<double>(policy.max_terms))
    throw TruncationFailure("required series length exceeds max_terms", 0.0, 0.0,
                            policy.max_terms);
  return n < 1.0 ? 1 : static_cast<int>(n);
}

}  // namespace twodisk
