#pragma once

#include <cmath>
#include <cstdint>

#include "twodisk/geometry.hpp"

namespace twodisk::testing {

// Deterministic LCG so expected values never drift between runs.
struct Lcg {
  std::uint64_t s{0x9E3779B97F4A7C15ull};
  explicit Lcg(std::uint64_t seed = 12345) { s ^= seed * 0x2545F4914F6CDD1Dull; }
  std::uint64_t next() {
    s = s * 6364136223846793005ull + 1442695040888963407ull;
    return s >> 11;
  }
  double uniform(double a, double b) {
    return a + (b - a) * (next() % (1ull << 53)) / static_cast<double>(1ull << 53);
  }
};

inline double halton(std::uint64_t i, int base) {
  double f = 1.0, r = 0.0;
  while (i > 0) {
    f /= base;
    r += f * (i % base);
    i /= base;
  }
  return r;
}

inline Vec2 random_point_in_disk(Lcg& rng, const Disk& d, double max_frac = 0.97) {
  double r = d.radius * max_frac * std::sqrt(rng.uniform(0.0, 1.0));
  double th = rng.uniform(0.0, 2.0 * M_PI);
  return d.center + Vec2{r * std::cos(th), r * std::sin(th)};
}

}  // namespace twodisk::testing
