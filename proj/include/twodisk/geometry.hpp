#pragma once

#include <complex>
#include <optional>

#include "twodisk/error.hpp"

namespace twodisk {

using Complex = std::complex<double>;

/// Physical Green's function = PHYS_SCALE * (what this library computes).
/// The library works in the convention Delta log|x-y| = delta(x-y), so the
/// solution operator satisfies div(a grad u) = 2*pi*(div f + f3).
inline constexpr double PHYS_SCALE = -0.15915494309189533577;  // -1/(2*pi)

struct Vec2 {
  double x{0.0}, y{0.0};

  Vec2() = default;
  Vec2(double xx, double yy) : x(xx), y(yy) {}
  explicit Vec2(Complex z) : x(z.real()), y(z.imag()) {}

  Complex cplx() const { return {x, y}; }
  double norm2() const { return x * x + y * y; }
  double norm() const;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
};

inline Vec2 operator*(double s, Vec2 v) { return v * s; }

struct Disk {
  Vec2 center;
  double radius{0.0};

  bool contains(Vec2 p) const { return (p - center).norm2() < radius * radius; }
  /// Signed distance to the circle: negative inside, positive outside.
  double boundary_distance(Vec2 p) const;
};

enum class RegionTag : int { matrix = 0, inclusion1 = 1, inclusion2 = 2 };

struct Region {
  RegionTag tag{RegionTag::matrix};
  bool on_boundary{false};
  int circle{0};  // 1 or 2 when on_boundary is set
};

/// Two disjoint disks on the x1-axis separated by a gap of width eps, with
/// piecewise-constant conductivity k1 / k2 / 1 (inclusion1 / inclusion2 /
/// matrix). Immutable after construction; every operation here is pure.
struct TwoDiskConfig {
  double eps{0.0};
  double r1{1.0}, r2{1.0};
  double k1{1.0}, k2{1.0};
  double alpha{0.0}, beta{0.0};  // (k-1)/(k+1) contrasts, in (-1,1)
  Vec2 c1, c2;                   // disk centers (eps/2 + r1, 0), (-eps/2 - r2, 0)

  /// Validated factory: eps in (0,1/2), r in (0,10), eps <= min(r1,r2)/10, k in (0,inf).
  static TwoDiskConfig create(double eps, double r1, double r2, double k1, double k2);
  /// Positivity and disk disjointness only; for map-level experiments outside
  /// the estimates' regime.
  static TwoDiskConfig create_unchecked(double eps, double r1, double r2, double k1, double k2);

  Disk disk(int which) const;
  double classify_tol() const { return 1e-12 * (r1 > r2 ? r1 : r2); }

  Region classify(Vec2 p, double tol) const;
  Region classify(Vec2 p) const { return classify(p, classify_tol()); }

  /// Conductivity at p. Points within classify tolerance of an interface need
  /// an explicit side to be meaningful.
  double coefficient(Vec2 p, std::optional<RegionTag> side = std::nullopt) const;
  double coefficient_of(RegionTag t) const;

  /// Effective gap parameter tau = sqrt(2*(1/r1 + 1/r2)*eps); equals 2*sqrt(eps)
  /// for unit radii. Controls the geometric decay of iterated reflections.
  double gap_parameter() const;

  RegionTag inclusion_tag(int which) const {
    return which == 1 ? RegionTag::inclusion1 : RegionTag::inclusion2;
  }
};

/// Contrast pair (alpha, beta); rejects nonpositive conductivities.
std::pair<double, double> contrast(double k1, double k2);

}  // namespace twodisk
