#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "twodisk/geometry.hpp"

using namespace twodisk;

TEST_CASE("configuration validation") {
  CHECK_NOTHROW((void)TwoDiskConfig::create(0.05, 1.0, 1.0, 5.0, 0.2));
  CHECK_THROWS_AS((void)TwoDiskConfig::create(0.5, 1.0, 1.0, 5.0, 5.0), Error);
  CHECK_THROWS_AS((void)TwoDiskConfig::create(0.0, 1.0, 1.0, 5.0, 5.0), Error);
  CHECK_THROWS_AS((void)TwoDiskConfig::create(0.2, 1.0, 1.0, 5.0, 5.0), Error);  // eps > r/10
  CHECK_THROWS_AS((void)TwoDiskConfig::create(0.05, 10.0, 1.0, 5.0, 5.0), Error);
  CHECK_THROWS_AS((void)TwoDiskConfig::create(0.05, 1.0, 1.0, -1.0, 5.0), Error);
  CHECK_THROWS_AS((void)TwoDiskConfig::create(0.05, 1.0, 1.0, 0.0, 5.0), Error);
  // the unchecked factory admits wide gaps for map experiments
  CHECK_NOTHROW((void)TwoDiskConfig::create_unchecked(0.5, 1.0, 1.0, 5.0, 5.0));

  auto cfg = TwoDiskConfig::create(0.1, 1.0, 1.0, 5.0, 5.0);
  CHECK(cfg.c1.x == doctest::Approx(1.05).epsilon(1e-15));
  CHECK(cfg.c2.x == doctest::Approx(-1.05).epsilon(1e-15));
  CHECK((cfg.c1 - cfg.c2).norm() == doctest::Approx(cfg.r1 + cfg.r2 + cfg.eps));
  CHECK(cfg.gap_parameter() == doctest::Approx(2.0 * std::sqrt(cfg.eps)).epsilon(1e-14));
}

TEST_CASE("contrast parameters") {
  auto [a0, b0] = contrast(1.0, 1.0);
  CHECK(a0 == 0.0);
  CHECK(b0 == 0.0);
  auto [a1, b1] = contrast(3.0, 2.0);
  CHECK(a1 == doctest::Approx(0.5).epsilon(1e-15));
  auto [a2, b2] = contrast(1e6, 1.0);
  CHECK(std::abs(a2 - 0.999998000002) <= 1e-12);
  CHECK_THROWS_AS((void)contrast(-2.0, 1.0), Error);

  // bijection: k = (1+alpha)/(1-alpha) recovers k across twelve decades
  for (double k = 1e-6; k <= 1.0000001e6; k *= 10.0) {
    auto [a, b] = contrast(k, 1.0);
    CHECK(a > -1.0);
    CHECK(a < 1.0);
    double back = (1.0 + a) / (1.0 - a);
    CHECK(std::abs(back - k) <= 1e-12 * k);
    auto [an, bn] = contrast(k * 10.0, 1.0);
    CHECK(an > a);  // monotone in k
  }
}

TEST_CASE("classification partitions the plane and matches the coefficient") {
  auto cfg = TwoDiskConfig::create(0.08, 1.0, 0.8, 7.0, 0.25);
  CHECK(cfg.classify({0.0, 0.0}).tag == RegionTag::matrix);
  CHECK_FALSE(cfg.classify({0.0, 0.0}).on_boundary);
  CHECK(cfg.classify(cfg.c1).tag == RegionTag::inclusion1);
  Region edge = cfg.classify({cfg.eps / 2.0, 0.0}, 0.0);
  CHECK(edge.tag == RegionTag::matrix);
  CHECK(edge.on_boundary);
  CHECK(edge.circle == 1);
  CHECK_THROWS_AS((void)cfg.classify({0.0, 0.0}, cfg.eps), Error);  // tol >= eps/4

  for (std::uint64_t i = 1; i <= 100000; ++i) {
    Vec2 p{-5.0 + 10.0 * twodisk::testing::halton(i, 2),
           -5.0 + 10.0 * twodisk::testing::halton(i, 3)};
    Region r = cfg.classify(p);
    int members = (cfg.disk(1).contains(p) ? 1 : 0) + (cfg.disk(2).contains(p) ? 1 : 0);
    CHECK(members <= 1);
    RegionTag expect = cfg.disk(1).contains(p)   ? RegionTag::inclusion1
                       : cfg.disk(2).contains(p) ? RegionTag::inclusion2
                                                 : RegionTag::matrix;
    REQUIRE(r.tag == expect);
    REQUIRE(cfg.coefficient(p, r.tag) == cfg.coefficient_of(r.tag));
  }
}

TEST_CASE("coefficient lookup") {
  auto cfg = TwoDiskConfig::create(0.08, 1.0, 1.0, 7.0, 0.25);
  CHECK(cfg.coefficient({0.0, 0.0}) == 1.0);
  CHECK(cfg.coefficient(cfg.c1) == 7.0);
  CHECK(cfg.coefficient(cfg.c2) == 0.25);
  Vec2 s{cfg.eps / 2.0, 0.0};
  CHECK_THROWS_AS((void)cfg.coefficient(s), Error);
  CHECK(cfg.coefficient(s, RegionTag::inclusion1) == 7.0);
  CHECK(cfg.coefficient(s, RegionTag::matrix) == 1.0);
}

TEST_CASE("mirror symmetry swaps the inclusions") {
  auto cfg = TwoDiskConfig::create(0.06, 1.2, 0.5, 9.0, 0.4);
  auto mir = TwoDiskConfig::create(0.06, 0.5, 1.2, 0.4, 9.0);
  twodisk::testing::Lcg rng(2);
  for (int i = 0; i < 2000; ++i) {
    Vec2 p{rng.uniform(-4.0, 4.0), rng.uniform(-4.0, 4.0)};
    RegionTag t = cfg.classify(p).tag;
    RegionTag tm = mir.classify({-p.x, p.y}).tag;
    RegionTag expect = t == RegionTag::inclusion1   ? RegionTag::inclusion2
                       : t == RegionTag::inclusion2 ? RegionTag::inclusion1
                                                    : RegionTag::matrix;
    REQUIRE(tm == expect);
  }
}
