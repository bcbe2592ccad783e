#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "twodisk/moebius.hpp"

using namespace twodisk;
using twodisk::testing::Lcg;

namespace {

// Brute-force oracle: pointwise repeated application of the inversions, no
// closed forms, no matrix composition.
Complex sequential_composite(Composite kind, long l, Complex z, const TwoDiskConfig& cfg) {
  ConjMoebius first = inversion(kind == Composite::two_one ? 1 : 2, cfg);
  ConjMoebius second = inversion(kind == Composite::two_one ? 2 : 1, cfg);
  for (long i = 0; i < l; ++i) z = second.apply(first.apply(z));
  return z;
}

Vec2 random_matrix_point(Lcg& rng, const TwoDiskConfig& cfg) {
  for (;;) {
    Vec2 p{rng.uniform(-4.0, 4.0), rng.uniform(-4.0, 4.0)};
    if (cfg.classify(p).tag == RegionTag::matrix &&
        std::abs(cfg.disk(1).boundary_distance(p)) > 1e-3 &&
        std::abs(cfg.disk(2).boundary_distance(p)) > 1e-3)
      return p;
  }
}

}  // namespace

TEST_CASE("inversions are involutions and fix their circle") {
  auto cfg = TwoDiskConfig::create(0.08, 1.0, 1.3, 7.0, 0.3);
  Lcg rng(7);
  for (int which = 1; which <= 2; ++which) {
    ConjMoebius phi = inversion(which, cfg);
    CHECK(phi.conj_first);
    Disk d = cfg.disk(which);
    for (int i = 0; i < 1000; ++i) {
      Vec2 p{rng.uniform(-4.0, 4.0), rng.uniform(-4.0, 4.0)};
      if ((p - d.center).norm() < 1e-3) continue;
      Complex back = phi.apply(phi.apply(p.cplx()));
      CHECK(std::abs(back - p.cplx()) <= 1e-12 * (1.0 + std::abs(p.cplx())));
    }
    for (int i = 0; i < 100; ++i) {
      double th = 2.0 * M_PI * i / 100.0;
      Complex s = d.center.cplx() + d.radius * Complex{std::cos(th), std::sin(th)};
      CHECK(std::abs(phi.apply(s) - s) <= 1e-12);
    }
  }
}

TEST_CASE("gap-side boundary point is fixed; the center is a pole") {
  auto cfg = TwoDiskConfig::create(0.1, 1.0, 1.0, 5.0, 5.0);
  ConjMoebius phi1 = inversion(1, cfg);
  Complex s{cfg.eps / 2.0, 0.0};
  CHECK(std::abs(phi1.apply(s) - s) <= 1e-14);
  CHECK_THROWS_AS((void)phi1.apply(cfg.c1.cplx()), Error);
  try {
    (void)phi1.apply(cfg.c1.cplx());
  } catch (const Error& e) {
    CHECK(e.status() == Status::pole);
  }
}

TEST_CASE("composition matches sequential application and tracks parity") {
  auto cfg = TwoDiskConfig::create(0.05, 1.0, 0.8, 3.0, 9.0);
  ConjMoebius phi1 = inversion(1, cfg), phi2 = inversion(2, cfg);
  ConjMoebius both = compose(phi2, phi1);
  CHECK_FALSE(both.conj_first);             // two conjugations cancel
  CHECK(compose(phi2, both).conj_first);    // odd word
  ConjMoebius self = compose(phi1, phi1);   // identity up to scale
  Lcg rng(11);
  for (int i = 0; i < 100; ++i) {
    Complex z{rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)};
    if (std::abs(z - cfg.c1.cplx()) < 1e-2 || std::abs(z - cfg.c2.cplx()) < 1e-2) continue;
    CHECK(std::abs(both.apply(z) - phi2.apply(phi1.apply(z))) <= 1e-12 * (1.0 + std::abs(z)));
    CHECK(std::abs(self.apply(z) - z) <= 1e-12 * (1.0 + std::abs(z)));
  }
}

TEST_CASE("singular composition is rejected") {
  ConjMoebius bad;
  bad.a = 1.0;
  bad.b = 2.0;
  bad.c = 2.0;
  bad.d = 4.0;  // rank one
  ConjMoebius ok = ConjMoebius::identity();
  CHECK_THROWS_AS((void)compose(bad, ok), Error);
}

TEST_CASE("closed-form iterates against the sequential oracle") {
  auto cfg = TwoDiskConfig::create(0.1, 1.0, 1.0, 11.0, 4.0);
  CompositeSystem sys = composite_system(Composite::two_one, cfg);
  Lcg rng(23);

  ConjMoebius id = sys.iterate(0);
  ConjMoebius one = sys.iterate(1);
  for (int i = 0; i < 25; ++i) {
    Complex z = twodisk::testing::random_point_in_disk(rng, cfg.disk(2)).cplx();
    CHECK(std::abs(id.apply(z) - z) <= 1e-13);
    CHECK(std::abs(one.apply(z) - sys.step.apply(z)) <= 1e-12);
  }

  // l = 12 and the full ladder l <= 20
  for (long l : {12L, 1L, 2L, 5L, 20L}) {
    ConjMoebius it = sys.iterate(l);
    double worst = 0.0;
    Lcg rng2(31);
    for (int i = 0; i < 50; ++i) {
      Complex z = twodisk::testing::random_point_in_disk(rng2, cfg.disk(2)).cplx();
      Complex a = it.apply(z);
      Complex b = sequential_composite(Composite::two_one, l, z, cfg);
      worst = std::max(worst, std::abs(a - b));
      CHECK(std::abs(sys.apply_iterate(l, z) - b) <= 1e-9);
    }
    CHECK(worst <= 1e-9);
  }

  // deep iterates stay finite and converge to the attracting fixed point
  Complex deep = sys.apply_iterate(100000, Complex{0.0, 0.0});
  CHECK(std::abs(deep - sys.fixed_att) <= 1e-10);
}

TEST_CASE("iterates agree with brute force for general radii") {
  auto cfg = TwoDiskConfig::create(0.02, 2.0, 0.5, 100.0, 0.01);
  for (Composite kind : {Composite::two_one, Composite::one_two}) {
    CompositeSystem sys = composite_system(kind, cfg);
    Disk target = cfg.disk(kind == Composite::two_one ? 2 : 1);
    Lcg rng(5);
    for (long l : {1L, 7L, 20L}) {
      for (int i = 0; i < 20; ++i) {
        Complex z = twodisk::testing::random_point_in_disk(rng, target).cplx();
        Complex a = sys.iterate(l).apply(z);
        Complex b = sequential_composite(kind, l, z, cfg);
        CHECK(std::abs(a - b) <= 1e-9);
      }
    }
  }
}

TEST_CASE("fixed points: residuals, disk membership, normalized values") {
  // residual + membership + product over a parameter grid
  for (double eps : {0.01, 0.02, 0.04})
    for (double r1 : {0.5, 1.0, 2.0})
      for (double r2 : {0.5, 1.0, 2.0}) {
        auto cfg = TwoDiskConfig::create(eps, r1, r2, 50.0, 3.0);
        for (Composite kind : {Composite::two_one, Composite::one_two}) {
          CompositeSystem sys = composite_system(kind, cfg);
          CHECK(std::abs(sys.step.apply(sys.fixed_in_b1) - sys.fixed_in_b1) <= 1e-12);
          CHECK(std::abs(sys.step.apply(sys.fixed_in_b2) - sys.fixed_in_b2) <= 1e-12);
          CHECK(cfg.disk(1).contains(Vec2(sys.fixed_in_b1)));
          CHECK(cfg.disk(2).contains(Vec2(sys.fixed_in_b2)));
          double prod = sys.norm_fixed_b1 * sys.norm_fixed_b2;
          CHECK(std::abs(prod - r1 * r1 * r2 * r2) <= 1e-10 * std::max(1.0, prod));
        }
      }

  // the wide-gap configuration: normalized fixed points -1/4 and -4
  auto wide = TwoDiskConfig::create_unchecked(0.5, 1.0, 1.0, 5.0, 5.0);
  CompositeSystem sys = composite_system(Composite::two_one, wide);
  double l1 = sys.norm_fixed_b1, l2 = sys.norm_fixed_b2;
  double a = 1.0 + wide.eps / 2.0;
  for (double l : {l1, l2})  // roots of z^2 + 2(2a^2-1)z + 1
    CHECK(std::abs(l * l + 2.0 * (2.0 * a * a - 1.0) * l + 1.0) <= 1e-12 * (1.0 + l * l));
  CHECK(std::abs(l1 - (-0.25)) <= 1e-12);
  CHECK(std::abs(l2 - (-4.0)) <= 1e-12);
  CHECK(std::abs(l1 * l2 - 1.0) <= 1e-12);

  // narrow-gap asymptotics of the attracting normalized fixed point
  for (double eps : {1e-4, 1e-6}) {
    auto cfg = TwoDiskConfig::create(eps, 1.0, 1.0, 5.0, 5.0);
    CompositeSystem s = composite_system(Composite::two_one, cfg);
    CHECK(std::abs(s.norm_fixed_b2 + 1.0 + 2.0 * std::sqrt(eps)) <= 3.0 * eps);
    CHECK(std::abs(s.norm_fixed_b1 + 1.0 - 2.0 * std::sqrt(eps)) <= 3.0 * eps);
  }
}

TEST_CASE("iterate derivatives: identity, finite differences, decay") {
  auto cfg = TwoDiskConfig::create(0.04, 1.0, 1.0, 20.0, 20.0);
  CompositeSystem sys = composite_system(Composite::two_one, cfg);

  CHECK(std::abs(sys.iterate_derivative(0, 1, Complex{0.3, 0.1}) - 1.0) <= 1e-14);
  CHECK(std::abs(sys.iterate_derivative(0, 2, Complex{0.3, 0.1})) <= 1e-14);

  Lcg rng(3);
  for (int i = 0; i < 10; ++i) {
    Complex z = twodisk::testing::random_point_in_disk(rng, cfg.disk(2)).cplx();
    Complex d = sys.iterate_derivative(3, 1, z);
    double h = 1e-6;
    Complex fd = (sys.apply_iterate(3, z + h) - sys.apply_iterate(3, z - h)) / (2.0 * h);
    CHECK(std::abs(d - fd) <= 1e-6 * std::max(1.0, std::abs(d)));
  }

  // |D^2 iterate_l| <= C * l * (1+2 sqrt(eps))^(-2l) with one C across l
  double lam = 1.0 + 2.0 * std::sqrt(cfg.eps);
  double cmin = 1e300, cmax = 0.0;
  for (long l = 4; l <= 12; ++l) {
    double worst = 0.0;
    Lcg rng2(17);
    for (int i = 0; i < 20; ++i) {
      Complex z = twodisk::testing::random_point_in_disk(rng2, cfg.disk(2)).cplx();
      worst = std::max(worst, std::abs(sys.iterate_derivative(l, 2, z)));
    }
    double c = worst * std::pow(lam, 2.0 * l) / l;
    cmin = std::min(cmin, c);
    cmax = std::max(cmax, c);
  }
  CHECK(cmax <= 10.0 * cmin);

  // near-pole guard
  ConjMoebius it = sys.iterate(4);
  Complex pole = -it.d / it.c;
  CHECK_THROWS_AS((void)it.rational_derivative(pole, 1), Error);
}

TEST_CASE("composites map the exterior into their target disk, repeatedly") {
  auto cfg = TwoDiskConfig::create(0.06, 1.0, 0.7, 2.0, 30.0);
  Lcg rng(41);
  for (int i = 0; i < 10; ++i) {
    Vec2 x = random_matrix_point(rng, cfg);
    CompositeSystem s21 = composite_system(Composite::two_one, cfg);
    CompositeSystem s12 = composite_system(Composite::one_two, cfg);
    for (long l = 1; l <= 100; ++l) {
      CHECK(cfg.classify(Vec2(s21.apply_iterate(l, x.cplx()))).tag == RegionTag::inclusion2);
      CHECK(cfg.classify(Vec2(s12.apply_iterate(l, x.cplx()))).tag == RegionTag::inclusion1);
    }
  }
}

TEST_CASE("decay certificates") {
  auto unit = TwoDiskConfig::create(0.04, 1.0, 1.0, 100.0, 100.0);
  DecayCertificate cert = decay_certificate(Composite::two_one, unit, 1, 200);
  CHECK(cert.ratio_bound == doctest::Approx(1.0 / 1.96 + 0.01).epsilon(1e-12));
  CHECK(cert.limsup_ratio <= cert.ratio_bound);
  CHECK(cert.ok);

  // ratios approach 1 from below as the gap degenerates
  auto tight = TwoDiskConfig::create(1e-6, 1.0, 1.0, 100.0, 100.0);
  DecayCertificate c2 = decay_certificate(Composite::two_one, tight, 1, 300);
  CHECK(c2.limsup_ratio < 1.0);
  CHECK(c2.limsup_ratio > 0.99);

  // general radii use the effective gap parameter
  auto gen = TwoDiskConfig::create(0.01, 2.0, 0.5, 100.0, 100.0);
  DecayCertificate c3 = decay_certificate(Composite::one_two, gen, 1, 200);
  double tau = gen.gap_parameter();
  CHECK(c3.ratio_bound == doctest::Approx(1.0 / ((1 + tau) * (1 + tau)) + 0.01));
  CHECK(c3.ok);

  // m = 3: sample_l * (1+2 sqrt(eps))^(2l) / l^2 stays bounded on l in [10,200]
  DecayCertificate c4 = decay_certificate(Composite::two_one, unit, 3, 200);
  double lam = 1.0 + 2.0 * std::sqrt(unit.eps);
  double early = 0.0;
  double late = 0.0;
  for (size_t l = 10; l < c4.sample.size(); ++l) {
    double q = c4.sample[l] * std::pow(lam, 2.0 * double(l)) / (double(l) * double(l));
    if (l <= 30) early = std::max(early, q);
    late = std::max(late, q);
  }
  CHECK(late <= 1.5 * early);
}
