#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "twodisk/greens.hpp"

using namespace twodisk;
using twodisk::testing::Lcg;

namespace {

// Brute-force oracle: direct summation of the reflection series with pointwise
// sequential inversions. Shares nothing with the closed-form evaluation path.
double brute_aux(Vec2 xv, Vec2 yv, const TwoDiskConfig& cfg, int terms) {
  const Complex x = xv.cplx(), y = yv.cplx();
  const double a = cfg.alpha, b = cfg.beta, ab = a * b;
  const double k1 = cfg.k1, k2 = cfg.k2;
  ConjMoebius p1 = inversion(1, cfg), p2 = inversion(2, cfg);
  auto lg = [&](Complex w) { return std::log(std::abs(w - y)); };
  auto step21 = [&](Complex z) { return p2.apply(p1.apply(z)); };
  auto step12 = [&](Complex z) { return p1.apply(p2.apply(z)); };
  RegionTag xr = cfg.classify(xv).tag, yr = cfg.classify(yv).tag;
  double s = 0.0;

  if (yr == RegionTag::matrix) {
    if (xr == RegionTag::inclusion1) {
      Complex u = x, v = p2.apply(x);
      double w = 2.0 / (k1 + 1.0), ap = 1.0;
      for (int l = 0; l < terms; ++l) {
        s += w * ap * (lg(u) - b * lg(v));
        u = step12(u);
        v = step21(v);
        ap *= ab;
      }
    } else if (xr == RegionTag::inclusion2) {
      Complex u = x, v = p1.apply(x);
      double w = 2.0 / (k2 + 1.0), ap = 1.0;
      for (int l = 0; l < terms; ++l) {
        s += w * ap * (lg(u) - a * lg(v));
        u = step21(u);
        v = step12(v);
        ap *= ab;
      }
    } else {
      s = lg(x);
      Complex u12 = step12(x), u21 = step21(x);
      Complex v2 = p2.apply(x), v1 = p1.apply(x);
      double ap = ab, apm = 1.0;
      for (int l = 1; l < terms; ++l) {
        s += ap * (lg(u12) + lg(u21)) - apm * (b * lg(v2) + a * lg(v1));
        u12 = step12(u12);
        u21 = step21(u21);
        v2 = step21(v2);
        v1 = step12(v1);
        apm = ap;
        ap *= ab;
      }
    }
    return s;
  }

  if (yr == RegionTag::inclusion1) {
    if (xr == RegionTag::inclusion1) {
      s = (lg(x) + a * lg(p1.apply(x))) / k1;
      Complex v = p2.apply(x);
      double w = -4.0 * b / ((k1 + 1.0) * (k1 + 1.0)), ap = 1.0;
      for (int l = 0; l < terms; ++l) {
        s += w * ap * lg(v);
        v = step21(v);
        ap *= ab;
      }
    } else if (xr == RegionTag::matrix) {
      Complex u = x, v = p2.apply(x);
      double w = 2.0 / (k1 + 1.0), ap = 1.0;
      for (int l = 0; l < terms; ++l) {
        s += w * ap * (lg(u) - b * lg(v));
        u = step21(u);
        v = step21(v);
        ap *= ab;
      }
    } else {
      Complex u = x;
      double w = 4.0 / ((k1 + 1.0) * (k2 + 1.0)), ap = 1.0;
      for (int l = 0; l < terms; ++l) {
        s += w * ap * lg(u);
        u = step21(u);
        ap *= ab;
      }
    }
    return s;
  }

  // yr == inclusion2, mirror of the above
  if (xr == RegionTag::inclusion2) {
    s = (lg(x) + b * lg(p2.apply(x))) / k2;
    Complex v = p1.apply(x);
    double w = -4.0 * a / ((k2 + 1.0) * (k2 + 1.0)), ap = 1.0;
    for (int l = 0; l < terms; ++l) {
      s += w * ap * lg(v);
      v = step12(v);
      ap *= ab;
    }
  } else if (xr == RegionTag::matrix) {
    Complex u = x, v = p1.apply(x);
    double w = 2.0 / (k2 + 1.0), ap = 1.0;
    for (int l = 0; l < terms; ++l) {
      s += w * ap * (lg(u) - a * lg(v));
      u = step12(u);
      v = step12(v);
      ap *= ab;
    }
  } else {
    Complex u = x;
    double w = 4.0 / ((k1 + 1.0) * (k2 + 1.0)), ap = 1.0;
    for (int l = 0; l < terms; ++l) {
      s += w * ap * lg(u);
      u = step12(u);
      ap *= ab;
    }
  }
  return s;
}

double brute_G(Vec2 x, Vec2 y, const TwoDiskConfig& cfg, int terms) {
  RegionTag yr = cfg.classify(y).tag;
  double s = brute_aux(x, y, cfg, terms);
  if (yr == RegionTag::inclusion1)
    s += cfg.alpha / (1.0 - cfg.alpha) * brute_aux(x, cfg.c1, cfg, terms);
  else if (yr == RegionTag::inclusion2)
    s += cfg.beta / (1.0 - cfg.beta) * brute_aux(x, cfg.c2, cfg, terms);
  return s;
}

Vec2 sample_region(Lcg& rng, const TwoDiskConfig& cfg, RegionTag t) {
  for (;;) {
    Vec2 p{rng.uniform(-2.5, 2.5), rng.uniform(-2.5, 2.5)};
    if (cfg.classify(p).tag != t) continue;
    double margin = std::min(std::abs(cfg.disk(1).boundary_distance(p)),
                             std::abs(cfg.disk(2).boundary_distance(p)));
    if (margin > 5e-3) return p;
  }
}

const RegionTag kTags[3] = {RegionTag::matrix, RegionTag::inclusion1, RegionTag::inclusion2};

}  // namespace

TEST_CASE("unit contrast collapses to free space") {
  auto cfg = TwoDiskConfig::create(0.1, 1.0, 1.0, 1.0, 1.0);
  SeriesPolicy pol;
  Lcg rng(5);
  int done = 0;
  for (RegionTag tx : kTags)
    for (RegionTag ty : kTags)
      for (int i = 0; i < 12; ++i) {
        Vec2 x = sample_region(rng, cfg, tx);
        Vec2 y = sample_region(rng, cfg, ty);
        if ((x - y).norm() < 1e-3) continue;
        double expect = std::log((x - y).norm());
        GreensEval aux = eval_aux(x, y, cfg, pol);
        GreensEval g = eval_G_full(x, y, cfg, pol);
        CHECK(std::abs(aux.value - expect) <= 1e-12 * std::max(1.0, std::abs(expect)));
        CHECK(std::abs(g.value - expect) <= 1e-12 * std::max(1.0, std::abs(expect)));
        Vec2 gexp = (x - y) * (1.0 / (x - y).norm2());
        CHECK((g.grad - gexp).norm() <= 1e-12 * std::max(1.0, gexp.norm()));
        ++done;
      }
  CHECK(done >= 100);
}

TEST_CASE("one passive disk collapses to the single-disk image formula") {
  auto cfg = TwoDiskConfig::create(0.08, 1.0, 1.0, 6.0, 1.0);  // beta = 0
  SeriesPolicy pol;
  ConjMoebius phi1 = inversion(1, cfg);
  Lcg rng(9);
  for (int i = 0; i < 40; ++i) {
    Vec2 x = sample_region(rng, cfg, RegionTag::matrix);
    Vec2 y = sample_region(rng, cfg, RegionTag::matrix);
    if ((x - y).norm() < 1e-3) continue;
    double expect = std::log((x - y).norm()) -
                    cfg.alpha * std::log(std::abs(phi1.apply(x.cplx()) - y.cplx()));
    GreensEval e = eval_aux(x, y, cfg, pol);
    CHECK(std::abs(e.value - expect) <= 10.0 * pol.tol * std::max(1.0, std::abs(expect)));
  }
}

TEST_CASE("reflection series agrees with the long fixed-N oracle") {
  auto cfg = TwoDiskConfig::create(0.1, 1.0, 1.0, 5.0, 5.0);
  SeriesPolicy pol;
  pol.tol = 1e-10;

  // the configuration's own regions decide the branch; x in disk 2, y in disk 1
  Vec2 y{0.3, 0.2}, x{-0.9, 0.0};
  REQUIRE(cfg.classify(y).tag == RegionTag::inclusion1);
  REQUIRE(cfg.classify(x).tag == RegionTag::inclusion2);
  double oracle = brute_aux(x, y, cfg, 10000);
  GreensEval e = eval_aux(x, y, cfg, pol);
  CHECK(std::abs(e.value - oracle) <= 1e-8);
  CHECK(e.tail_estimate <= pol.tol);
  CHECK(e.terms_used >= 3);

  Lcg rng(77);
  for (RegionTag tx : kTags)
    for (RegionTag ty : kTags)
      for (int i = 0; i < 4; ++i) {
        Vec2 xs = sample_region(rng, cfg, tx);
        Vec2 ys = sample_region(rng, cfg, ty);
        if ((xs - ys).norm() < 5e-2) continue;
        if (tx == ty && (tx == RegionTag::inclusion1 || tx == RegionTag::inclusion2)) {
          CHECK(std::abs(eval_G(xs, ys, cfg, pol).value - brute_G(xs, ys, cfg, 3000)) <= 1e-8);
        } else {
          CHECK(std::abs(eval_aux(xs, ys, cfg, pol).value - brute_aux(xs, ys, cfg, 3000)) <=
                1e-8);
          CHECK(std::abs(eval_G(xs, ys, cfg, pol).value - brute_G(xs, ys, cfg, 3000)) <= 1e-8);
        }
      }
}

TEST_CASE("fixed-N and accelerated summation agree with the adaptive path") {
  auto cfg = TwoDiskConfig::create(0.1, 1.0, 1.0, 100.0, 100.0);
  Vec2 x{0.0, 0.02}, y{0.4, 0.9};
  SeriesPolicy pol;
  double ref = eval_G(x, y, cfg, pol).value;

  SeriesPolicy fixed;
  fixed.tail_mode = TailMode::fixed_n;
  fixed.max_terms = 2000;
  CHECK(std::abs(eval_G(x, y, cfg, fixed).value - ref) <= 1e-10);

  SeriesPolicy accel;
  accel.accel_threshold = 5;  // force the fixed-point tail splitting
  GreensEval ea = eval_G(x, y, cfg, accel);
  CHECK(std::abs(ea.value - ref) <= 1e-8);
  CHECK(ea.terms_used < eval_G(x, y, cfg, pol).terms_used);
}

TEST_CASE("series truncation failure carries the partial value") {
  auto cfg = TwoDiskConfig::create(0.1, 1.0, 1.0, 1000.0, 1000.0);
  SeriesPolicy pol;
  pol.max_terms = 4;
  pol.tol = 1e-14;
  CHECK_THROWS_AS((void)eval_G({0.0, 0.1}, {0.5, 0.8}, cfg, pol), TruncationFailure);
  try {
    (void)eval_G({0.0, 0.1}, {0.5, 0.8}, cfg, pol);
  } catch (const TruncationFailure& t) {
    CHECK(t.terms_used >= 4);
    CHECK(std::isfinite(t.partial_value));
  }
}

TEST_CASE("interface continuity of the kernel and its weighted flux") {
  auto cfg = TwoDiskConfig::create(0.1, 1.0, 1.0, 7.0, 0.2);
  SeriesPolicy pol;
  pol.tol = 1e-10;
  double h = cfg.eps / 20.0;
  Vec2 sources[3] = {{0.0, 0.5}, cfg.c1 + Vec2{0.3, 0.25}, cfg.c2 + Vec2{-0.2, 0.3}};
  for (Vec2 y : sources)
    for (int circle = 1; circle <= 2; ++circle) {
      Disk d = cfg.disk(circle);
      for (int i = 0; i < 8; ++i) {
        double th = 2.0 * M_PI * (i + 0.3) / 8.0;
        Vec2 s = d.center + Vec2{std::cos(th), std::sin(th)} * d.radius;
        JumpReport rep = interface_jump(y, circle, s, cfg, pol, h);
        CAPTURE(circle);
        CAPTURE(th);
        CHECK(rep.value_jump <= 1e-6);
        CHECK(rep.flux_jump <= 1e-5);
      }
    }

  // free space: nothing to jump
  auto triv = TwoDiskConfig::create(0.1, 1.0, 1.0, 1.0, 1.0);
  JumpReport rep0 = interface_jump({0.0, 0.5}, 1, {triv.eps / 2.0, 0.0}, triv, pol, h);
  CHECK(rep0.value_jump <= 1e-10);
  CHECK(rep0.flux_jump <= 1e-10);

  CHECK_THROWS_AS((void)interface_jump({0.0, 0.5}, 1, {0.0, 0.0}, cfg, pol, h), Error);
  CHECK_THROWS_AS(
      (void)interface_jump({0.0, 0.5}, 1, {cfg.eps / 2.0, 0.0}, cfg, pol, cfg.eps), Error);
}

TEST_CASE("the unweighted normal derivative genuinely jumps") {
  auto cfg = TwoDiskConfig::create(0.1, 1.0, 1.0, 7.0, 0.2);
  SeriesPolicy pol;
  Vec2 y{0.0, 0.5};
  Disk d = cfg.disk(1);
  Vec2 s = d.center + Vec2{std::cos(2.1), std::sin(2.1)} * d.radius;
  Vec2 nu = (s - d.center) * (1.0 / d.radius);
  double h = cfg.eps / 20.0;
  auto one_sided = [&](double sign, RegionTag tag) {
    double d1 = grad_G(s + nu * (sign * h), y, cfg, pol, tag).grad.dot(nu);
    double d2 = grad_G(s + nu * (sign * h / 2.0), y, cfg, pol, tag).grad.dot(nu);
    return 2.0 * d2 - d1;
  };
  double out = one_sided(+1.0, RegionTag::matrix);
  double in = one_sided(-1.0, RegionTag::inclusion1);
  CHECK(std::abs(out - in) >= (cfg.k1 - 1.0) * std::abs(out) / cfg.k1 - 1e-5);
}

TEST_CASE("flux around the source equals 2 pi in every region") {
  auto cfg = TwoDiskConfig::create(0.1, 1.0, 1.0, 50.0, 0.3);
  SeriesPolicy pol;
  pol.tol = 1e-10;
  const double two_pi = 2.0 * M_PI;

  CHECK(std::abs(flux_around_source({0.0, 0.0}, cfg.eps / 4.0, cfg, pol) - two_pi) <= 1e-6);
  Vec2 y1 = cfg.c1 + Vec2{cfg.r1 / 2.0, 0.0};
  CHECK(std::abs(flux_around_source(y1, cfg.r1 / 8.0, cfg, pol) - two_pi) <= 1e-6);
  Vec2 y2 = cfg.c2 + Vec2{-cfg.r2 / 3.0, 0.1};
  CHECK(std::abs(flux_around_source(y2, cfg.r2 / 8.0, cfg, pol) - two_pi) <= 1e-6);

  // moving the contour within one region changes nothing
  double f1 = flux_around_source(y1, cfg.r1 / 8.0, cfg, pol);
  double f2 = flux_around_source(y1, cfg.r1 / 4.0, cfg, pol);
  CHECK(std::abs(f1 - f2) <= 1e-6);

  CHECK_THROWS_AS((void)flux_around_source({0.0, 0.0}, 1.0, cfg, pol), Error);   // crosses
  CHECK_THROWS_AS((void)flux_around_source(y1, cfg.r1 / 1.9, cfg, pol), Error);  // center inside
}

TEST_CASE("disk centers are removable for the corrected kernel") {
  auto cfg = TwoDiskConfig::create(0.1, 1.0, 1.0, 7.0, 0.2);
  SeriesPolicy pol;
  pol.tol = 1e-12;

  // source at the center: k1*G - log|x - c1| obeys the mean value property
  Lcg rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    Vec2 x0 = twodisk::testing::random_point_in_disk(rng, cfg.disk(1), 0.6);
    double rho = rng.uniform(0.05, 0.8 * (cfg.r1 - (x0 - cfg.c1).norm() - 1e-3));
    if ((x0 - cfg.c1).norm() < 1e-3) continue;
    auto harm = [&](Vec2 p) {
      return cfg.k1 * eval_G(p, cfg.c1, cfg, pol, RegionTag::inclusion1).value -
             std::log((p - cfg.c1).norm());
    };
    double mean = 0.0;
    const int npts = 64;
    for (int i = 0; i < npts; ++i) {
      double th = 2.0 * M_PI * i / npts;
      mean += harm(x0 + Vec2{std::cos(th), std::sin(th)} * rho);
    }
    mean /= npts;
    CHECK(std::abs(mean - harm(x0)) <= 1e-6);
  }

  // x -> c1 limits agree from four directions, and match the direct value
  Vec2 y = cfg.c1 + Vec2{0.3, 0.1};
  double direct = eval_G(cfg.c1, y, cfg, pol, RegionTag::inclusion1).value;
  const double delta = 1e-6;
  for (Vec2 dir : {Vec2{1, 0}, Vec2{-1, 0}, Vec2{0, 1}, Vec2{0.7071, 0.7071}}) {
    double lim = eval_G(cfg.c1 + dir * delta, y, cfg, pol, RegionTag::inclusion1).value;
    CHECK(std::abs(lim - direct) <= 1e-6);
  }
  // the uncorrected kernel is genuinely singular there
  CHECK_THROWS_AS((void)eval_aux(cfg.c1, y, cfg, pol), Error);
}

TEST_CASE("truncation planning") {
  SeriesPolicy pol;

  auto unit = TwoDiskConfig::create(0.04, 1.0, 1.0, 1.0, 1.0);
  CHECK(plan_truncation(unit, pol, SeriesQuantity::value) == 1);

  // |alpha*beta| = 0.9 at eps = 0.04: gradient series with B = 10, tol = 1e-8
  double a = std::sqrt(0.9);
  double k = (1.0 + a) / (1.0 - a);
  auto cfg = TwoDiskConfig::create(0.04, 1.0, 1.0, k, k);
  SeriesPolicy p2;
  p2.tol = 1e-8;
  int n = plan_truncation(cfg, p2, SeriesQuantity::gradient, 10.0);
  CHECK(n == 27);
  double q = 0.9 / 1.96;
  CHECK(std::pow(q, n) * 10.0 <= p2.tol);            // first dropped term
  CHECK(std::pow(q, n - 1) * 10.0 > p2.tol);         // minimality

  // value series with |alpha*beta| = 0.99, tol = 1e-6, B = 10
  double a99 = std::sqrt(0.99);
  double k99 = (1.0 + a99) / (1.0 - a99);
  auto cfg99 = TwoDiskConfig::create(0.04, 1.0, 1.0, k99, k99);
  SeriesPolicy p3;
  p3.tol = 1e-6;
  CHECK(plan_truncation(cfg99, p3, SeriesQuantity::value, 10.0) == 1604);
  CHECK(std::pow(0.99, 1604) * 10.0 <= p3.tol);

  SeriesPolicy tiny;
  tiny.tol = 1e-6;
  tiny.max_terms = 100;
  CHECK_THROWS_AS((void)plan_truncation(cfg99, tiny, SeriesQuantity::value, 10.0),
                  TruncationFailure);
}

TEST_CASE("harmonic away from the source") {
  auto cfg = TwoDiskConfig::create(0.1, 1.0, 1.0, 5.0, 5.0);
  SeriesPolicy pol;
  pol.tol = 1e-10;
  Vec2 y{0.0, 0.6};
  const double h = 1e-3;
  for (Vec2 x : {Vec2{0.0, -0.8}, Vec2{1.3, 0.9}, cfg.c1 + Vec2{0.4, 0.3},
                 cfg.c2 + Vec2{0.2, -0.4}}) {
    double lap = eval_G(x + Vec2{h, 0}, y, cfg, pol).value +
                 eval_G(x - Vec2{h, 0}, y, cfg, pol).value +
                 eval_G(x + Vec2{0, h}, y, cfg, pol).value +
                 eval_G(x - Vec2{0, h}, y, cfg, pol).value -
                 4.0 * eval_G(x, y, cfg, pol).value;
    CHECK(std::abs(lap / (h * h)) <= 1e-3);
  }
}

TEST_CASE("gradient agrees with finite differences of the value") {
  auto cfg = TwoDiskConfig::create(0.1, 1.0, 1.0, 10.0, 10.0);
  SeriesPolicy pol;
  pol.tol = 1e-12;
  Lcg rng(21);
  int checked = 0;
  while (checked < 50) {
    Vec2 x{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
    Vec2 y{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
    if ((x - y).norm() < 0.05) continue;
    double margin = std::min(std::abs(cfg.disk(1).boundary_distance(x)),
                             std::abs(cfg.disk(2).boundary_distance(x)));
    if (margin < 5e-3 || (x - cfg.c1).norm() < 1e-2 || (x - cfg.c2).norm() < 1e-2) continue;
    const double h = 1e-6;
    Vec2 fd{(eval_G(x + Vec2{h, 0}, y, cfg, pol).value -
             eval_G(x - Vec2{h, 0}, y, cfg, pol).value) /
                (2 * h),
            (eval_G(x + Vec2{0, h}, y, cfg, pol).value -
             eval_G(x - Vec2{0, h}, y, cfg, pol).value) /
                (2 * h)};
    Vec2 g = grad_G(x, y, cfg, pol).grad;
    CHECK((g - fd).norm() <= std::max(1e-6, 10.0 * pol.tol) * std::max(1.0, g.norm()));
    ++checked;
  }
}

TEST_CASE("axis symmetry kills the transverse gradient component") {
  auto cfg = TwoDiskConfig::create(0.1, 1.0, 1.0, 30.0, 4.0);
  SeriesPolicy pol;
  Vec2 y{-2.2, 0.0};
  for (double t : {-0.04, -0.01, 0.02, 0.045}) {
    GreensEval e = grad_G({t, 0.0}, y, cfg, pol);
    CHECK(std::abs(e.grad.y) <= 1e-12 * std::max(1.0, std::abs(e.grad.x)));
  }
}

TEST_CASE("kernel symmetry in its two arguments is reported, not assumed") {
  auto cfg = TwoDiskConfig::create(0.1, 1.0, 1.0, 7.0, 0.2);
  SeriesPolicy pol;
  Vec2 x{0.0, 0.4}, y{1.4, 0.9};
  double gxy = eval_G(x, y, cfg, pol).value;
  double gyx = eval_G(y, x, cfg, pol).value;
  CHECK(std::isfinite(gxy));
  CHECK(std::isfinite(gyx));
  MESSAGE("measured G(x,y) - G(y,x) = " << gxy - gyx);
}

TEST_CASE("coincident points are rejected") {
  auto cfg = TwoDiskConfig::create(0.1, 1.0, 1.0, 5.0, 5.0);
  SeriesPolicy pol;
  CHECK_THROWS_AS((void)eval_G({0.3, 0.2}, {0.3, 0.2}, cfg, pol), Error);
}
