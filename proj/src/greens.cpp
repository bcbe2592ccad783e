#include "twodisk/greens.hpp"

#include <cmath>

namespace twodisk {

namespace {

struct ValGrad {
  double v{0.0};
  Vec2 g;
  ValGrad& operator+=(const ValGrad& o) {
    v += o.v;
    g += o.g;
    return *this;
  }
  double norm() const { return std::abs(v) + g.norm(); }
};

/// Up to two log sources sharing the same mapped evaluation points: the actual
/// source y and, for y inside an inclusion, that inclusion's center carrying
/// the constant-in-y correction weight.
struct LogTargets {
  int n{1};
  Complex yt[2];
  double ct[2]{1.0, 0.0};

  double value(Complex w) const {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      double d = std::abs(w - yt[i]);
      if (d == 0.0)
        throw Error(Status::singular_evaluation, "kernel evaluated at its log singularity");
      s += ct[i] * std::log(d);
    }
    return s;
  }
  Vec2 gradient(Complex w) const {
    Complex g{0.0, 0.0};
    for (int i = 0; i < n; ++i) {
      Complex dz = w - yt[i];
      if (std::abs(dz) == 0.0)
        throw Error(Status::singular_evaluation, "kernel gradient at its log singularity");
      g += ct[i] / std::conj(dz);
    }
    return Vec2(g);
  }
};

Region resolve_region(Vec2 p, const std::optional<RegionTag>& hint, const TwoDiskConfig& cfg) {
  if (hint) {
    Region r;
    r.tag = *hint;
    return r;
  }
  return cfg.classify(p);
}

void run_streams(SeriesWalker& walker, const AuxBranch& br, Complex x, const LogTargets& T,
                 bool want_v, bool want_g, const SeriesPolicy& policy, double& v, Vec2& g,
                 SeriesStats& stats) {
  auto grad_term = [&](double wt, Complex w, const ConjMoebius& iter, const ConjMoebius* tail,
                       Complex tp) -> Vec2 {
    Vec2 gv = T.gradient(w);
    Vec2 g1 = iter.pullback_gradient(tp, gv);
    Vec2 g2 = tail ? tail->pullback_gradient(x, g1) : g1;
    return wt * g2;
  };
  std::function<double(Complex)> limit = [&](Complex fp) { return T.value(fp); };

  bool slow_value = false;
  double ab = std::abs(walker.ab());
  if (ab > 0.0 && policy.tol > 0.0)
    slow_value = std::log(policy.tol) / std::log(ab) > policy.accel_threshold;

  if (want_v && want_g && !slow_value) {
    ValGrad r = walker.run<ValGrad>(br, x, stats,
                                    [&](double wt, Complex w, const ConjMoebius& iter,
                                        const ConjMoebius* tail, Complex tp) -> ValGrad {
                                      return {wt * T.value(w), grad_term(wt, w, iter, tail, tp)};
                                    });
    v += r.v;
    g += r.g;
    return;
  }
  if (want_v) {
    v += walker.run<double>(
        br, x, stats,
        [&](double wt, Complex w, const ConjMoebius&, const ConjMoebius*, Complex) {
          return wt * T.value(w);
        },
        &limit);
  }
  if (want_g) {
    SeriesStats gs;
    g += walker.run<Vec2>(br, x, gs, grad_term);
    stats.terms_used = std::max(stats.terms_used, gs.terms_used);
    stats.tail_estimate += gs.tail_estimate;
  }
}

GreensEval greens_eval(Vec2 x, Vec2 y, const TwoDiskConfig& cfg, const SeriesPolicy& policy,
                       std::optional<RegionTag> xrh, std::optional<RegionTag> yrh, bool want_v,
                       bool want_g, bool aux_only) {
  GreensEval out;
  out.x_region = resolve_region(x, xrh, cfg);
  out.y_region = resolve_region(y, yrh, cfg);
  if ((x - y).norm2() == 0.0)
    throw Error(Status::singular_evaluation, "evaluation point coincides with the source");

  const RegionTag xr = out.x_region.tag;
  const RegionTag yr = out.y_region.tag;
  SeriesWalker walker(cfg, policy);
  SeriesStats stats;
  double v = 0.0;
  Vec2 g;

  const bool same_inc1 = (yr == RegionTag::inclusion1 && xr == RegionTag::inclusion1);
  const bool same_inc2 = (yr == RegionTag::inclusion2 && xr == RegionTag::inclusion2);

  if (same_inc1 || same_inc2) {
    const int i = same_inc1 ? 1 : 2;
    const double ai = same_inc1 ? cfg.alpha : cfg.beta;
    const double ki = same_inc1 ? cfg.k1 : cfg.k2;
    const Disk di = cfg.disk(i);
    const Complex ci = di.center.cplx();
    const double ri = di.radius;

    LogTargets T;
    if (aux_only) {
      T.n = 1;
      T.yt[0] = y.cplx();
      T.ct[0] = 1.0;
    } else {
      T.n = 2;
      T.yt[0] = y.cplx();
      T.ct[0] = 1.0;
      T.yt[1] = ci;
      T.ct[1] = ai / (1.0 - ai);
    }

    // Regrouped closed part: the inversion is never applied to x, so the
    // center is not a pole of the evaluation.
    Complex xc = x.cplx();
    Complex q = 1.0 + (ci - y.cplx()) * std::conj(xc - ci) / (ri * ri);
    double absq = std::abs(q);
    if (absq == 0.0)
      throw Error(Status::singular_evaluation, "regrouped kernel factor vanished");
    if (want_v) {
      v += (1.0 / ki) * std::log((x - y).norm());
      if (aux_only) {
        double dc = std::abs(xc - ci);
        if (dc == 0.0)
          throw Error(Status::singular_evaluation,
                      "auxiliary kernel diverges at the disk center; eval_G removes it");
        v += (ai / ki) * (2.0 * std::log(ri) - std::log(dc) + std::log(absq));
      } else {
        v += (ai / ki) * std::log(absq) + (2.0 * ai / ((1.0 - ai) * ki)) * std::log(ri);
      }
    }
    if (want_g) {
      g += (1.0 / ki) * Vec2(1.0 / std::conj(xc - y.cplx()));
      Complex B = (ci - y.cplx()) / (ri * ri);
      g += (ai / ki) * Vec2(B / q);
      if (aux_only) {
        Complex dc = xc - ci;
        if (std::abs(dc) == 0.0)
          throw Error(Status::singular_evaluation,
                      "auxiliary kernel gradient diverges at the disk center");
        g -= (ai / ki) * Vec2(1.0 / std::conj(dc));
      }
    }

    AuxBranch br = aux_branch(xr, yr, cfg);
    br.closed.clear();
    run_streams(walker, br, xc, T, want_v, want_g, policy, v, g, stats);
  } else {
    LogTargets T;
    T.n = 1;
    T.yt[0] = y.cplx();
    T.ct[0] = 1.0;
    if (!aux_only && yr == RegionTag::inclusion1) {
      T.n = 2;
      T.yt[1] = cfg.c1.cplx();
      T.ct[1] = cfg.alpha / (1.0 - cfg.alpha);
    } else if (!aux_only && yr == RegionTag::inclusion2) {
      T.n = 2;
      T.yt[1] = cfg.c2.cplx();
      T.ct[1] = cfg.beta / (1.0 - cfg.beta);
    }

    AuxBranch br = aux_branch(xr, yr, cfg);
    Complex xc = x.cplx();
    for (const auto& ct : br.closed) {
      if (ct.map == BaseMap::identity) {
        if (want_v) v += ct.coeff * T.value(xc);
        if (want_g) g += ct.coeff * T.gradient(xc);
      } else {
        ConjMoebius m = walker.base_map(ct.map);
        Complex w = m.apply(xc);
        if (want_v) v += ct.coeff * T.value(w);
        if (want_g) g += ct.coeff * m.pullback_gradient(xc, T.gradient(w));
      }
    }
    run_streams(walker, br, xc, T, want_v, want_g, policy, v, g, stats);
  }

  out.value = v;
  out.grad = g;
  out.terms_used = stats.terms_used;
  out.tail_estimate = stats.tail_estimate;
  if (want_v && !std::isfinite(out.value))
    throw Error(Status::singular_evaluation, "evaluation produced a non-finite value");
  return out;
}

}  // namespace

GreensEval eval_aux(Vec2 x, Vec2 y, const TwoDiskConfig& cfg, const SeriesPolicy& policy,
                    std::optional<RegionTag> xr, std::optional<RegionTag> yr) {
  return greens_eval(x, y, cfg, policy, xr, yr, true, false, true);
}

GreensEval eval_G(Vec2 x, Vec2 y, const TwoDiskConfig& cfg, const SeriesPolicy& policy,
                  std::optional<RegionTag> xr, std::optional<RegionTag> yr) {
  return greens_eval(x, y, cfg, policy, xr, yr, true, false, false);
}

GreensEval grad_G(Vec2 x, Vec2 y, const TwoDiskConfig& cfg, const SeriesPolicy& policy,
                  std::optional<RegionTag> xr, std::optional<RegionTag> yr) {
  return greens_eval(x, y, cfg, policy, xr, yr, false, true, false);
}

GreensEval eval_G_full(Vec2 x, Vec2 y, const TwoDiskConfig& cfg, const SeriesPolicy& policy,
                       std::optional<RegionTag> xr, std::optional<RegionTag> yr) {
  return greens_eval(x, y, cfg, policy, xr, yr, true, true, false);
}

JumpReport interface_jump(Vec2 y, int circle, Vec2 s, const TwoDiskConfig& cfg,
                          const SeriesPolicy& policy, double h) {
  if (circle != 1 && circle != 2)
    throw Error(Status::invalid_argument, "interface circle must be 1 or 2");
  if (!(h > 1e-8 && h < cfg.eps / 10.0))
    throw Error(Status::invalid_argument, "jump step h must lie in (1e-8, eps/10)");
  Disk d = cfg.disk(circle);
  Vec2 rad = s - d.center;
  double rn = rad.norm();
  if (std::abs(rn - d.radius) > 1e-9 * d.radius)
    throw Error(Status::invalid_argument, "jump point does not lie on the requested circle");
  Vec2 nu = rad * (1.0 / rn);
  Vec2 sp = d.center + nu * d.radius;  // snap exactly onto the circle

  RegionTag in_tag = cfg.inclusion_tag(circle);
  RegionTag out_tag = RegionTag::matrix;
  double a_in = cfg.coefficient_of(in_tag);
  double a_out = 1.0;

  double dval[2], dflx[2], tails = 0.0;
  double steps[2] = {h, h / 2.0};
  for (int lev = 0; lev < 2; ++lev) {
    double t = steps[lev];
    GreensEval eo = eval_G_full(sp + nu * t, y, cfg, policy, out_tag, std::nullopt);
    GreensEval ei = eval_G_full(sp - nu * t, y, cfg, policy, in_tag, std::nullopt);
    dval[lev] = eo.value - ei.value;
    dflx[lev] = a_out * eo.grad.dot(nu) - a_in * ei.grad.dot(nu);
    tails = std::max(tails, eo.tail_estimate + ei.tail_estimate);
  }
  JumpReport rep;
  rep.value_jump = std::abs(2.0 * dval[1] - dval[0]);
  rep.flux_jump = std::abs(2.0 * dflx[1] - dflx[0]);
  rep.tail_estimate = tails;
  return rep;
}

double flux_around_source(Vec2 y, double rho, const TwoDiskConfig& cfg,
                          const SeriesPolicy& policy) {
  if (!(rho > 0.0)) throw Error(Status::invalid_argument, "contour radius must be positive");
  for (int i = 1; i <= 2; ++i) {
    Disk d = cfg.disk(i);
    double dist = (y - d.center).norm();
    if (dist < rho + d.radius + 1e-12 && dist > std::abs(rho - d.radius) - 1e-12)
      throw Error(Status::invalid_contour, "contour crosses (or touches) an interface circle");
    if (dist <= rho)
      throw Error(Status::invalid_contour, "contour must exclude the disk centers");
  }
  const int n = 256;
  double sum = 0.0;
  for (int k = 0; k < n; ++k) {
    double th = 2.0 * M_PI * k / n;
    Vec2 nu{std::cos(th), std::sin(th)};
    Vec2 xk = y + nu * rho;
    double a = cfg.coefficient(xk, cfg.classify(xk, 0.0).tag);
    GreensEval e = grad_G(xk, y, cfg, policy);
    sum += a * e.grad.dot(nu);
  }
  return sum * rho * (2.0 * M_PI / n);
}

}  // namespace twodisk
