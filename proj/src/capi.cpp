#include "twodisk.h"

#include <cstring>
#include <string>

#include "twodisk/fv.hpp"
#include "twodisk/greens.hpp"
#include "twodisk/moebius.hpp"
#include "twodisk/potentials.hpp"

using namespace twodisk;

struct td_config {
  TwoDiskConfig cfg;
};
struct td_map {
  ConjMoebius m;
};
struct td_source {
  PiecewiseSource src;
};
struct td_solver {
  SolutionEvaluator eval;
  TwoDiskConfig cfg;
};
struct td_fv {
  FvGrid grid;
  TwoDiskConfig cfg;
};

namespace {

thread_local std::string g_last_error;

td_status to_status(const Error& e) {
  g_last_error = e.what();
  switch (e.status()) {
    case Status::invalid_config: return TD_ERR_INVALID_CONFIG;
    case Status::invalid_argument: return TD_ERR_INVALID_ARGUMENT;
    case Status::ambiguous_evaluation: return TD_ERR_AMBIGUOUS_EVALUATION;
    case Status::pole: return TD_ERR_POLE;
    case Status::degenerate_map: return TD_ERR_DEGENERATE_MAP;
    case Status::singular_evaluation: return TD_ERR_SINGULAR_EVALUATION;
    case Status::truncation_failure: return TD_ERR_TRUNCATION_FAILURE;
    case Status::quadrature_failure: return TD_ERR_QUADRATURE_FAILURE;
    case Status::invalid_contour: return TD_ERR_INVALID_CONTOUR;
    case Status::under_resolved: return TD_ERR_UNDER_RESOLVED;
    case Status::solver_failure: return TD_ERR_SOLVER_FAILURE;
    case Status::too_close_to_interface: return TD_ERR_TOO_CLOSE_TO_INTERFACE;
    case Status::shape_mismatch: return TD_ERR_SHAPE_MISMATCH;
    case Status::io_error: return TD_ERR_IO;
    default: return TD_ERR_INTERNAL;
  }
}

template <class Fn>
td_status guarded(Fn&& fn) {
  try {
    fn();
    return TD_OK;
  } catch (const Error& e) {
    return to_status(e);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return TD_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return TD_ERR_INTERNAL;
  }
}

td_status need(bool cond, const char* msg) {
  if (cond) return TD_OK;
  g_last_error = msg;
  return TD_ERR_INVALID_ARGUMENT;
}

SeriesPolicy policy_of(const td_policy* p) {
  SeriesPolicy sp;
  if (p) {
    sp.tol = p->tol;
    sp.max_terms = p->max_terms;
    sp.tail_mode = p->fixed_n ? TailMode::fixed_n : TailMode::geometric_extrapolation;
    sp.accel_threshold = p->accel_threshold;
  }
  return sp;
}

QuadratureGrid quad_of(const td_quad* q) {
  QuadratureGrid g;
  if (q) {
    g.n_r = q->n_r;
    g.n_theta = q->n_theta;
    g.near_n_r = q->near_n_r;
    g.near_n_theta = q->near_n_theta;
    g.cell_gauss = q->cell_gauss;
    g.max_depth = q->max_depth;
    g.declared_tol = q->declared_tol;
  }
  return g;
}

std::optional<RegionTag> hint_of(int h) {
  if (h < 0) return std::nullopt;
  return static_cast<RegionTag>(h);
}

void fill_eval(const GreensEval& e, td_eval* out) {
  out->value = e.value;
  out->grad[0] = e.grad.x;
  out->grad[1] = e.grad.y;
  out->terms_used = e.terms_used;
  out->tail_estimate = e.tail_estimate;
  out->quad_error = 0.0;
  out->x_region = static_cast<int>(e.x_region.tag);
  out->y_region = static_cast<int>(e.y_region.tag);
}

void fill_eval(const EvalReport& e, td_eval* out) {
  out->value = e.value;
  out->grad[0] = e.grad.x;
  out->grad[1] = e.grad.y;
  out->terms_used = e.terms_used;
  out->tail_estimate = e.tail_estimate;
  out->quad_error = e.quad_error;
  out->x_region = static_cast<int>(e.x_region.tag);
  out->y_region = -1;
}

Composite comp_of(td_composite k) {
  return k == TD_MAP_TWO_ONE ? Composite::two_one : Composite::one_two;
}

}  // namespace

extern "C" {

const char* td_version(void) { return "twodisk 1.0.0"; }
const char* td_last_error(void) { return g_last_error.c_str(); }

void td_policy_default(td_policy* p) {
  if (!p) return;
  SeriesPolicy sp;
  p->tol = sp.tol;
  p->max_terms = sp.max_terms;
  p->fixed_n = 0;
  p->accel_threshold = sp.accel_threshold;
}

void td_quad_default(td_quad* q) {
  if (!q) return;
  QuadratureGrid g;
  q->n_r = g.n_r;
  q->n_theta = g.n_theta;
  q->near_n_r = g.near_n_r;
  q->near_n_theta = g.near_n_theta;
  q->cell_gauss = g.cell_gauss;
  q->max_depth = g.max_depth;
  q->declared_tol = g.declared_tol;
}

td_status td_config_create(double eps, double r1, double r2, double k1, double k2,
                           td_config** out) {
  if (td_status s = need(out != nullptr, "null output handle")) return s;
  return guarded([&] { *out = new td_config{TwoDiskConfig::create(eps, r1, r2, k1, k2)}; });
}

td_status td_config_create_unchecked(double eps, double r1, double r2, double k1, double k2,
                                     td_config** out) {
  if (td_status s = need(out != nullptr, "null output handle")) return s;
  return guarded(
      [&] { *out = new td_config{TwoDiskConfig::create_unchecked(eps, r1, r2, k1, k2)}; });
}

void td_config_destroy(td_config* cfg) { delete cfg; }

td_status td_config_contrast(const td_config* cfg, double* alpha, double* beta) {
  if (td_status s = need(cfg && alpha && beta, "null argument")) return s;
  *alpha = cfg->cfg.alpha;
  *beta = cfg->cfg.beta;
  return TD_OK;
}

td_status td_config_centers(const td_config* cfg, double c1[2], double c2[2]) {
  if (td_status s = need(cfg && c1 && c2, "null argument")) return s;
  c1[0] = cfg->cfg.c1.x;
  c1[1] = cfg->cfg.c1.y;
  c2[0] = cfg->cfg.c2.x;
  c2[1] = cfg->cfg.c2.y;
  return TD_OK;
}

td_status td_config_gap_parameter(const td_config* cfg, double* tau) {
  if (td_status s = need(cfg && tau, "null argument")) return s;
  *tau = cfg->cfg.gap_parameter();
  return TD_OK;
}

td_status td_classify(const td_config* cfg, double x1, double x2, double tol, int* tag,
                      int* on_boundary, int* circle) {
  if (td_status s = need(cfg && tag, "null argument")) return s;
  return guarded([&] {
    Region r = tol < 0.0 ? cfg->cfg.classify({x1, x2}) : cfg->cfg.classify({x1, x2}, tol);
    *tag = static_cast<int>(r.tag);
    if (on_boundary) *on_boundary = r.on_boundary ? 1 : 0;
    if (circle) *circle = r.circle;
  });
}

td_status td_coefficient(const td_config* cfg, double x1, double x2, int side_hint, double* a) {
  if (td_status s = need(cfg && a, "null argument")) return s;
  return guarded([&] { *a = cfg->cfg.coefficient({x1, x2}, hint_of(side_hint)); });
}

td_status td_map_inversion(const td_config* cfg, int which, td_map** out) {
  if (td_status s = need(cfg && out, "null argument")) return s;
  return guarded([&] { *out = new td_map{inversion(which, cfg->cfg)}; });
}

td_status td_map_compose(const td_map* g, const td_map* f, td_map** out) {
  if (td_status s = need(g && f && out, "null argument")) return s;
  return guarded([&] { *out = new td_map{compose(g->m, f->m)}; });
}

td_status td_map_iterate(const td_config* cfg, td_composite kind, long l, td_map** out) {
  if (td_status s = need(cfg && out, "null argument")) return s;
  return guarded([&] { *out = new td_map{iterate_closed_form(comp_of(kind), l, cfg->cfg)}; });
}

void td_map_destroy(td_map* m) { delete m; }

td_status td_map_apply(const td_map* m, double x1, double x2, double* y1, double* y2) {
  if (td_status s = need(m && y1 && y2, "null argument")) return s;
  return guarded([&] {
    Complex w = m->m.apply({x1, x2});
    *y1 = w.real();
    *y2 = w.imag();
  });
}

td_status td_map_parity(const td_map* m, int* anti_holomorphic) {
  if (td_status s = need(m && anti_holomorphic, "null argument")) return s;
  *anti_holomorphic = m->m.conj_first ? 1 : 0;
  return TD_OK;
}

td_status td_map_fixed_points(const td_config* cfg, td_composite kind, double in_b1[2],
                              double in_b2[2], double normalized[2]) {
  if (td_status s = need(cfg && in_b1 && in_b2, "null argument")) return s;
  return guarded([&] {
    CompositeSystem sys = composite_system(comp_of(kind), cfg->cfg);
    in_b1[0] = sys.fixed_in_b1.real();
    in_b1[1] = sys.fixed_in_b1.imag();
    in_b2[0] = sys.fixed_in_b2.real();
    in_b2[1] = sys.fixed_in_b2.imag();
    if (normalized) {
      normalized[0] = sys.norm_fixed_b1;
      normalized[1] = sys.norm_fixed_b2;
    }
  });
}

td_status td_map_iterate_derivative(const td_config* cfg, td_composite kind, long l, int order,
                                    double z1, double z2, double* re, double* im) {
  if (td_status s = need(cfg && re && im, "null argument")) return s;
  return guarded([&] {
    Complex d = iterate_derivative(comp_of(kind), l, order, {z1, z2}, cfg->cfg);
    *re = d.real();
    *im = d.imag();
  });
}

td_status td_decay_certificate(const td_config* cfg, td_composite kind, int order, int l_max,
                               double* ratios, int* count, double* ratio_bound, double* limsup,
                               int* ok) {
  if (td_status s = need(cfg != nullptr, "null config")) return s;
  return guarded([&] {
    DecayCertificate cert = decay_certificate(comp_of(kind), cfg->cfg, order, l_max);
    if (ratios && count) {
      int cap = *count;
      int n = static_cast<int>(cert.ratio.size());
      if (n > cap) n = cap;
      for (int i = 0; i < n; ++i) ratios[i] = cert.ratio[i];
      *count = n;
    } else if (count) {
      *count = static_cast<int>(cert.ratio.size());
    }
    if (ratio_bound) *ratio_bound = cert.ratio_bound;
    if (limsup) *limsup = cert.limsup_ratio;
    if (ok) *ok = cert.ok ? 1 : 0;
  });
}

td_status td_eval_aux(const td_config* cfg, const td_policy* pol, double x1, double x2,
                      double y1, double y2, int x_hint, int y_hint, td_eval* out) {
  if (td_status s = need(cfg && out, "null argument")) return s;
  return guarded([&] {
    SeriesPolicy sp = policy_of(pol);
    fill_eval(eval_aux({x1, x2}, {y1, y2}, cfg->cfg, sp, hint_of(x_hint), hint_of(y_hint)), out);
  });
}

td_status td_eval_g(const td_config* cfg, const td_policy* pol, double x1, double x2, double y1,
                    double y2, int x_hint, int y_hint, td_eval* out) {
  if (td_status s = need(cfg && out, "null argument")) return s;
  return guarded([&] {
    SeriesPolicy sp = policy_of(pol);
    fill_eval(eval_G({x1, x2}, {y1, y2}, cfg->cfg, sp, hint_of(x_hint), hint_of(y_hint)), out);
  });
}

td_status td_grad_g(const td_config* cfg, const td_policy* pol, double x1, double x2, double y1,
                    double y2, int x_hint, int y_hint, td_eval* out) {
  if (td_status s = need(cfg && out, "null argument")) return s;
  return guarded([&] {
    SeriesPolicy sp = policy_of(pol);
    fill_eval(grad_G({x1, x2}, {y1, y2}, cfg->cfg, sp, hint_of(x_hint), hint_of(y_hint)), out);
  });
}

td_status td_interface_jump(const td_config* cfg, const td_policy* pol, double y1, double y2,
                            int circle, double s1, double s2, double h, double* value_jump,
                            double* flux_jump, double* tail) {
  if (td_status s = need(cfg && value_jump && flux_jump, "null argument")) return s;
  return guarded([&] {
    SeriesPolicy sp = policy_of(pol);
    JumpReport rep = interface_jump({y1, y2}, circle, {s1, s2}, cfg->cfg, sp, h);
    *value_jump = rep.value_jump;
    *flux_jump = rep.flux_jump;
    if (tail) *tail = rep.tail_estimate;
  });
}

td_status td_flux_around_source(const td_config* cfg, const td_policy* pol, double y1, double y2,
                                double rho, double* flux) {
  if (td_status s = need(cfg && flux, "null argument")) return s;
  return guarded([&] {
    SeriesPolicy sp = policy_of(pol);
    *flux = flux_around_source({y1, y2}, rho, cfg->cfg, sp);
  });
}

td_status td_plan_truncation(const td_config* cfg, const td_policy* pol, int quantity,
                             double running_bound, int* n_terms) {
  if (td_status s = need(cfg && n_terms, "null argument")) return s;
  return guarded([&] {
    SeriesPolicy sp = policy_of(pol);
    SeriesQuantity q = quantity == 0   ? SeriesQuantity::value
                       : quantity == 1 ? SeriesQuantity::gradient
                                       : SeriesQuantity::derivative;
    *n_terms = plan_truncation(cfg->cfg, sp, q, running_bound);
  });
}

td_status td_source_lower_bound(const td_config* cfg, double cx, double cy, double radius,
                                td_source** out) {
  if (td_status s = need(cfg && out, "null argument")) return s;
  return guarded(
      [&] { *out = new td_source{lower_bound_source(cfg->cfg, {cx, cy}, radius)}; });
}

td_status td_source_constant_disk1(const td_config* cfg, td_source** out) {
  if (td_status s = need(cfg && out, "null argument")) return s;
  return guarded([&] { *out = new td_source{constant_disk1_source(cfg->cfg)}; });
}

td_status td_source_radial_bump(const td_config* cfg, double cx, double cy, double radius,
                                double amplitude, td_source** out) {
  if (td_status s = need(cfg && out, "null argument")) return s;
  return guarded(
      [&] { *out = new td_source{radial_bump_source(cfg->cfg, {cx, cy}, radius, amplitude)}; });
}

namespace {

td_status add_region_data(PiecewiseSource& src, int region, td_vector_fn f, td_scalar_fn f3,
                          double cx, double cy, double r, void* ctx) {
  if (region < 0 || region > 2) {
    g_last_error = "region index must be 0, 1, or 2";
    return TD_ERR_INVALID_ARGUMENT;
  }
  RegionSource& rs = src.region[region];
  rs.support = {{cx, cy}, r};
  if (f) {
    rs.f = [f, ctx](Vec2 p) {
      double out[2];
      f(p.x, p.y, out, ctx);
      return Vec2{out[0], out[1]};
    };
    rs.has_f = true;
  }
  if (f3) {
    rs.f3 = [f3, ctx](Vec2 p) { return f3(p.x, p.y, ctx); };
    rs.has_f3 = true;
  }
  return TD_OK;
}

}  // namespace

td_status td_source_custom(const td_config* cfg, int region, td_vector_fn f, td_scalar_fn f3,
                           double support_cx, double support_cy, double support_r, void* ctx,
                           td_source** out) {
  if (td_status s = need(cfg && out && (f || f3), "need a config and at least one component"))
    return s;
  auto* src = new td_source{};
  td_status s = add_region_data(src->src, region, f, f3, support_cx, support_cy, support_r, ctx);
  if (s != TD_OK) {
    delete src;
    return s;
  }
  *out = src;
  return TD_OK;
}

td_status td_source_add_region(td_source* src, const td_config* cfg, int region, td_vector_fn f,
                               td_scalar_fn f3, double support_cx, double support_cy,
                               double support_r, void* ctx) {
  if (td_status s = need(src && cfg && (f || f3), "need a source and at least one component"))
    return s;
  return add_region_data(src->src, region, f, f3, support_cx, support_cy, support_r, ctx);
}

void td_source_destroy(td_source* src) { delete src; }

td_status td_potential_h(const td_config* cfg, const td_source* src, const td_quad* quad,
                         int region, double x1, double x2, double* value) {
  if (td_status s = need(cfg && src && value, "null argument")) return s;
  return guarded(
      [&] { *value = potential_h(region, {x1, x2}, src->src, cfg->cfg, quad_of(quad)); });
}

td_status td_potential_g(const td_config* cfg, const td_source* src, const td_quad* quad,
                         int region, double x1, double x2, double* value) {
  if (td_status s = need(cfg && src && value, "null argument")) return s;
  return guarded(
      [&] { *value = potential_g(region, {x1, x2}, src->src, cfg->cfg, quad_of(quad)); });
}

td_status td_potential_h_grad(const td_config* cfg, const td_source* src, const td_quad* quad,
                              int region, double x1, double x2, double grad[2]) {
  if (td_status s = need(cfg && src && grad, "null argument")) return s;
  return guarded([&] {
    Vec2 g = potential_h_gradient(region, {x1, x2}, src->src, cfg->cfg, quad_of(quad));
    grad[0] = g.x;
    grad[1] = g.y;
  });
}

td_status td_solver_create(const td_config* cfg, const td_source* src, const td_policy* pol,
                           const td_quad* quad, td_solver** out) {
  if (td_status s = need(cfg && src && out, "null argument")) return s;
  return guarded([&] {
    *out = new td_solver{SolutionEvaluator(cfg->cfg, src->src, policy_of(pol), quad_of(quad)),
                         cfg->cfg};
  });
}

void td_solver_destroy(td_solver* s) { delete s; }

td_status td_solve_u(td_solver* s, double x1, double x2, int region_hint, td_eval* out) {
  if (td_status st = need(s && out, "null argument")) return st;
  return guarded([&] { fill_eval(s->eval.value({x1, x2}, hint_of(region_hint)), out); });
}

td_status td_grad_u(td_solver* s, double x1, double x2, int region_hint, td_eval* out) {
  if (td_status st = need(s && out, "null argument")) return st;
  return guarded([&] { fill_eval(s->eval.gradient({x1, x2}, hint_of(region_hint)), out); });
}

td_status td_higher_deriv_u(td_solver* s, double x1, double x2, int order, double* tensor,
                            double* norm_out, double* fd_error, td_eval* report) {
  if (td_status st = need(s && tensor && norm_out, "null argument")) return st;
  return guarded([&] {
    TensorReport rep = s->eval.higher_derivative({x1, x2}, order);
    for (size_t i = 0; i < rep.entries.size(); ++i) tensor[i] = rep.entries[i];
    *norm_out = rep.norm;
    if (fd_error) *fd_error = rep.fd_error;
    if (report) {
      report->value = rep.norm;
      report->grad[0] = report->grad[1] = 0.0;
      report->terms_used = rep.terms_used;
      report->tail_estimate = rep.tail_estimate;
      report->quad_error = rep.quad_error;
      report->x_region = -1;
      report->y_region = -1;
    }
  });
}

td_status td_fv_solve(const td_config* cfg, const td_source* src, double box_lo, double box_hi,
                      int n, int dirichlet_from_series, const td_policy* pol,
                      const td_quad* quad, td_fv** out) {
  if (td_status s = need(cfg && src && out, "null argument")) return s;
  return guarded([&] {
    Box box{{box_lo, box_lo}, {box_hi, box_hi}};
    FvBc bc = dirichlet_from_series ? FvBc::dirichlet_from_series : FvBc::zero_dirichlet;
    *out = new td_fv{fv_solve(cfg->cfg, src->src, box, n, bc, policy_of(pol), quad_of(quad)),
                     cfg->cfg};
  });
}

void td_fv_destroy(td_fv* fv) { delete fv; }

td_status td_fv_dims(const td_fv* fv, int* n, double* h) {
  if (td_status s = need(fv != nullptr, "null grid")) return s;
  if (n) *n = fv->grid.n;
  if (h) *h = fv->grid.h;
  return TD_OK;
}

td_status td_fv_value(const td_fv* fv, int i, int j, double* u) {
  if (td_status s = need(fv && u, "null argument")) return s;
  if (i < 0 || j < 0 || i >= fv->grid.n || j >= fv->grid.n) {
    g_last_error = "cell index out of range";
    return TD_ERR_INVALID_ARGUMENT;
  }
  *u = fv->grid.u[fv->grid.idx(i, j)];
  return TD_OK;
}

td_status td_fv_stats(const td_fv* fv, int* iterations, double* residual, double* runtime_s) {
  if (td_status s = need(fv != nullptr, "null grid")) return s;
  if (iterations) *iterations = fv->grid.stats.iterations;
  if (residual) *residual = fv->grid.stats.residual;
  if (runtime_s) *runtime_s = fv->grid.stats.runtime_s;
  return TD_OK;
}

td_status td_fv_compare_series(const td_fv* fv, td_solver* solver, int exclusion_cells,
                               int stride, double* l2_rel, double* linf_rel, int* samples,
                               double* runtime_s) {
  if (td_status s = need(fv && solver && l2_rel && linf_rel, "null argument")) return s;
  return guarded([&] {
    CompareReport rep =
        compare_to_series(fv->grid, solver->eval, fv->cfg, exclusion_cells, stride);
    *l2_rel = rep.l2_rel;
    *linf_rel = rep.linf_rel;
    if (samples) *samples = rep.samples;
    if (runtime_s) *runtime_s = rep.runtime_s;
  });
}

} /* extern "C" */
