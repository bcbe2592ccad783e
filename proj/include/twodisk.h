/* twodisk: reflection-series Green's function for the two-disk conductivity
 * operator div(a grad .), its representation-formula solutions, and a
 * finite-volume cross-check. C API over the C++ core: opaque handles, status
 * codes; every function returns TD_OK (0) or a td_status error. Error message
 * text for the last failure on the calling thread is available via
 * td_last_error().
 *
 * Convention: Delta log|x-y| = delta(x-y), so solutions satisfy
 * div(a grad u) = 2*pi*(div f + f3). Multiply by TD_PHYS_SCALE = -1/(2*pi)
 * for the physical normalization.
 */
#ifndef TWODISK_H
#define TWODISK_H

#include <stddef.h>

#if defined(_WIN32)
#define TD_API __declspec(dllexport)
#else
#define TD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

#define TD_PHYS_SCALE (-0.15915494309189533577)

typedef enum td_status {
  TD_OK = 0,
  TD_ERR_INVALID_CONFIG = 1,
  TD_ERR_INVALID_ARGUMENT = 2,
  TD_ERR_AMBIGUOUS_EVALUATION = 3,
  TD_ERR_POLE = 4,
  TD_ERR_DEGENERATE_MAP = 5,
  TD_ERR_SINGULAR_EVALUATION = 6,
  TD_ERR_TRUNCATION_FAILURE = 7,
  TD_ERR_QUADRATURE_FAILURE = 8,
  TD_ERR_INVALID_CONTOUR = 9,
  TD_ERR_UNDER_RESOLVED = 10,
  TD_ERR_SOLVER_FAILURE = 11,
  TD_ERR_TOO_CLOSE_TO_INTERFACE = 12,
  TD_ERR_SHAPE_MISMATCH = 13,
  TD_ERR_IO = 14,
  TD_ERR_INTERNAL = 99
} td_status;

typedef enum td_region_tag {
  TD_REGION_MATRIX = 0,
  TD_REGION_INCLUSION1 = 1,
  TD_REGION_INCLUSION2 = 2,
  TD_REGION_AUTO = -1 /* classify instead of hinting */
} td_region_tag;

typedef enum td_composite {
  TD_MAP_TWO_ONE = 0, /* inversion(2) after inversion(1) */
  TD_MAP_ONE_TWO = 1
} td_composite;

typedef struct td_policy {
  double tol;
  int max_terms;
  int fixed_n;          /* nonzero: sum exactly max_terms groups */
  int accel_threshold;  /* fixed-point tail splitting trigger */
} td_policy;

typedef struct td_quad {
  int n_r, n_theta;
  int near_n_r, near_n_theta;
  int cell_gauss, max_depth;
  double declared_tol;
} td_quad;

typedef struct td_eval {
  double value;
  double grad[2];
  int terms_used;
  double tail_estimate;
  double quad_error;
  int x_region;
  int y_region;
} td_eval;

typedef struct td_config td_config;
typedef struct td_map td_map;
typedef struct td_source td_source;
typedef struct td_solver td_solver;
typedef struct td_fv td_fv;

TD_API const char* td_version(void);
TD_API const char* td_last_error(void);

TD_API void td_policy_default(td_policy* p);
TD_API void td_quad_default(td_quad* q);

/* ---- configuration -------------------------------------------------- */
TD_API td_status td_config_create(double eps, double r1, double r2, double k1, double k2,
                                  td_config** out);
/* Positivity/disjointness checks only; for map experiments outside the
 * validated regime. */
TD_API td_status td_config_create_unchecked(double eps, double r1, double r2, double k1,
                                            double k2, td_config** out);
TD_API void td_config_destroy(td_config* cfg);
TD_API td_status td_config_contrast(const td_config* cfg, double* alpha, double* beta);
TD_API td_status td_config_centers(const td_config* cfg, double c1[2], double c2[2]);
TD_API td_status td_config_gap_parameter(const td_config* cfg, double* tau);
TD_API td_status td_classify(const td_config* cfg, double x1, double x2, double tol, int* tag,
                             int* on_boundary, int* circle);
TD_API td_status td_coefficient(const td_config* cfg, double x1, double x2, int side_hint,
                                double* a);

/* ---- inversion maps -------------------------------------------------- */
TD_API td_status td_map_inversion(const td_config* cfg, int which, td_map** out);
TD_API td_status td_map_compose(const td_map* g, const td_map* f, td_map** out);
TD_API td_status td_map_iterate(const td_config* cfg, td_composite kind, long l, td_map** out);
TD_API void td_map_destroy(td_map* m);
TD_API td_status td_map_apply(const td_map* m, double x1, double x2, double* y1, double* y2);
TD_API td_status td_map_parity(const td_map* m, int* anti_holomorphic);
TD_API td_status td_map_fixed_points(const td_config* cfg, td_composite kind, double in_b1[2],
                                     double in_b2[2], double normalized[2]);
TD_API td_status td_map_iterate_derivative(const td_config* cfg, td_composite kind, long l,
                                           int order, double z1, double z2, double* re,
                                           double* im);
/* ratios[i] = sample_{i+1}/sample_i of lattice sup-norms of |D^m iterate_l|;
 * *count is in: capacity, out: written. */
TD_API td_status td_decay_certificate(const td_config* cfg, td_composite kind, int order,
                                      int l_max, double* ratios, int* count, double* ratio_bound,
                                      double* limsup, int* ok);

/* ---- kernel evaluation ----------------------------------------------- */
TD_API td_status td_eval_aux(const td_config* cfg, const td_policy* pol, double x1, double x2,
                             double y1, double y2, int x_hint, int y_hint, td_eval* out);
TD_API td_status td_eval_g(const td_config* cfg, const td_policy* pol, double x1, double x2,
                           double y1, double y2, int x_hint, int y_hint, td_eval* out);
TD_API td_status td_grad_g(const td_config* cfg, const td_policy* pol, double x1, double x2,
                           double y1, double y2, int x_hint, int y_hint, td_eval* out);
TD_API td_status td_interface_jump(const td_config* cfg, const td_policy* pol, double y1,
                                   double y2, int circle, double s1, double s2, double h,
                                   double* value_jump, double* flux_jump, double* tail);
TD_API td_status td_flux_around_source(const td_config* cfg, const td_policy* pol, double y1,
                                       double y2, double rho, double* flux);
/* quantity: 0 value, 1 gradient, 2 higher derivative */
TD_API td_status td_plan_truncation(const td_config* cfg, const td_policy* pol, int quantity,
                                    double running_bound, int* n_terms);

/* ---- sources ---------------------------------------------------------- */
typedef double (*td_scalar_fn)(double x1, double x2, void* ctx);
/* writes f1, f2 into out[0], out[1] */
typedef void (*td_vector_fn)(double x1, double x2, double out[2], void* ctx);

TD_API td_status td_source_lower_bound(const td_config* cfg, double cx, double cy, double radius,
                                       td_source** out);
TD_API td_status td_source_constant_disk1(const td_config* cfg, td_source** out);
TD_API td_status td_source_radial_bump(const td_config* cfg, double cx, double cy, double radius,
                                       double amplitude, td_source** out);
/* Custom region-wise data; pass NULL for absent components. support_* gives
 * the bounding disk of the region's data. */
TD_API td_status td_source_custom(const td_config* cfg, int region, td_vector_fn f,
                                  td_scalar_fn f3, double support_cx, double support_cy,
                                  double support_r, void* ctx, td_source** out);
/* Adds data for another region to an existing source. */
TD_API td_status td_source_add_region(td_source* src, const td_config* cfg, int region,
                                      td_vector_fn f, td_scalar_fn f3, double support_cx,
                                      double support_cy, double support_r, void* ctx);
TD_API void td_source_destroy(td_source* src);

/* ---- potentials and the representation-formula solution --------------- */
TD_API td_status td_potential_h(const td_config* cfg, const td_source* src, const td_quad* quad,
                                int region, double x1, double x2, double* value);
TD_API td_status td_potential_g(const td_config* cfg, const td_source* src, const td_quad* quad,
                                int region, double x1, double x2, double* value);
TD_API td_status td_potential_h_grad(const td_config* cfg, const td_source* src,
                                     const td_quad* quad, int region, double x1, double x2,
                                     double grad[2]);

/* A solver handle keeps quadrature tables and the potential cache alive
 * across evaluations of one configuration; not shareable across threads. */
TD_API td_status td_solver_create(const td_config* cfg, const td_source* src,
                                  const td_policy* pol, const td_quad* quad, td_solver** out);
TD_API void td_solver_destroy(td_solver* s);
TD_API td_status td_solve_u(td_solver* s, double x1, double x2, int region_hint, td_eval* out);
TD_API td_status td_grad_u(td_solver* s, double x1, double x2, int region_hint, td_eval* out);
/* tensor has 2^order entries (bit i of the entry index picks the axis of the
 * i-th derivative); norm_out receives the Frobenius norm. */
TD_API td_status td_higher_deriv_u(td_solver* s, double x1, double x2, int order, double* tensor,
                                   double* norm_out, double* fd_error, td_eval* report);

/* ---- finite-volume oracle --------------------------------------------- */
TD_API td_status td_fv_solve(const td_config* cfg, const td_source* src, double box_lo,
                             double box_hi, int n, int dirichlet_from_series,
                             const td_policy* pol, const td_quad* quad, td_fv** out);
TD_API void td_fv_destroy(td_fv* fv);
TD_API td_status td_fv_dims(const td_fv* fv, int* n, double* h);
TD_API td_status td_fv_value(const td_fv* fv, int i, int j, double* u);
TD_API td_status td_fv_stats(const td_fv* fv, int* iterations, double* residual,
                             double* runtime_s);
/* Mean-adjusted relative errors between the FV field and the series solution
 * on strided cell centers outside the interface exclusion band. */
TD_API td_status td_fv_compare_series(const td_fv* fv, td_solver* solver, int exclusion_cells,
                                      int stride, double* l2_rel, double* linf_rel,
                                      int* samples, double* runtime_s);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* TWODISK_H */
