#include "twodisk/fv.hpp"

#include <chrono>
#include <cmath>

namespace twodisk {

namespace {

double harmonic(double a, double b) { return 2.0 * a * b / (a + b); }

Vec2 field_at(const PiecewiseSource& src, const TwoDiskConfig& cfg, Vec2 p) {
  int j = static_cast<int>(cfg.classify(p, 0.0).tag);
  const RegionSource& rs = src.region[j];
  return rs.has_f ? rs.f(p) : Vec2{};
}

double f3_at(const PiecewiseSource& src, const TwoDiskConfig& cfg, Vec2 p) {
  int j = static_cast<int>(cfg.classify(p, 0.0).tag);
  const RegionSource& rs = src.region[j];
  return rs.has_f3 ? rs.f3(p) : 0.0;
}

}  // namespace

FvGrid fv_solve(const TwoDiskConfig& cfg, const PiecewiseSource& src, Box box, int n, FvBc bc,
                const SeriesPolicy& policy, const QuadratureGrid& grid) {
  if (n < 64) throw Error(Status::invalid_argument, "grid needs n >= 64 cells per side");
  double side = box.hi.x - box.lo.x;
  if (std::abs((box.hi.y - box.lo.y) - side) > 1e-12 * side)
    throw Error(Status::invalid_argument, "solve box must be square");
  FvGrid fv;
  fv.box = box;
  fv.n = n;
  fv.h = side / n;
  if (fv.h > cfg.eps / 6.0)
    throw Error(Status::under_resolved, "gap needs at least 6 cells across eps");
  for (int i = 1; i <= 2; ++i) {
    Disk d = cfg.disk(i);
    if (d.center.x - d.radius < box.lo.x + 0.5 || d.center.x + d.radius > box.hi.x - 0.5 ||
        d.center.y - d.radius < box.lo.y + 0.5 || d.center.y + d.radius > box.hi.y - 0.5)
      throw Error(Status::invalid_argument, "box must contain both disks with margin >= 0.5");
  }
  if (bc == FvBc::zero_dirichlet && !src.empty()) {
    Disk s = src.overall_support();
    if (s.center.x - s.radius < box.lo.x + 0.5 || s.center.x + s.radius > box.hi.x - 0.5 ||
        s.center.y - s.radius < box.lo.y + 0.5 || s.center.y + s.radius > box.hi.y - 0.5)
      throw Error(Status::invalid_argument,
                  "zero-Dirichlet runs need the source support inside the box with margin");
  }

  auto t0 = std::chrono::steady_clock::now();
  const size_t N = static_cast<size_t>(n) * n;
  const double h = fv.h;
  fv.a.resize(N);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      fv.a[fv.idx(i, j)] = cfg.coefficient_of(cfg.classify(fv.cell_center(i, j), 0.0).tag);

  // Face coefficients: aw/ae/as/an per cell (harmonic means; boundary faces
  // use the cell coefficient and a half-cell distance, factor 2).
  std::vector<double> ae(N), an(N), diag(N), b(N, 0.0);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      size_t c = fv.idx(i, j);
      ae[c] = (i + 1 < n) ? harmonic(fv.a[c], fv.a[fv.idx(i + 1, j)]) : 0.0;
      an[c] = (j + 1 < n) ? harmonic(fv.a[c], fv.a[fv.idx(i, j + 1)]) : 0.0;
    }

  // Dirichlet data at boundary face midpoints.
  std::optional<SolutionEvaluator> series;
  if (bc == FvBc::dirichlet_from_series && !src.empty())
    series.emplace(cfg, src, policy, grid);
  auto bdata = [&](Vec2 p) { return series ? series->value(p).value : 0.0; };

  const double two_pi = 2.0 * M_PI;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      size_t c = fv.idx(i, j);
      Vec2 ctr = fv.cell_center(i, j);
      double d = 0.0;
      if (i + 1 < n) d += ae[c];
      if (i > 0) d += ae[fv.idx(i - 1, j)];
      if (j + 1 < n) d += an[c];
      if (j > 0) d += an[fv.idx(i, j - 1)];

      double fe = field_at(src, cfg, {ctr.x + h / 2, ctr.y}).x;
      double fw = field_at(src, cfg, {ctr.x - h / 2, ctr.y}).x;
      double fn = field_at(src, cfg, {ctr.x, ctr.y + h / 2}).y;
      double fs = field_at(src, cfg, {ctr.x, ctr.y - h / 2}).y;
      double rhs = two_pi * (h * (fe - fw + fn - fs) + h * h * f3_at(src, cfg, ctr));
      double bc_term = 0.0;
      if (i == 0) {
        d += 2.0 * fv.a[c];
        bc_term += 2.0 * fv.a[c] * bdata({box.lo.x, ctr.y});
      }
      if (i == n - 1) {
        d += 2.0 * fv.a[c];
        bc_term += 2.0 * fv.a[c] * bdata({box.hi.x, ctr.y});
      }
      if (j == 0) {
        d += 2.0 * fv.a[c];
        bc_term += 2.0 * fv.a[c] * bdata({ctr.x, box.lo.y});
      }
      if (j == n - 1) {
        d += 2.0 * fv.a[c];
        bc_term += 2.0 * fv.a[c] * bdata({ctr.x, box.hi.y});
      }
      diag[c] = d;
      b[c] = -rhs + bc_term;
    }

  auto apply = [&](const std::vector<double>& v, std::vector<double>& out) {
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        size_t c = fv.idx(i, j);
        double s = diag[c] * v[c];
        if (i + 1 < n) s -= ae[c] * v[c + 1];
        if (i > 0) s -= ae[c - 1] * v[c - 1];
        if (j + 1 < n) s -= an[c] * v[c + n];
        if (j > 0) s -= an[c - n] * v[c - n];
        out[c] = s;
      }
  };

  // Jacobi-preconditioned CG to relative residual 1e-10.
  std::vector<double> x(N, 0.0), r(b), z(N), p(N), Ap(N);
  double bnorm = 0.0;
  for (double v : b) bnorm += v * v;
  bnorm = std::sqrt(bnorm);
  if (bnorm == 0.0) {
    fv.u = x;
    fv.stats.runtime_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return fv;
  }
  for (size_t c = 0; c < N; ++c) z[c] = r[c] / diag[c];
  p = z;
  double rz = 0.0;
  for (size_t c = 0; c < N; ++c) rz += r[c] * z[c];
  const double target = 1e-10 * bnorm;
  const int max_iters = 200000;
  int it = 0;
  double rnorm = bnorm;
  for (; it < max_iters; ++it) {
    apply(p, Ap);
    double pAp = 0.0;
    for (size_t c = 0; c < N; ++c) pAp += p[c] * Ap[c];
    if (pAp <= 0.0) throw Error(Status::solver_failure, "CG lost positive definiteness");
    double alpha = rz / pAp;
    rnorm = 0.0;
    for (size_t c = 0; c < N; ++c) {
      x[c] += alpha * p[c];
      r[c] -= alpha * Ap[c];
      rnorm += r[c] * r[c];
    }
    rnorm = std::sqrt(rnorm);
    if (rnorm <= target) {
      ++it;
      break;
    }
    double rz_new = 0.0;
    for (size_t c = 0; c < N; ++c) {
      z[c] = r[c] / diag[c];
      rz_new += r[c] * z[c];
    }
    double beta = rz_new / rz;
    rz = rz_new;
    for (size_t c = 0; c < N; ++c) p[c] = z[c] + beta * p[c];
  }
  if (rnorm > target)
    throw Error(Status::solver_failure, "CG did not reach the residual target");
  fv.u = std::move(x);
  fv.stats.iterations = it;
  fv.stats.residual = rnorm / bnorm;
  fv.stats.runtime_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return fv;
}

std::vector<CellRef> comparison_cells(const FvGrid& fv, const TwoDiskConfig& cfg,
                                      int exclusion_cells, int stride) {
  if (stride < 1) throw Error(Status::invalid_argument, "stride must be >= 1");
  if (exclusion_cells < 2)
    throw Error(Status::invalid_argument, "interface exclusion must be >= 2 cells");
  std::vector<CellRef> cells;
  double band = exclusion_cells * fv.h;
  for (int j = 0; j < fv.n; j += stride)
    for (int i = 0; i < fv.n; i += stride) {
      Vec2 p = fv.cell_center(i, j);
      bool excluded = false;
      for (int d = 1; d <= 2; ++d)
        if (std::abs(cfg.disk(d).boundary_distance(p)) <= band) excluded = true;
      if (!excluded) cells.push_back({i, j});
    }
  return cells;
}

CompareReport compare_values(const FvGrid& fv, const std::vector<double>& reference,
                             const std::vector<CellRef>& cells) {
  if (reference.size() != cells.size())
    throw Error(Status::shape_mismatch, "reference sample count does not match comparison cells");
  if (cells.empty()) throw Error(Status::invalid_argument, "empty comparison set");
  double mu = 0.0, mv = 0.0;
  for (size_t k = 0; k < cells.size(); ++k) {
    mu += fv.u[fv.idx(cells[k].i, cells[k].j)];
    mv += reference[k];
  }
  mu /= cells.size();
  mv /= cells.size();
  double num2 = 0.0, den2 = 0.0, numi = 0.0, deni = 0.0;
  for (size_t k = 0; k < cells.size(); ++k) {
    double a = fv.u[fv.idx(cells[k].i, cells[k].j)] - mu;
    double b = reference[k] - mv;
    num2 += (a - b) * (a - b);
    den2 += b * b;
    numi = std::max(numi, std::abs(a - b));
    deni = std::max(deni, std::abs(b));
  }
  CompareReport rep;
  rep.n = fv.n;
  rep.samples = static_cast<int>(cells.size());
  rep.l2_rel = den2 > 0.0 ? std::sqrt(num2 / den2) : std::sqrt(num2);
  rep.linf_rel = deni > 0.0 ? numi / deni : numi;
  return rep;
}

CompareReport compare_to_series(const FvGrid& fv, const SolutionEvaluator& eval,
                                const TwoDiskConfig& cfg, int exclusion_cells, int stride) {
  auto t0 = std::chrono::steady_clock::now();
  auto cells = comparison_cells(fv, cfg, exclusion_cells, stride);
  std::vector<double> ref;
  ref.reserve(cells.size());
  for (const CellRef& c : cells) ref.push_back(eval.value(fv.cell_center(c.i, c.j)).value);
  CompareReport rep = compare_values(fv, ref, cells);
  rep.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace twodisk
