#pragma once

#include "twodisk/potentials.hpp"

namespace twodisk {

struct Box {
  Vec2 lo, hi;
  double side() const { return hi.x - lo.x; }
};

enum class FvBc { dirichlet_from_series, zero_dirichlet };

struct FvStats {
  int iterations{0};
  double residual{0.0};
  double runtime_s{0.0};
};

/// Cell-centered conservative 5-point discretization of div(a grad u) with
/// harmonic-mean face coefficients, matrix-free Jacobi-preconditioned CG.
struct FvGrid {
  Box box;
  int n{0};
  double h{0.0};
  std::vector<double> u;  // row-major, index j*n + i
  std::vector<double> a;
  FvStats stats;

  size_t idx(int i, int j) const { return static_cast<size_t>(j) * n + i; }
  Vec2 cell_center(int i, int j) const {
    return {box.lo.x + (i + 0.5) * h, box.lo.y + (j + 0.5) * h};
  }
};

/// Solves div(a grad u) = 2*pi*(div f + f3) on the box. Dirichlet data comes
/// from the reflection-series solution (sampled at boundary face midpoints) or
/// is zero. The box must be square, hold both disks with margin >= 0.5, and
/// resolve the gap with at least 6 cells; zero-Dirichlet runs additionally
/// require the source support inside the box with margin >= 0.5.
FvGrid fv_solve(const TwoDiskConfig& cfg, const PiecewiseSource& src, Box box, int n, FvBc bc,
                const SeriesPolicy& policy, const QuadratureGrid& grid);

struct CellRef {
  int i, j;
};

/// Cells used for field comparisons: strided, and excluding a band of
/// `exclusion_cells` cells around each interface circle.
std::vector<CellRef> comparison_cells(const FvGrid& fv, const TwoDiskConfig& cfg,
                                      int exclusion_cells, int stride);

struct CompareReport {
  double l2_rel{0.0};
  double linf_rel{0.0};
  int n{0};
  int samples{0};
  double runtime_s{0.0};
};

/// Mean-adjusted relative errors of the FV field against reference values
/// given at exactly the comparison cells (shape error otherwise).
CompareReport compare_values(const FvGrid& fv, const std::vector<double>& reference,
                             const std::vector<CellRef>& cells);

/// Samples the series solution at the comparison cells and compares.
CompareReport compare_to_series(const FvGrid& fv, const SolutionEvaluator& eval,
                                const TwoDiskConfig& cfg, int exclusion_cells, int stride);

}  // namespace twodisk
