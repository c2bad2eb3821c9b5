#pragma once

#include "nstv/weights.hpp"

namespace nstv {

/// sign(v) * max(|v| - theta, 0), the scalar l1 proximal map.
template <class Scalar>
Scalar shrink(Scalar v, Scalar theta) {
  const Scalar a = std::abs(v) - theta;
  return a > 0 ? (v > 0 ? a : -a) : Scalar(0);
}

/// Forward-difference gradient per axis, cells -> interior faces, as sparse
/// matrices. The divergence is the exact negative transpose, which is what
/// the splitting solver relies on.
template <class Scalar>
struct GradientOperator {
  Grid grid;
  SparseMatrix<Scalar> d1;  // face1_count x cells (undivided differences)
  SparseMatrix<Scalar> d2;  // face2_count x cells (2D only)
};

template <class Scalar>
GradientOperator<Scalar> build_gradient(const Grid& grid) {
  GradientOperator<Scalar> g;
  g.grid = grid;
  const int n = grid.n;
  const int N = grid.cell_count();
  std::vector<Eigen::Triplet<Scalar>> t1, t2;
  if (grid.dim == 1) {
    for (int i = 0; i + 1 < n; ++i) {
      t1.emplace_back(i, i + 1, Scalar(1));
      t1.emplace_back(i, i, Scalar(-1));
    }
  } else {
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix + 1 < n; ++ix) {
        const int f = face1_index(grid, ix, iy);
        t1.emplace_back(f, grid.cell_index(ix + 1, iy), Scalar(1));
        t1.emplace_back(f, grid.cell_index(ix, iy), Scalar(-1));
      }
    for (int iy = 0; iy + 1 < n; ++iy)
      for (int ix = 0; ix < n; ++ix) {
        const int f = face2_index(grid, ix, iy);
        t2.emplace_back(f, grid.cell_index(ix, iy + 1), Scalar(1));
        t2.emplace_back(f, grid.cell_index(ix, iy), Scalar(-1));
      }
  }
  g.d1.resize(face1_count(grid), N);
  g.d1.setFromTriplets(t1.begin(), t1.end());
  g.d2.resize(face2_count(grid), N);
  g.d2.setFromTriplets(t2.begin(), t2.end());
  return g;
}

template <class Scalar>
struct TVValue {
  Scalar interior = 0;
  Scalar boundary = 0;
  Scalar total = 0;
};

/// Weighted anisotropic TV: sum over interior faces of h^{dim-1} w |delta f|.
/// Forward differences with zero-flux closure, no boundary contribution.
template <class Scalar>
TVValue<Scalar> tv_weighted(const SourceField<Scalar>& f, const WeightField<Scalar>& w) {
  if (f.grid != w.grid) throw std::invalid_argument("tv_weighted: grid mismatch");
  const Grid& g = f.grid;
  const Scalar hfac = static_cast<Scalar>(boundary_measure(g));
  Scalar acc = 0;
  if (g.dim == 1) {
    for (int i = 0; i + 1 < g.n; ++i) acc += w.w1[i] * std::abs(f.values[i + 1] - f.values[i]);
  } else {
    for (int iy = 0; iy < g.n; ++iy)
      for (int ix = 0; ix + 1 < g.n; ++ix)
        acc += w.w1[face1_index(g, ix, iy)] *
               std::abs(f.values[g.cell_index(ix + 1, iy)] - f.values[g.cell_index(ix, iy)]);
    for (int iy = 0; iy + 1 < g.n; ++iy)
      for (int ix = 0; ix < g.n; ++ix)
        acc += w.w2[face2_index(g, ix, iy)] *
               std::abs(f.values[g.cell_index(ix, iy + 1)] - f.values[g.cell_index(ix, iy)]);
  }
  TVValue<Scalar> v;
  v.interior = hfac * acc;
  v.total = v.interior;
  return v;
}

/// Extended TV: the TV of f continued by zero outside the domain. Adds the
/// boundary term sum over boundary cells of h^{dim-1} w_boundary |f|.
template <class Scalar>
TVValue<Scalar> tv_extended(const SourceField<Scalar>& f, const WeightField<Scalar>& w) {
  if (w.w_boundary.size() != f.grid.boundary_count())
    throw std::invalid_argument("tv_extended: weight field has no boundary weights");
  TVValue<Scalar> v = tv_weighted(f, w);
  const Scalar hfac = static_cast<Scalar>(boundary_measure(f.grid));
  Scalar acc = 0;
  for (int j = 0; j < f.grid.boundary_count(); ++j)
    acc += w.w_boundary[j] * std::abs(f.values[f.grid.boundary_indices[j]]);
  v.boundary = hfac * acc;
  v.total = v.interior + v.boundary;
  return v;
}

}  // namespace nstv
