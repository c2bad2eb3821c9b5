#pragma once

#include <Eigen/Core>
#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace nstv {

template <class Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <class Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
using Eigen::Index;

/// Uniform cell-centered discretization of (0,1) or (0,1)^2.
/// Cell (ix,iy) has linear index iy*n + ix and center ((ix+0.5)h, (iy+0.5)h).
struct Grid {
  int dim = 2;
  int n = 0;  // cells per axis, h = 1/n

  // Boundary observation cells E, ordered: 1D [left,right]; 2D counter-clockwise
  // starting at the bottom-left cell (bottom row, right column, top row, left column).
  std::vector<int> boundary_indices;

  int cell_count() const { return dim == 1 ? n : n * n; }
  int boundary_count() const { return static_cast<int>(boundary_indices.size()); }
  int interior_count() const { return cell_count() - boundary_count(); }
  double h() const { return 1.0 / n; }

  int cell_index(int ix, int iy = 0) const { return dim == 1 ? ix : iy * n + ix; }
  int cell_ix(int idx) const { return dim == 1 ? idx : idx % n; }
  int cell_iy(int idx) const { return dim == 1 ? 0 : idx / n; }

  double center(int i) const { return (i + 0.5) * h(); }
  // distance from cell to the boundary ring, in whole cells (ring itself = 0)
  int ring_distance(int idx) const {
    int ix = cell_ix(idx), iy = cell_iy(idx);
    if (dim == 1) return std::min(ix, n - 1 - ix);
    return std::min(std::min(ix, n - 1 - ix), std::min(iy, n - 1 - iy));
  }

  bool operator==(const Grid& o) const { return dim == o.dim && n == o.n; }
  bool operator!=(const Grid& o) const { return !(*this == o); }
};

inline Grid build_grid(int dim, int n) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("build_grid: dim must be 1 or 2");
  if (n < 4) throw std::invalid_argument("build_grid: need n >= 4, got " + std::to_string(n));
  Grid g;
  g.dim = dim;
  g.n = n;
  if (dim == 1) {
    g.boundary_indices = {0, n - 1};
  } else {
    g.boundary_indices.reserve(4 * n - 4);
    for (int ix = 0; ix < n; ++ix) g.boundary_indices.push_back(g.cell_index(ix, 0));
    for (int iy = 1; iy < n; ++iy) g.boundary_indices.push_back(g.cell_index(n - 1, iy));
    for (int ix = n - 2; ix >= 0; --ix) g.boundary_indices.push_back(g.cell_index(ix, n - 1));
    for (int iy = n - 2; iy >= 1; --iy) g.boundary_indices.push_back(g.cell_index(0, iy));
  }
  return g;
}

/// Cell-wise source coefficients on a grid.
template <class Scalar>
struct SourceField {
  Grid grid;
  Vector<Scalar> values;  // size grid.cell_count()

  SourceField() = default;
  SourceField(const Grid& g, Vector<Scalar> v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.cell_count())
      throw std::invalid_argument("SourceField: value count does not match grid");
  }
  static SourceField zero(const Grid& g) {
    return SourceField(g, Vector<Scalar>::Zero(g.cell_count()));
  }
  static SourceField constant(const Grid& g, Scalar c) {
    return SourceField(g, Vector<Scalar>::Constant(g.cell_count(), c));
  }
};

/// Samples on the boundary observation cells E, in boundary ordering.
template <class Scalar>
struct BoundaryData {
  Grid grid;
  Vector<Scalar> values;  // size grid.boundary_count()
};

// Quadrature weights: one sample per cell (measure h^dim) and one sample per
// boundary cell (measure h^{dim-1}; counting measure at the two 1D endpoints).
inline double domain_measure(const Grid& g) { return std::pow(g.h(), g.dim); }
inline double boundary_measure(const Grid& g) { return std::pow(g.h(), g.dim - 1); }

template <class Scalar, class A, class B>
Scalar dot_data(const Grid& g, const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  return static_cast<Scalar>(boundary_measure(g)) * a.dot(b);
}
template <class A>
typename A::Scalar norm_data(const Grid& g, const Eigen::MatrixBase<A>& a) {
  using S = typename A::Scalar;
  return std::sqrt(static_cast<S>(boundary_measure(g))) * a.norm();
}
template <class A>
typename A::Scalar norm1_data(const Grid& g, const Eigen::MatrixBase<A>& a) {
  using S = typename A::Scalar;
  return static_cast<S>(boundary_measure(g)) * a.template lpNorm<1>();
}
template <class Scalar, class A, class B>
Scalar dot_domain(const Grid& g, const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  return static_cast<Scalar>(domain_measure(g)) * a.dot(b);
}
template <class A>
typename A::Scalar norm_domain(const Grid& g, const Eigen::MatrixBase<A>& a) {
  using S = typename A::Scalar;
  return std::sqrt(static_cast<S>(domain_measure(g))) * a.norm();
}

}  // namespace nstv
