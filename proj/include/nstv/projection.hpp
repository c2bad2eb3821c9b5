#pragma once

#include "nstv/forward.hpp"

namespace nstv {

/// C = QK, where Q projects data space onto the orthogonal complement of
/// span{K1}. C annihilates constant sources, which makes weights built from
/// it blind to the base level of a source.
template <class Scalar>
struct ProjectedOperator {
  ForwardOperator<Scalar> base;
  Vector<Scalar> k1;     // K applied to the all-ones source
  Scalar k1_norm2 = 0;   // ||K1||^2 in L2(E)

  // L2(E) adjoint of K maps back to L2(Omega); the quadrature ratio
  // h^{dim-1}/h^dim is 1/h for both dimensions.
  Scalar adjoint_factor() const { return Scalar(base.grid.n); }
};

template <class Scalar>
ProjectedOperator<Scalar> project_out_constants(const ForwardOperator<Scalar>& op) {
  ProjectedOperator<Scalar> p;
  p.base = op;
  p.k1 = op.matrix.rowwise().sum();
  p.k1_norm2 = dot_data<Scalar>(op.grid, p.k1, p.k1);
  if (!(p.k1_norm2 > 0))
    throw std::invalid_argument("project_out_constants: K1 = 0, operator is degenerate");
  return p;
}

template <class Scalar>
Vector<Scalar> apply_Q(const ProjectedOperator<Scalar>& p, const Vector<Scalar>& v) {
  return v - (dot_data<Scalar>(p.base.grid, v, p.k1) / p.k1_norm2) * p.k1;
}

template <class Scalar>
Vector<Scalar> apply_C(const ProjectedOperator<Scalar>& p, const Vector<Scalar>& f) {
  return apply_Q(p, Vector<Scalar>(p.base.matrix * f));
}

/// C* g in L2(Omega) coordinates.
template <class Scalar>
Vector<Scalar> apply_Cstar(const ProjectedOperator<Scalar>& p, const Vector<Scalar>& g) {
  return p.adjoint_factor() * (p.base.matrix.transpose() * apply_Q(p, g));
}

template <class Scalar>
Vector<Scalar> apply_CstarC(const ProjectedOperator<Scalar>& p, const Vector<Scalar>& f) {
  return apply_Cstar(p, apply_C(p, f));
}

/// Dense realization of C = QK.
template <class Scalar>
Matrix<Scalar> matrix_C(const ProjectedOperator<Scalar>& p) {
  Matrix<Scalar> C = p.base.matrix;
  C -= (p.k1 * (p.k1.transpose() * C)) *
       (static_cast<Scalar>(boundary_measure(p.base.grid)) / p.k1_norm2);
  return C;
}

// --- 1D shifted Heaviside steps -------------------------------------------
//
// Interior face f in (0,1) sits at y = (f+1)h, between cells f and f+1.
// H_y jumps 0 -> 1 across the face; the zero-mean variant takes the values
// y-1 / y, which has exact zero mean under the midpoint rule.

inline double face_coordinate_1d(const Grid& grid, int face) { return (face + 1) * grid.h(); }

inline int nearest_face_1d(const Grid& grid, double x_star) {
  int f = static_cast<int>(std::lround(x_star * grid.n)) - 1;
  return std::clamp(f, 0, grid.n - 2);
}

template <class Scalar>
Vector<Scalar> heaviside_1d(const Grid& grid, int face) {
  Vector<Scalar> v(grid.n);
  for (int i = 0; i < grid.n; ++i) v[i] = i <= face ? Scalar(0) : Scalar(1);
  return v;
}

template <class Scalar>
Vector<Scalar> heaviside_zero_mean_1d(const Grid& grid, int face) {
  const Scalar y = Scalar(face_coordinate_1d(grid, face));
  Vector<Scalar> v(grid.n);
  for (int i = 0; i < grid.n; ++i) v[i] = i <= face ? y - 1 : y;
  return v;
}

}  // namespace nstv
