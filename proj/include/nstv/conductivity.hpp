#pragma once

#include <cmath>
#include <functional>

#include "nstv/core.hpp"

namespace nstv {

enum class ConductivityKind { isotropic, d1, d2, custom };

inline const char* to_string(ConductivityKind k) {
  switch (k) {
    case ConductivityKind::isotropic: return "isotropic";
    case ConductivityKind::d1: return "d1";
    case ConductivityKind::d2: return "d2";
    case ConductivityKind::custom: return "custom";
  }
  return "?";
}

/// Symmetric positive definite conductivity tensor sampled at cell centers.
/// Only diagonal tensors are representable by the 5-point stencil, so the
/// per-cell storage is the pair of diagonal entries (d1,d2); in 1D only d1
/// is used.
template <class Scalar>
struct ConductivityField {
  Grid grid;
  ConductivityKind kind = ConductivityKind::isotropic;
  Vector<Scalar> d1;  // axis-1 diagonal entry per cell
  Vector<Scalar> d2;  // axis-2 diagonal entry per cell (2D)
};

/// Custom tensor callback: (x1,x2) -> {a11,a22,a12} of a symmetric tensor.
template <class Scalar>
using TensorCallback = std::function<std::array<Scalar, 3>(double, double)>;

template <class Scalar>
ConductivityField<Scalar> conductivity_field(ConductivityKind kind, const Grid& grid,
                                             const TensorCallback<Scalar>& custom = nullptr) {
  ConductivityField<Scalar> c;
  c.grid = grid;
  c.kind = kind;
  const int N = grid.cell_count();
  c.d1.resize(N);
  c.d2.resize(grid.dim == 2 ? N : 0);

  if ((kind == ConductivityKind::d1 || kind == ConductivityKind::d2) && grid.dim != 2)
    throw std::invalid_argument("conductivity_field: d1/d2 are 2D conductivities");
  if (kind == ConductivityKind::custom && !custom)
    throw std::invalid_argument("conductivity_field: custom kind needs a tensor callback");

  for (int idx = 0; idx < N; ++idx) {
    const double x1 = grid.center(grid.cell_ix(idx));
    const double x2 = grid.dim == 2 ? grid.center(grid.cell_iy(idx)) : 0.0;
    Scalar a11 = 1, a22 = 1;
    switch (kind) {
      case ConductivityKind::isotropic:
        break;
      case ConductivityKind::d1:
        a11 = Scalar((1 + 9 * x1) * 5);
        a22 = Scalar(1 + 9 * x1);
        break;
      case ConductivityKind::d2:
        // value 10 on the lower-left quadrant x1<=0.4, x2<=0.4, else 1;
        // the mixed quadrants take the background value 1
        a11 = a22 = (x1 <= 0.4 && x2 <= 0.4) ? Scalar(10) : Scalar(1);
        break;
      case ConductivityKind::custom: {
        auto t = custom(x1, x2);
        a11 = t[0];
        a22 = t[1];
        const Scalar a12 = t[2];
        if (std::abs(a12) > Scalar(1e-14) * std::max<Scalar>(std::abs(a11), std::abs(a22)))
          throw std::invalid_argument(
              "conductivity_field: non-diagonal tensor not representable by the 5-point scheme");
        if (!(a11 > 0) || (grid.dim == 2 && !(a22 > 0)))
          throw std::invalid_argument("conductivity_field: custom tensor is not SPD");
        break;
      }
    }
    c.d1[idx] = a11;
    if (grid.dim == 2) c.d2[idx] = a22;
  }
  return c;
}

}  // namespace nstv
