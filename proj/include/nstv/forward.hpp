#pragma once

#include <Eigen/SVD>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <memory>
#include <mutex>

#include "nstv/conductivity.hpp"
#include "nstv/core.hpp"

namespace nstv {

template <class Scalar>
using SparseMatrix = Eigen::SparseMatrix<Scalar>;

enum class GreensBc { dirichlet, neumann };

namespace detail {
template <class Scalar>
Scalar harmonic_mean(Scalar a, Scalar b) {
  return 2 * a * b / (a + b);
}
}  // namespace detail

/// Cell-centered 5-point (3-point in 1D) discretization of -div(D grad u),
/// with harmonic averaging of the diagonal conductivity at cell faces.
/// Neumann closure drops the wall flux; Dirichlet closure uses a zero ghost
/// value at the wall, half a cell away.
template <class Scalar>
SparseMatrix<Scalar> second_order_operator(const Grid& grid, const ConductivityField<Scalar>& cond,
                                           GreensBc bc) {
  if (cond.grid != grid) throw std::invalid_argument("second_order_operator: grid mismatch");
  const int n = grid.n;
  const int N = grid.cell_count();
  const Scalar inv_h2 = Scalar(n) * Scalar(n);
  std::vector<Eigen::Triplet<Scalar>> trip;
  trip.reserve(static_cast<size_t>(5 * N));

  auto add_face = [&](int ca, int cb, Scalar d_face) {
    const Scalar w = d_face * inv_h2;
    trip.emplace_back(ca, ca, w);
    trip.emplace_back(cb, cb, w);
    trip.emplace_back(ca, cb, -w);
    trip.emplace_back(cb, ca, -w);
  };
  auto add_wall = [&](int c, Scalar d_cell) {
    if (bc == GreensBc::dirichlet) trip.emplace_back(c, c, 2 * d_cell * inv_h2);
  };

  if (grid.dim == 1) {
    for (int i = 0; i + 1 < n; ++i)
      add_face(i, i + 1, detail::harmonic_mean(cond.d1[i], cond.d1[i + 1]));
    add_wall(0, cond.d1[0]);
    add_wall(n - 1, cond.d1[n - 1]);
  } else {
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix) {
        const int c = grid.cell_index(ix, iy);
        if (ix + 1 < n)
          add_face(c, grid.cell_index(ix + 1, iy),
                   detail::harmonic_mean(cond.d1[c], cond.d1[grid.cell_index(ix + 1, iy)]));
        if (iy + 1 < n)
          add_face(c, grid.cell_index(ix, iy + 1),
                   detail::harmonic_mean(cond.d2[c], cond.d2[grid.cell_index(ix, iy + 1)]));
        if (ix == 0 || ix == n - 1) add_wall(c, cond.d1[c]);
        if (iy == 0 || iy == n - 1) add_wall(c, cond.d2[c]);
      }
  }

  SparseMatrix<Scalar> A(N, N);
  A.setFromTriplets(trip.begin(), trip.end());
  A.makeCompressed();
  return A;
}

namespace detail {

/// Sparse SPD solve with one step of iterative refinement.
template <class Scalar>
Matrix<Scalar> solve_refined(const Eigen::SimplicialLLT<SparseMatrix<Scalar>>& llt,
                             const SparseMatrix<Scalar>& A, const Matrix<Scalar>& rhs) {
  Matrix<Scalar> x = llt.solve(rhs);
  x += llt.solve(Matrix<Scalar>(rhs - A * x));
  return x;
}

template <class Scalar>
struct SvdCache {
  std::once_flag once;
  Eigen::BDCSVD<Matrix<Scalar>> svd;
};

}  // namespace detail

/// Dense realization of K : source coefficients -> observation samples.
/// Row j is the trace at observation cell j of the solution operator, so
/// K f = (solution of -div(D grad u) + u = f with zero Neumann flux)|_E.
/// By default E is the boundary ring; in 1D an interior observation set can
/// be supplied, since two endpoint samples only carry a rank-2 snapshot.
template <class Scalar>
struct ForwardOperator {
  Grid grid;
  ConductivityKind conductivity = ConductivityKind::isotropic;
  std::vector<int> observed;  // observation cells E, row ordering
  Matrix<Scalar> matrix;      // observed.size() x cell_count

  // factorization of the full PDE system, kept for direct solves
  std::shared_ptr<const SparseMatrix<Scalar>> system;
  std::shared_ptr<const Eigen::SimplicialLLT<SparseMatrix<Scalar>>> system_factor;

  int rows() const { return static_cast<int>(matrix.rows()); }
  int cols() const { return static_cast<int>(matrix.cols()); }

  const Eigen::BDCSVD<Matrix<Scalar>>& svd() const {
    if (!svd_cache_) throw std::logic_error("ForwardOperator: empty operator");
    std::call_once(svd_cache_->once, [&] {
      svd_cache_->svd.compute(matrix, Eigen::ComputeThinU | Eigen::ComputeThinV);
    });
    return svd_cache_->svd;
  }

  std::shared_ptr<detail::SvdCache<Scalar>> svd_cache_ =
      std::make_shared<detail::SvdCache<Scalar>>();
};

/// Symmetric 1D observation set: both endpoints plus every stride-th cell,
/// mirrored, i.e. cells with min(i, n-1-i) divisible by stride.
inline std::vector<int> observation_cells_1d(const Grid& grid, int stride) {
  if (grid.dim != 1 || stride < 1)
    throw std::invalid_argument("observation_cells_1d: needs a 1D grid and stride >= 1");
  std::vector<int> cells;
  for (int i = 0; i < grid.n; ++i)
    if (std::min(i, grid.n - 1 - i) % stride == 0) cells.push_back(i);
  return cells;
}

template <class Scalar>
ForwardOperator<Scalar> assemble_forward(const Grid& grid, const ConductivityField<Scalar>& cond,
                                         std::vector<int> observed = {}) {
  ForwardOperator<Scalar> op;
  op.grid = grid;
  op.conductivity = cond.kind;
  op.observed = observed.empty() ? grid.boundary_indices : std::move(observed);
  for (int c : op.observed)
    if (c < 0 || c >= grid.cell_count())
      throw std::invalid_argument("assemble_forward: observation cell out of range");

  SparseMatrix<Scalar> S = second_order_operator(grid, cond, GreensBc::neumann);
  // +u keeps the system SPD and preserves constants exactly
  SparseMatrix<Scalar> Id(S.rows(), S.cols());
  Id.setIdentity();
  S = S + Id;

  auto llt = std::make_shared<Eigen::SimplicialLLT<SparseMatrix<Scalar>>>();
  llt->compute(S);
  if (llt->info() != Eigen::Success)
    throw std::runtime_error("assemble_forward: factorization of the PDE system failed");

  const int N = grid.cell_count();
  const int m = static_cast<int>(op.observed.size());
  Matrix<Scalar> rhs = Matrix<Scalar>::Zero(N, m);
  for (int j = 0; j < m; ++j) rhs(op.observed[j], j) = 1;
  // S is symmetric, so row b of S^{-1} equals (S^{-1} e_b)^T
  Matrix<Scalar> cols = detail::solve_refined<Scalar>(*llt, S, rhs);
  op.matrix = cols.transpose();
  op.system = std::make_shared<const SparseMatrix<Scalar>>(std::move(S));
  op.system_factor = std::move(llt);
  return op;
}

template <class Scalar>
BoundaryData<Scalar> apply_forward(const ForwardOperator<Scalar>& op,
                                   const SourceField<Scalar>& f) {
  if (f.grid != op.grid) throw std::invalid_argument("apply_forward: source lives on another grid");
  return BoundaryData<Scalar>{op.grid, op.matrix * f.values};
}

/// Full-field PDE solution for a given source (test oracle and diagnostics).
template <class Scalar>
SourceField<Scalar> solve_pde(const ForwardOperator<Scalar>& op, const SourceField<Scalar>& f) {
  if (f.grid != op.grid) throw std::invalid_argument("solve_pde: source lives on another grid");
  Matrix<Scalar> u = detail::solve_refined<Scalar>(*op.system_factor, *op.system,
                                                   Matrix<Scalar>(f.values));
  return SourceField<Scalar>(op.grid, Vector<Scalar>(u.col(0)));
}

}  // namespace nstv
