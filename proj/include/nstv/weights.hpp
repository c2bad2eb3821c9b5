#pragma once

#include <array>

#include "nstv/projection.hpp"

namespace nstv {

enum class PNorm { one, two, inf };

inline const char* to_string(PNorm p) {
  switch (p) {
    case PNorm::one: return "1";
    case PNorm::two: return "2";
    case PNorm::inf: return "inf";
  }
  return "?";
}

// --- face indexing ----------------------------------------------------------
//
// Axis-1 faces separate (ix,iy) and (ix+1,iy): index iy*(n-1)+ix, ix<n-1.
// Axis-2 faces separate (ix,iy) and (ix,iy+1): index iy*n+ix,     iy<n-1.
// In 1D only axis-1 faces exist (the n-1 interior points).

inline int face1_count(const Grid& g) { return g.dim == 1 ? g.n - 1 : (g.n - 1) * g.n; }
inline int face2_count(const Grid& g) { return g.dim == 1 ? 0 : g.n * (g.n - 1); }
inline int face1_index(const Grid& g, int ix, int iy) { return iy * (g.n - 1) + ix; }
inline int face2_index(const Grid& g, int ix, int iy) { return iy * g.n + ix; }

/// Number of domain-boundary faces a boundary cell owns (2 at corners).
inline int wall_face_count(const Grid& g, int cell) {
  if (g.dim == 1) return 1;
  const int ix = g.cell_ix(cell), iy = g.cell_iy(cell);
  int c = 0;
  if (ix == 0 || ix == g.n - 1) ++c;
  if (iy == 0 || iy == g.n - 1) ++c;
  return c;
}

/// Per-face TV weights, plus the per-boundary-cell weight of the extended
/// functional. In 1D, w1 holds the single weight array w(y).
template <class Scalar>
struct WeightField {
  Grid grid;
  Vector<Scalar> w1, w2;
  Vector<Scalar> w_boundary;  // empty unless the boundary term was built
  PNorm p = PNorm::two;
  Scalar floor = 0;  // 0 means unfloored

  static WeightField uniform(const Grid& g, bool with_boundary = false) {
    WeightField w;
    w.grid = g;
    w.w1 = Vector<Scalar>::Ones(face1_count(g));
    if (g.dim == 2) w.w2 = Vector<Scalar>::Ones(face2_count(g));
    if (with_boundary) w.w_boundary = Vector<Scalar>::Ones(g.boundary_count());
    return w;
  }
};

namespace detail {

template <class Scalar>
Scalar column_norm(const Grid& g, PNorm p, const Eigen::Ref<const Vector<Scalar>>& col) {
  switch (p) {
    case PNorm::one: return norm1_data(g, col);
    case PNorm::two: return norm_data(g, col);
    case PNorm::inf: return col.template lpNorm<Eigen::Infinity>();
  }
  return 0;
}

template <class Scalar>
void apply_floor(WeightField<Scalar>& w, Scalar floor_rel) {
  if (floor_rel <= 0) return;
  Scalar m = w.w1.size() ? w.w1.maxCoeff() : Scalar(0);
  if (w.w2.size()) m = std::max(m, w.w2.maxCoeff());
  if (w.w_boundary.size()) m = std::max(m, w.w_boundary.maxCoeff());
  const Scalar fl = floor_rel * m;
  w.floor = fl;
  w.w1 = w.w1.cwiseMax(fl);
  if (w.w2.size()) w.w2 = w.w2.cwiseMax(fl);
  if (w.w_boundary.size()) w.w_boundary = w.w_boundary.cwiseMax(fl);
}

}  // namespace detail

/// 1D weight w(y) = ||C Hbar_y||_{L2(E)} per interior face.
template <class Scalar>
WeightField<Scalar> weight_1d(const ProjectedOperator<Scalar>& p, const Grid& grid,
                              Scalar floor_rel = Scalar(1e-6)) {
  if (grid.dim != 1 || grid != p.base.grid)
    throw std::invalid_argument("weight_1d: needs the operator's 1D grid");
  const int nf = face1_count(grid);
  Matrix<Scalar> steps(grid.n, nf);
  for (int f = 0; f < nf; ++f) steps.col(f) = heaviside_zero_mean_1d<Scalar>(grid, f);
  Matrix<Scalar> img = p.base.matrix * steps;
  for (int f = 0; f < nf; ++f) img.col(f) = apply_Q(p, Vector<Scalar>(img.col(f)));

  WeightField<Scalar> w;
  w.grid = grid;
  w.p = PNorm::two;
  w.w1.resize(nf);
  for (int f = 0; f < nf; ++f) w.w1[f] = norm_data(grid, img.col(f));
  detail::apply_floor(w, floor_rel);
  return w;
}

// --- Green's problems -------------------------------------------------------

/// Factorized discrete Green's problem -div(D grad G) = delta_y with the
/// chosen boundary condition. The Neumann variant solves the compatible
/// right-hand side delta_y - 1 through a saddle-point system that also pins
/// the zero-mean gauge.
template <class Scalar>
struct GreensSolver {
  Grid grid;
  GreensBc bc = GreensBc::dirichlet;
  SparseMatrix<Scalar> M;
  std::shared_ptr<Eigen::SimplicialLLT<SparseMatrix<Scalar>>> llt;  // dirichlet
  std::shared_ptr<Eigen::SparseLU<SparseMatrix<Scalar>>> kkt;      // neumann

  /// Applies the discrete Green's operator to an arbitrary source vector.
  Vector<Scalar> apply(const Vector<Scalar>& f) const {
    if (bc == GreensBc::dirichlet) {
      return detail::solve_refined<Scalar>(*llt, M, Matrix<Scalar>(f)).col(0);
    }
    Vector<Scalar> rhs(grid.cell_count() + 1);
    rhs.head(grid.cell_count()) = f;
    // Neumann compatibility: remove the mean source density
    rhs.head(grid.cell_count()).array() -=
        f.sum() * static_cast<Scalar>(domain_measure(grid));
    rhs[grid.cell_count()] = 0;
    Vector<Scalar> sol = kkt->solve(rhs);
    return sol.head(grid.cell_count());
  }

  /// G(.;y) for a unit point mass at cell y (delta discretized as h^-dim e_y).
  Vector<Scalar> point_source(int ycell) const {
    Vector<Scalar> f = Vector<Scalar>::Zero(grid.cell_count());
    f[ycell] = Scalar(1) / static_cast<Scalar>(domain_measure(grid));
    return apply(f);
  }
};

template <class Scalar>
GreensSolver<Scalar> make_greens_solver(const Grid& grid, const ConductivityField<Scalar>& cond,
                                        GreensBc bc) {
  GreensSolver<Scalar> s;
  s.grid = grid;
  s.bc = bc;
  s.M = second_order_operator(grid, cond, bc);
  if (bc == GreensBc::dirichlet) {
    s.llt = std::make_shared<Eigen::SimplicialLLT<SparseMatrix<Scalar>>>(s.M);
    if (s.llt->info() != Eigen::Success)
      throw std::runtime_error("make_greens_solver: Dirichlet factorization failed");
  } else {
    const int N = grid.cell_count();
    std::vector<Eigen::Triplet<Scalar>> trip;
    trip.reserve(static_cast<size_t>(s.M.nonZeros()) + 2 * N);
    for (int k = 0; k < s.M.outerSize(); ++k)
      for (typename SparseMatrix<Scalar>::InnerIterator it(s.M, k); it; ++it)
        trip.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    for (int i = 0; i < N; ++i) {
      trip.emplace_back(i, N, Scalar(1));
      trip.emplace_back(N, i, Scalar(1));
    }
    SparseMatrix<Scalar> K(N + 1, N + 1);
    K.setFromTriplets(trip.begin(), trip.end());
    s.kkt = std::make_shared<Eigen::SparseLU<SparseMatrix<Scalar>>>();
    s.kkt->compute(K);
    if (s.kkt->info() != Eigen::Success)
      throw std::runtime_error("make_greens_solver: Neumann saddle-point factorization failed");
  }
  return s;
}

/// Images under K of the Green's-function source derivatives: one column per
/// interior face (central differences of G in the source argument) and, for
/// Dirichlet conditions, one column per boundary cell holding the image of
/// the outward normal derivative at that cell's wall face.
template <class Scalar>
struct GreensImages {
  Grid grid;
  GreensBc bc = GreensBc::dirichlet;
  Matrix<Scalar> img1;      // |E| x face1_count
  Matrix<Scalar> img2;      // |E| x face2_count
  Matrix<Scalar> img_bnd;   // |E| x |E| (dirichlet only)
};

template <class Scalar>
GreensImages<Scalar> greens_derivative_images(const ForwardOperator<Scalar>& op,
                                              const ConductivityField<Scalar>& cond,
                                              GreensBc bc = GreensBc::dirichlet) {
  const Grid& grid = op.grid;
  if (grid.dim != 2)
    throw std::invalid_argument("greens_derivative_images: needs a 2D grid");
  GreensSolver<Scalar> gs = make_greens_solver(grid, cond, bc);

  // Z(:,y) = K G(.;y); by symmetry of the Green's matrix, Z^T = Ghat K^T.
  const int N = grid.cell_count();
  const int m = op.rows();
  const Scalar delta_scale = Scalar(1) / static_cast<Scalar>(domain_measure(grid));
  Matrix<Scalar> Zt(N, m);
  for (int j = 0; j < m; ++j)
    Zt.col(j) = gs.apply(Vector<Scalar>(op.matrix.row(j).transpose() * delta_scale));

  const int n = grid.n;
  const Scalar inv_h = Scalar(n);
  GreensImages<Scalar> im;
  im.grid = grid;
  im.bc = bc;
  im.img1.resize(m, face1_count(grid));
  im.img2.resize(m, face2_count(grid));
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix + 1 < n; ++ix)
      im.img1.col(face1_index(grid, ix, iy)) =
          (Zt.row(grid.cell_index(ix + 1, iy)) - Zt.row(grid.cell_index(ix, iy))).transpose() *
          inv_h;
  for (int iy = 0; iy + 1 < n; ++iy)
    for (int ix = 0; ix < n; ++ix)
      im.img2.col(face2_index(grid, ix, iy)) =
          (Zt.row(grid.cell_index(ix, iy + 1)) - Zt.row(grid.cell_index(ix, iy))).transpose() *
          inv_h;
  if (bc == GreensBc::dirichlet) {
    // one-sided difference against the zero wall value half a cell away
    im.img_bnd.resize(m, grid.boundary_count());
    for (int j = 0; j < grid.boundary_count(); ++j)
      im.img_bnd.col(j) = Zt.row(grid.boundary_indices[j]).transpose() * (-2 * inv_h);
  }
  return im;
}

/// 2D TV weights w1, w2, w_boundary from Dirichlet Green's images.
/// A corner cell owns two wall faces; its boundary weight is the sum of the
/// per-face norms, matching the boundary length 2h seen by extension by zero.
template <class Scalar>
WeightField<Scalar> tv_weights_2d(const ForwardOperator<Scalar>& op,
                                  const ConductivityField<Scalar>& cond, PNorm p,
                                  Scalar floor_rel = Scalar(1e-6)) {
  const Grid& grid = op.grid;
  GreensImages<Scalar> im = greens_derivative_images(op, cond, GreensBc::dirichlet);
  WeightField<Scalar> w;
  w.grid = grid;
  w.p = p;
  w.w1.resize(face1_count(grid));
  w.w2.resize(face2_count(grid));
  w.w_boundary.resize(grid.boundary_count());
  for (int f = 0; f < w.w1.size(); ++f)
    w.w1[f] = detail::column_norm<Scalar>(grid, p, im.img1.col(f));
  for (int f = 0; f < w.w2.size(); ++f)
    w.w2[f] = detail::column_norm<Scalar>(grid, p, im.img2.col(f));
  for (int j = 0; j < grid.boundary_count(); ++j)
    w.w_boundary[j] = Scalar(wall_face_count(grid, grid.boundary_indices[j])) *
                      detail::column_norm<Scalar>(grid, p, im.img_bnd.col(j));
  detail::apply_floor(w, floor_rel);
  return w;
}

// --- sparsity weights -------------------------------------------------------

enum class SparsityForm { column_norm, projected };

template <class Scalar>
struct SparsityWeights {
  Vector<Scalar> w;
  SparsityForm form = SparsityForm::projected;
  int q_requested = 0;
  int q_effective = 0;
  bool clamped = false;
};

/// column_norm: w_i = ||K e_i||_{L2(E)}.
/// projected:   w_i = ||A_q^+ A e_i||_2, i.e. the norm of the projection of
/// e_i onto the top-q right singular subspace.
template <class Scalar>
SparsityWeights<Scalar> sparsity_weights(const ForwardOperator<Scalar>& op, int q,
                                         SparsityForm form = SparsityForm::projected) {
  SparsityWeights<Scalar> sw;
  sw.form = form;
  sw.q_requested = q;
  if (form == SparsityForm::column_norm) {
    sw.w = std::sqrt(static_cast<Scalar>(boundary_measure(op.grid))) *
           op.matrix.colwise().norm().transpose();
    sw.q_effective = 0;
    return sw;
  }
  if (q < 1 || q > std::min(op.rows(), op.cols()))
    throw std::invalid_argument("sparsity_weights: q out of range");
  const auto& svd = op.svd();
  const auto& sv = svd.singularValues();
  const Scalar cutoff = std::numeric_limits<Scalar>::epsilon() *
                        static_cast<Scalar>(std::max(op.rows(), op.cols())) * sv[0];
  int rank = 0;
  while (rank < sv.size() && sv[rank] > cutoff) ++rank;
  sw.q_effective = std::min(q, rank);
  sw.clamped = sw.q_effective < q;
  sw.w = svd.matrixV().leftCols(sw.q_effective).rowwise().norm();
  return sw;
}

// --- disjoint-support diagnostic for rectangle edges ------------------------

/// Axis-aligned cell rectangle, inclusive index ranges.
struct CellRect {
  int ix0 = 0, ix1 = 0, iy0 = 0, iy1 = 0;
};

inline CellRect cells_from_box(const Grid& g, double lo1, double lo2, double hi1, double hi2) {
  auto clampi = [&](int v) { return std::clamp(v, 0, g.n - 1); };
  CellRect r;
  r.ix0 = clampi(static_cast<int>(std::ceil(lo1 * g.n - 0.5)));
  r.ix1 = clampi(static_cast<int>(std::floor(hi1 * g.n - 0.5)));
  r.iy0 = clampi(static_cast<int>(std::ceil(lo2 * g.n - 0.5)));
  r.iy1 = clampi(static_cast<int>(std::floor(hi2 * g.n - 0.5)));
  return r;
}

struct EdgeConcentration {
  // L1 mass fractions per domain side (left, bottom, right, top), raw and
  // after removing the boundary mean. The forward map preserves constants, so
  // the raw image rides on a flat background; the support-concentration proxy
  // uses the centered field, the raw fractions are reported alongside.
  std::array<double, 4> side_mass_fraction_raw{};
  std::array<double, 4> side_mass_fraction{};
  int dominant_side = 0;
  double dominant_fraction = 0;
  double sign_agreement = 0;  // fraction of dominant-side samples with one consistent sign
};

struct DisjointnessReport {
  std::array<EdgeConcentration, 4> edges;  // left, bottom, right, top of R
};

template <class Scalar>
DisjointnessReport disjointness_diagnostic(const ForwardOperator<Scalar>& op,
                                           const ConductivityField<Scalar>& cond,
                                           const CellRect& rect) {
  const Grid& grid = op.grid;
  const int n = grid.n;
  if (rect.ix0 > rect.ix1 || rect.iy0 > rect.iy1)
    throw std::invalid_argument("disjointness_diagnostic: empty rectangle");
  if (rect.ix0 < 1 || rect.iy0 < 1 || rect.ix1 > n - 2 || rect.iy1 > n - 2)
    throw std::invalid_argument("disjointness_diagnostic: rectangle touches the boundary");
  if (op.rows() != grid.boundary_count())
    throw std::invalid_argument("disjointness_diagnostic: needs the full boundary observation");

  GreensImages<Scalar> im = greens_derivative_images(op, cond, GreensBc::dirichlet);
  const int m = grid.boundary_count();
  const Scalar h = static_cast<Scalar>(grid.h());

  // per-edge face columns with the outward-normal sign of the rectangle
  std::array<std::vector<Vector<Scalar>>, 4> contributions;
  for (int iy = rect.iy0; iy <= rect.iy1; ++iy) {
    contributions[0].push_back(-h * im.img1.col(face1_index(grid, rect.ix0 - 1, iy)));
    contributions[2].push_back(h * im.img1.col(face1_index(grid, rect.ix1, iy)));
  }
  for (int ix = rect.ix0; ix <= rect.ix1; ++ix) {
    contributions[1].push_back(-h * im.img2.col(face2_index(grid, ix, rect.iy0 - 1)));
    contributions[3].push_back(h * im.img2.col(face2_index(grid, ix, rect.iy1)));
  }

  // domain side membership with half weight at shared corners
  auto side_weight = [&](int bidx, int side) -> double {
    const int cell = grid.boundary_indices[bidx];
    const int ix = grid.cell_ix(cell), iy = grid.cell_iy(cell);
    const bool on[4] = {ix == 0, iy == 0, ix == n - 1, iy == n - 1};
    if (!on[side]) return 0.0;
    const int sides_touched = (on[0] ? 1 : 0) + (on[1] ? 1 : 0) + (on[2] ? 1 : 0) + (on[3] ? 1 : 0);
    return 1.0 / sides_touched;
  };

  DisjointnessReport rep;
  for (int e = 0; e < 4; ++e) {
    Vector<Scalar> phi = Vector<Scalar>::Zero(m);
    for (const auto& c : contributions[e]) phi += c;
    EdgeConcentration& ec = rep.edges[e];
    auto fractions = [&](const Vector<Scalar>& v, std::array<double, 4>& out) {
      double total = 0;
      for (int s = 0; s < 4; ++s) {
        double mass = 0;
        for (int j = 0; j < m; ++j) mass += side_weight(j, s) * std::abs(static_cast<double>(v[j]));
        out[s] = mass;
        total += mass;
      }
      if (total > 0)
        for (double& f : out) f /= total;
    };
    fractions(phi, ec.side_mass_fraction_raw);
    Vector<Scalar> centered = phi.array() - phi.mean();
    fractions(centered, ec.side_mass_fraction);
    ec.dominant_side = static_cast<int>(std::max_element(ec.side_mass_fraction.begin(),
                                                         ec.side_mass_fraction.end()) -
                                        ec.side_mass_fraction.begin());
    ec.dominant_fraction = ec.side_mass_fraction[ec.dominant_side];

    const Scalar zero_tol = Scalar(1e-13) * phi.template lpNorm<Eigen::Infinity>();
    int agree = 0, counted = 0;
    for (int j = 0; j < m; ++j) {
      if (side_weight(j, ec.dominant_side) == 0.0) continue;
      ++counted;
      int sign = 0;
      bool consistent = true;
      for (const auto& c : contributions[e]) {
        if (std::abs(c[j]) <= zero_tol) continue;
        const int s = c[j] > 0 ? 1 : -1;
        if (sign == 0) sign = s;
        else if (sign != s) { consistent = false; break; }
      }
      if (consistent && sign != 0) ++agree;
    }
    ec.sign_agreement = counted > 0 ? static_cast<double>(agree) / counted : 0.0;
  }
  return rep;
}

}  // namespace nstv
