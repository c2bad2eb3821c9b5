#pragma once

#include "nstv/core.hpp"

namespace nstv {

template <class Scalar>
struct SupportMetrics {
  Scalar jaccard = 0;
  Scalar centroid_error = 0;  // NaN when the thresholded support is empty
  Scalar rel_l2 = 0;
  bool empty_support = false;
  Scalar boundary_mass_fraction = 0;  // support mass within 3 cells of the boundary ring
};

/// Binarizes the reconstruction at threshold_frac * max and compares against
/// the support of the truth. Centroids are the uniform centers of the
/// support sets, in domain units.
template <class Scalar>
SupportMetrics<Scalar> support_metrics(const SourceField<Scalar>& xhat,
                                       const SourceField<Scalar>& truth, Scalar threshold_frac) {
  if (xhat.grid != truth.grid) throw std::invalid_argument("support_metrics: grid mismatch");
  if (!(threshold_frac > 0) || !(threshold_frac < 1))
    throw std::invalid_argument("support_metrics: threshold_frac must be in (0,1)");
  const Grid& g = xhat.grid;
  SupportMetrics<Scalar> m;
  m.rel_l2 = (xhat.values - truth.values).norm() / truth.values.norm();

  const Scalar cut = threshold_frac * xhat.values.cwiseAbs().maxCoeff();
  int inter = 0, uni = 0, nsup = 0, ntrue = 0;
  double sx = 0, sy = 0, tx = 0, ty = 0;
  Scalar mass = 0, near_mass = 0;
  for (int i = 0; i < g.cell_count(); ++i) {
    const bool shat = std::abs(xhat.values[i]) > cut && cut > 0;
    const bool strue = truth.values[i] != Scalar(0);
    if (shat && strue) ++inter;
    if (shat || strue) ++uni;
    if (shat) {
      ++nsup;
      sx += g.center(g.cell_ix(i));
      sy += g.dim == 2 ? g.center(g.cell_iy(i)) : 0.0;
      const Scalar v = std::abs(xhat.values[i]);
      mass += v;
      if (g.ring_distance(i) <= 3) near_mass += v;
    }
    if (strue) {
      ++ntrue;
      tx += g.center(g.cell_ix(i));
      ty += g.dim == 2 ? g.center(g.cell_iy(i)) : 0.0;
    }
  }
  m.jaccard = uni > 0 ? Scalar(inter) / Scalar(uni) : Scalar(0);
  if (nsup == 0 || ntrue == 0) {
    m.empty_support = true;
    m.jaccard = 0;
    m.centroid_error = std::numeric_limits<Scalar>::quiet_NaN();
    return m;
  }
  const double dx = sx / nsup - tx / ntrue;
  const double dy = sy / nsup - ty / ntrue;
  m.centroid_error = Scalar(std::sqrt(dx * dx + dy * dy));
  m.boundary_mass_fraction = mass > 0 ? near_mass / mass : Scalar(0);
  return m;
}

}  // namespace nstv
