#pragma once

#include "nstv/core.hpp"

namespace nstv {

/// Projected-subgradient reference solver for
///   F(x) = mu/2 |Ax-b|^2 + sum_r tau_r |(Lx)_r|.
/// Deliberately primitive and independent of the ADMM path: Polyak-type
/// steps against a slowly decreasing target. Used to cross-check objective
/// values, never as the production solver.
template <class Scalar>
struct SubgradientReference {
  Matrix<Scalar> A, L;
  Vector<Scalar> b, tau;
  Scalar mu = 1;

  Scalar objective(const Vector<Scalar>& x) const {
    return Scalar(0.5) * mu * (A * x - b).squaredNorm() + tau.dot((L * x).cwiseAbs());
  }

  Scalar best_objective(long iterations) const {
    Vector<Scalar> x = Vector<Scalar>::Zero(A.cols());
    Scalar f_best = objective(x);
    Scalar delta = std::max<Scalar>(f_best, 1);
    const long stage = std::max<long>(iterations / 40, 1);
    for (long t = 1; t <= iterations; ++t) {
      Vector<Scalar> Lx = L * x;
      Vector<Scalar> sg = mu * (A.transpose() * (A * x - b));
      for (Index r = 0; r < L.rows(); ++r) {
        const Scalar s = Lx[r] > 0 ? Scalar(1) : (Lx[r] < 0 ? Scalar(-1) : Scalar(0));
        if (s != 0) sg += tau[r] * s * L.row(r).transpose();
      }
      const Scalar g2 = sg.squaredNorm();
      if (g2 == 0) break;
      const Scalar f = objective(x);
      f_best = std::min(f_best, f);
      x -= ((f - (f_best - delta)) / g2) * sg;
      if (t % stage == 0) delta /= 2;
    }
    return std::min(f_best, objective(x));
  }
};

}  // namespace nstv
