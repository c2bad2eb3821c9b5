// Test-only oracles, kept independent of the library's computational paths.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

namespace oracles {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// Dense brute-force realization of the 1D forward map (D = 1): assembles the
/// 3-point Neumann stencil of -u'' + u directly, inverts it densely and
/// restricts to the endpoints.
inline Mat dense_forward_1d(int n) {
  const double inv_h2 = static_cast<double>(n) * n;
  Mat S = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    S(i, i) = 1.0;
    if (i > 0) {
      S(i, i) += inv_h2;
      S(i, i - 1) -= inv_h2;
    }
    if (i + 1 < n) {
      S(i, i) += inv_h2;
      S(i, i + 1) -= inv_h2;
    }
  }
  Mat Sinv = S.inverse();
  Mat K(2, n);
  K.row(0) = Sinv.row(0);
  K.row(1) = Sinv.row(n - 1);
  return K;
}

inline double spearman_rho(const Vec& a, const Vec& b) {
  const int n = static_cast<int>(a.size());
  auto ranks = [&](const Vec& v) {
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int i, int j) { return v[i] < v[j]; });
    Vec r(n);
    for (int k = 0; k < n; ++k) r[idx[k]] = k;
    return r;
  };
  Vec ra = ranks(a), rb = ranks(b);
  ra.array() -= ra.mean();
  rb.array() -= rb.mean();
  return ra.dot(rb) / (ra.norm() * rb.norm());
}

/// Projected-subgradient oracle for
///   F(x) = mu/2 |Ax-b|^2 + sum_r tau_r |(Lx)_r|
/// with Polyak-type steps against a slowly decreasing target. Returns the
/// best objective seen. Independent of the ADMM implementation.
struct SubgradientOracle {
  Mat A, L;
  Vec b, tau;
  double mu = 1.0;

  double objective(const Vec& x) const {
    return 0.5 * mu * (A * x - b).squaredNorm() + tau.dot((L * x).cwiseAbs());
  }

  double solve(long iterations = 1000000) const {
    Vec x = Vec::Zero(A.cols());
    double f_best = objective(x);
    Vec x_best = x;
    double delta = std::max(f_best, 1.0);
    const long stage = std::max<long>(iterations / 40, 1);
    for (long t = 1; t <= iterations; ++t) {
      Vec Lx = L * x;
      Vec sg = mu * (A.transpose() * (A * x - b));
      for (int r = 0; r < L.rows(); ++r) {
        const double s = Lx[r] > 0 ? 1.0 : (Lx[r] < 0 ? -1.0 : 0.0);
        if (s != 0.0) sg += tau[r] * s * L.row(r).transpose();
      }
      const double g2 = sg.squaredNorm();
      if (g2 == 0.0) break;
      const double f = objective(x);
      if (f < f_best) {
        f_best = f;
        x_best = x;
      }
      const double target = f_best - delta;
      const double step = (f - target) / g2;
      x -= step * sg;
      if (t % stage == 0) delta *= 0.5;
    }
    return std::min(f_best, objective(x_best));
  }
};

}  // namespace oracles
