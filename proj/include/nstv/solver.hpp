#pragma once

#include <cstdint>
#include <optional>

#include "nstv/tv.hpp"

namespace nstv {

enum class SolveMode { penalized, tv, l1, hybrid };
enum class StopReason { morozov, max_iters, constraint_met };

inline const char* to_string(SolveMode m) {
  switch (m) {
    case SolveMode::penalized: return "penalized";
    case SolveMode::tv: return "tv";
    case SolveMode::l1: return "l1";
    case SolveMode::hybrid: return "hybrid";
  }
  return "?";
}
inline const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::morozov: return "morozov";
    case StopReason::max_iters: return "max_iters";
    case StopReason::constraint_met: return "constraint_met";
  }
  return "?";
}

template <class Scalar>
struct SolverConfig {
  Scalar alpha = 1;  // TV regularization weight
  Scalar beta = 0;   // weighted-l1 regularization weight
  bool extended_tv = false;

  Scalar admm_rho = 0;       // 0: start from the shrink-threshold scale
  bool adapt_rho = false;    // residual balancing; off by default, the fixed
                             // threshold-scale rho is more dependable here
  Scalar admm_relax = Scalar(1.7);  // over-relaxation in (0,2)
  int max_admm_iters = 4000;
  Scalar admm_tol = Scalar(1e-10);

  int max_bregman_iters = 100;
  Scalar morozov_tau = 1;
  Scalar constraint_tol = Scalar(1e-8);

  std::uint64_t seed = 0;

  void validate_penalized() const {
    if (alpha < 0 || beta < 0)
      throw std::invalid_argument("SolverConfig: alpha and beta must be nonnegative");
    if (alpha == 0 && beta == 0)
      throw std::invalid_argument("SolverConfig: alpha and beta cannot both vanish");
    if (!(admm_tol > 0) || !(constraint_tol > 0))
      throw std::invalid_argument("SolverConfig: tolerances must be positive");
  }
};

namespace detail {

/// One l1-composite objective mu/2 |Ax-b|^2 + sum_r tau_r |(Lx)_r| with the
/// stacked splitting operator L = [grad_1; grad_2; boundary; identity].
template <class Scalar>
struct SplitTerms {
  SparseMatrix<Scalar> L;
  Vector<Scalar> tau;
};

template <class Scalar>
SplitTerms<Scalar> build_split_terms(const Grid& grid, Scalar alpha, Scalar beta,
                                     const WeightField<Scalar>& weights,
                                     const Vector<Scalar>& wtilde, bool extended_tv) {
  if (weights.grid != grid) throw std::invalid_argument("solver: weight field grid mismatch");
  if (extended_tv && weights.w_boundary.size() != grid.boundary_count())
    throw std::invalid_argument("solver: extended TV requested but w_boundary is missing");
  const int N = grid.cell_count();
  const int n1 = face1_count(grid), n2 = face2_count(grid);
  const int nb = extended_tv ? grid.boundary_count() : 0;
  const int rows = n1 + n2 + nb + N;
  const Scalar hfac = static_cast<Scalar>(boundary_measure(grid));

  GradientOperator<Scalar> G = build_gradient<Scalar>(grid);
  std::vector<Eigen::Triplet<Scalar>> trip;
  trip.reserve(static_cast<size_t>(G.d1.nonZeros() + G.d2.nonZeros()) + nb + N);
  auto append = [&](const SparseMatrix<Scalar>& Mtx, int row0) {
    for (int k = 0; k < Mtx.outerSize(); ++k)
      for (typename SparseMatrix<Scalar>::InnerIterator it(Mtx, k); it; ++it)
        trip.emplace_back(row0 + static_cast<int>(it.row()), static_cast<int>(it.col()),
                          it.value());
  };
  append(G.d1, 0);
  append(G.d2, n1);
  for (int j = 0; j < nb; ++j)
    trip.emplace_back(n1 + n2 + j, grid.boundary_indices[j], Scalar(1));
  for (int i = 0; i < N; ++i) trip.emplace_back(n1 + n2 + nb + i, i, Scalar(1));

  SplitTerms<Scalar> st;
  st.L.resize(rows, N);
  st.L.setFromTriplets(trip.begin(), trip.end());
  st.L.makeCompressed();
  st.tau.resize(rows);
  st.tau.head(n1) = alpha * hfac * weights.w1;
  if (n2) st.tau.segment(n1, n2) = alpha * hfac * weights.w2;
  if (nb) st.tau.segment(n1 + n2, nb) = alpha * hfac * weights.w_boundary;
  if (wtilde.size()) {
    if (wtilde.size() != N) throw std::invalid_argument("solver: wtilde size mismatch");
    st.tau.tail(N) = beta * wtilde;
  } else {
    st.tau.tail(N).setConstant(beta);
  }
  return st;
}

}  // namespace detail

/// Cached pieces of the ADMM x-update. The quadratic system
/// (mu A^T A + rho L^T L) x = v is solved through the Woodbury identity, so
/// the only large factorization is the sparse Cholesky of L^T L; a rho change
/// refreshes just the small |E| x |E| capacitance factor.
template <class Scalar>
struct AdmmWorkspace {
  Matrix<Scalar> A;
  Grid grid;
  Scalar mu = 1;
  detail::SplitTerms<Scalar> split;
  SparseMatrix<Scalar> Lt;

  std::shared_ptr<Eigen::SimplicialLLT<SparseMatrix<Scalar>>> Mllt;  // L^T L
  Matrix<Scalar> W;                                                  // (L^T L)^{-1} A^T
  Matrix<Scalar> AW;                                                 // A W
  Eigen::LLT<Matrix<Scalar>> cap;  // (1/mu) I + (1/rho) AW
  Scalar rho = 1;

  // warm-start state
  Vector<Scalar> x, z, u;
  bool has_state = false;
  int rho_adaptations = 0;  // lifetime telemetry

  void rescale_regularizer(Scalar factor) {
    split.tau *= factor;
    // keep the unscaled dual rho*u continuous across the change
    u /= factor;
    rho *= factor;
    refresh_capacitance();
  }

  void refresh_capacitance() {
    Matrix<Scalar> C = AW / rho;
    C.diagonal().array() += Scalar(1) / mu;
    cap.compute(C);
  }

  Vector<Scalar> solve_quadratic(const Vector<Scalar>& v) const {
    Vector<Scalar> t = Mllt->solve(v);
    Vector<Scalar> s = cap.solve(Vector<Scalar>(A * t) / rho);
    return (t - W * s) / rho;
  }
};

template <class Scalar>
AdmmWorkspace<Scalar> make_admm_workspace(const Matrix<Scalar>& A, const Grid& grid, Scalar alpha,
                                          Scalar beta, const WeightField<Scalar>& weights,
                                          const Vector<Scalar>& wtilde,
                                          const SolverConfig<Scalar>& config) {
  if (A.cols() != grid.cell_count())
    throw std::invalid_argument("solver: operator column count does not match grid");
  AdmmWorkspace<Scalar> ws;
  ws.A = A;
  ws.grid = grid;
  ws.mu = static_cast<Scalar>(boundary_measure(grid));
  ws.split = detail::build_split_terms(grid, alpha, beta, weights, wtilde, config.extended_tv);
  ws.Lt = ws.split.L.transpose();
  SparseMatrix<Scalar> M = ws.Lt * ws.split.L;
  ws.Mllt = std::make_shared<Eigen::SimplicialLLT<SparseMatrix<Scalar>>>();
  ws.Mllt->compute(M);
  if (ws.Mllt->info() != Eigen::Success)
    throw std::runtime_error("solver: factorization of L^T L failed");
  ws.W = ws.Mllt->solve(Matrix<Scalar>(A.transpose()));
  ws.AW = A * ws.W;
  if (config.admm_rho > 0) {
    ws.rho = config.admm_rho;
  } else {
    // shrink thresholds tau/rho should sit at the scale of |Lx|, so start
    // rho at the mean positive threshold; residual balancing trims from there
    Scalar sum = 0;
    int cnt = 0;
    for (Index r = 0; r < ws.split.tau.size(); ++r)
      if (ws.split.tau[r] > 0) {
        sum += ws.split.tau[r];
        ++cnt;
      }
    ws.rho = cnt > 0 ? sum / cnt : Scalar(1);
  }
  ws.refresh_capacitance();
  return ws;
}

template <class Scalar>
struct AdmmResult {
  Vector<Scalar> x;
  int iterations = 0;
  bool converged = false;
  Scalar objective = 0;
  Scalar primal_residual = 0;
  Scalar dual_residual = 0;
};

namespace detail {

template <class Scalar>
Scalar split_objective(const AdmmWorkspace<Scalar>& ws, const Vector<Scalar>& b,
                       const Vector<Scalar>& x) {
  const Scalar fit = Scalar(0.5) * ws.mu * (ws.A * x - b).squaredNorm();
  return fit + ws.split.tau.dot((ws.split.L * x).cwiseAbs());
}

}  // namespace detail

/// Scaled-form ADMM on mu/2 |Ax-b|^2 + sum tau_r |(Lx)_r| with residual-based
/// stopping and optional residual-balancing rho adaptation (factor 2 when the
/// primal/dual ratio passes 10).
template <class Scalar>
AdmmResult<Scalar> admm_solve(AdmmWorkspace<Scalar>& ws, const Vector<Scalar>& b,
                              const SolverConfig<Scalar>& config) {
  const int rows = static_cast<int>(ws.split.L.rows());
  if (!ws.has_state) {
    ws.x = Vector<Scalar>::Zero(ws.A.cols());
    ws.z = Vector<Scalar>::Zero(rows);
    ws.u = Vector<Scalar>::Zero(rows);
    ws.has_state = true;
  }
  const Vector<Scalar> Atb = ws.A.transpose() * b;
  const Scalar eps_abs = config.admm_tol * Scalar(0.01) * (1 + b.norm());
  const Scalar abs_pri = std::sqrt(Scalar(rows)) * eps_abs;
  const Scalar abs_dua = std::sqrt(Scalar(ws.A.cols())) * eps_abs;

  AdmmResult<Scalar> res;
  Vector<Scalar> x_best = ws.x;
  Scalar f_best = detail::split_objective(ws, b, ws.x);
  int adapt_budget = 60;  // per-call residual-balancing budget

  for (int it = 0; it < config.max_admm_iters; ++it) {
    Vector<Scalar> v = ws.mu * Atb + ws.rho * (ws.Lt * (ws.z - ws.u));
    ws.x = ws.solve_quadratic(v);
    Vector<Scalar> Lx = ws.split.L * ws.x;
    Vector<Scalar> z_old = std::move(ws.z);
    // over-relaxed consensus step
    Vector<Scalar> Lx_hat = config.admm_relax * Lx + (1 - config.admm_relax) * z_old;
    ws.z = Lx_hat + ws.u;
    for (int r = 0; r < rows; ++r) ws.z[r] = shrink(ws.z[r], ws.split.tau[r] / ws.rho);
    ws.u += Lx_hat - ws.z;

    const Scalar rnorm = (Lx - ws.z).norm();
    const Scalar snorm = ws.rho * (ws.Lt * (ws.z - z_old)).norm();
    const Scalar eps_pri = abs_pri + config.admm_tol * std::max(Lx.norm(), ws.z.norm());
    const Scalar eps_dua = abs_dua + config.admm_tol * ws.rho * (ws.Lt * ws.u).norm();

    const Scalar f = detail::split_objective(ws, b, ws.x);
    if (f < f_best) {
      f_best = f;
      x_best = ws.x;
    }
    res.iterations = it + 1;
    res.primal_residual = rnorm;
    res.dual_residual = snorm;
    if (rnorm <= eps_pri && snorm <= eps_dua) {
      res.converged = true;
      break;
    }
    if (config.adapt_rho && adapt_budget > 0 && (it + 1) % 10 == 0) {
      // balance the residuals relative to their own tolerances; the raw
      // norms live in incomparable units
      const Scalar tiny = std::numeric_limits<Scalar>::min();
      const Scalar r_rel = rnorm / std::max(eps_pri, tiny);
      const Scalar s_rel = snorm / std::max(eps_dua, tiny);
      if (r_rel > 10 * s_rel && ws.rho < Scalar(1e10)) {
        ws.rho *= 2;
        ws.u /= 2;
        ws.refresh_capacitance();
        ++ws.rho_adaptations;
        --adapt_budget;
      } else if (s_rel > 10 * r_rel && ws.rho > Scalar(1e-10)) {
        ws.rho /= 2;
        ws.u *= 2;
        ws.refresh_capacitance();
        ++ws.rho_adaptations;
        --adapt_budget;
      }
    }
  }

  // the returned iterate must not be worse than the zero vector, the warm
  // start, or anything seen along the way
  if (detail::split_objective(ws, b, ws.x) <= f_best) {
    res.x = ws.x;
  } else {
    res.x = x_best;
  }
  const Scalar f_zero = Scalar(0.5) * ws.mu * b.squaredNorm();
  if (f_zero < detail::split_objective(ws, b, res.x)) res.x.setZero();
  res.objective = detail::split_objective(ws, b, res.x);
  return res;
}

/// One penalized solve: min_x mu/2 ||Ax - b||^2 + alpha TV_w(x) + beta ||Wtilde x||_1.
template <class Scalar>
AdmmResult<Scalar> admm_inner(const Matrix<Scalar>& A, const Vector<Scalar>& b, Scalar alpha,
                              Scalar beta, const WeightField<Scalar>& weights,
                              const Vector<Scalar>& wtilde, const SolverConfig<Scalar>& config) {
  AdmmWorkspace<Scalar> ws = make_admm_workspace(A, weights.grid, alpha, beta, weights, wtilde,
                                                 config);
  return admm_solve(ws, b, config);
}

template <class Scalar>
struct SolveReport {
  SourceField<Scalar> reconstruction;
  std::vector<Scalar> objective_trajectory;
  std::vector<Scalar> data_residual_trajectory;
  int bregman_iters_used = 0;
  StopReason stop_reason = StopReason::max_iters;
  Scalar final_residual = 0;
  Scalar noise_norm = 0;
  Scalar morozov_threshold = 0;
  Scalar bregman_dual_norm = 0;  // ||b_k - d|| at the returned iterate
  int total_admm_iterations = 0;
  bool admm_all_converged = true;
  SolverConfig<Scalar> config;
};

namespace detail {

template <class Scalar>
SolveReport<Scalar> bregman_impl(const Matrix<Scalar>& A, const Vector<Scalar>& d, Scalar alpha,
                                 Scalar beta, const WeightField<Scalar>& weights,
                                 const Vector<Scalar>& wtilde, Scalar stop_norm,
                                 const SolverConfig<Scalar>& config, bool constraint_mode) {
  const Grid& grid = weights.grid;
  if (!(stop_norm > 0))
    throw std::invalid_argument("bregman: stopping noise norm must be positive");

  AdmmWorkspace<Scalar> ws = make_admm_workspace(A, grid, alpha, beta, weights, wtilde, config);
  SolveReport<Scalar> rep;
  rep.config = config;
  rep.noise_norm = stop_norm;
  rep.morozov_threshold = config.morozov_tau * stop_norm;
  rep.stop_reason = StopReason::max_iters;

  Vector<Scalar> b = d;
  Vector<Scalar> x = Vector<Scalar>::Zero(A.cols());
  Scalar scale_used = 1;
  Scalar prev_res = std::numeric_limits<Scalar>::infinity();
  int rescales = 0;
  for (int k = 0; k < config.max_bregman_iters; ++k) {
    AdmmResult<Scalar> inner = admm_solve(ws, b, config);
    x = inner.x;
    rep.total_admm_iterations += inner.iterations;
    rep.admm_all_converged = rep.admm_all_converged && inner.converged;
    rep.bregman_dual_norm = norm_data(grid, Vector<Scalar>(b - d));
    const Vector<Scalar> misfit = A * x - d;
    const Scalar res = norm_data(grid, misfit);
    rep.data_residual_trajectory.push_back(res);
    rep.objective_trajectory.push_back(
        Scalar(0.5) * ws.mu * misfit.squaredNorm() +
        ws.split.tau.dot((ws.split.L * x).cwiseAbs()));
    rep.bregman_iters_used = k + 1;
    rep.final_residual = res;
    if (res <= rep.morozov_threshold) {
      rep.stop_reason = constraint_mode ? StopReason::constraint_met : StopReason::morozov;
      break;
    }
    // penalty continuation: a stalling residual means the accumulated
    // multiplier is creeping along a degenerate face of the regularizer;
    // shrinking the regularizer scale is the classic ALM penalty increase
    // and does not move the constrained minimizer
    if (res > Scalar(0.7) * prev_res && rescales < 100) {
      ws.rescale_regularizer(Scalar(0.25));
      scale_used *= Scalar(0.25);
      ++rescales;
    }
    prev_res = res;
    b -= misfit;  // b_{k+1} = b_k + (d - A x_k)
  }
  // the effective regularization weights after continuation
  rep.config.alpha *= scale_used;
  rep.config.beta *= scale_used;
  rep.reconstruction = SourceField<Scalar>(grid, x);
  return rep;
}

}  // namespace detail

/// Outer Bregman iteration with Morozov stopping: iterate penalized solves,
/// adding the data residual back onto the right-hand side, until
/// ||A x - d|| <= tau * noise_norm.
template <class Scalar>
SolveReport<Scalar> bregman_outer(const Matrix<Scalar>& A, const Vector<Scalar>& d, Scalar alpha,
                                  Scalar beta, const WeightField<Scalar>& weights,
                                  const Vector<Scalar>& wtilde, Scalar noise_norm,
                                  const SolverConfig<Scalar>& config) {
  SolverConfig<Scalar> cfg = config;
  cfg.alpha = alpha;
  cfg.beta = beta;
  cfg.validate_penalized();
  if (!(noise_norm > 0))
    throw std::invalid_argument("bregman_outer: noise_norm must be positive in noisy mode");
  return detail::bregman_impl(A, d, alpha, beta, weights, wtilde, noise_norm, cfg, false);
}

namespace detail {

/// Balances the regularizer against the data energy using a cheap ridge
/// least-squares reference point. Scaling the regularizer does not move the
/// constrained minimizer, it only sets how many Bregman steps the residual
/// needs, so the scale is free to choose.
template <class Scalar>
Scalar basis_pursuit_scale(const Matrix<Scalar>& A, const Vector<Scalar>& b, const Grid& grid,
                           const WeightField<Scalar>& weights, const Vector<Scalar>& wtilde,
                           Scalar gamma_tv, Scalar gamma_l1, bool extended_tv) {
  Matrix<Scalar> AAt = A * A.transpose();
  const Scalar lam = Scalar(1e-8) * AAt.diagonal().mean() + Scalar(1e-300);
  AAt.diagonal().array() += lam;
  Vector<Scalar> xr = A.transpose() * AAt.ldlt().solve(b);
  SourceField<Scalar> fr(grid, xr);
  Scalar J = 0;
  if (gamma_tv > 0)
    J += gamma_tv * (extended_tv ? tv_extended(fr, weights).total : tv_weighted(fr, weights).total);
  if (gamma_l1 > 0)
    J += gamma_l1 * (wtilde.size() ? wtilde.dot(xr.cwiseAbs()) : xr.template lpNorm<1>());
  const Scalar data = Scalar(0.5) * static_cast<Scalar>(boundary_measure(grid)) * b.squaredNorm();
  return (J > 0 && data > 0) ? data / J : Scalar(1);
}

}  // namespace detail

/// Equality-constrained mode: Bregman iterations are driven until the data
/// residual falls below constraint_tol * ||b||, returning the first iterate
/// that meets the constraint tolerance.
///   tv:     min TV_w(x)                      s.t. Ax = b
///   l1:     min ||Wtilde x||_1               s.t. Ax = b
///   hybrid: min gamma TV_w(x) + ||Wtilde x||_1 s.t. Ax = b
/// The internally used (alpha, beta) = scale * (coefficients) are recorded in
/// the report's config; config.alpha (tv) / config.beta (l1, hybrid) override
/// the automatic scale when positive.
template <class Scalar>
SolveReport<Scalar> basis_pursuit(const Matrix<Scalar>& A, const Vector<Scalar>& b,
                                  const WeightField<Scalar>& weights, const Vector<Scalar>& wtilde,
                                  SolveMode mode, Scalar gamma,
                                  const SolverConfig<Scalar>& config) {
  SolverConfig<Scalar> cfg = config;
  cfg.morozov_tau = 1;
  Scalar alpha = 0, beta = 0;
  switch (mode) {
    case SolveMode::tv: {
      alpha = cfg.alpha > 0 ? cfg.alpha
                            : detail::basis_pursuit_scale(A, b, weights.grid, weights, wtilde,
                                                          Scalar(1), Scalar(0), cfg.extended_tv);
      break;
    }
    case SolveMode::l1: {
      beta = cfg.beta > 0 ? cfg.beta
                          : detail::basis_pursuit_scale(A, b, weights.grid, weights, wtilde,
                                                        Scalar(0), Scalar(1), cfg.extended_tv);
      break;
    }
    case SolveMode::hybrid: {
      if (!(gamma >= 0)) throw std::invalid_argument("basis_pursuit: gamma must be >= 0");
      const Scalar scale =
          cfg.beta > 0 ? cfg.beta
                       : detail::basis_pursuit_scale(A, b, weights.grid, weights, wtilde, gamma,
                                                     Scalar(1), cfg.extended_tv);
      alpha = gamma * scale;
      beta = scale;
      break;
    }
    case SolveMode::penalized:
      throw std::invalid_argument("basis_pursuit: mode must be tv, l1 or hybrid");
  }
  cfg.alpha = alpha;
  cfg.beta = beta;
  const Scalar stop = cfg.constraint_tol * norm_data(weights.grid, b);
  return detail::bregman_impl(A, b, alpha, beta, weights, wtilde, stop, cfg, true);
}

// --- a-posteriori check of the hybrid-method bounds --------------------------

template <class Scalar>
struct HybridBoundsReport {
  bool tv_ok = false;
  bool l1_ok = false;
  bool conclusive = true;
  Scalar tv_gamma = 0, tv_star = 0;
  Scalar l1_gap = 0;       // ||Wt x_gamma||_1 - ||Wt x*||_1
  Scalar l1_upper = 0;     // gamma TV_w(x*)
  Scalar slack = 0;        // objective slack L * constraint_residual
  Scalar lipschitz = 0;    // the computed constant L
  Scalar l1_optimality_gap = 0;
  Scalar constraint_residual = 0;
};

/// Checks the hybrid bounds for a basis-pursuit solution x_gamma whose
/// constraint Ax = Ax* is met only to tolerance. Since x_gamma minimizes the
/// subproblem J(x) + 1/2 ||Ax - b_k||^2 at which x* is feasible,
///   J(x_gamma) - J(x*) <= r * (dual + r/2) =: L * r,
/// with r the constraint residual and dual = ||b_k - d|| the accumulated
/// Bregman multiplier, all in L2(E). l1_optimality_gap is an additional
/// allowance for x* being only an approximate minimizer of the weighted-l1
/// problem (zero when the column-parallelism of Prop-type arguments is exact).
template <class Scalar>
HybridBoundsReport<Scalar> hybrid_bounds_check(const SourceField<Scalar>& x_gamma,
                                               const SourceField<Scalar>& x_star, Scalar gamma,
                                               const WeightField<Scalar>& weights,
                                               const Vector<Scalar>& wtilde,
                                               const Matrix<Scalar>& A, Scalar bregman_dual_norm,
                                               Scalar expected_constraint_tol,
                                               Scalar l1_optimality_gap = 0,
                                               Scalar objective_scale = 1) {
  const Grid& grid = weights.grid;
  HybridBoundsReport<Scalar> rep;
  rep.tv_gamma = tv_weighted(x_gamma, weights).total;
  rep.tv_star = tv_weighted(x_star, weights).total;
  rep.l1_gap = wtilde.dot(x_gamma.values.cwiseAbs()) - wtilde.dot(x_star.values.cwiseAbs());
  rep.l1_upper = gamma * rep.tv_star;
  rep.l1_optimality_gap = l1_optimality_gap;

  const Scalar r = norm_data(grid, Vector<Scalar>(A * (x_gamma.values - x_star.values)));
  rep.constraint_residual = r;
  rep.lipschitz = (bregman_dual_norm + r / 2) / objective_scale;
  rep.slack = rep.lipschitz * r;

  rep.conclusive = r <= 10 * expected_constraint_tol;
  const Scalar eps = Scalar(1e-12) * (std::abs(rep.tv_star) + std::abs(rep.l1_upper) + 1);
  rep.tv_ok = rep.tv_gamma <=
              rep.tv_star + (rep.slack + l1_optimality_gap) / std::max(gamma, Scalar(1e-300)) + eps;
  rep.l1_ok = rep.l1_gap >= -(rep.slack + l1_optimality_gap) - eps &&
              rep.l1_gap <= rep.l1_upper + rep.slack + eps;
  return rep;
}

}  // namespace nstv
