#pragma once

#include <random>

#include "nstv/solver.hpp"

namespace nstv {

/// Closed-form minimizer gamma rho Hbar_{x*} + eta of the 1D penalized
/// problem, with gamma = 1 - alpha / (|rho| ||C Hbar_{x*}||) and
/// eta = tau + (1 - gamma) rho (K Hbar_{x*}, K1) / ||K1||^2.
template <class Scalar>
struct JumpSolution {
  Scalar x_star = 0;  // snapped to the nearest face
  int face = 0;
  Scalar rho = 0, tau = 0, alpha = 0;
  Scalar gamma = 0, eta = 0;
  Scalar weight_at_jump = 0;  // ||C Hbar_{x*}||
  SourceField<Scalar> field;
};

template <class Scalar>
JumpSolution<Scalar> closed_form_1d(const ProjectedOperator<Scalar>& p, Scalar x_star, Scalar rho,
                                    Scalar tau, Scalar alpha) {
  const Grid& grid = p.base.grid;
  if (grid.dim != 1) throw std::invalid_argument("closed_form_1d: needs a 1D operator");
  JumpSolution<Scalar> js;
  js.face = nearest_face_1d(grid, static_cast<double>(x_star));
  js.x_star = Scalar(face_coordinate_1d(grid, js.face));
  js.rho = rho;
  js.tau = tau;
  js.alpha = alpha;

  const Vector<Scalar> hbar = heaviside_zero_mean_1d<Scalar>(grid, js.face);
  const Vector<Scalar> khbar = p.base.matrix * hbar;
  js.weight_at_jump = norm_data(grid, apply_Q(p, khbar));
  const Scalar bound = std::abs(rho) * js.weight_at_jump;
  if (!(alpha > 0) || !(alpha < bound))
    throw std::invalid_argument(
        "closed_form_1d: alpha must lie in (0, |rho| ||C Hbar_{x*}||) for the closed form");
  js.gamma = 1 - alpha / bound;
  js.eta = tau + (1 - js.gamma) * rho * dot_data<Scalar>(grid, khbar, p.k1) / p.k1_norm2;
  js.field = SourceField<Scalar>(grid, Vector<Scalar>(js.gamma * rho * hbar +
                                                      Vector<Scalar>::Constant(grid.n, js.eta)));
  return js;
}

template <class Scalar>
struct ClosedFormCheck {
  Scalar rel_error = 0;
  bool solver_converged = true;
  SourceField<Scalar> numerical;
};

/// Solves the penalized problem numerically (beta = 0) and compares with the
/// closed form in the relative l2 sense.
template <class Scalar>
ClosedFormCheck<Scalar> verify_closed_form(const ProjectedOperator<Scalar>& p,
                                           const WeightField<Scalar>& weights,
                                           const JumpSolution<Scalar>& jump,
                                           SolverConfig<Scalar> config) {
  const Grid& grid = p.base.grid;
  const Vector<Scalar> truth =
      jump.rho * heaviside_zero_mean_1d<Scalar>(grid, jump.face) +
      Vector<Scalar>::Constant(grid.n, jump.tau);
  const Vector<Scalar> b = p.base.matrix * truth;
  config.alpha = jump.alpha;
  config.beta = 0;
  config.extended_tv = false;
  AdmmResult<Scalar> res = admm_inner(p.base.matrix, b, jump.alpha, Scalar(0), weights,
                                      Vector<Scalar>(), config);
  ClosedFormCheck<Scalar> chk;
  chk.numerical = SourceField<Scalar>(grid, res.x);
  chk.solver_converged = res.converged;
  chk.rel_error = (res.x - jump.field.values).norm() / jump.field.values.norm();
  return chk;
}

/// Dual certificate of the 1D closed form: z on the n+1 face nodes
/// (walls included), the cumulative integral of -(1-gamma)|rho| C*C Hbar / alpha
/// over the cellwise-constant density, gauged to z(0) = 0.
template <class Scalar>
struct DualCertificate {
  Vector<Scalar> z;        // n+1 nodes at x = 0, h, ..., 1
  Vector<Scalar> w_faces;  // weight at the n-1 interior nodes
  int face = 0;            // jump face, interior node index face+1
  Scalar bound_violation = 0;   // max over interior nodes of |z| - w
  Scalar z_left = 0, z_right = 0;
  Scalar pairing_gap = 0;  // |z(x*) - w(x*)|
  bool ok(Scalar tol_bound = Scalar(1e-8), Scalar tol_trace = Scalar(1e-8),
          Scalar tol_pair = Scalar(1e-6)) const {
    return bound_violation <= tol_bound && std::abs(z_left) <= tol_trace &&
           std::abs(z_right) <= tol_trace && pairing_gap <= tol_pair;
  }
};

template <class Scalar>
DualCertificate<Scalar> dual_certificate_1d(const ProjectedOperator<Scalar>& p,
                                            const WeightField<Scalar>& weights, Scalar x_star,
                                            Scalar rho, Scalar alpha) {
  const Grid& grid = p.base.grid;
  if (grid.dim != 1) throw std::invalid_argument("dual_certificate_1d: needs a 1D operator");
  JumpSolution<Scalar> js = closed_form_1d(p, x_star, rho, Scalar(0), alpha);

  const Vector<Scalar> hbar = heaviside_zero_mean_1d<Scalar>(grid, js.face);
  // (1-gamma)|rho|/alpha = 1/||C Hbar_{x*}||, so z is the cumulative integral
  // of -C*C Hbar / ||C Hbar||; the h from the quadrature cancels against the
  // 1/h of the L2(E)->L2(Omega) adjoint.
  const Vector<Scalar> density = p.base.matrix.transpose() * apply_Q(p, Vector<Scalar>(
                                     p.base.matrix * hbar));
  DualCertificate<Scalar> cert;
  cert.face = js.face;
  cert.z.resize(grid.n + 1);
  cert.z[0] = 0;
  for (int i = 0; i < grid.n; ++i) cert.z[i + 1] = cert.z[i] - density[i] / js.weight_at_jump;
  cert.w_faces = weights.w1;
  cert.z_left = cert.z[0];
  cert.z_right = cert.z[grid.n];
  cert.bound_violation = -std::numeric_limits<Scalar>::infinity();
  for (int f = 0; f < grid.n - 1; ++f)
    cert.bound_violation = std::max(cert.bound_violation,
                                    std::abs(cert.z[f + 1]) - weights.w1[f]);
  cert.pairing_gap = std::abs(cert.z[js.face + 1] - weights.w1[js.face]);
  return cert;
}

/// Max relative violation of K*K f = C*C f + ((Kf,K1)/||K1||^2) K*K1 over
/// random sources.
template <class Scalar>
Scalar verify_operator_identity(const ProjectedOperator<Scalar>& p, int samples = 50,
                                std::uint64_t seed = 1234) {
  const Grid& grid = p.base.grid;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  const Scalar adj = p.adjoint_factor();
  const Vector<Scalar> kstar_k1 = adj * (p.base.matrix.transpose() * p.k1);
  Scalar worst = 0;
  for (int s = 0; s < samples; ++s) {
    Vector<Scalar> f(grid.cell_count());
    for (int i = 0; i < f.size(); ++i) f[i] = Scalar(gauss(rng));
    const Vector<Scalar> kf = p.base.matrix * f;
    const Vector<Scalar> lhs = adj * (p.base.matrix.transpose() * kf);
    const Vector<Scalar> rhs =
        apply_Cstar(p, apply_Q(p, kf)) + (dot_data<Scalar>(grid, kf, p.k1) / p.k1_norm2) * kstar_k1;
    worst = std::max(worst, (lhs - rhs).norm() / lhs.norm());
  }
  return worst;
}

/// How far the operator columns over a cell set R are from being parallel:
/// max angle against the centroid column, with the implied bound on the gap
/// between sum ||A e_j|| (the weighted-l1 value of chi_R) and ||A chi_R||.
template <class Scalar>
struct ParallelismReport {
  int centroid_cell = 0;
  Scalar max_angle_rad = 0;
  Scalar slack = 0;           // 1 - cos(max angle)
  Scalar l1_value = 0;        // sum of column norms over R
  Scalar l2_value = 0;        // norm of the summed columns
  Scalar gap_rel = 0;         // (l1 - l2) / l1, guaranteed <= slack
};

template <class Scalar>
ParallelismReport<Scalar> parallelism_deviation(const ForwardOperator<Scalar>& op,
                                                const std::vector<int>& cells) {
  if (cells.empty()) throw std::invalid_argument("parallelism_deviation: empty cell set");
  const Grid& grid = op.grid;
  double cx = 0, cy = 0;
  for (int c : cells) {
    cx += grid.center(grid.cell_ix(c));
    cy += grid.dim == 2 ? grid.center(grid.cell_iy(c)) : 0.0;
  }
  cx /= cells.size();
  cy /= cells.size();
  int best = cells.front();
  double best_d = std::numeric_limits<double>::infinity();
  for (int c : cells) {
    const double dx = grid.center(grid.cell_ix(c)) - cx;
    const double dy = (grid.dim == 2 ? grid.center(grid.cell_iy(c)) : 0.0) - cy;
    const double d = dx * dx + dy * dy;
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }

  ParallelismReport<Scalar> rep;
  rep.centroid_cell = best;
  const Vector<Scalar> ref = op.matrix.col(best);
  const Scalar ref_norm = ref.norm();
  Vector<Scalar> summed = Vector<Scalar>::Zero(op.rows());
  Scalar l1 = 0;
  for (int c : cells) {
    const Vector<Scalar> col = op.matrix.col(c);
    const Scalar cosv =
        std::clamp(col.dot(ref) / (col.norm() * ref_norm), Scalar(-1), Scalar(1));
    rep.max_angle_rad = std::max(rep.max_angle_rad, std::acos(cosv));
    summed += col;
    l1 += norm_data(grid, col);
  }
  rep.slack = 1 - std::cos(rep.max_angle_rad);
  rep.l1_value = l1;
  rep.l2_value = norm_data(grid, summed);
  rep.gap_rel = (rep.l1_value - rep.l2_value) / rep.l1_value;
  return rep;
}

}  // namespace nstv
