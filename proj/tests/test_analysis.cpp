#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <nstv/analysis.hpp>
#include <nstv/phantom.hpp>

using namespace nstv;

namespace {

struct Setup1d {
  Grid grid;
  ForwardOperator<double> op;
  ProjectedOperator<double> proj;
  WeightField<double> weights;
};

Setup1d make_setup(int n, int stride) {
  Setup1d s;
  s.grid = build_grid(1, n);
  auto cond = conductivity_field<double>(ConductivityKind::isotropic, s.grid);
  s.op = assemble_forward(s.grid, cond, observation_cells_1d(s.grid, stride));
  s.proj = project_out_constants(s.op);
  s.weights = weight_1d(s.proj, s.grid, 0.0);
  return s;
}

}  // namespace

TEST_CASE("closed form: limits and validity interval") {
  auto s = make_setup(100, 8);
  const double rho = 1.5, tau = 1.25;

  auto tiny = closed_form_1d(s.proj, 0.65, rho, tau, 1e-9);
  CHECK(tiny.gamma == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(tiny.eta == doctest::Approx(tau).epsilon(1e-6));

  auto js = closed_form_1d(s.proj, 0.65, rho, tau, 0.5 * rho * tiny.weight_at_jump);
  CHECK(js.gamma == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(js.gamma > 0.0);
  CHECK(js.gamma < 1.0);
  // the field is gamma rho Hbar + eta
  CHECK(js.field.values[s.grid.n - 1] - js.field.values[0] == doctest::Approx(js.gamma * rho));

  const double bound = std::abs(rho) * js.weight_at_jump;
  CHECK_THROWS_AS(closed_form_1d(s.proj, 0.65, rho, tau, bound), std::invalid_argument);
  CHECK_THROWS_AS(closed_form_1d(s.proj, 0.65, rho, tau, 0.0), std::invalid_argument);
}

TEST_CASE("numerical solve reproduces the closed form") {
  auto s = make_setup(100, 8);
  const double rho = 1.5, tau = 1.25;

  SolverConfig<double> cfg;
  cfg.admm_tol = 1e-12;
  cfg.max_admm_iters = 60000;

  auto probe = closed_form_1d(s.proj, 0.65, rho, tau, 1e-9);
  auto js = closed_form_1d(s.proj, 0.65, rho, tau, 0.5 * rho * probe.weight_at_jump);
  auto chk = verify_closed_form(s.proj, s.weights, js, cfg);
  CHECK(chk.rel_error <= 2e-2);

  auto js3 = closed_form_1d(s.proj, 0.65, rho, tau, 0.3 * rho * probe.weight_at_jump);
  CHECK(verify_closed_form(s.proj, s.weights, js3, cfg).rel_error <= 2e-2);

  // small alpha: the closed form approaches the true source
  auto js0 = closed_form_1d(s.proj, 0.65, rho, tau, 0.05 * rho * probe.weight_at_jump);
  const Vector<double> truth = rho * heaviside_zero_mean_1d<double>(s.grid, js0.face) +
                               Vector<double>::Constant(s.grid.n, tau);
  CHECK((js0.field.values - truth).norm() / truth.norm() < 0.05);

  // negative jump mirrors the positive case
  auto jneg = closed_form_1d(s.proj, 0.65, -rho, tau, 0.5 * rho * probe.weight_at_jump);
  CHECK(jneg.gamma == doctest::Approx(js.gamma).epsilon(1e-12));
  auto chkneg = verify_closed_form(s.proj, s.weights, jneg, cfg);
  CHECK(chkneg.rel_error <= 2e-2);
  CHECK((jneg.field.values + js.field.values - 2 * tau * Vector<double>::Ones(s.grid.n) -
         (jneg.eta + js.eta - 2 * tau) * Vector<double>::Ones(s.grid.n))
            .norm() < 1e-12);
}

TEST_CASE("dual certificate satisfies the three subgradient conditions") {
  auto s = make_setup(100, 8);
  const double rho = 1.5;
  for (double xstar : {0.2, 0.35, 0.5, 0.65, 0.8}) {
    for (double frac : {0.3, 0.7}) {
      auto probe = closed_form_1d(s.proj, xstar, rho, 0.0, 1e-9);
      const double alpha = frac * rho * probe.weight_at_jump;
      auto cert = dual_certificate_1d(s.proj, s.weights, xstar, rho, alpha);
      CHECK(std::abs(cert.z_left) <= 1e-8);
      CHECK(std::abs(cert.z_right) <= 1e-8);
      CHECK(cert.bound_violation <= 1e-8);
      CHECK(cert.pairing_gap <= 1e-6);
      CHECK(cert.ok());
    }
  }
  // away from the jump the bound is strict (this is what pins the location)
  auto cert = dual_certificate_1d(s.proj, s.weights, 0.5, rho, 0.01);
  int touching = 0;
  for (int f = 0; f < s.grid.n - 1; ++f)
    if (std::abs(cert.z[f + 1]) > s.weights.w1[f] * (1 - 1e-6)) ++touching;
  CHECK(touching == 1);
}

TEST_CASE("operator identity K*K = C*C + projection term") {
  auto s = make_setup(80, 8);
  CHECK(verify_operator_identity(s.proj, 50) <= 1e-10);

  Grid g2 = build_grid(2, 12);
  auto op2 = assemble_forward(g2, conductivity_field<double>(ConductivityKind::isotropic, g2));
  CHECK(verify_operator_identity(project_out_constants(op2), 50) <= 1e-10);

  // constant source: both sides reduce to the projection term
  const Vector<double> ones = Vector<double>::Ones(s.grid.n);
  const Vector<double> lhs = s.proj.adjoint_factor() *
                             (s.op.matrix.transpose() * (s.op.matrix * ones));
  const Vector<double> proj_term = (dot_data<double>(s.grid, Vector<double>(s.op.matrix * ones),
                                                     s.proj.k1) /
                                    s.proj.k1_norm2) *
                                   (s.proj.adjoint_factor() *
                                    (s.op.matrix.transpose() * s.proj.k1));
  CHECK((lhs - proj_term).norm() <= 1e-10 * lhs.norm());
}

TEST_CASE("parallelism deviation") {
  Grid g = build_grid(2, 24);
  auto op = assemble_forward(g, conductivity_field<double>(ConductivityKind::isotropic, g));

  CHECK_THROWS_AS(parallelism_deviation(op, {}), std::invalid_argument);

  // single cell: zero deviation and exact l1 = l2
  auto single = parallelism_deviation(op, {g.cell_index(11, 13)});
  CHECK(single.max_angle_rad <= 1e-7);  // acos rounding on an exact 1
  CHECK(std::abs(single.l1_value - single.l2_value) <= 1e-14 * single.l1_value);

  // deep 3x3 block: small angles, and the l1-l2 gap is below the slack
  std::vector<int> deep;
  for (int iy = 11; iy <= 13; ++iy)
    for (int ix = 11; ix <= 13; ++ix) deep.push_back(g.cell_index(ix, iy));
  auto rep = parallelism_deviation(op, deep);
  CHECK(rep.max_angle_rad < 5.0 * M_PI / 180.0);
  CHECK(rep.gap_rel >= -1e-15);
  CHECK(rep.gap_rel <= rep.slack + 1e-15);

  // a domain-spanning set deviates much more
  std::vector<int> wide;
  for (int iy = 2; iy <= 21; iy += 19)
    for (int ix = 2; ix <= 21; ix += 19) wide.push_back(g.cell_index(ix, iy));
  auto rep_wide = parallelism_deviation(op, wide);
  CHECK(rep_wide.max_angle_rad > rep.max_angle_rad);
  CHECK(rep_wide.gap_rel <= rep_wide.slack + 1e-15);
}
