#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <nstv/forward.hpp>
#include <nstv/phantom.hpp>

#include <random>

using namespace nstv;

TEST_CASE("build_grid basics") {
  Grid g1 = build_grid(1, 8);
  CHECK(g1.cell_count() == 8);
  CHECK(g1.boundary_indices == std::vector<int>{0, 7});

  Grid g2 = build_grid(2, 4);
  CHECK(g2.cell_count() == 16);
  CHECK(g2.boundary_count() == 12);

  Grid g3 = build_grid(2, 64);
  CHECK(g3.cell_count() == 4096);
  CHECK(g3.boundary_count() == 252);

  CHECK_THROWS_AS(build_grid(2, 3), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(3, 8), std::invalid_argument);
}

TEST_CASE("boundary ordering is counter-clockwise from bottom-left") {
  Grid g = build_grid(2, 4);
  // bottom row, right column, top row (reversed), left column (reversed)
  std::vector<int> expect = {0, 1, 2, 3, 7, 11, 15, 14, 13, 12, 8, 4};
  CHECK(g.boundary_indices == expect);
  for (size_t j = 0; j < g.boundary_indices.size(); ++j)
    CHECK(g.ring_distance(g.boundary_indices[j]) == 0);
}

TEST_CASE("grid geometry") {
  Grid g = build_grid(2, 16);
  CHECK(g.h() * g.n == doctest::Approx(1.0).epsilon(1e-15));
  // unique centers inside (0,1)^2
  for (int i = 0; i < g.cell_count(); ++i) {
    CHECK(g.center(g.cell_ix(i)) > 0.0);
    CHECK(g.center(g.cell_ix(i)) < 1.0);
  }
  CHECK(g.cell_index(g.cell_ix(37), g.cell_iy(37)) == 37);
}

TEST_CASE("conductivity kinds") {
  Grid g = build_grid(2, 10);
  auto iso = conductivity_field<double>(ConductivityKind::isotropic, g);
  CHECK(iso.d1[g.cell_index(3, 7)] == 1.0);
  CHECK(iso.d2[g.cell_index(3, 7)] == 1.0);

  auto d1 = conductivity_field<double>(ConductivityKind::d1, g);
  // (1+9 x1) diag(5,1): at x1=0.05 -> 1.45*{5,1}
  const int c = g.cell_index(0, 4);
  CHECK(d1.d1[c] == doctest::Approx((1 + 9 * 0.05) * 5));
  CHECK(d1.d2[c] == doctest::Approx(1 + 9 * 0.05));

  auto d2 = conductivity_field<double>(ConductivityKind::d2, g);
  auto cell_at = [&](double x, double y) {
    return g.cell_index(static_cast<int>(x * g.n), static_cast<int>(y * g.n));
  };
  CHECK(d2.d1[cell_at(0.2, 0.2)] == 10.0);
  CHECK(d2.d1[cell_at(0.7, 0.7)] == 1.0);
  CHECK(d2.d1[cell_at(0.2, 0.7)] == 1.0);  // mixed quadrant takes the background

  CHECK_THROWS_AS(conductivity_field<double>(ConductivityKind::d1, build_grid(1, 8)),
                  std::invalid_argument);
  TensorCallback<double> bad = [](double, double) { return std::array<double, 3>{1, 1, 0.5}; };
  CHECK_THROWS_AS(conductivity_field<double>(ConductivityKind::custom, g, bad),
                  std::invalid_argument);
  TensorCallback<double> nonspd = [](double, double) { return std::array<double, 3>{-1, 1, 0}; };
  CHECK_THROWS_AS(conductivity_field<double>(ConductivityKind::custom, g, nonspd),
                  std::invalid_argument);
}

TEST_CASE("constants are preserved by the forward map") {
  for (auto [dim, n] : {std::pair{1, 16}, {2, 12}, {2, 24}}) {
    Grid g = build_grid(dim, n);
    for (auto kind : {ConductivityKind::isotropic, ConductivityKind::d1, ConductivityKind::d2}) {
      if (dim == 1 && kind != ConductivityKind::isotropic) continue;
      auto cond = conductivity_field<double>(kind, g);
      auto op = assemble_forward(g, cond);
      auto d = apply_forward(op, SourceField<double>::constant(g, 2.0));
      CHECK((d.values.array() - 2.0).abs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("manufactured 1D solution cos(pi x) converges at second order") {
  // -u'' + u = f with f = cos(pi x) has u = cos(pi x)/(1+pi^2), zero flux at both ends
  const double uexact = 1.0 / (1.0 + M_PI * M_PI);
  auto boundary_error = [&](int n) {
    Grid g = build_grid(1, n);
    auto op = assemble_forward(g, conductivity_field<double>(ConductivityKind::isotropic, g));
    Vector<double> f(n);
    for (int i = 0; i < n; ++i) f[i] = std::cos(M_PI * g.center(i));
    auto d = apply_forward(op, SourceField<double>(g, f));
    return std::max(std::abs(d.values[0] - uexact), std::abs(d.values[1] + uexact));
  };
  const double e128 = boundary_error(128);
  const double e256 = boundary_error(256);
  const double e512 = boundary_error(512);
  CHECK(e128 / e256 > 3.5);
  CHECK(e128 / e256 < 4.5);
  CHECK(e256 / e512 > 3.5);
  CHECK(e256 / e512 < 4.5);
  CHECK(boundary_error(512) < 1e-4);  // second-order accurate boundary values
}

TEST_CASE("2D data of a centered phantom has the symmetries of the square") {
  Grid g = build_grid(2, 16);
  auto op = assemble_forward(g, conductivity_field<double>(ConductivityKind::isotropic, g));
  PhantomSpec spec;
  spec.kind = PhantomKind::square;
  spec.center1 = spec.center2 = 0.5;
  spec.size = 0.5;
  auto f = make_phantom<double>(spec, g);
  auto d = apply_forward(op, f);

  auto value_at = [&](int ix, int iy) {
    const int cell = g.cell_index(ix, iy);
    const auto it = std::find(g.boundary_indices.begin(), g.boundary_indices.end(), cell);
    REQUIRE(it != g.boundary_indices.end());
    return d.values[it - g.boundary_indices.begin()];
  };
  for (int j = 0; j < g.boundary_count(); ++j) {
    const int cell = g.boundary_indices[j];
    const int ix = g.cell_ix(cell), iy = g.cell_iy(cell);
    CHECK(std::abs(d.values[j] - value_at(g.n - 1 - ix, iy)) < 1e-10);
    CHECK(std::abs(d.values[j] - value_at(ix, g.n - 1 - iy)) < 1e-10);
    CHECK(std::abs(d.values[j] - value_at(iy, ix)) < 1e-10);
  }
}

TEST_CASE("apply_forward is linear and matches the direct PDE solve") {
  Grid g = build_grid(2, 12);
  auto op = assemble_forward(g, conductivity_field<double>(ConductivityKind::isotropic, g));

  std::mt19937_64 rng(42);
  std::normal_distribution<double> gauss;
  Vector<double> f1(g.cell_count()), f2(g.cell_count());
  for (int i = 0; i < g.cell_count(); ++i) {
    f1[i] = gauss(rng);
    f2[i] = gauss(rng);
  }
  auto lhs = op.matrix * (2.5 * f1 - 0.75 * f2);
  auto rhs = 2.5 * (op.matrix * f1) - 0.75 * (op.matrix * f2);
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-13);

  CHECK((op.matrix * Vector<double>::Zero(g.cell_count())).norm() == 0.0);

  // column i equals the image of the i-th unit source
  Vector<double> e = Vector<double>::Zero(g.cell_count());
  e[37] = 1;
  CHECK((op.matrix * e - op.matrix.col(37)).norm() == 0.0);

  // large-square phantom data agrees with tracing the direct solve
  PhantomSpec spec;
  spec.kind = PhantomKind::square;
  spec.size = 0.5;
  auto f = make_phantom<double>(spec, g);
  auto d = apply_forward(op, f);
  auto u = solve_pde(op, f);
  for (int j = 0; j < g.boundary_count(); ++j)
    CHECK(std::abs(d.values[j] - u.values[g.boundary_indices[j]]) < 1e-12);

  // grid mismatch
  Grid g2 = build_grid(2, 8);
  CHECK_THROWS_AS(apply_forward(op, SourceField<double>::zero(g2)), std::invalid_argument);
}
