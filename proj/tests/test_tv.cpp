#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <nstv/phantom.hpp>
#include <nstv/tv.hpp>

#include <random>

using namespace nstv;

namespace {
Vector<double> random_field(const Grid& g, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Vector<double> f(g.cell_count());
  for (int i = 0; i < f.size(); ++i) f[i] = gauss(rng);
  return f;
}
}  // namespace

TEST_CASE("shrink") {
  CHECK(shrink(3.0, 1.0) == 2.0);
  CHECK(shrink(-0.5, 1.0) == 0.0);
  CHECK(shrink(-3.0, 1.0) == -2.0);
  CHECK(shrink(0.7, 0.0) == 0.7);
  CHECK(shrink(0.0, 0.5) == 0.0);
}

TEST_CASE("gradient/divergence pair is an exact transpose") {
  for (auto [dim, n] : {std::pair{1, 16}, {2, 9}}) {
    Grid g = build_grid(dim, n);
    auto G = build_gradient<double>(g);
    std::mt19937_64 rng(5);
    for (int t = 0; t < 10; ++t) {
      Vector<double> f = random_field(g, rng);
      Vector<double> phi1(face1_count(g)), phi2(face2_count(g));
      for (int i = 0; i < phi1.size(); ++i) phi1[i] = random_field(g, rng)[0];
      for (int i = 0; i < phi2.size(); ++i) phi2[i] = random_field(g, rng)[0];
      const double lhs = (G.d1 * f).dot(phi1) + (G.d2 * f).dot(phi2);
      const double rhs = f.dot(G.d1.transpose() * phi1 + G.d2.transpose() * phi2);
      CHECK(std::abs(lhs - rhs) <= 1e-13 * (std::abs(lhs) + 1));
    }
    // gradient of a constant vanishes identically
    CHECK((G.d1 * Vector<double>::Constant(g.cell_count(), 4.2)).norm() == 0.0);
    if (dim == 2) CHECK((G.d2 * Vector<double>::Constant(g.cell_count(), 4.2)).norm() == 0.0);
  }
}

TEST_CASE("weighted TV of simple fields") {
  Grid g = build_grid(2, 16);
  auto w = WeightField<double>::uniform(g, true);

  CHECK(tv_weighted(SourceField<double>::constant(g, 3.0), w).total == 0.0);

  // indicator of an a x b cell rectangle: perimeter 2(a+b) in cells, times h
  PhantomSpec spec;
  spec.kind = PhantomKind::rect;
  spec.lo1 = 0.25;
  spec.hi1 = 0.5;   // 4 cells
  spec.lo2 = 0.25;
  spec.hi2 = 0.75;  // 8 cells
  auto f = make_phantom<double>(spec, g);
  CHECK(f.values.sum() == 32.0);
  const double expected = 2 * (4 + 8) * g.h();
  CHECK(tv_weighted(f, w).total == doctest::Approx(expected).epsilon(1e-13));
  CHECK(tv_weighted(f, w).boundary == 0.0);

  // one-homogeneity
  SourceField<double> f2(g, Vector<double>(2.0 * f.values));
  CHECK(tv_weighted(f2, w).total == doctest::Approx(2 * expected).epsilon(1e-13));
}

TEST_CASE("extended TV adds the boundary term") {
  Grid g = build_grid(2, 12);
  auto w = WeightField<double>::uniform(g, true);

  // constant one: no interior variation, boundary (4n-4) h
  auto ones = SourceField<double>::constant(g, 1.0);
  auto v = tv_extended(ones, w);
  CHECK(v.interior == 0.0);
  CHECK(v.boundary == doctest::Approx((4 * g.n - 4) * g.h()).epsilon(1e-13));
  CHECK(v.total == v.interior + v.boundary);

  // interior support: extended equals plain TV
  PhantomSpec spec;
  spec.kind = PhantomKind::square;
  spec.size = 0.25;
  auto f = make_phantom<double>(spec, g);
  CHECK(tv_extended(f, w).total == doctest::Approx(tv_weighted(f, w).total));
  CHECK(tv_extended(f, w).boundary == 0.0);

  // support touching one side: the side jump is counted through w_boundary
  PhantomSpec touch;
  touch.kind = PhantomKind::rect;
  touch.lo1 = 0.0;
  touch.hi1 = 0.25;  // 3 cells, against the left wall
  touch.lo2 = 0.5;
  touch.hi2 = 0.75;  // 3 cells
  auto ft = make_phantom<double>(touch, g);
  auto vt = tv_extended(ft, w);
  CHECK(vt.boundary == doctest::Approx(3 * g.h()).epsilon(1e-13));
  CHECK(vt.interior == doctest::Approx((3 + 3 + 3) * g.h()).epsilon(1e-13));

  WeightField<double> no_bnd = WeightField<double>::uniform(g, false);
  CHECK_THROWS_AS(tv_extended(ones, no_bnd), std::invalid_argument);
}

TEST_CASE("TV properties: homogeneity, shift invariance, triangle inequality") {
  Grid g = build_grid(2, 10);
  std::mt19937_64 rng(11);
  WeightField<double> w = WeightField<double>::uniform(g, true);
  w.w1 = w.w1.unaryExpr([&](double) { return 0.1 + std::abs(random_field(g, rng)[0]); });
  w.w2 = w.w2.unaryExpr([&](double) { return 0.1 + std::abs(random_field(g, rng)[0]); });
  w.w_boundary = w.w_boundary.unaryExpr([&](double) { return 0.1 + std::abs(random_field(g, rng)[1]); });

  for (int t = 0; t < 10; ++t) {
    SourceField<double> f(g, random_field(g, rng));
    SourceField<double> gfield(g, random_field(g, rng));
    const double alpha = -2.7;

    SourceField<double> af(g, Vector<double>(alpha * f.values));
    CHECK(tv_weighted(af, w).total ==
          doctest::Approx(std::abs(alpha) * tv_weighted(f, w).total).epsilon(1e-12));

    // interior TV ignores constant shifts; the extended version must not
    SourceField<double> fshift(g, Vector<double>(f.values.array() + 5.0));
    CHECK(tv_weighted(fshift, w).total == doctest::Approx(tv_weighted(f, w).total).epsilon(1e-10));
    CHECK(tv_extended(fshift, w).total != doctest::Approx(tv_extended(f, w).total).epsilon(1e-10));

    SourceField<double> sum(g, Vector<double>(f.values + gfield.values));
    CHECK(tv_weighted(sum, w).total <=
          tv_weighted(f, w).total + tv_weighted(gfield, w).total + 1e-12);
    CHECK(tv_extended(sum, w).total <=
          tv_extended(f, w).total + tv_extended(gfield, w).total + 1e-12);
  }
}

TEST_CASE("1D TV") {
  Grid g = build_grid(1, 20);
  auto w = WeightField<double>::uniform(g);
  Vector<double> v = heaviside_1d<double>(g, 7);
  // single unit jump, h^{dim-1} = 1 in 1D
  CHECK(tv_weighted(SourceField<double>(g, v), w).total == doctest::Approx(1.0));
  CHECK(tv_weighted(SourceField<double>(g, Vector<double>(-3 * v)), w).total ==
        doctest::Approx(3.0));
}

TEST_CASE("phantom validation") {
  Grid g = build_grid(2, 16);
  PhantomSpec bad;
  bad.kind = PhantomKind::square;
  bad.center1 = 0.9;
  bad.size = 0.5;
  CHECK_THROWS_AS(make_phantom<double>(bad, g), std::invalid_argument);

  PhantomSpec two;
  two.kind = PhantomKind::two_sources;
  two.center1 = 0.3;
  two.center2 = 0.3;
  two.size = 0.2;
  two.center1_b = 0.7;
  two.center2_b = 0.7;
  two.size_b = 0.2;
  auto f = make_phantom<double>(two, g);
  CHECK(f.values.maxCoeff() == 1.0);

  two.center1_b = 0.45;
  two.center2_b = 0.45;
  CHECK_THROWS_AS(make_phantom<double>(two, g), std::invalid_argument);

  // square center (0.5,0.5) size 0.5 is the indicator of [0.25,0.75]^2
  PhantomSpec sq;
  sq.kind = PhantomKind::square;
  sq.size = 0.5;
  auto chi = make_phantom<double>(sq, g);
  for (int i = 0; i < g.cell_count(); ++i) {
    const double x1 = g.center(g.cell_ix(i)), x2 = g.center(g.cell_iy(i));
    const bool in = x1 >= 0.25 && x1 <= 0.75 && x2 >= 0.25 && x2 <= 0.75;
    CHECK(chi.values[i] == (in ? 1.0 : 0.0));
  }
}
