#include "nstv/experiment.hpp"

namespace nstv {

namespace {

// Phantom coordinates are estimated from the reference figures and can be
// overridden through the JSON config.

PhantomSpec square(double c1, double c2, double size) {
  PhantomSpec p;
  p.kind = PhantomKind::square;
  p.center1 = c1;
  p.center2 = c2;
  p.size = size;
  return p;
}

ExperimentConfig base_2d(const std::string& name, const PhantomSpec& phantom) {
  ExperimentConfig c;
  c.name = name;
  c.dim = 2;
  c.n = 64;
  c.phantom = phantom;
  c.p = PNorm::inf;
  c.mode = SolveMode::penalized;
  c.noise_level = 0.01;
  c.seed = 7;
  c.solver.alpha = 2e-5;
  c.solver.beta = 0;
  c.solver.extended_tv = true;
  c.solver.admm_tol = 1e-9;
  c.solver.max_admm_iters = 3000;
  c.solver.max_bregman_iters = 40;
  return c;
}

ExperimentConfig weighted_tv(const std::string& name, const PhantomSpec& phantom) {
  return base_2d(name, phantom);
}

ExperimentConfig unweighted_tv(const std::string& name, const PhantomSpec& phantom) {
  ExperimentConfig c = base_2d(name, phantom);
  c.uniform_weights = true;
  c.solver.extended_tv = false;
  c.solver.alpha = 1e-4;
  return c;
}

ExperimentConfig hybrid(const std::string& name, const PhantomSpec& phantom, bool weighted_tv_part,
                        double alpha, double beta) {
  ExperimentConfig c = base_2d(name, phantom);
  c.uniform_weights = !weighted_tv_part;
  c.solver.extended_tv = weighted_tv_part;
  c.solver.alpha = alpha;
  c.solver.beta = beta;
  c.sparsity_form = SparsityForm::projected;
  c.q = 120;
  return c;
}

}  // namespace

std::map<std::string, ExperimentConfig> preset_catalog() {
  std::map<std::string, ExperimentConfig> cat;
  auto add = [&](ExperimentConfig c) { cat.emplace(c.name, std::move(c)); };

  const PhantomSpec small_sq = square(0.60, 0.60, 0.125);
  const PhantomSpec large_sq = square(0.50, 0.50, 0.5);
  const PhantomSpec deep_sq = square(0.40, 0.40, 0.15);

  // standard-TV failure: deep source, noiseless, single penalized solve
  {
    ExperimentConfig c = unweighted_tv("motivation_unweighted", deep_sq);
    c.noise_level = 0;
    c.solver.alpha = 1e-6;
    c.solver.max_bregman_iters = 1;
    add(c);
  }
  add(weighted_tv("motivation_weighted", deep_sq));

  // weight-field maps
  {
    ExperimentConfig c = weighted_tv("weights_maps_pinf", small_sq);
    c.weights_only = true;
    add(c);
    c.name = "weights_maps_p1";
    c.p = PNorm::one;
    add(c);
  }

  // p = 1 vs p = inf recoveries
  {
    ExperimentConfig c = weighted_tv("compare_p1", small_sq);
    c.p = PNorm::one;
    add(c);
    add(weighted_tv("compare_pinf", small_sq));
  }

  add(weighted_tv("smallsource_tvw", small_sq));
  add(hybrid("smallsource_hybrid", small_sq, true, 1e-8, 1e-4));
  add(hybrid("smallsource_hybrid_unweighted", small_sq, false, 1e-7, 1e-4));

  add(weighted_tv("largesource_tvw", large_sq));
  add(hybrid("largesource_hybrid", large_sq, true, 1e-8, 1e-4));
  add(hybrid("largesource_hybrid_unweighted", large_sq, false, 1e-7, 1e-4));

  // positional influence: the source moves from near the boundary into the
  // domain center
  add(weighted_tv("position_near_tvw", square(0.80, 0.50, 0.125)));
  add(weighted_tv("position_mid_tvw", square(0.65, 0.50, 0.125)));
  add(weighted_tv("position_deep_tvw", square(0.50, 0.50, 0.125)));
  add(hybrid("position_near_hybrid", square(0.80, 0.50, 0.125), true, 1e-9, 1e-5));
  add(hybrid("position_mid_hybrid", square(0.65, 0.50, 0.125), true, 1e-8, 5e-5));
  add(hybrid("position_deep_hybrid", square(0.50, 0.50, 0.125), true, 1e-8, 1e-5));

  // more advanced shapes
  {
    PhantomSpec two;
    two.kind = PhantomKind::two_sources;
    two.center1 = 0.30;
    two.center2 = 0.65;
    two.size = 0.15;
    two.center1_b = 0.70;
    two.center2_b = 0.35;
    two.size_b = 0.15;
    add(weighted_tv("advanced_twosources_tvw", two));
    add(hybrid("advanced_twosources_hybrid", two, true, 5e-8, 1e-4));

    PhantomSpec ell;
    ell.kind = PhantomKind::l_shape;
    ell.lo1 = ell.lo2 = 0.30;
    ell.hi1 = ell.hi2 = 0.70;
    add(weighted_tv("advanced_lshape_tvw", ell));
    add(hybrid("advanced_lshape_hybrid", ell, true, 5e-8, 1e-4));

    PhantomSpec dia;
    dia.kind = PhantomKind::diamond;
    dia.size = 0.40;
    add(weighted_tv("advanced_diamond_tvw", dia));
    add(hybrid("advanced_diamond_hybrid", dia, true, 5e-8, 1e-4));
  }

  // anisotropic conductivities
  for (auto [cname, kind] : {std::pair{"d1", ConductivityKind::d1},
                             std::pair{"d2", ConductivityKind::d2}}) {
    const PhantomSpec sources[3] = {square(0.50, 0.50, 0.35), square(0.40, 0.40, 0.20),
                                    square(0.65, 0.30, 0.15)};
    const char* tag[3] = {"a", "b", "c"};
    for (int i = 0; i < 3; ++i) {
      ExperimentConfig c = weighted_tv(std::string("aniso_") + cname + "_" + tag[i] + "_tvw",
                                       sources[i]);
      c.conductivity = kind;
      add(c);
      ExperimentConfig u = unweighted_tv(std::string("aniso_") + cname + "_" + tag[i] + "_tvi",
                                         sources[i]);
      u.conductivity = kind;
      add(u);
    }
  }

  return cat;
}

std::map<std::string, std::vector<std::string>> figure_manifest() {
  return {
      {"motivation", {"motivation_unweighted", "motivation_weighted"}},
      {"tv_weights", {"weights_maps_pinf", "weights_maps_p1"}},
      {"p_comparison", {"compare_p1", "compare_pinf"}},
      {"small_source", {"smallsource_tvw", "smallsource_hybrid", "smallsource_hybrid_unweighted"}},
      {"large_source", {"largesource_tvw", "largesource_hybrid", "largesource_hybrid_unweighted"}},
      {"position", {"position_near_tvw", "position_mid_tvw", "position_deep_tvw",
                    "position_near_hybrid", "position_mid_hybrid", "position_deep_hybrid"}},
      {"advanced_shapes", {"advanced_twosources_tvw", "advanced_twosources_hybrid",
                           "advanced_lshape_tvw", "advanced_lshape_hybrid",
                           "advanced_diamond_tvw", "advanced_diamond_hybrid"}},
      {"anisotropic_d1", {"aniso_d1_a_tvw", "aniso_d1_a_tvi", "aniso_d1_b_tvw", "aniso_d1_b_tvi",
                          "aniso_d1_c_tvw", "aniso_d1_c_tvi"}},
      {"anisotropic_d2", {"aniso_d2_a_tvw", "aniso_d2_a_tvi", "aniso_d2_b_tvw", "aniso_d2_b_tvi",
                          "aniso_d2_c_tvw", "aniso_d2_c_tvi"}},
  };
}

}  // namespace nstv
