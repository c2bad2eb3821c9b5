#include "nstv/experiment.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

#include "nstv/analysis.hpp"
#include "nstv/metrics.hpp"

namespace nstv {

using nlohmann::json;

namespace {

json phantom_to_json(const PhantomSpec& p) {
  json j;
  j["kind"] = to_string(p.kind);
  j["amplitude"] = p.amplitude;
  switch (p.kind) {
    case PhantomKind::square:
    case PhantomKind::diamond:
      j["center"] = {p.center1, p.center2};
      j["size"] = p.size;
      break;
    case PhantomKind::two_sources:
      j["center"] = {p.center1, p.center2};
      j["size"] = p.size;
      j["center_b"] = {p.center1_b, p.center2_b};
      j["size_b"] = p.size_b;
      break;
    case PhantomKind::rect:
    case PhantomKind::l_shape:
      j["lo"] = {p.lo1, p.lo2};
      j["hi"] = {p.hi1, p.hi2};
      break;
    case PhantomKind::heaviside_1d:
      j["x_star"] = p.x_star;
      j["rho"] = p.rho;
      j["tau"] = p.tau;
      break;
  }
  return j;
}

PhantomSpec phantom_from_json(const json& j) {
  PhantomSpec p;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "square") p.kind = PhantomKind::square;
  else if (kind == "rect") p.kind = PhantomKind::rect;
  else if (kind == "l_shape") p.kind = PhantomKind::l_shape;
  else if (kind == "diamond") p.kind = PhantomKind::diamond;
  else if (kind == "two_sources") p.kind = PhantomKind::two_sources;
  else if (kind == "heaviside_1d") p.kind = PhantomKind::heaviside_1d;
  else throw std::invalid_argument("unknown phantom kind: " + kind);
  p.amplitude = j.value("amplitude", 1.0);
  if (j.contains("center")) {
    p.center1 = j["center"][0].get<double>();
    p.center2 = j["center"][1].get<double>();
  }
  p.size = j.value("size", p.size);
  if (j.contains("center_b")) {
    p.center1_b = j["center_b"][0].get<double>();
    p.center2_b = j["center_b"][1].get<double>();
  }
  p.size_b = j.value("size_b", p.size_b);
  if (j.contains("lo")) {
    p.lo1 = j["lo"][0].get<double>();
    p.lo2 = j["lo"][1].get<double>();
    p.hi1 = j["hi"][0].get<double>();
    p.hi2 = j["hi"][1].get<double>();
  }
  p.x_star = j.value("x_star", p.x_star);
  p.rho = j.value("rho", p.rho);
  p.tau = j.value("tau", p.tau);
  return p;
}

ConductivityKind conductivity_from_string(const std::string& s) {
  if (s == "isotropic") return ConductivityKind::isotropic;
  if (s == "d1") return ConductivityKind::d1;
  if (s == "d2") return ConductivityKind::d2;
  throw std::invalid_argument("unknown conductivity: " + s);
}

PNorm pnorm_from_string(const std::string& s) {
  if (s == "1") return PNorm::one;
  if (s == "2") return PNorm::two;
  if (s == "inf") return PNorm::inf;
  throw std::invalid_argument("unsupported weight norm: " + s + " (use 1, 2 or inf)");
}

SolveMode mode_from_string(const std::string& s) {
  if (s == "penalized") return SolveMode::penalized;
  if (s == "tv") return SolveMode::tv;
  if (s == "l1") return SolveMode::l1;
  if (s == "hybrid") return SolveMode::hybrid;
  throw std::invalid_argument("unknown solve mode: " + s);
}

}  // namespace

std::string experiment_config_to_json(const ExperimentConfig& c) {
  json j;
  j["name"] = c.name;
  j["grid"] = {{"dim", c.dim}, {"n", c.n}};
  j["conductivity"] = to_string(c.conductivity);
  j["observation_stride_1d"] = c.observation_stride_1d;
  j["phantom"] = phantom_to_json(c.phantom);
  j["weights"] = {{"uniform", c.uniform_weights},
                  {"p", to_string(c.p)},
                  {"floor_rel", c.floor_rel},
                  {"sparsity_form",
                   c.sparsity_form == SparsityForm::projected ? "projected" : "column_norm"},
                  {"q", c.q}};
  j["solver"] = {{"mode", to_string(c.mode)},
                 {"gamma", c.gamma},
                 {"alpha", c.solver.alpha},
                 {"beta", c.solver.beta},
                 {"extended_tv", c.solver.extended_tv},
                 {"admm_rho", c.solver.admm_rho},
                 {"adapt_rho", c.solver.adapt_rho},
                 {"admm_tol", c.solver.admm_tol},
                 {"max_admm_iters", c.solver.max_admm_iters},
                 {"max_bregman_iters", c.solver.max_bregman_iters},
                 {"morozov_tau", c.solver.morozov_tau},
                 {"constraint_tol", c.solver.constraint_tol}};
  j["noise"] = {{"level", c.noise_level}, {"seed", c.seed}};
  j["operator_cache"] = c.operator_cache;
  j["threshold_frac"] = c.threshold_frac;
  j["weights_only"] = c.weights_only;
  return j.dump(2) + "\n";
}

ExperimentConfig experiment_config_from_json(const std::string& text) {
  json j = json::parse(text);
  ExperimentConfig c;
  c.name = j.value("name", c.name);
  if (j.contains("grid")) {
    c.dim = j["grid"].value("dim", 2);
    c.n = j["grid"].value("n", 64);
  }
  c.conductivity = conductivity_from_string(j.value("conductivity", "isotropic"));
  c.observation_stride_1d = j.value("observation_stride_1d", 0);
  if (j.contains("phantom")) c.phantom = phantom_from_json(j["phantom"]);
  if (j.contains("weights")) {
    const auto& w = j["weights"];
    c.uniform_weights = w.value("uniform", false);
    c.p = pnorm_from_string(w.value("p", "inf"));
    c.floor_rel = w.value("floor_rel", 1e-6);
    c.sparsity_form = w.value("sparsity_form", "projected") == std::string("projected")
                          ? SparsityForm::projected
                          : SparsityForm::column_norm;
    c.q = w.value("q", 120);
  }
  if (j.contains("solver")) {
    const auto& s = j["solver"];
    c.mode = mode_from_string(s.value("mode", "penalized"));
    c.gamma = s.value("gamma", 0.0);
    c.solver.alpha = s.value("alpha", 1.0);
    c.solver.beta = s.value("beta", 0.0);
    c.solver.extended_tv = s.value("extended_tv", false);
    c.solver.admm_rho = s.value("admm_rho", 1.0);
    c.solver.adapt_rho = s.value("adapt_rho", true);
    c.solver.admm_tol = s.value("admm_tol", 1e-10);
    c.solver.max_admm_iters = s.value("max_admm_iters", 4000);
    c.solver.max_bregman_iters = s.value("max_bregman_iters", 100);
    c.solver.morozov_tau = s.value("morozov_tau", 1.0);
    c.solver.constraint_tol = s.value("constraint_tol", 1e-8);
  }
  if (j.contains("noise")) {
    c.noise_level = j["noise"].value("level", 0.01);
    c.seed = j["noise"].value("seed", std::uint64_t{1});
  }
  c.operator_cache = j.value("operator_cache", std::string{});
  c.threshold_frac = j.value("threshold_frac", 0.5);
  c.weights_only = j.value("weights_only", false);
  return c;
}

ExperimentResult run_experiment(const ExperimentConfig& config, const std::string& outdir) {
  namespace fs = std::filesystem;
  ExperimentResult result;
  result.config = config;
  result.output_dir = outdir;
  fs::create_directories(outdir);
  const fs::path out(outdir);

  std::string stage = "setup";
  auto fail = [&](const std::exception& e) {
    result.failed_stage = stage;
    json err;
    err["stage"] = stage;
    err["message"] = e.what();
    err["partial_artifacts"] = true;
    io::write_text(out / "error.json", err.dump(2) + "\n");
  };

  try {
    io::write_text(out / "config.json", experiment_config_to_json(config));
    if (config.dry_run) {
      result.completed = true;
      return result;
    }

    stage = "operator";
    Grid grid = build_grid(config.dim, config.n);
    auto cond = conductivity_field<double>(config.conductivity, grid);
    ForwardOperator<double> op;
    const bool cache_ok = !config.operator_cache.empty() &&
                          fs::exists(config.operator_cache + ".json");
    if (cache_ok) {
      op = io::import_operator(config.operator_cache);
      if (op.grid != grid || op.conductivity != config.conductivity)
        throw std::runtime_error("operator cache does not match the configuration");
    } else {
      std::vector<int> observed;
      if (config.dim == 1 && config.observation_stride_1d > 0)
        observed = observation_cells_1d(grid, config.observation_stride_1d);
      op = assemble_forward(grid, cond, observed);
      if (!config.operator_cache.empty()) io::export_operator(config.operator_cache, op);
    }

    stage = "weights";
    WeightField<double> weights;
    if (config.uniform_weights) {
      weights = WeightField<double>::uniform(grid, true);
    } else if (config.dim == 1) {
      weights = weight_1d(project_out_constants(op), grid, config.floor_rel);
    } else {
      weights = tv_weights_2d(op, cond, config.p, config.floor_rel);
    }
    io::write_weights_csv(out / "weights.csv", weights);
    if (grid.dim == 2) {
      io::write_pgm(out / "weights_w1.pgm", io::face1_image(grid, weights.w1));
      io::write_pgm(out / "weights_w2.pgm", io::face2_image(grid, weights.w2));
    } else {
      io::write_pgm(out / "weights_w.pgm", io::face1_image(grid, weights.w1));
    }
    json wmeta;
    wmeta["p"] = to_string(weights.p);
    wmeta["floor"] = weights.floor;
    wmeta["uniform"] = config.uniform_weights;
    wmeta["conductivity"] = to_string(config.conductivity);
    wmeta["greens_bc"] = "dirichlet";
    io::write_text(out / "weights_meta.json", wmeta.dump(2) + "\n");

    Vector<double> wtilde;
    const bool needs_sparsity = config.mode == SolveMode::l1 ||
                                config.mode == SolveMode::hybrid || config.solver.beta > 0;
    if (needs_sparsity) {
      auto sw = sparsity_weights(op, std::min(config.q, std::min(op.rows(), op.cols())),
                                 config.sparsity_form);
      wtilde = sw.w;
    }
    if (config.weights_only) {
      result.completed = true;
      return result;
    }

    stage = "data";
    auto truth = make_phantom<double>(config.phantom, grid);
    auto clean = apply_forward(op, truth);
    auto noisy = add_noise(clean, config.noise_level, config.seed);
    result.noise_ratio_clean = noisy.ratio_clean;
    result.noise_ratio_noisy = noisy.ratio_noisy;
    io::write_field_csv(out / "truth.csv", truth);
    io::write_pgm(out / "truth.pgm", io::field_image(grid, truth.values));
    io::write_boundary_csv(out / "data.csv", grid, op.observed, noisy.data.values);

    stage = "solve";
    SolverConfig<double> scfg = config.solver;
    scfg.seed = config.seed;
    if (config.mode == SolveMode::penalized) {
      const double stop_norm = noisy.eps_norm > 0
                                   ? noisy.eps_norm
                                   : scfg.constraint_tol * norm_data(grid, noisy.data.values);
      result.report = bregman_outer<double>(op.matrix, noisy.data.values, scfg.alpha, scfg.beta,
                                            weights, wtilde, stop_norm, scfg);
    } else {
      result.report = basis_pursuit<double>(op.matrix, noisy.data.values, weights, wtilde,
                                            config.mode, config.gamma, scfg);
    }

    stage = "metrics";
    result.metrics = support_metrics(result.report.reconstruction, truth, config.threshold_frac);

    stage = "persist";
    io::write_field_csv(out / "reconstruction.csv", result.report.reconstruction);
    io::write_pgm(out / "reconstruction.pgm",
                  io::field_image(grid, result.report.reconstruction.values));
    io::write_text(out / "report.json", io::solve_report_to_json(result.report));
    {
      auto csv = std::string("name,n,stop_reason,bregman_iters,final_residual,noise_norm,jaccard,"
                             "centroid_error,rel_l2,boundary_mass_fraction,ratio_clean,ratio_noisy\n");
      std::ostringstream row;
      row.precision(17);
      row << config.name << ',' << config.n << ',' << to_string(result.report.stop_reason) << ','
          << result.report.bregman_iters_used << ',' << result.report.final_residual << ','
          << result.report.noise_norm << ',' << result.metrics.jaccard << ','
          << result.metrics.centroid_error << ',' << result.metrics.rel_l2 << ','
          << result.metrics.boundary_mass_fraction << ',' << result.noise_ratio_clean << ','
          << result.noise_ratio_noisy << '\n';
      io::write_text(out / "metrics.csv", csv + row.str());
    }
    result.completed = true;
    return result;
  } catch (const std::exception& e) {
    fail(e);
    throw;
  }
}

}  // namespace nstv
