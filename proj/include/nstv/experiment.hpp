#pragma once

#include <map>
#include <optional>

#include "nstv/io.hpp"
#include "nstv/noise.hpp"
#include "nstv/phantom.hpp"
#include "nstv/weights.hpp"

namespace nstv {

/// Everything needed to reproduce one experiment from scratch: grid, forward
/// model, weight settings, phantom, noise and solver parameters. Serializes
/// to/from JSON (the CLI's --config format).
struct ExperimentConfig {
  std::string name = "experiment";
  int dim = 2;
  int n = 64;
  ConductivityKind conductivity = ConductivityKind::isotropic;
  int observation_stride_1d = 0;  // 0: boundary cells only (the default E)

  PhantomSpec phantom;

  bool uniform_weights = false;  // true: w = 1 everywhere (standard TV)
  PNorm p = PNorm::inf;
  double floor_rel = 1e-6;
  SparsityForm sparsity_form = SparsityForm::projected;
  int q = 120;

  SolveMode mode = SolveMode::penalized;
  double gamma = 0;  // hybrid basis-pursuit TV coefficient
  SolverConfig<double> solver;

  double noise_level = 0.01;
  std::uint64_t seed = 1;

  std::string operator_cache;  // basepath for operator export/import
  double threshold_frac = 0.5;
  bool weights_only = false;  // stop after emitting the weight fields
  bool dry_run = false;
};

std::string experiment_config_to_json(const ExperimentConfig& cfg);
ExperimentConfig experiment_config_from_json(const std::string& text);

struct ExperimentResult {
  ExperimentConfig config;
  SolveReport<double> report;
  SupportMetrics<double> metrics;
  double noise_ratio_clean = 0;
  double noise_ratio_noisy = 0;
  std::string output_dir;
  bool completed = false;
  std::string failed_stage;  // empty on success
};

/// Assembles (or loads) the operator, computes weights, synthesizes noisy
/// data, solves, computes metrics and persists the full artifact set under
/// outdir. Stage failures are recorded in <outdir>/error.json and rethrown.
ExperimentResult run_experiment(const ExperimentConfig& config, const std::string& outdir);

/// Named experiment presets and the figure manifest they cover.
std::map<std::string, ExperimentConfig> preset_catalog();
std::map<std::string, std::vector<std::string>> figure_manifest();

}  // namespace nstv
