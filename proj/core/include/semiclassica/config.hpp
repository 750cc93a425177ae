#pragma once

#include <string>
#include <vector>

#include "semiclassica/limits.hpp"
#include "semiclassica/ssb.hpp"

namespace semiclassica {

struct ObservableSpec {
  std::string type;  // gaussian-bump | coordinate | poly-cutoff
  std::vector<double> center;  // 2n phase coordinates (q..., p...)
  double width = 0.3;          // gaussian variance parameter
  int index = 0;               // coordinate index (0..2n-1) or squared axis
};

// One config drives every CLI command; unknown keys are rejected so typos
// fail fast instead of silently running defaults.
struct ExperimentConfig {
  std::string command;
  std::string potential = "doublewell";
  std::vector<double> poly_coeffs;  // overrides `potential` when non-empty
  int n = 1;
  std::string group = "z2";
  double grid_L = 6.0;
  int grid_N = 1024;
  std::vector<double> hbars = {0.5, 0.2, 0.1, 0.05, 0.02};
  double t = 1.0;
  double eps = 0.2;  // localization neighborhood
  std::string mode = "schrodinger";  // classical-limit: schrodinger | berezin-gibbs
  std::vector<ObservableSpec> observables;
  std::string out_dir = ".";
  unsigned seed = 12345;
  int workers = 0;
  bool svg = false;
  bool binary = false;
  int svg_width = 640;
  int eig_k = 4;
  double degeneracy_threshold = 1e-12;
  double emergence_threshold = 0.05;

  json to_json() const;
};

ExperimentConfig parse_config(const json& j);
ExperimentConfig load_config_file(const std::string& path);

Potential build_potential(const ExperimentConfig& cfg);
GroupAction build_group(const ExperimentConfig& cfg);
std::vector<Symbol> build_observables(const ExperimentConfig& cfg);
SweepOptions sweep_options(const ExperimentConfig& cfg);

// Runs the configured experiment and returns the result document (without
// writing artifacts); used both by the CLI and by golden-file checking.
json run_experiment(const ExperimentConfig& cfg);

// Golden comparison: numbers match when their %.12g renderings agree or when
// they differ by less than max(abs_tol, rel_tol * magnitude); everything else
// must match exactly. Returns the list of mismatching paths.
std::vector<std::string> compare_golden(const json& expected, const json& actual,
                                        double rel_tol = 1e-9, double abs_tol = 1e-11);

}  // namespace semiclassica
