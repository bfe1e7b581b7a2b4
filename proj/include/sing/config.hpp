// JSON experiment configuration for the CLI.
#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "sing/coupled_solver.hpp"
#include "sing/exponents.hpp"
#include "sing/scalar_solver.hpp"

namespace sing {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  ExponentTuple exponents;
  DomainSpec domain;
  int base_n = 256;   // >= 64
  int levels = 3;     // in [1, 6]
  std::optional<double> grading;  // default: max(1, 2 / alpha_min)
  std::string output_dir = ".";
  SystemSettings system;
  std::optional<std::vector<double>> tau_grid;
  unsigned seed = 0;
};

struct ScalarConfig {
  double m = 2.0;
  double p_exp = 0.0;
  SingularWeight weight;
  std::optional<std::string> tabulated_csv;
  std::optional<double> manufactured_a;
  DomainSpec domain;
  int n = 512;
  double grading = 1.0;
  std::string output_dir = ".";
  NewtonSettings newton;
};

struct SweepConfig {
  std::vector<double> m, p, q, r, s;
  std::string output_csv = "sweep.csv";
};

ExperimentConfig parse_experiment_config(const std::string& path);
ScalarConfig parse_scalar_config(const std::string& path);
SweepConfig parse_sweep_config(const std::string& path);

// Grading rule: clusters nodes fast enough to resolve the smallest predicted
// decay power.
double default_grading(const RegimePrediction& pred);

}  // namespace sing
