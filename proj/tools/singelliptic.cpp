// Command-line front end: classify exponent tuples, solve the scalar and
// coupled problems, run the full verification pipeline, or sweep a grid of
// tuples into a summary table.
#include <CLI11.hpp>

#include <iostream>

#include "sing/cli.hpp"
#include "sing/kernels.hpp"

int main(int argc, char** argv) {
  CLI::App app{"numerical verifier for singular quasilinear elliptic systems"};
  app.require_subcommand(1);

  bool serial = false;
  app.add_flag("--serial", serial, "disable the OpenMP kernels");

  auto* classify = app.add_subcommand("classify", "map an exponent tuple to its case");
  double m = 0, p = 0, q = 0, r = 0, s = 0;
  classify->add_option("--m", m, "diffusion exponent")->required();
  classify->add_option("--p", p)->required();
  classify->add_option("--q", q)->required();
  classify->add_option("--r", r)->required();
  classify->add_option("--s", s)->required();

  std::string config;
  auto* scalar = app.add_subcommand("solve-scalar", "solve -Delta_m u = K u^{-p}");
  scalar->add_option("--config", config, "JSON config path")->required();
  auto* system = app.add_subcommand("solve-system", "solve the coupled system once");
  system->add_option("--config", config, "JSON config path")->required();
  auto* verify = app.add_subcommand("verify", "full pipeline with named checks");
  verify->add_option("--config", config, "JSON config path")->required();
  auto* sweep = app.add_subcommand("sweep", "classify a grid of tuples into CSV");
  sweep->add_option("--config", config, "JSON config path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return sing::cli::kExitUsage;
  }

  if (serial) sing::kernels::set_default_exec(sing::kernels::Exec::serial);

  if (classify->parsed())
    return sing::cli::cmd_classify(m, p, q, r, s, std::cout);
  if (scalar->parsed()) return sing::cli::cmd_solve_scalar(config, std::cout);
  if (system->parsed()) return sing::cli::cmd_solve_system(config, std::cout);
  if (verify->parsed()) return sing::cli::cmd_verify(config, std::cout);
  if (sweep->parsed()) return sing::cli::cmd_sweep(config, std::cout);
  return sing::cli::kExitUsage;
}
