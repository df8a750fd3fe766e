#include <CLI11.hpp>
#include <iostream>

#include "finsler/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "finsler: curvature pipeline, geometric flows and convergence "
      "certificates on the sphere bundle over a periodic 2d chart"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir;
  std::string run_dir;
  double tol = -1.0;

  auto* curvature = app.add_subcommand(
      "curvature", "emit the curvature table for a scenario metric");
  curvature->add_option("--scenario", scenario_path, "scenario file")
      ->required();
  curvature->add_option("--out", out_dir, "output directory");

  auto* flow = app.add_subcommand(
      "flow", "integrate the evolution described by a scenario");
  flow->add_option("--scenario", scenario_path, "scenario file")->required();
  flow->add_option("--out", out_dir, "run output directory");

  auto* verify = app.add_subcommand(
      "verify", "evaluate the certificate suite on a persisted run");
  verify->add_option("--run", run_dir, "run directory")->required();
  verify->add_option("--tol", tol, "override certificate tolerance");

  auto* report =
      app.add_subcommand("report", "summarize a persisted run directory");
  report->add_option("--run", run_dir, "run directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (curvature->parsed() || flow->parsed()) {
      const finsler::Scenario s = finsler::load_scenario_file(scenario_path);
      std::string dir = !out_dir.empty() ? out_dir : s.out_dir;
      if (dir.empty()) {
        std::cerr << "error: no output directory (--out or [output] directory)\n";
        return 2;
      }
      return curvature->parsed() ? finsler::cmd_curvature(s, dir, std::cout)
                                 : finsler::cmd_flow(s, dir, std::cout);
    }
    if (verify->parsed()) {
      std::optional<double> tol_override;
      if (tol > 0.0) tol_override = tol;
      return finsler::cmd_verify(run_dir, tol_override, std::cout);
    }
    return finsler::cmd_report(run_dir, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
