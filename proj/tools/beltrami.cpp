#include "cli_commands.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace cli = beltrami::cli;

int main(int argc, char** argv) {
  CLI::App app{"Beltrami resonances of axisymmetric domains"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "key=value configuration file; flags override it");

  cli::RunConfig cfg;
  std::string out_path;
  app.add_option("--mode", cfg.mode, "azimuthal Fourier mode");
  app.add_option("--n", cfg.n, "boundary grid size (even)");
  app.add_option("--kmin", cfg.kmin, "lower end of the k range");
  app.add_option("--kmax", cfg.kmax, "upper end of the k range");
  app.add_option("--kstep", cfg.kstep, "k grid step");
  app.add_option("--t", cfg.t, "cycle weight t in [0, 1]");
  app.add_option("--seed", cfg.seed, "probe-vector seed");
  app.add_option("--sign-convention", cfg.sign_convention, "A or B");
  app.add_option("--torus-offset", cfg.torus_offset, "torus major radius");
  app.add_option("--out", out_path, "output file (default stdout)");

  auto* scan = app.add_subcommand("scan", "condition-number sweep over k");
  auto* find = app.add_subcommand("find", "locate resonances (JSON records)");
  auto* field = app.add_subcommand("field", "field on an xz-plane slice");
  field->add_option("--resonance", cfg.resonance_file, "record file written by find");
  field->add_option("--index", cfg.record_index, "record index in the file");
  field->add_option("--grid", cfg.grid, "polar grid size per direction");
  field->add_flag("--zero-density", cfg.zero_density, "use a zero density");
  auto* tau = app.add_subcommand("tau-sweep", "condition numbers over (t, k)");
  tau->add_option("--t-values", cfg.t_values, "comma-separated t samples")->delimiter(',');
  auto* sphere = app.add_subcommand("sphere-check", "unit-ball analytic field checks");
  sphere->add_flag("--wrong-k", cfg.wrong_k, "perturb k as a negative control");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kOk : cli::kInvalidConfig;
  }

  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) {
      std::cerr << "out: cannot open " << out_path << '\n';
      return cli::kInvalidConfig;
    }
  }
  std::ostream& out = out_path.empty() ? std::cout : file;

  try {
    if (*scan) return cli::cmd_scan(cfg, out);
    if (*find) return cli::cmd_find(cfg, out);
    if (*field) return cli::cmd_field(cfg, out, std::cerr);
    if (*tau) return cli::cmd_tau_sweep(cfg, out);
    if (*sphere) return cli::cmd_sphere_check(cfg, out);
  } catch (const cli::ConfigError& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return cli::kInvalidConfig;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return cli::kNumericalFailure;
  }
  return cli::kInvalidConfig;
}
