// Command-line front end: `alf <command> [options]`.

#include <CLI11.hpp>

#include <iostream>
#include <optional>

#include "alf/alf.hpp"

namespace {

struct ParamFlag {
  const char* flag;
  const char* key;
  const char* help;
  std::optional<double> value;
};

}  // namespace

int main(int argc, char** argv) {
  alf::cli::RunConfig cfg;
  CLI::App app{"Masses and mode analysis of ALF metrics"};
  app.fallthrough();
  app.require_subcommand(1);
  app.set_config("--config", "", "Key-value config file; command-line flags take precedence");

  std::vector<ParamFlag> params{{"--n", "n", "Total dimension n (schwarzschild)", {}},
                                {"--gamma", "gamma", "Schwarzschild parameter", {}},
                                {"--mass-param", "mass-param", "Mass parameter (reissner-nordstrom, taub-nut)", {}},
                                {"--charge", "charge", "Charge q (reissner-nordstrom)", {}},
                                {"--monopole-k", "monopole-k", "Monopole charge k (taub-nut, flat Hopf model)", {}},
                                {"--fiber-length", "fiber-length", "Fiber length L", {}}};
  for (auto& p : params) app.add_option(p.flag, p.value, p.help);
  std::optional<int> m;
  app.add_option("--m", m, "Base dimension m");
  app.add_option("--family", cfg.family, "Metric family")->check(CLI::IsMember(alf::zoo::registry_names()));
  app.add_option("--chart", cfg.chart, "Chart: isotropic or area")->check(CLI::IsMember({"isotropic", "area"}));
  app.add_option("--r0", cfg.schedule.r0, "First radius of the schedule");
  app.add_option("--growth", cfg.schedule.growth, "Geometric growth of the radii");
  app.add_option("--count", cfg.schedule.count, "Number of radii");
  app.add_option("--polar-nodes", cfg.quadrature.polar_nodes, "Gauss nodes per colatitude");
  app.add_option("--azimuth-nodes", cfg.quadrature.azimuth_nodes, "Azimuth nodes");
  app.add_option("--fiber-nodes", cfg.quadrature.fiber_nodes, "Fiber nodes");
  app.add_option("--workers", cfg.workers, "Quadrature worker threads");
  app.add_option("--output", cfg.output, "json, csv or table")->check(CLI::IsMember({"json", "csv", "table"}));
  app.add_option("--out", cfg.out_path, "Report path (default stdout)");
  app.add_option("--jmax", cfg.modes.j_max, "Largest spherical mode");
  app.add_option("--j", cfg.modes.j, "Spherical mode");
  app.add_option("--k", cfg.modes.k, "Fiber Fourier mode");
  app.add_option("--delta", cfg.modes.delta, "Weight delta");
  app.add_option("--power", cfg.modes.power, "Exponent a of the synthetic profile");
  app.add_option("--source", cfg.modes.source, "Synthetic source: bump or power");
  app.add_option("--green", cfg.modes.green, "k = 0 Green operator: mid or outer");
  app.add_option("--grid-points", cfg.modes.grid_points, "Radial grid points");

  for (const auto& name : alf::cli::command_names()) app.add_subcommand(name);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: " << e.what() << '\n';
    std::cout << "{\n  \"schema\": \"alf-mass/1\",\n  \"status\": \"config-error\",\n  \"message\": "
              << alf::io::Json(std::string(e.what())).dump() << "\n}\n";
    return alf::cli::kConfig;
  }

  cfg.command = app.get_subcommands().front()->get_name();
  for (const auto& p : params)
    if (p.value) cfg.params[p.key] = *p.value;
  if (m) {
    cfg.params["m"] = *m;
    cfg.modes.m = *m;
  }
  if (auto it = cfg.params.find("fiber-length"); it != cfg.params.end()) cfg.modes.fiber_length = it->second;
  return alf::cli::run(cfg);
}
