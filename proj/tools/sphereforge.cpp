// sphereforge: build surfaces, run bifurcation sweeps and classify germs from JSON configs.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "sphereforge/runner.hpp"

using namespace sphereforge;

namespace {

struct Overrides {
  std::string out;
  int degree = 0;
  std::string grid;
  double tol_det = 0, tol_unit = 0, tol_recomp = 0, tol_cls = 0;
};

void apply(RunConfig& cfg, const Overrides& o)
{
  if (!o.out.empty()) cfg.output_dir = o.out;
  if (o.degree > 0) cfg.pipeline.degree = o.degree;
  if (!o.grid.empty()) {
    std::stringstream ss(o.grid);
    char comma = 0;
    int nx = 0, ny = 0;
    if (!(ss >> nx >> comma >> ny) || comma != ',' || !ss.eof()) throw ConfigError("--grid expects NX,NY");
    cfg.grid.nx = nx;
    cfg.grid.ny = ny;
    try {
      cfg.grid.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("--grid: ") + e.what());
    }
  }
  if (o.tol_det > 0) cfg.pipeline.tol_det = o.tol_det;
  if (o.tol_unit > 0) cfg.pipeline.tol_unit = o.tol_unit;
  if (o.tol_recomp > 0) cfg.pipeline.tol_recomp = o.tol_recomp;
  if (o.tol_cls > 0) cfg.singularity.tol_cls = o.tol_cls;
}

void add_run_flags(CLI::App* cmd, std::string& config, Overrides& o)
{
  cmd->add_option("--config", config, "JSON run config")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out, "output directory (overrides the config)");
  cmd->add_option("--degree", o.degree, "loop truncation degree d");
  cmd->add_option("--grid", o.grid, "grid size NX,NY");
  cmd->add_option("--tol-det", o.tol_det, "|det Phi - 1| tolerance");
  cmd->add_option("--tol-unit", o.tol_unit, "unitarity tolerance");
  cmd->add_option("--tol-recomp", o.tol_recomp, "recomposition tolerance");
  cmd->add_option("--tol-cls", o.tol_cls, "classification tolerance");
}

void emit(const Json& j, const std::string& out)
{
  if (out.empty()) {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::filesystem::path p(out);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  write_json(p, j);
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Spherical surfaces from holomorphic potentials and their singularities"};
  app.require_subcommand(1);

  std::string config;
  Overrides ov;
  auto* build = app.add_subcommand("build", "integrate one surface and classify its singular set");
  add_run_flags(build, config, ov);
  auto* sweep = app.add_subcommand("sweep", "run a bifurcation sweep and check its expectations");
  add_run_flags(sweep, config, ov);

  std::string germ_file, germ_out;
  auto* germ = app.add_subcommand("classify-germ", "classify a harmonic map germ");
  germ->add_option("--config", germ_file, "JSON germ file")->required()->check(CLI::ExistingFile);
  germ->add_option("--out", germ_out, "write the verdict here instead of stdout");

  std::string monge_file, monge_out;
  auto* vers = app.add_subcommand("check-versality", "versality of a Monge-form family");
  vers->add_option("--config", monge_file, "JSON Monge file")->required()->check(CLI::ExistingFile);
  vers->add_option("--out", monge_out, "write the verdict here instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*build || *sweep) {
      RunConfig cfg = parse_run_config(load_json_file(config));
      apply(cfg, ov);
      if (*build) return run_build(cfg);
      SweepReport rep = run_sweep(cfg);
      if (!rep.passed()) {
        std::cerr << cfg.name << ": sweep expectations failed, see " << cfg.output_dir << "/sweep_report.json\n";
        return 3;
      }
      return 0;
    }
    if (*germ) {
      emit(run_classify_germ(parse_germ(load_json_file(germ_file))), germ_out);
      return 0;
    }
    if (*vers) {
      emit(run_versality(parse_monge(load_json_file(monge_file))), monge_out);
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const Json::exception& e) {
    std::cerr << "error: config: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
