#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "levyfilter/commands.hpp"
#include "levyfilter/config.hpp"
#include "levyfilter/errors.hpp"

using namespace levyfilter;

namespace {

struct Args {
  std::string config;
  std::string path;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> grid_n;
  std::optional<double> grid_l;
  std::optional<std::string> thresholds;
  std::optional<std::string> engine;
  std::optional<std::size_t> particles;
  std::optional<std::size_t> replicates;
  std::optional<std::size_t> paths;
};

RunConfig resolve(const Args& a) {
  std::vector<Override> ov;
  if (a.seed) ov.emplace_back("sim.seed", std::to_string(*a.seed));
  if (a.grid_n) ov.emplace_back("grid.n", std::to_string(*a.grid_n));
  if (a.grid_l) ov.emplace_back("grid.l", std::to_string(*a.grid_l));
  if (a.thresholds) ov.emplace_back("thresholds", *a.thresholds);
  if (a.engine) ov.emplace_back("filter.engine", *a.engine);
  if (a.particles) ov.emplace_back("pf.particles", std::to_string(*a.particles));
  if (a.replicates) ov.emplace_back("pf.replicates", std::to_string(*a.replicates));
  if (a.paths) ov.emplace_back("sim.paths", std::to_string(*a.paths));
  return a.config.empty() ? parse_config("", ov) : load_config(a.config, ov);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlinear filtering with Levy-copula coupled jumps"};
  app.require_subcommand(1);
  Args a;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", a.config, "Config file (flat key = value)");
    sub->add_option("--seed", a.seed, "Seed; overrides sim.seed and $LEVYFILTER_SEED");
    sub->add_option("--out", a.out, "Output file, '-' for standard output");
  };

  auto* sim = app.add_subcommand("simulate", "Simulate a signal/observation path");
  common(sim);
  sim->add_option("--paths", a.paths, "Number of paths; files get an _<i> suffix");

  auto* filt = app.add_subcommand("filter", "Run a filter on a path CSV");
  common(filt);
  filt->add_option("--path", a.path, "Path CSV from simulate")->required();
  filt->add_option("--grid-n", a.grid_n, "Grid points (power of two)");
  filt->add_option("--grid-l", a.grid_l, "Grid half-width");
  filt->add_option("--thresholds", a.thresholds, "Comma-separated thresholds a for P(X > a)");
  filt->add_option("--engine", a.engine, "zakai or pf");
  filt->add_option("--particles", a.particles, "Particle count for --engine pf");

  auto* cmp = app.add_subcommand("compare", "Grid solver against replicated particle filters");
  common(cmp);
  cmp->add_option("--path", a.path, "Path CSV from simulate")->required();
  cmp->add_option("--grid-n", a.grid_n, "Grid points (power of two)");
  cmp->add_option("--grid-l", a.grid_l, "Grid half-width");
  cmp->add_option("--thresholds", a.thresholds, "Comma-separated thresholds");
  cmp->add_option("--particles", a.particles, "Particles per replicate");
  cmp->add_option("--replicates", a.replicates, "Particle-filter replicates");

  auto* sym = app.add_subcommand("symbol", "Tabulate the L0 symbol and jump symbols");
  common(sym);

  auto* chk = app.add_subcommand("check", "Well-posedness report");
  common(chk);

  auto* defs = app.add_subcommand("defaults", "Print every config key with its default");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (defs->parsed()) {
      std::cout << default_config_text();
      return 0;
    }
    const RunConfig cfg = resolve(a);
    if (sim->parsed()) {
      cmd_simulate(cfg, a.out.empty() ? cfg.output_path : a.out);
    } else if (filt->parsed()) {
      cmd_filter(cfg, a.path, a.out.empty() ? cfg.output_filter : a.out);
    } else if (cmp->parsed()) {
      cmd_compare(cfg, a.path, a.out.empty() ? cfg.output_compare : a.out);
    } else if (sym->parsed()) {
      cmd_symbol(cfg, a.out.empty() ? cfg.output_symbol : a.out);
    } else if (chk->parsed()) {
      cmd_check(cfg, std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
