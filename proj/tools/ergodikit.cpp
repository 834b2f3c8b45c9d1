#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ergodikit.hpp"

namespace {

using namespace ergodikit;

struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> order;
  std::optional<std::size_t> nmax;
  std::optional<std::size_t> depth;
  std::optional<std::size_t> n;
  std::optional<std::size_t> alphabet;
  std::optional<std::string> grid;
};

std::vector<std::size_t> parse_grid(const std::string& text) {
  std::vector<std::size_t> grid;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    unsigned long long m = 0;
    try {
      m = std::stoull(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw ValidationError("--grid: '" + item + "' is not a positive integer");
    grid.push_back(static_cast<std::size_t>(m));
  }
  if (grid.empty()) throw ValidationError("--grid: no grid points given");
  return grid;
}

RunConfig resolve(const Overrides& o) {
  RunConfig cfg = o.config_path.empty() ? RunConfig{} : load_run_config(o.config_path);
  if (o.seed) cfg.seed = *o.seed;
  if (o.out) cfg.out_dir = *o.out;
  if (o.order) cfg.order = *o.order;
  if (o.nmax) {
    if (!cfg.beta.empty() && cfg.beta.size() != *o.nmax + 1) {
      throw ValidationError("--nmax: conflicts with the " + std::to_string(cfg.beta.size()) +
                            " prior.beta weights in the config");
    }
    cfg.nmax = *o.nmax;
  }
  if (o.depth) cfg.depth = *o.depth;
  if (o.n) cfg.n = *o.n;
  if (o.alphabet) cfg.alphabet = *o.alphabet;
  if (o.grid) cfg.grid = parse_grid(*o.grid);
  return cfg;
}

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "Run configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "Master seed");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--nmax", o.nmax, "Largest order in the order prior");
  cmd->add_option("--alphabet", o.alphabet, "Alphabet size");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ergodikit: order inference for stationary higher-order Markov chains"};
  app.require_subcommand(1);

  Overrides o;
  std::string input;
  std::string out_file;
  std::size_t target_order = 0;

  auto* simulate = app.add_subcommand("simulate", "Sample an order, a tensor and a trajectory");
  add_common(simulate, o);
  simulate->add_option("--order", o.order, "Fix the order instead of sampling it");
  simulate->add_option("-n,--n", o.n, "Trajectory length");

  auto* infer = app.add_subcommand("infer", "Order and tensor posterior for a trajectory file");
  add_common(infer, o);
  infer->add_option("input", input, "Trajectory file")->required();

  auto* sweep = app.add_subcommand("sweep", "Order posterior along a grid of prefix lengths");
  add_common(sweep, o);
  sweep->add_option("--grid", o.grid, "Prefix lengths, e.g. \"100,1000,10000\"");
  sweep->add_option("input", input, "Trajectory file")->required();

  auto* project = app.add_subcommand("project", "Project a tensor file down to a lower order");
  project->add_option("input", input, "Tensor file")->required();
  project->add_option("--order", target_order, "Target order")->required();
  project->add_option("--out", out_file, "Output tensor file")->required();

  auto* check = app.add_subcommand("check", "Stationarity residual of a tensor, sequence or model file");
  check->add_option("input", input, "Tensor, kernel sequence or model file")->required();
  check->add_option("--depth", o.depth, "Longest word length checked");
  check->add_option("--config", o.config_path, "Run configuration file")->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kValidation;
  }

  return cli::run_guarded(
      [&]() -> int {
        const RunConfig cfg = resolve(o);
        if (*simulate) return cli::cmd_simulate(cfg, std::cout);
        if (*infer) return cli::cmd_infer(cfg, input, std::cout);
        if (*sweep) return cli::cmd_sweep(cfg, input, std::cout);
        if (*project) return cli::cmd_project(input, target_order, out_file, std::cout);
        return cli::cmd_check(input, cfg.depth, std::cout);
      },
      std::cerr);
}
