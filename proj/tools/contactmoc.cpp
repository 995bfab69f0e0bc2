#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "contactmoc/app.hpp"
#include "contactmoc/error.hpp"

using namespace contactmoc;

namespace {

int finish(const RunSummary& s) {
  std::cout << s.line() << std::endl;
  return s.exit_code;
}

RunSummary usage_error(const std::string& message) {
  std::cout << "error: " << message << '\n';
  RunSummary s;
  s.exit_code = kExitUsage;
  s.set("status", "error");
  s.set("error", "usage");
  s.set("exit", std::to_string(kExitUsage));
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Method-of-characteristics solver for a supersonic contact discontinuity in a nozzle"};
  app.require_subcommand(1);

  CliOptions opt;
  std::string grid;
  auto common = [&](CLI::App* cmd) {
    cmd->add_option("--config", opt.config, "Configuration file")->required();
    cmd->add_option("--out", opt.out, "Output directory (overrides [output] dir)");
    cmd->add_option("--grid", grid, "Lattice override NXIxNETA (blowup: NETA markers)");
    cmd->add_option("--eps-scale", opt.eps_scale, "Scale every deviation from the background by t")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--max-iters", opt.max_iters, "Fixed-point iteration cap")->check(CLI::PositiveNumber);
    cmd->add_flag("--quiet", opt.quiet, "Print only the summary line");
  };
  CLI::App* solve = app.add_subcommand("solve", "Solve the nozzle problem and write fields");
  CLI::App* blowup = app.add_subcommand("blowup", "March the periodic irrotational Cauchy problem");
  CLI::App* sweep = app.add_subcommand("sweep", "Scale the perturbation over a list of epsilons");
  CLI::App* validate = app.add_subcommand("validate", "Check configuration invariants and compatibility");
  for (CLI::App* c : {solve, blowup, sweep, validate}) common(c);
  sweep->add_option("--eps", opt.eps, "Perturbation sizes")->required()->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e);
    RunSummary s;
    s.set("status", "ok");
    s.set("command", "help");
    return finish(s);
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e);
    RunSummary s;
    s.set("status", "ok");
    s.set("command", "help");
    return finish(s);
  } catch (const CLI::ParseError& e) {
    return finish(usage_error(e.what()));
  }

  if (!grid.empty()) {
    try {
      opt.grid = parse_grid(grid);
    } catch (const Error& e) {
      return finish(usage_error(e.what()));
    }
  }

  if (solve->parsed()) return finish(cmd_solve(opt, std::cout));
  if (blowup->parsed()) return finish(cmd_blowup(opt, std::cout));
  if (sweep->parsed()) return finish(cmd_sweep(opt, std::cout));
  return finish(cmd_validate(opt, std::cout));
}
