#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace contactmoc {

struct CliOptions {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::pair<int, int>> grid;  // NXI x NETA
  std::optional<double> eps_scale;
  std::optional<int> max_iters;
  bool quiet = false;
  std::vector<double> eps;  // sweep only
};

// Exit codes.
inline constexpr int kExitOk = 0, kExitFailure = 1, kExitUsage = 2;

struct RunSummary {
  int exit_code = kExitOk;
  std::vector<std::pair<std::string, std::string>> fields;
  std::vector<std::string> artifacts;

  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);
  // "key=value ..." with values containing spaces quoted; the final output line.
  std::string line() const;
};

// Parses "NXIxNETA"; throws Error(InvalidArgument).
std::pair<int, int> parse_grid(const std::string& text);

// Each command writes progress to `log` unless quiet and never throws; errors
// become exit codes with status=error and error=<category> in the summary.
RunSummary cmd_solve(const CliOptions& opt, std::ostream& log);
RunSummary cmd_blowup(const CliOptions& opt, std::ostream& log);
RunSummary cmd_sweep(const CliOptions& opt, std::ostream& log);
RunSummary cmd_validate(const CliOptions& opt, std::ostream& log);

}  // namespace contactmoc
