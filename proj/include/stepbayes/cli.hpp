#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace stepbayes::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kConfigError = 2,
  kOversized = 3,
  kDataError = 4,
};

struct RunConfig {
  std::string subcommand;
  std::map<std::string, std::string> params;  // resolved, defaults filled in
  std::uint64_t seed = 0;
  std::string out;  // empty: standard output
};

/// Parses argv into a resolved config; throws ConfigError.
RunConfig parse_args(const std::vector<std::string>& args);

/// Runs a resolved config, writing the artifact to config.out or `out`.
void run(const RunConfig& config, std::ostream& out);

/// Full entry point: parses, runs, and maps exceptions to one error line on
/// `err` and an exit code.
int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

std::vector<std::string> subcommands();

}  // namespace stepbayes::cli
