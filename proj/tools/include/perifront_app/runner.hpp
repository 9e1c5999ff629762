#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace perifront_app {

enum ExitStatus : int { kSuccess = 0, kUnexpected = 1, kConfigError = 2, kNumericalFailure = 3 };

struct RunRequest {
  std::string subcommand;
  std::filesystem::path config;
  std::filesystem::path out;
  std::optional<unsigned> threads;
};

const std::vector<std::string>& subcommands();

/// Runs one subcommand and writes result.json plus its CSV files into `out`.
/// Config errors give 2 and numerical failures give 3; both are also recorded in result.json.
int run(const RunRequest& request);

}  // namespace perifront_app
