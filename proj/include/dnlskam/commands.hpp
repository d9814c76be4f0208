#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dnlskam/config.hpp"

namespace dnlskam {

enum ExitCode { kExitOk = 0, kExitNegative = 1, kExitConfig = 2, kExitRuntime = 3 };

struct CommandOutput {
  int exit_code = kExitOk;
  std::string report;  // JSON document
  std::string stream;  // JSON lines (kam only)
  std::vector<std::string> warnings;
  std::vector<std::pair<std::string, std::string>> files;  // name, contents; filled when asked
};

// config is finalized by the caller; ConfigError / IndexError propagate
CommandOutput cmd_admissible(const RunConfig& c);
CommandOutput cmd_assumptions(const RunConfig& c);
CommandOutput cmd_normal_form(const RunConfig& c, bool files = false);
CommandOutput cmd_kam(const RunConfig& c, bool files = false, bool require_gate = false);
CommandOutput cmd_measure(const RunConfig& c, bool files = false);
CommandOutput cmd_verify_bounds(const RunConfig& c);

}  // namespace dnlskam
