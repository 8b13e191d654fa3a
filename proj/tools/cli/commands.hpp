#pragma once

#include <string>
#include <vector>

#include "run_config.hpp"

namespace sos::cli {

struct CommandResult {
  bool pass = true;
  std::string line;                   // one-line verdict for standard output
  std::vector<std::string> failures;  // failing items for standard error
};

CommandResult run_command(const RunConfig& cfg);

}  // namespace sos::cli
