#pragma once

#include <string>
#include <vector>

#include "skewlab/config.hpp"
#include "skewlab/report.hpp"

namespace skewlab {

/// Dispatches the configured command. Property failures are recorded in
/// report.violations; module errors propagate as exceptions.
RunReport run(const ExperimentConfig& config);

/// 0 when every checked property held, 2 otherwise.
int exit_code_for(const RunReport& report);

/// SKEWLAB_OUTPUT_DIR when set, else config.output_path.
std::string output_directory(const ExperimentConfig& config);

struct RunOutcome {
  int exit_code = 0;
  RunReport report;
  std::vector<std::string> files;
  std::string error;
};

/// run + write_report; any error maps to exit code 1 with its message.
RunOutcome run_and_write(const ExperimentConfig& config);

}  // namespace skewlab
