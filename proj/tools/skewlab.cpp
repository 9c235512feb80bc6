#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>

#include "skewlab/config.hpp"
#include "skewlab/error.hpp"
#include "skewlab/parallel.hpp"
#include "skewlab/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"skewlab: Lyapunov exponents, large deviations, Green functions and spectra of skew-shift operators"};
  app.set_version_flag("--version", SKEWLAB_VERSION);

  std::string command;
  std::string config_path;
  app.add_option("command", command,
                 "lyapunov | positivity | ldt | weyl | green | localize | spectrum | parametrize | continuity");
  app.add_option("-c,--config", config_path, "key = value config file");

  std::map<std::string, std::string> flag_storage;
  std::map<std::string, CLI::Option*> flag_options;
  for (const auto& key : skewlab::valid_config_keys()) {
    if (key == "command") continue;
    flag_options[key] = app.add_option("--" + key, flag_storage[key], "overrides config key " + key);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  std::map<std::string, std::string> flags;
  for (const auto& [key, opt] : flag_options)
    if (opt->count() > 0) flags[key] = flag_storage[key];
  if (!command.empty()) flags["command"] = command;

  skewlab::ExperimentConfig config;
  try {
    config = config_path.empty() ? skewlab::parse_config({}, flags) : skewlab::parse_config_path(config_path, flags);
  } catch (const skewlab::Error& e) {
    std::cerr << "skewlab: " << skewlab::to_string(e.kind()) << ": " << e.what() << "\n";
    return 1;
  }
  skewlab::set_worker_count(config.threads);

  const auto outcome = skewlab::run_and_write(config);
  for (const auto& w : outcome.report.warnings) std::cerr << "skewlab: warning: " << w << "\n";
  if (outcome.exit_code == 1) {
    std::cerr << "skewlab: " << outcome.error << "\n";
    return 1;
  }
  for (const auto& [key, value] : outcome.report.results) std::cout << key << " = " << value << "\n";
  for (const auto& v : outcome.report.violations) std::cout << "property failed: " << v << "\n";
  for (const auto& f : outcome.files) std::cout << "wrote " << f << "\n";
  return outcome.exit_code;
}
