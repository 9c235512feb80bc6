#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace skewlab {

enum class Command { Lyapunov, Positivity, Ldt, Weyl, Green, Localize, Spectrum, Parametrize, Continuity };
enum class Format { Csv, Json };

const char* to_string(Command c);
const char* to_string(Format f);

struct ExperimentConfig {
  Command command = Command::Lyapunov;
  std::string potential = "cosine";  // cosine | zero | constant:<c> | file path
  double rho = 1.0;
  double lambda = 10.0;
  double omega = 0.6180339887498949;
  double energy = 0.0;
  double energy2 = 1e-3;
  std::vector<double> energies;
  std::optional<double> energy_min;
  std::optional<double> energy_max;
  long long energy_count = 64;
  std::size_t d = 2;
  long long n = 1000;
  std::vector<long long> n_list{100, 200, 400};
  long long N = 100;
  long long samples = 100;
  long long grid = 1024;
  long long y_samples = 8;
  double threshold_factor = 1.0 / 40.0;
  double delta = 1.0;
  long long probes = 200;
  double tol_factor = 0.01;
  double epsilon = 0.1;
  double L = 0.2;
  std::vector<long long> M_list{0, 2};
  double extension_delta = 0.1;
  long long levels = 4;
  long long k = 1;
  long long order = 1;
  double x = 0.0;
  double y = 0.3;
  double y0 = 0.1;
  long long count = 10;
  double kappa = 0.1;
  double max_fraction = 0.1;
  std::uint64_t seed = 0;
  std::string output_path = "skewlab_out";
  Format format = Format::Csv;
  bool plot_data = false;
  unsigned threads = 0;

  std::vector<std::string> warnings;

  /// Every key with its canonical value, sorted by key.
  std::vector<std::pair<std::string, std::string>> echo() const;
};

const std::vector<std::string>& valid_config_keys();

/// Reads flat "key = value" lines; '#' starts a comment.
std::map<std::string, std::string> read_config_file(const std::string& path);
std::map<std::string, std::string> parse_config_text(const std::string& text, const std::string& origin = "config");

/// Validated config from file values overridden by flag values. Overrides of
/// a file value are recorded in warnings.
ExperimentConfig parse_config(const std::map<std::string, std::string>& file_values,
                              const std::map<std::string, std::string>& flag_values = {});

ExperimentConfig parse_config_path(const std::string& path,
                                   const std::map<std::string, std::string>& flag_values = {});

}  // namespace skewlab
