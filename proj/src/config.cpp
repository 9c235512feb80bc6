#include "skewlab/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "skewlab/error.hpp"
#include "skewlab/report.hpp"

namespace skewlab {

namespace {

constexpr std::pair<Command, const char*> kCommands[] = {
    {Command::Lyapunov, "lyapunov"}, {Command::Positivity, "positivity"}, {Command::Ldt, "ldt"},
    {Command::Weyl, "weyl"},         {Command::Green, "green"},           {Command::Localize, "localize"},
    {Command::Spectrum, "spectrum"}, {Command::Parametrize, "parametrize"}, {Command::Continuity, "continuity"}};

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

Error bad_value(const std::string& key, const std::string& value, const char* what) {
  return Error(ErrorKind::Config, "invalid value '" + value + "' for " + key + ": " + what);
}

double parse_double(const std::string& key, const std::string& value) {
  if (key == "omega" && value == "golden") return (std::sqrt(5.0) - 1.0) / 2.0;
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() || !std::isfinite(out))
    throw bad_value(key, value, "expected a finite number");
  return out;
}

long long parse_int(const std::string& key, const std::string& value) {
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) throw bad_value(key, value, "expected an integer");
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw bad_value(key, value, "expected true or false");
}

void require(bool ok, const std::string& key, const char* what) {
  if (!ok) throw Error(ErrorKind::Config, "invalid " + key + ": " + what);
}

std::string join_doubles(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + format_number(xs[i]);
  return out;
}

std::string join_ints(const std::vector<long long>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + std::to_string(xs[i]);
  return out;
}

void assign(ExperimentConfig& c, const std::string& key, const std::string& v) {
  if (key == "command") {
    const auto it = std::find_if(std::begin(kCommands), std::end(kCommands),
                                 [&](const auto& e) { return v == e.second; });
    if (it == std::end(kCommands)) throw bad_value(key, v, "unknown command");
    c.command = it->first;
  } else if (key == "potential" || key == "potential_file") {
    c.potential = v;
  } else if (key == "rho") {
    c.rho = parse_double(key, v);
  } else if (key == "lambda") {
    c.lambda = parse_double(key, v);
  } else if (key == "omega") {
    c.omega = parse_double(key, v);
  } else if (key == "energy") {
    c.energy = parse_double(key, v);
  } else if (key == "energy2") {
    c.energy2 = parse_double(key, v);
  } else if (key == "energies") {
    c.energies.clear();
    for (const auto& item : split_list(v)) c.energies.push_back(parse_double(key, item));
  } else if (key == "energy_min") {
    c.energy_min = parse_double(key, v);
  } else if (key == "energy_max") {
    c.energy_max = parse_double(key, v);
  } else if (key == "energy_count") {
    c.energy_count = parse_int(key, v);
  } else if (key == "d") {
    const long long d = parse_int(key, v);
    require(d >= 1, key, "must be at least 1");
    c.d = static_cast<std::size_t>(d);
  } else if (key == "n") {
    c.n = parse_int(key, v);
  } else if (key == "n_list") {
    c.n_list.clear();
    for (const auto& item : split_list(v)) c.n_list.push_back(parse_int(key, item));
  } else if (key == "N") {
    c.N = parse_int(key, v);
  } else if (key == "samples") {
    c.samples = parse_int(key, v);
  } else if (key == "grid") {
    c.grid = parse_int(key, v);
  } else if (key == "y_samples") {
    c.y_samples = parse_int(key, v);
  } else if (key == "threshold_factor") {
    c.threshold_factor = parse_double(key, v);
  } else if (key == "delta") {
    c.delta = parse_double(key, v);
  } else if (key == "probes") {
    c.probes = parse_int(key, v);
  } else if (key == "tol_factor") {
    c.tol_factor = parse_double(key, v);
  } else if (key == "epsilon") {
    c.epsilon = parse_double(key, v);
  } else if (key == "L") {
    c.L = parse_double(key, v);
  } else if (key == "M_list") {
    c.M_list.clear();
    for (const auto& item : split_list(v)) c.M_list.push_back(parse_int(key, item));
  } else if (key == "extension_delta") {
    c.extension_delta = parse_double(key, v);
  } else if (key == "levels") {
    c.levels = parse_int(key, v);
  } else if (key == "k") {
    c.k = parse_int(key, v);
  } else if (key == "order") {
    c.order = parse_int(key, v);
  } else if (key == "x") {
    c.x = parse_double(key, v);
  } else if (key == "y") {
    c.y = parse_double(key, v);
  } else if (key == "y0") {
    c.y0 = parse_double(key, v);
  } else if (key == "count") {
    c.count = parse_int(key, v);
  } else if (key == "kappa") {
    c.kappa = parse_double(key, v);
  } else if (key == "max_fraction") {
    c.max_fraction = parse_double(key, v);
  } else if (key == "seed") {
    const long long s = parse_int(key, v);
    require(s >= 0, key, "must be non-negative");
    c.seed = static_cast<std::uint64_t>(s);
  } else if (key == "output_path") {
    c.output_path = v;
  } else if (key == "format") {
    if (v == "csv")
      c.format = Format::Csv;
    else if (v == "json")
      c.format = Format::Json;
    else
      throw bad_value(key, v, "expected csv or json");
  } else if (key == "plot_data") {
    c.plot_data = parse_bool(key, v);
  } else if (key == "threads") {
    const long long t = parse_int(key, v);
    require(t >= 0, key, "must be non-negative");
    c.threads = static_cast<unsigned>(t);
  }
}

void validate(const ExperimentConfig& c) {
  require(c.lambda > 0.0, "lambda", "must be positive");
  require(c.rho > 0.0, "rho", "must be positive");
  require(c.n >= 1, "n", "must be positive");
  require(!c.n_list.empty(), "n_list", "must not be empty");
  for (std::size_t i = 0; i < c.n_list.size(); ++i) {
    require(c.n_list[i] >= 1, "n_list", "entries must be positive");
    require(i == 0 || c.n_list[i] > c.n_list[i - 1], "n_list", "must be strictly increasing");
  }
  require(c.N >= 1, "N", "must be positive");
  require(c.samples >= 1, "samples", "must be positive");
  require(c.grid >= 1, "grid", "must be positive");
  require(c.y_samples >= 1, "y_samples", "must be positive");
  require(c.energy_count >= 1, "energy_count", "must be positive");
  require(c.threshold_factor > 0.0, "threshold_factor", "must be positive");
  require(c.delta > 0.0, "delta", "must be positive");
  require(c.probes >= 10, "probes", "must be at least 10");
  require(c.tol_factor > 0.0, "tol_factor", "must be positive");
  require(c.epsilon > 0.0, "epsilon", "must be positive");
  require(c.L > 0.0, "L", "must be positive");
  require(!c.M_list.empty(), "M_list", "must not be empty");
  for (std::size_t i = 0; i < c.M_list.size(); ++i) {
    require(c.M_list[i] >= 0, "M_list", "entries must be non-negative");
    require(i == 0 || c.M_list[i] > c.M_list[i - 1], "M_list", "must be strictly increasing");
  }
  require(c.extension_delta > 0.0, "extension_delta", "must be positive");
  require(c.levels >= 1, "levels", "must be positive");
  require(c.k != 0, "k", "must be non-zero");
  require(c.order >= 1 && c.order <= 4, "order", "must be between 1 and 4");
  require(c.count >= 1, "count", "must be positive");
  require(c.kappa > 0.0, "kappa", "must be positive");
  require(c.max_fraction >= 0.0 && c.max_fraction <= 1.0, "max_fraction", "must lie in [0, 1]");
  require(!c.output_path.empty(), "output_path", "must not be empty");
  if (c.energy_min && c.energy_max) require(*c.energy_min <= *c.energy_max, "energy_min", "exceeds energy_max");
}

}  // namespace

const char* to_string(Command c) {
  for (const auto& [cmd, name] : kCommands)
    if (cmd == c) return name;
  return "?";
}

const char* to_string(Format f) { return f == Format::Csv ? "csv" : "json"; }

const std::vector<std::string>& valid_config_keys() {
  static const std::vector<std::string> keys = {
      "L",         "M_list",       "N",          "command",        "count",         "d",
      "delta",     "energies",     "energy",     "energy2",        "energy_count",  "energy_max",
      "energy_min", "epsilon",     "extension_delta", "format",      "grid",          "k",
      "kappa",     "lambda",       "levels",     "max_fraction",   "n",             "n_list",
      "omega",     "order",        "output_path", "plot_data",     "potential",     "potential_file",
      "probes",    "rho",          "samples",    "seed",           "threads",       "threshold_factor",
      "tol_factor", "x",           "y",          "y0",             "y_samples"};
  return keys;
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::echo() const {
  std::vector<std::pair<std::string, std::string>> out = {
      {"L", format_number(L)},
      {"M_list", join_ints(M_list)},
      {"N", std::to_string(N)},
      {"command", to_string(command)},
      {"count", std::to_string(count)},
      {"d", std::to_string(d)},
      {"delta", format_number(delta)},
      {"energies", join_doubles(energies)},
      {"energy", format_number(energy)},
      {"energy2", format_number(energy2)},
      {"energy_count", std::to_string(energy_count)},
      {"energy_max", energy_max ? format_number(*energy_max) : ""},
      {"energy_min", energy_min ? format_number(*energy_min) : ""},
      {"epsilon", format_number(epsilon)},
      {"extension_delta", format_number(extension_delta)},
      {"format", to_string(format)},
      {"grid", std::to_string(grid)},
      {"k", std::to_string(k)},
      {"kappa", format_number(kappa)},
      {"lambda", format_number(lambda)},
      {"levels", std::to_string(levels)},
      {"max_fraction", format_number(max_fraction)},
      {"n", std::to_string(n)},
      {"n_list", join_ints(n_list)},
      {"omega", format_number(omega)},
      {"order", std::to_string(order)},
      {"plot_data", plot_data ? "true" : "false"},
      {"potential", potential},
      {"probes", std::to_string(probes)},
      {"rho", format_number(rho)},
      {"samples", std::to_string(samples)},
      {"seed", std::to_string(seed)},
      {"threshold_factor", format_number(threshold_factor)},
      {"tol_factor", format_number(tol_factor)},
      {"x", format_number(x)},
      {"y", format_number(y)},
      {"y0", format_number(y0)},
      {"y_samples", std::to_string(y_samples)}};
  return out;
}

std::map<std::string, std::string> parse_config_text(const std::string& text, const std::string& origin) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::Config, origin + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) throw Error(ErrorKind::Config, origin + ":" + std::to_string(lineno) + ": empty key");
    if (out.count(key))
      throw Error(ErrorKind::Config, origin + ":" + std::to_string(lineno) + ": duplicate key " + key);
    out[key] = value;
  }
  return out;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open config file " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), path);
}

ExperimentConfig parse_config(const std::map<std::string, std::string>& file_values,
                              const std::map<std::string, std::string>& flag_values) {
  const auto& keys = valid_config_keys();
  auto check_keys = [&](const std::map<std::string, std::string>& values) {
    for (const auto& [key, value] : values) {
      if (std::find(keys.begin(), keys.end(), key) != keys.end()) continue;
      std::string list;
      for (const auto& k : keys) list += (list.empty() ? "" : ", ") + k;
      throw Error(ErrorKind::Config, "unknown key '" + key + "'; valid keys: " + list);
    }
  };
  check_keys(file_values);
  check_keys(flag_values);

  std::map<std::string, std::string> merged = file_values;
  ExperimentConfig config;
  for (const auto& [key, value] : flag_values) {
    if (const auto it = file_values.find(key); it != file_values.end() && it->second != value)
      config.warnings.push_back("flag --" + key + "=" + value + " overrides config value " + it->second);
    merged[key] = value;
  }
  if (!merged.count("seed")) throw Error(ErrorKind::Config, "missing seed: a seed is mandatory");
  if (merged.count("potential") && merged.count("potential_file"))
    throw Error(ErrorKind::Config, "potential and potential_file are mutually exclusive");

  for (const auto& [key, value] : merged) assign(config, key, value);
  validate(config);
  return config;
}

ExperimentConfig parse_config_path(const std::string& path, const std::map<std::string, std::string>& flag_values) {
  return parse_config(read_config_file(path), flag_values);
}

}  // namespace skewlab
