#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "skewlab/config.hpp"

namespace skewlab {

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  bool operator==(const Table&) const = default;
};

struct RunReport {
  std::string command;
  std::string version;
  std::vector<std::pair<std::string, std::string>> config;
  double wall_time_s = 0.0;
  std::vector<Table> tables;
  std::vector<std::pair<std::string, double>> results;
  std::vector<std::string> warnings;
  std::vector<std::string> violations;

  bool property_ok() const noexcept { return violations.empty(); }
  const Table* table(const std::string& name) const;
  bool operator==(const RunReport&) const = default;
};

/// %.17g without locale; "inf", "-inf" and "nan" for non-finite values.
std::string format_number(double v);

/// Config echo and results as '#' lines, then the header row and one row per entry.
void emit_csv(const RunReport& report, const Table& table, std::ostream& out);

/// One block per column after the first: "# series <name>" then "x y" lines.
void emit_plot_data(const RunReport& report, const Table& table, std::ostream& out);

std::string emit_json(const RunReport& report);
RunReport report_from_json(const std::string& text);

/// Writes <dir>/<command>[_<table>].{csv,json,dat}; returns the paths written.
std::vector<std::string> write_report(const RunReport& report, const std::string& dir, Format format,
                                      bool plot_data);

}  // namespace skewlab
