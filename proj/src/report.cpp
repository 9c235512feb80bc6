#include "skewlab/report.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>

#include "skewlab/error.hpp"

namespace skewlab {

using nlohmann::ordered_json;

namespace {

ordered_json number_to_json(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

double number_from_json(const ordered_json& j) {
  if (j.is_number()) return j.get<double>();
  const auto s = j.get<std::string>();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  throw Error(ErrorKind::Io, "unexpected number encoding '" + s + "'");
}

void write_header(const RunReport& report, std::ostream& out) {
  out << "# skewlab " << report.version << "\n# command = " << report.command << "\n";
  for (const auto& [key, value] : report.config) out << "# config " << key << " = " << value << "\n";
  for (const auto& [key, value] : report.results) out << "# result " << key << " = " << format_number(value) << "\n";
  for (const auto& w : report.warnings) out << "# warning " << w << "\n";
  for (const auto& v : report.violations) out << "# violation " << v << "\n";
}

}  // namespace

const Table* RunReport::table(const std::string& name) const {
  for (const auto& t : tables)
    if (t.name == name) return &t;
  return nullptr;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void emit_csv(const RunReport& report, const Table& table, std::ostream& out) {
  write_header(report, out);
  for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
  out << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_number(row[i]);
    out << "\n";
  }
}

void emit_plot_data(const RunReport& report, const Table& table, std::ostream& out) {
  write_header(report, out);
  for (std::size_t c = 1; c < table.columns.size(); ++c) {
    out << "# series " << table.columns[c] << " vs " << table.columns[0] << "\n";
    for (const auto& row : table.rows) out << format_number(row[0]) << " " << format_number(row[c]) << "\n";
    out << "\n";
  }
}

std::string emit_json(const RunReport& report) {
  ordered_json j;
  j["command"] = report.command;
  j["version"] = report.version;
  j["config"] = ordered_json::object();
  for (const auto& [key, value] : report.config) j["config"][key] = value;
  j["wall_time_s"] = report.wall_time_s;
  j["results"] = ordered_json::object();
  for (const auto& [key, value] : report.results) j["results"][key] = number_to_json(value);
  j["tables"] = ordered_json::array();
  for (const auto& t : report.tables) {
    ordered_json jt;
    jt["name"] = t.name;
    jt["columns"] = t.columns;
    jt["rows"] = ordered_json::array();
    for (const auto& row : t.rows) {
      ordered_json jr = ordered_json::array();
      for (double v : row) jr.push_back(number_to_json(v));
      jt["rows"].push_back(std::move(jr));
    }
    j["tables"].push_back(std::move(jt));
  }
  j["warnings"] = report.warnings;
  j["violations"] = report.violations;
  return j.dump(2) + "\n";
}

RunReport report_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
    RunReport r;
    r.command = j.at("command").get<std::string>();
    r.version = j.at("version").get<std::string>();
    for (const auto& [key, value] : j.at("config").items()) r.config.emplace_back(key, value.get<std::string>());
    r.wall_time_s = j.at("wall_time_s").get<double>();
    for (const auto& [key, value] : j.at("results").items()) r.results.emplace_back(key, number_from_json(value));
    for (const auto& jt : j.at("tables")) {
      Table t;
      t.name = jt.at("name").get<std::string>();
      t.columns = jt.at("columns").get<std::vector<std::string>>();
      for (const auto& jr : jt.at("rows")) {
        std::vector<double> row;
        for (const auto& v : jr) row.push_back(number_from_json(v));
        t.rows.push_back(std::move(row));
      }
      r.tables.push_back(std::move(t));
    }
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    r.violations = j.at("violations").get<std::vector<std::string>>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Io, std::string("malformed report JSON: ") + e.what());
  }
}

std::vector<std::string> write_report(const RunReport& report, const std::string& dir, Format format,
                                      bool plot_data) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create output directory " + dir + ": " + ec.message());

  std::vector<std::string> written;
  auto open = [&](const std::string& name) {
    const std::string path = (fs::path(dir) / name).string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
    written.push_back(path);
    return out;
  };
  auto stem = [&](const Table& t) { return report.command + (t.name.empty() ? "" : "_" + t.name); };

  if (format == Format::Json) {
    auto out = open(report.command + ".json");
    out << emit_json(report);
    if (!out) throw Error(ErrorKind::Io, "write failed for " + written.back());
  } else {
    for (const auto& t : report.tables) {
      auto out = open(stem(t) + ".csv");
      emit_csv(report, t, out);
      if (!out) throw Error(ErrorKind::Io, "write failed for " + written.back());
    }
  }
  if (plot_data)
    for (const auto& t : report.tables) {
      auto out = open(stem(t) + ".dat");
      emit_plot_data(report, t, out);
    }
  return written;
}

}  // namespace skewlab
