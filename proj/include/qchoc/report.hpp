// report.hpp
// Report envelope and its three renderings (JSON, CSV, text).
//
// Every command's results carry a "table" member ({"columns": [...],
// "rows": [[...], ...]}); CSV is exactly that table and text is the summary
// fields followed by the same table. Floating-point values are rounded to 12
// significant digits before they enter the envelope; exact rationals travel
// as "num/den" strings.

#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qchoc/classical.hpp"

namespace qchoc {

using ordered_json = nlohmann::ordered_json;

inline constexpr const char* kToolName = "qchoc";
inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

enum class Format { json, csv, text };

/// "%.12g" rendering used everywhere a real number is printed.
inline std::string format_real(double v) {
  if (v == 0.0) v = 0.0;  // drop the sign of negative zero
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

/// `v` rounded to 12 significant digits, as a JSON number.
inline ordered_json real(double v) {
  if (!std::isfinite(v)) throw std::domain_error("report: non-finite value");
  return std::strtod(format_real(v).c_str(), nullptr);
}

inline ordered_json exact(const Rational& r) { return to_string(r); }

struct Check {
  std::string name;
  bool passed = false;

  friend bool operator==(const Check&, const Check&) = default;
};

struct ReportEnvelope {
  std::string command;
  ordered_json config = ordered_json::object();
  bool exact = false;    // results contain exact rational values
  bool sampled = false;  // results contain Monte Carlo estimates
  std::vector<Check> checks;
  ordered_json results = ordered_json::object();

  bool physics_ok() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return true;
  }

  friend bool operator==(const ReportEnvelope&, const ReportEnvelope&) = default;
};

inline ordered_json to_json(const ReportEnvelope& env) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["command"] = env.command;
  j["config"] = env.config;
  j["provenance"] = {{"exact", env.exact}, {"sampled", env.sampled}};
  ordered_json checks = ordered_json::array();
  for (const auto& c : env.checks) checks.push_back({{"name", c.name}, {"passed", c.passed}});
  j["checks"] = std::move(checks);
  j["results"] = env.results;
  return j;
}

inline ReportEnvelope envelope_from_json(const ordered_json& j) {
  if (j.at("schema_version").get<int>() != kSchemaVersion) {
    throw std::invalid_argument("report: unsupported schema_version");
  }
  ReportEnvelope env;
  env.command = j.at("command").get<std::string>();
  env.config = j.at("config");
  env.exact = j.at("provenance").at("exact").get<bool>();
  env.sampled = j.at("provenance").at("sampled").get<bool>();
  for (const auto& c : j.at("checks")) env.checks.push_back({c.at("name").get<std::string>(), c.at("passed").get<bool>()});
  env.results = j.at("results");
  return env;
}

/// Cell text shared by CSV and text output.
inline std::string cell_text(const ordered_json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return v.dump();
  if (v.is_number()) return format_real(v.get<double>());
  if (v.is_null()) return "";
  return v.dump();
}

namespace detail {

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string join_csv(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += csv_escape(cells[i]);
  }
  return line;
}

}  // namespace detail

inline void emit_json(const ReportEnvelope& env, std::ostream& out) { out << to_json(env).dump(2) << '\n'; }

inline void emit_csv(const ReportEnvelope& env, std::ostream& out) {
  const auto& table = env.results.at("table");
  std::vector<std::string> header;
  for (const auto& c : table.at("columns")) header.push_back(c.get<std::string>());
  out << detail::join_csv(header) << '\n';
  for (const auto& row : table.at("rows")) {
    std::vector<std::string> cells;
    for (const auto& v : row) cells.push_back(cell_text(v));
    out << detail::join_csv(cells) << '\n';
  }
}

inline void emit_text(const ReportEnvelope& env, std::ostream& out) {
  out << kToolName << ' ' << kToolVersion << " :: " << env.command << '\n';
  out << "provenance: " << (env.exact ? "exact" : "") << (env.exact && env.sampled ? "+" : "")
      << (env.sampled ? "sampled" : "") << '\n';
  for (const auto& c : env.checks) out << "check " << c.name << ": " << (c.passed ? "ok" : "FAILED") << '\n';

  // scalar summary fields, then any nested objects flattened one level
  for (const auto& [key, value] : env.results.items()) {
    if (key == "table") continue;
    if (value.is_object()) {
      for (const auto& [k2, v2] : value.items()) {
        if (!v2.is_structured()) out << key << '.' << k2 << ": " << cell_text(v2) << '\n';
      }
    } else if (!value.is_array()) {
      out << key << ": " << cell_text(value) << '\n';
    }
  }

  const auto& table = env.results.at("table");
  std::vector<std::vector<std::string>> grid;
  std::vector<std::string> header;
  for (const auto& c : table.at("columns")) header.push_back(c.get<std::string>());
  grid.push_back(header);
  for (const auto& row : table.at("rows")) {
    std::vector<std::string> cells;
    for (const auto& v : row) cells.push_back(cell_text(v));
    grid.push_back(std::move(cells));
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& r : grid)
    for (std::size_t i = 0; i < r.size() && i < width.size(); ++i) width[i] = std::max(width[i], r[i].size());
  out << '\n';
  for (std::size_t ri = 0; ri < grid.size(); ++ri) {
    std::string line;
    for (std::size_t i = 0; i < grid[ri].size(); ++i) {
      if (i) line += "  ";
      line += grid[ri][i];
      if (i + 1 < grid[ri].size()) line.append(width[i] - grid[ri][i].size(), ' ');
    }
    out << line << '\n';
    if (ri == 0) {
      std::size_t total = 0;
      for (auto w : width) total += w;
      out << std::string(total + 2 * (width.empty() ? 0 : width.size() - 1), '-') << '\n';
    }
  }
}

inline void emit(const ReportEnvelope& env, Format format, std::ostream& out) {
  switch (format) {
    case Format::json: emit_json(env, out); break;
    case Format::csv: emit_csv(env, out); break;
    case Format::text: emit_text(env, out); break;
  }
}

inline std::string render(const ReportEnvelope& env, Format format) {
  std::ostringstream os;
  emit(env, format, os);
  return os.str();
}

/// Splits CSV produced by emit_csv back into rows of cells.
inline std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(std::move(cell));
      cell.clear();
    } else if (c == '\n') {
      row.push_back(std::move(cell));
      cell.clear();
      rows.push_back(std::move(row));
      row.clear();
    } else {
      cell += c;
    }
  }
  if (!cell.empty() || !row.empty()) {
    row.push_back(std::move(cell));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace qchoc
