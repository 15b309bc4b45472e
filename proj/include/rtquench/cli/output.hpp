#pragma once

#include <string>
#include <vector>

#include "rtquench/cli/config.hpp"

namespace rtq::cli {

struct Column {
  std::string name;
  std::vector<double> values;  // NaN cells are written empty
};

// Shortest decimal that keeps 15 significant digits; NaN -> "".
std::string format_number(double x);

// '#'-prefixed header (command, units, resolved config) followed by a CSV table.
std::string csv_document(const std::string& command, const Json& config,
                         const std::vector<Column>& columns);

// Column-major JSON table: {"command", "units", "config", "columns": {...}}.
Json json_table(const std::string& command, const Json& config,
                const std::vector<Column>& columns);

std::string dump_json(const Json& doc);

// Writes `content` to dir/name, creating dir if needed.
void write_file(const std::string& dir, const std::string& name, const std::string& content);

inline constexpr const char* kUnitsLine = "time in units of 1/J, fields in units of J (J = 1)";

}  // namespace rtq::cli
