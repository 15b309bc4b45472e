#include "rtquench/cli/output.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace rtq::cli {

std::string format_number(double x) {
  if (std::isnan(x)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return buf;
}

std::string csv_document(const std::string& command, const Json& config,
                         const std::vector<Column>& columns) {
  std::string out = "# rtquench " + command + "\n# units: " + kUnitsLine + "\n# config: " +
                    config.dump() + "\n";
  std::size_t rows = 0;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    out += (c ? "," : "") + columns[c].name;
    rows = std::max(rows, columns[c].values.size());
  }
  out += "\n";
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (c) out += ",";
      const auto& v = columns[c].values;
      if (r < v.size()) out += format_number(v[r]);
    }
    out += "\n";
  }
  return out;
}

Json json_table(const std::string& command, const Json& config,
                const std::vector<Column>& columns) {
  Json table = Json::object();
  for (const auto& column : columns) {
    Json values = Json::array();
    for (double v : column.values) values.push_back(std::isnan(v) ? Json(nullptr) : Json(v));
    table[column.name] = std::move(values);
  }
  return Json{{"command", command}, {"units", kUnitsLine}, {"config", config},
              {"columns", std::move(table)}};
}

std::string dump_json(const Json& doc) { return doc.dump(2) + "\n"; }

void write_file(const std::string& dir, const std::string& name, const std::string& content) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory '" + dir + "': " + ec.message());
  const auto path = std::filesystem::path(dir) / name;
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw Error("cannot write '" + path.string() + "'");
}

}  // namespace rtq::cli
