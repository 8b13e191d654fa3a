#include "sos/experiments/report.hpp"

#include <cstdio>
#include <fstream>

#include "sos/core/error.hpp"

namespace sos::experiments {

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string report_stem(const std::string& name, const nlohmann::json& config) {
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a(config.dump())));
  return name + "-" + hex;
}

namespace {

std::string csv_cell(const nlohmann::json& v) {
  if (v.is_string()) {
    std::string s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  }
  if (v.is_null()) return "";
  return v.dump();
}

}  // namespace

std::vector<std::filesystem::path> write_report(const std::filesystem::path& dir, const std::string& name,
                                                const nlohmann::json& config, const nlohmann::json& result,
                                                const CsvTable& table) {
  std::filesystem::create_directories(dir);
  const std::string stem = report_stem(name, config);
  std::vector<std::filesystem::path> written;
  {
    const auto path = dir / (stem + ".json");
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    nlohmann::ordered_json doc;
    doc["config"] = config;
    doc["result"] = result;
    out << doc.dump(2) << '\n';
    written.push_back(path);
  }
  if (!table.rows.empty()) {
    const auto path = dir / (stem + ".csv");
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << "# config: " << config.dump() << '\n';
    for (std::size_t i = 0; i < table.header.size(); ++i) out << (i ? "," : "") << table.header[i];
    out << '\n';
    for (const auto& row : table.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_cell(row[i]);
      out << '\n';
    }
    written.push_back(path);
  }
  return written;
}

}  // namespace sos::experiments
