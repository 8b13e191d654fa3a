#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace sos::experiments {

std::uint64_t fnv1a(const std::string& text);

/// "<stem>-<16 hex digits of fnv1a(config)>".
std::string report_stem(const std::string& name, const nlohmann::json& config);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<nlohmann::json>> rows;
};

/// Writes <dir>/<stem>.json ({"config", "result"}) and, when the table has
/// rows, <dir>/<stem>.csv whose first line is "# config: <json>".
/// Returns the paths written.
std::vector<std::filesystem::path> write_report(const std::filesystem::path& dir, const std::string& name,
                                                const nlohmann::json& config, const nlohmann::json& result,
                                                const CsvTable& table = {});

}  // namespace sos::experiments
