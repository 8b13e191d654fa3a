#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sos/model/catalog.hpp"
#include "sos/model/params.hpp"

namespace sos::cli {

/// Everything a run depends on. The echoed form (to_json) is itself a valid
/// --config file and reproduces the run.
struct RunConfig {
  std::string command;
  int L = 4;
  std::string M = "auto";  // integer, "inf", or "auto" for max(1, L/2)
  double beta = 3.0;
  std::string kind = "constrained";
  double eps = 0.1;
  double alpha = 0.2;

  // catalog source: an explicit file or object wins, then --phi0, then the preset
  std::string catalog_file;
  std::optional<nlohmann::json> catalog_json;
  bool phi0 = false;
  std::string preset = "small";
  double mass = 3.0;
  int bars = 4;

  int R = 4;
  std::optional<double> horizon;  // per-command default when absent
  std::optional<int> replicas;
  std::uint64_t seed = 1;
  double t = 10.0;
  std::vector<int> Ls;
  std::vector<std::string> grid;  // "L:M"
  std::vector<int> start;
  int tests = 100;
  int times = 50;
  double slope_lo = 2.3;
  double slope_hi = 3.7;
  std::string out = "out";
};

/// Thrown for invalid configuration; exit status 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double horizon_or(const RunConfig& cfg, double fallback);
int replicas_or(const RunConfig& cfg, int fallback);

/// Fills every field named in doc whose flag was not given on the command line.
void merge_config_file(RunConfig& cfg, const nlohmann::json& doc, const std::set<std::string>& given);

model::PotentialCatalog resolve_catalog(const RunConfig& cfg);
model::ModelParams resolve_params(const RunConfig& cfg);
std::vector<std::pair<int, int>> resolve_grid(const RunConfig& cfg);

/// Resolved, self-contained echo (the catalog is embedded; --out is omitted).
nlohmann::json to_json(const RunConfig& cfg);

}  // namespace sos::cli
