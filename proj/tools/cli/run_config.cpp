#include "run_config.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sos/core/error.hpp"

namespace sos::cli {

namespace {

template <class T>
void take(const nlohmann::json& doc, const std::string& key, const std::set<std::string>& given, T& field) {
  if (!doc.contains(key) || given.count(key)) return;
  try {
    field = doc.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config field '" + key + "': " + e.what());
  }
}

}  // namespace

double horizon_or(const RunConfig& cfg, double fallback) { return cfg.horizon.value_or(fallback); }
int replicas_or(const RunConfig& cfg, int fallback) { return cfg.replicas.value_or(fallback); }

void merge_config_file(RunConfig& cfg, const nlohmann::json& doc, const std::set<std::string>& given) {
  if (!doc.is_object()) throw ConfigError("config file must hold a JSON object");
  static const std::set<std::string> known{"command", "L",     "M",       "beta",     "kind",   "eps",  "alpha",
                                           "catalog", "phi0",  "preset",  "mass",     "bars",   "R",    "horizon",
                                           "replicas", "seed", "t",       "Ls",       "grid",   "start", "tests",
                                           "times",   "slope_lo", "slope_hi", "out"};
  for (const auto& [key, value] : doc.items())
    if (!known.count(key)) throw ConfigError("config field '" + key + "': unknown field");
  if (doc.contains("M") && !given.count("M")) {
    const auto& m = doc["M"];
    if (m.is_number_integer()) cfg.M = std::to_string(m.get<int>());
    else if (m.is_string()) cfg.M = m.get<std::string>();
    else throw ConfigError("config field 'M': expected an integer, \"inf\" or \"auto\"");
  }
  if (doc.contains("catalog") && !given.count("catalog") && !given.count("phi0") && !given.count("preset")) {
    const auto& c = doc["catalog"];
    if (c.is_string()) cfg.catalog_file = c.get<std::string>();
    else if (c.is_object()) cfg.catalog_json = c;
    else throw ConfigError("config field 'catalog': expected a path or a catalog object");
  }
  take(doc, "L", given, cfg.L);
  take(doc, "beta", given, cfg.beta);
  take(doc, "kind", given, cfg.kind);
  take(doc, "eps", given, cfg.eps);
  take(doc, "alpha", given, cfg.alpha);
  take(doc, "phi0", given, cfg.phi0);
  take(doc, "preset", given, cfg.preset);
  take(doc, "mass", given, cfg.mass);
  take(doc, "bars", given, cfg.bars);
  take(doc, "R", given, cfg.R);
  if (doc.contains("horizon") && !given.count("horizon")) {
    const auto& h = doc["horizon"];
    if (h.is_null()) cfg.horizon.reset();
    else if (h.is_string() && h.get<std::string>() == "inf") cfg.horizon = std::numeric_limits<double>::infinity();
    else {
      double v = 0.0;
      take(doc, "horizon", given, v);
      cfg.horizon = v;
    }
  }
  if (doc.contains("replicas") && doc["replicas"].is_null() && !given.count("replicas")) cfg.replicas.reset();
  else if (doc.contains("replicas") && !given.count("replicas")) {
    int v = 0;
    take(doc, "replicas", given, v);
    cfg.replicas = v;
  }
  take(doc, "seed", given, cfg.seed);
  take(doc, "t", given, cfg.t);
  take(doc, "Ls", given, cfg.Ls);
  take(doc, "grid", given, cfg.grid);
  take(doc, "start", given, cfg.start);
  take(doc, "tests", given, cfg.tests);
  take(doc, "times", given, cfg.times);
  take(doc, "slope_lo", given, cfg.slope_lo);
  take(doc, "slope_hi", given, cfg.slope_hi);
  take(doc, "out", given, cfg.out);
}

model::PotentialCatalog resolve_catalog(const RunConfig& cfg) {
  try {
    if (cfg.catalog_json) return model::catalog_from_json(*cfg.catalog_json);
    if (!cfg.catalog_file.empty()) return model::load_catalog(cfg.catalog_file);
    if (cfg.phi0) return model::PotentialCatalog::zero(cfg.mass);
    if (cfg.preset == "small") return model::catalogs::small(cfg.mass);
    if (cfg.preset == "bars") return model::catalogs::vertical_bars(cfg.mass, cfg.bars);
  } catch (const Error& e) {
    throw ConfigError(std::string("catalog: ") + e.what());
  }
  throw ConfigError("preset: expected 'small' or 'bars'");
}

model::ModelParams resolve_params(const RunConfig& cfg) {
  model::ModelParams p;
  p.L = cfg.L;
  if (cfg.M == "auto") p.M = std::max(1, cfg.L / 2);
  else if (cfg.M == "inf") p.M = std::nullopt;
  else {
    try {
      std::size_t used = 0;
      p.M = std::stoi(cfg.M, &used);
      if (used != cfg.M.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw ConfigError("M: expected an integer, \"inf\" or \"auto\", got '" + cfg.M + "'");
    }
  }
  p.beta = cfg.beta;
  p.eps = cfg.eps;
  p.alpha = cfg.alpha;
  try {
    p.kind = model::measure_kind_from_string(cfg.kind);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  p.catalog = resolve_catalog(cfg);
  try {
    p.validate();
  } catch (const PreconditionError& e) {
    throw ConfigError(e.what());
  }
  return p;
}

std::vector<std::pair<int, int>> resolve_grid(const RunConfig& cfg) {
  std::vector<std::pair<int, int>> grid;
  for (const auto& cell : cfg.grid) {
    const auto colon = cell.find(':');
    try {
      if (colon == std::string::npos) throw std::invalid_argument("missing ':'");
      grid.emplace_back(std::stoi(cell.substr(0, colon)), std::stoi(cell.substr(colon + 1)));
    } catch (const std::exception&) {
      throw ConfigError("grid: expected entries of the form L:M, got '" + cell + "'");
    }
    if (grid.back().first < 1 || grid.back().second < 1) throw ConfigError("grid: L and M must be positive");
  }
  return grid;
}

nlohmann::json to_json(const RunConfig& cfg) {
  const auto p = resolve_params(cfg);
  nlohmann::json j;
  j["command"] = cfg.command;
  j["L"] = p.L;
  j["M"] = p.M ? nlohmann::json(*p.M) : nlohmann::json("inf");
  j["beta"] = p.beta;
  j["kind"] = model::to_string(p.kind);
  j["eps"] = p.eps;
  j["alpha"] = p.alpha;
  j["catalog"] = model::catalog_to_json(p.catalog);
  j["R"] = cfg.R;
  if (!cfg.horizon) j["horizon"] = nullptr;
  else j["horizon"] = std::isfinite(*cfg.horizon) ? nlohmann::json(*cfg.horizon) : nlohmann::json("inf");
  j["replicas"] = cfg.replicas ? nlohmann::json(*cfg.replicas) : nlohmann::json(nullptr);
  j["seed"] = cfg.seed;
  j["t"] = cfg.t;
  j["Ls"] = cfg.Ls;
  j["grid"] = cfg.grid;
  j["start"] = cfg.start;
  j["tests"] = cfg.tests;
  j["times"] = cfg.times;
  j["slope_lo"] = cfg.slope_lo;
  j["slope_hi"] = cfg.slope_hi;
  return j;
}

}  // namespace sos::cli
