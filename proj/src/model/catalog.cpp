#include "sos/model/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>

#include "sos/core/error.hpp"

namespace sos::model {

PotentialShape::PotentialShape(std::vector<DualSite> sites, double weight, std::string name)
    : sites_(std::move(sites)), weight_(weight), name_(std::move(name)) {
  if (sites_.empty()) throw CatalogError("potential shape '" + name_ + "' has no sites");
  if (!std::isfinite(weight_)) throw CatalogError("potential shape '" + name_ + "' has a non-finite weight");
  std::sort(sites_.begin(), sites_.end());
  sites_.erase(std::unique(sites_.begin(), sites_.end()), sites_.end());
  x2_lo_ = y2_lo_ = std::numeric_limits<int>::max();
  x2_hi_ = y2_hi_ = std::numeric_limits<int>::min();
  for (const DualSite& p : sites_) {
    x2_lo_ = std::min(x2_lo_, p.x2);
    x2_hi_ = std::max(x2_hi_, p.x2);
    y2_lo_ = std::min(y2_lo_, p.y2);
    y2_hi_ = std::max(y2_hi_, p.y2);
    for (const DualSite& q : sites_) doubled_sq_diameter_ = std::max(doubled_sq_diameter_, doubled_sq_distance(p, q));
  }
}

double PotentialShape::diameter() const { return 0.5 * std::sqrt(static_cast<double>(doubled_sq_diameter_)); }

bool PotentialShape::connected() const {
  std::vector<bool> seen(sites_.size(), false);
  std::queue<std::size_t> todo;
  todo.push(0);
  seen[0] = true;
  std::size_t reached = 1;
  while (!todo.empty()) {
    const std::size_t i = todo.front();
    todo.pop();
    for (std::size_t j = 0; j < sites_.size(); ++j) {
      if (!seen[j] && doubled_sq_distance(sites_[i], sites_[j]) == 4) {
        seen[j] = true;
        ++reached;
        todo.push(j);
      }
    }
  }
  return reached == sites_.size();
}

PotentialCatalog::PotentialCatalog(std::vector<PotentialShape> shapes, double decay_mass)
    : shapes_(std::move(shapes)), decay_mass_(decay_mass) {
  if (!(decay_mass_ > 0.0) || !std::isfinite(decay_mass_)) {
    throw CatalogError("decay mass must be a positive finite number");
  }
}

double PotentialCatalog::max_diameter() const {
  double d = 0.0;
  for (const auto& s : shapes_) d = std::max(d, s.diameter());
  return d;
}

bool PotentialCatalog::is_zero() const noexcept {
  return std::all_of(shapes_.begin(), shapes_.end(), [](const PotentialShape& s) { return s.weight() == 0.0; });
}

DecayReport validate_catalog(const PotentialCatalog& catalog) {
  for (std::size_t i = 0; i < catalog.shapes().size(); ++i) {
    const auto& s = catalog.shapes()[i];
    if (!s.connected()) {
      const std::string label = s.name().empty() ? "#" + std::to_string(i) : "'" + s.name() + "'";
      throw CatalogError("potential shape " + label + " is not connected in the dual lattice");
    }
  }
  DecayReport report;
  long long max_d2 = 0;
  for (const auto& s : catalog.shapes()) max_d2 = std::max(max_d2, s.doubled_sq_diameter());
  // diam >= k  <=>  4 diam^2 >= 4 k^2; beyond the largest diameter every sum is empty.
  for (int k = 1; 4LL * k * k <= max_d2; ++k) {
    DecayLevel level{k, 0.0, std::exp(-catalog.decay_mass() * k)};
    for (const auto& s : catalog.shapes()) {
      // A site p lies in exactly |S| translates of S.
      if (s.doubled_sq_diameter() >= 4LL * k * k) level.mass += static_cast<double>(s.size()) * std::abs(s.weight());
    }
    if (level.mass > level.bound && report.pass) {
      report.pass = false;
      report.first_failing_k = k;
    }
    report.levels.push_back(level);
  }
  return report;
}

int parse_half_integer(const std::string& text) {
  const auto slash = text.find('/');
  if (slash == std::string::npos || text.substr(slash + 1) != "2") {
    throw CatalogError("half-integer coordinate must be written as \"p/2\", got \"" + text + "\"");
  }
  std::size_t used = 0;
  int p = 0;
  try {
    p = std::stoi(text.substr(0, slash), &used);
  } catch (const std::exception&) {
    throw CatalogError("bad numerator in coordinate \"" + text + "\"");
  }
  if (used != slash) throw CatalogError("bad numerator in coordinate \"" + text + "\"");
  if ((p & 1) == 0) throw CatalogError("coordinate \"" + text + "\" is not a half-integer");
  return p;
}

std::string format_half_integer(int doubled) { return std::to_string(doubled) + "/2"; }

PotentialCatalog catalog_from_json(const nlohmann::json& doc) {
  if (!doc.contains("decay_mass") || !doc.contains("shapes")) {
    throw CatalogError("catalog document needs \"decay_mass\" and \"shapes\"");
  }
  std::vector<PotentialShape> shapes;
  for (const auto& js : doc.at("shapes")) {
    std::vector<DualSite> sites;
    for (const auto& xy : js.at("sites")) {
      if (!xy.is_array() || xy.size() != 2) throw CatalogError("each site must be a pair [x, y]");
      sites.push_back(DualSite::from_doubled(parse_half_integer(xy[0].get<std::string>()),
                                             parse_half_integer(xy[1].get<std::string>())));
    }
    shapes.emplace_back(std::move(sites), js.at("weight").get<double>(), js.value("name", std::string{}));
  }
  PotentialCatalog catalog(std::move(shapes), doc.at("decay_mass").get<double>());
  validate_catalog(catalog);  // rejects disconnected shapes
  return catalog;
}

nlohmann::json catalog_to_json(const PotentialCatalog& catalog) {
  nlohmann::json doc;
  doc["decay_mass"] = catalog.decay_mass();
  doc["shapes"] = nlohmann::json::array();
  for (const auto& s : catalog.shapes()) {
    nlohmann::json js;
    js["sites"] = nlohmann::json::array();
    for (const auto& p : s.sites()) js["sites"].push_back({format_half_integer(p.x2), format_half_integer(p.y2)});
    js["weight"] = s.weight();
    if (!s.name().empty()) js["name"] = s.name();
    doc["shapes"].push_back(std::move(js));
  }
  return doc;
}

PotentialCatalog load_catalog(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CatalogError("cannot open catalog file " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw CatalogError("catalog file " + path + " is not valid JSON: " + e.what());
  }
  return catalog_from_json(doc);
}

namespace catalogs {

PotentialCatalog small(double decay_mass) {
  const double u = std::exp(-decay_mass);
  auto site = [](int x2, int y2) { return DualSite::from_doubled(x2, y2); };
  std::vector<PotentialShape> shapes;
  shapes.emplace_back(std::vector{site(1, 1)}, 0.2 * u, "site");
  shapes.emplace_back(std::vector{site(1, 1), site(3, 1)}, 0.1 * u, "h-domino");
  shapes.emplace_back(std::vector{site(1, 1), site(1, 3)}, -0.1 * u, "v-domino");
  shapes.emplace_back(std::vector{site(1, 1), site(3, 1), site(1, 3)}, 0.05 * u, "l-tromino");
  shapes.emplace_back(std::vector{site(1, 1), site(1, 3), site(1, 5)}, 0.1 * u * u, "v-bar3");
  return PotentialCatalog(std::move(shapes), decay_mass);
}

PotentialCatalog vertical_bars(double decay_mass, int max_len) {
  std::vector<PotentialShape> shapes;
  for (int n = 1; n <= max_len; ++n) {
    std::vector<DualSite> sites;
    for (int r = 0; r < n; ++r) sites.push_back(DualSite::from_doubled(1, 1 + 2 * r));
    const double w = std::exp(-decay_mass * std::max(n - 1, 1)) / (2.0 * n);
    shapes.emplace_back(std::move(sites), w, "v-bar" + std::to_string(n));
  }
  return PotentialCatalog(std::move(shapes), decay_mass);
}

}  // namespace catalogs

}  // namespace sos::model
