#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sos/model/geometry.hpp"

namespace sos::model {

/// One translation class of connected dual-lattice sets with its potential value.
class PotentialShape {
 public:
  PotentialShape(std::vector<DualSite> sites, double weight, std::string name = {});

  const std::vector<DualSite>& sites() const noexcept { return sites_; }
  double weight() const noexcept { return weight_; }
  const std::string& name() const noexcept { return name_; }
  std::size_t size() const noexcept { return sites_.size(); }

  /// 4 * diam^2, exact.
  long long doubled_sq_diameter() const noexcept { return doubled_sq_diameter_; }
  double diameter() const;
  bool connected() const;

  int x2_lo() const noexcept { return x2_lo_; }
  int x2_hi() const noexcept { return x2_hi_; }
  int y2_lo() const noexcept { return y2_lo_; }
  int y2_hi() const noexcept { return y2_hi_; }

 private:
  std::vector<DualSite> sites_;
  double weight_;
  std::string name_;
  long long doubled_sq_diameter_ = 0;
  int x2_lo_ = 0, x2_hi_ = 0, y2_lo_ = 0, y2_hi_ = 0;
};

/// Finite, translation-invariant stand-in for the long-range potential.
class PotentialCatalog {
 public:
  PotentialCatalog() = default;
  PotentialCatalog(std::vector<PotentialShape> shapes, double decay_mass);

  /// The zero potential (no shapes).
  static PotentialCatalog zero(double decay_mass = 1.0) { return PotentialCatalog({}, decay_mass); }

  const std::vector<PotentialShape>& shapes() const noexcept { return shapes_; }
  double decay_mass() const noexcept { return decay_mass_; }
  double max_diameter() const;
  /// True when every weight is zero, so the long-range energy vanishes identically.
  bool is_zero() const noexcept;

 private:
  std::vector<PotentialShape> shapes_;
  double decay_mass_ = 1.0;
};

struct DecayLevel {
  int k = 0;
  double mass = 0.0;   // sum over translates through a site with diam >= k of |weight|
  double bound = 0.0;  // exp(-m k)
};

struct DecayReport {
  bool pass = true;
  std::optional<int> first_failing_k;
  std::vector<DecayLevel> levels;
};

/// Checks the per-site decay bound for every k >= 1 by finite enumeration.
/// Throws CatalogError naming the first disconnected shape.
DecayReport validate_catalog(const PotentialCatalog& catalog);

/// Parses "p/2" (p odd) into a doubled coordinate.
int parse_half_integer(const std::string& text);
std::string format_half_integer(int doubled);

PotentialCatalog catalog_from_json(const nlohmann::json& doc);
nlohmann::json catalog_to_json(const PotentialCatalog& catalog);
PotentialCatalog load_catalog(const std::string& path);

/// Small decay-valid catalogs used by the harnesses and tests.
namespace catalogs {
/// A handful of short shapes (sites, dominoes, an L-tromino, a short vertical
/// bar) scaled so the decay bound holds with slack at the given mass.
PotentialCatalog small(double decay_mass = 3.0);
/// Vertical bars of lengths 1..max_len; length n weighs exp(-m * max(n-1, 1)) / (2n),
/// designed so the decay bound holds at every k.
PotentialCatalog vertical_bars(double decay_mass, int max_len);
}  // namespace catalogs

}  // namespace sos::model
