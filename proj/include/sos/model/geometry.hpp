#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "sos/model/configuration.hpp"

namespace sos::model {

/// A site of the dual lattice (1/2,1/2) + Z^2.
///
/// Coordinates are stored doubled so that every half-integer is an exact
/// odd integer: the site (x, y) is held as (2x, 2y).
struct DualSite {
  int x2 = 1;
  int y2 = 1;

  /// Builds a site from doubled coordinates; both must be odd.
  static DualSite from_doubled(int x2, int y2);

  double x() const noexcept { return 0.5 * x2; }
  double y() const noexcept { return 0.5 * y2; }

  DualSite operator+(const DualSite& o) const noexcept { return {x2 + o.x2, y2 + o.y2}; }

  auto operator<=>(const DualSite&) const = default;
  bool operator==(const DualSite&) const = default;
};

/// Offset between dual sites (an integer lattice vector, doubled).
struct LatticeOffset {
  int dx2 = 0;
  int dy2 = 0;
  auto operator<=>(const LatticeOffset&) const = default;
  bool operator==(const LatticeOffset&) const = default;
};

inline DualSite operator+(DualSite p, LatticeOffset t) noexcept { return {p.x2 + t.dx2, p.y2 + t.dy2}; }
inline LatticeOffset operator-(DualSite a, DualSite b) noexcept { return {a.x2 - b.x2, a.y2 - b.y2}; }

/// Squared Euclidean distance in doubled units (4 * dist^2), exact.
inline long long doubled_sq_distance(DualSite a, DualSite b) noexcept {
  const long long dx = a.x2 - b.x2;
  const long long dy = a.y2 - b.y2;
  return dx * dx + dy * dy;
}

/// The dual-lattice region V_L^M (finite height bound) or V_L^infinity.
///
/// Horizontal extent is [-1/2, L+1/2]; the vertical extent for a finite bound M
/// is [-(M+1/2), M+1/2], i.e. every dual site that can be attached to a profile
/// with sup-norm at most M.
class Strip {
 public:
  static Strip box(int length, int height_bound);
  static Strip unbounded(int length);

  bool contains(DualSite p) const noexcept {
    if (p.x2 < -1 || p.x2 > x2_max_) return false;
    return !y2_max_ || (p.y2 >= -*y2_max_ && p.y2 <= *y2_max_);
  }
  /// Containment test for an axis-aligned bounding box given in doubled units.
  bool contains_box(int x2_lo, int x2_hi, int y2_lo, int y2_hi) const noexcept {
    if (x2_lo < -1 || x2_hi > x2_max_) return false;
    return !y2_max_ || (y2_lo >= -*y2_max_ && y2_hi <= *y2_max_);
  }
  bool is_bounded() const noexcept { return y2_max_.has_value(); }

 private:
  Strip(int x2_max, std::optional<int> y2_max) : x2_max_(x2_max), y2_max_(y2_max) {}
  int x2_max_;
  std::optional<int> y2_max_;
};

/// Minimum doubled squared distance from p to the contour of cfg
/// restricted to the contour pieces that can lie within 1/sqrt(2) of p's column.
/// Returns a value > 2 when p is farther than 1/sqrt(2).
long long contour_sq_distance_local(const Configuration& cfg, DualSite p);

/// True when dist(p, contour) is exactly 1/2 or 1/sqrt(2).
bool is_attached(const Configuration& cfg, DualSite p);

/// Attached sites whose doubled abscissa lies in [x2_lo, x2_hi], sorted.
std::vector<DualSite> attached_in_columns(const Configuration& cfg, int x2_lo, int x2_hi);

/// All attached sites Delta(cfg), sorted by (x, y).
std::vector<DualSite> attached_sites(const Configuration& cfg);

}  // namespace sos::model

template <>
struct std::hash<sos::model::DualSite> {
  std::size_t operator()(const sos::model::DualSite& p) const noexcept {
    return std::hash<long long>{}((static_cast<long long>(p.x2) << 32) ^ static_cast<unsigned>(p.y2));
  }
};
