#include "sos/model/geometry.hpp"

#include <algorithm>
#include <limits>

#include "sos/core/error.hpp"

namespace sos::model {

namespace {

bool is_odd(int v) { return (v & 1) != 0; }

int floor_div2(int v) { return v >= 0 ? v / 2 : -((-v + 1) / 2); }

// Doubled squared distance from (px, py) to the axis-aligned segment
// [x0, x1] x [y0, y1] (all doubled units).
long long segment_sq_distance(int px, int py, int x0, int x1, int y0, int y1) {
  const long long dx = std::max({x0 - px, 0, px - x1});
  const long long dy = std::max({y0 - py, 0, py - y1});
  return dx * dx + dy * dy;
}

}  // namespace

DualSite DualSite::from_doubled(int x2, int y2) {
  if (!is_odd(x2) || !is_odd(y2)) {
    throw PreconditionError("dual site coordinates must be half-integers (odd doubled values)");
  }
  return {x2, y2};
}

Strip Strip::box(int length, int height_bound) {
  if (height_bound < 0) throw PreconditionError("strip height bound must be nonnegative");
  return Strip(2 * length + 1, 2 * height_bound + 1);
}

Strip Strip::unbounded(int length) { return Strip(2 * length + 1, std::nullopt); }

long long contour_sq_distance_local(const Configuration& cfg, DualSite p) {
  constexpr long long kFar = std::numeric_limits<long long>::max();
  const int L = cfg.length();
  if (L == 0 || p.x2 < -1 || p.x2 > 2 * L + 1) return kFar;
  const int c = (p.x2 - 1) / 2;  // p.x = c + 1/2, c in [-1, L]
  long long best = kFar;
  // Horizontal pieces i (1-based) span x in [i-1, i] at height phi_i.
  for (int i = std::max(1, c); i <= std::min(L, c + 2); ++i) {
    const int y = 2 * cfg[static_cast<std::size_t>(i - 1)];
    best = std::min(best, segment_sq_distance(p.x2, p.y2, 2 * (i - 1), 2 * i, y, y));
  }
  // Vertical pieces at x = i join phi_i and phi_{i+1}.
  for (int i = std::max(1, c); i <= std::min(L - 1, c + 1); ++i) {
    const int a = cfg[static_cast<std::size_t>(i - 1)];
    const int b = cfg[static_cast<std::size_t>(i)];
    best = std::min(best, segment_sq_distance(p.x2, p.y2, 2 * i, 2 * i, 2 * std::min(a, b), 2 * std::max(a, b)));
  }
  return best;
}

bool is_attached(const Configuration& cfg, DualSite p) {
  const long long d = contour_sq_distance_local(cfg, p);
  return d == 1 || d == 2;
}

std::vector<DualSite> attached_in_columns(const Configuration& cfg, int x2_lo, int x2_hi) {
  std::vector<DualSite> out;
  const int L = cfg.length();
  if (L == 0) return out;
  const int c_lo = std::max(-1, floor_div2(x2_lo - 1));
  const int c_hi = std::min(L, floor_div2(x2_hi - 1));
  for (int c = c_lo; c <= c_hi; ++c) {
    const int x2 = 2 * c + 1;
    if (x2 < x2_lo || x2 > x2_hi) continue;
    int lo = std::numeric_limits<int>::max();
    int hi = std::numeric_limits<int>::min();
    for (int i = std::max(1, c); i <= std::min(L, c + 2); ++i) {
      lo = std::min(lo, cfg[static_cast<std::size_t>(i - 1)]);
      hi = std::max(hi, cfg[static_cast<std::size_t>(i - 1)]);
    }
    for (int b = lo - 1; b <= hi; ++b) {
      const DualSite p{x2, 2 * b + 1};
      if (is_attached(cfg, p)) out.push_back(p);
    }
  }
  return out;
}

std::vector<DualSite> attached_sites(const Configuration& cfg) {
  return attached_in_columns(cfg, -1, 2 * cfg.length() + 1);
}

}  // namespace sos::model
