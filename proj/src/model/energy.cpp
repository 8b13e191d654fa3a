#include "sos/model/energy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iterator>

#include "sos/core/error.hpp"
#include "sos/core/numeric.hpp"

namespace sos::model {

long long hamiltonian(const Configuration& cfg) {
  long long h = 0;
  for (int k = 0; k + 1 < cfg.length(); ++k) h += std::abs(cfg[k + 1] - cfg[k]);
  return h;
}

namespace {

bool translate_inside(const PotentialShape& s, LatticeOffset t, const Strip& strip) {
  return strip.contains_box(s.x2_lo() + t.dx2, s.x2_hi() + t.dx2, s.y2_lo() + t.dy2, s.y2_hi() + t.dy2);
}

bool translate_touches(const Configuration& cfg, const PotentialShape& s, LatticeOffset t) {
  return std::any_of(s.sites().begin(), s.sites().end(), [&](DualSite p) { return is_attached(cfg, p + t); });
}

// Offsets t such that (S + t) contains at least one of the given sites.
std::vector<LatticeOffset> offsets_through(const PotentialShape& s, const std::vector<DualSite>& sites) {
  std::vector<LatticeOffset> out;
  out.reserve(sites.size() * s.size());
  for (const DualSite& a : sites)
    for (const DualSite& p : s.sites()) out.push_back(a - p);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

double long_range_energy(const Configuration& cfg, const PotentialCatalog& catalog, const Strip& strip) {
  if (catalog.is_zero()) return 0.0;
  const std::vector<DualSite> attached = attached_sites(cfg);
  double w = 0.0;
  for (const PotentialShape& s : catalog.shapes()) {
    if (s.weight() == 0.0) continue;
    for (LatticeOffset t : offsets_through(s, attached)) {
      if (translate_inside(s, t, strip)) w += s.weight();
    }
  }
  return w;
}

double long_range_energy(const Configuration& cfg, const ModelParams& params) {
  return long_range_energy(cfg, params.catalog, params.strip());
}

bool has_mass(const Configuration& cfg, const ModelParams& params) {
  if (cfg.length() != params.L) return false;
  const int M = params.height_bound();
  if (params.kind == MeasureKind::constrained) return cfg.within(M);
  return std::abs(cfg[0]) <= M;
}

double log_weight(const Configuration& cfg, const ModelParams& params) {
  if (cfg.length() != params.L) throw PreconditionError("configuration length does not match L");
  if (!has_mass(cfg, params)) return kNegInf;
  const double w = long_range_energy(cfg, params);
  if (!std::isfinite(w)) throw Error("long-range energy is not finite");
  return -params.beta * static_cast<double>(hamiltonian(cfg)) - w;
}

double long_range_energy_change(const Configuration& cfg, int site, int dir, const PotentialCatalog& catalog,
                                const Strip& strip) {
  if (catalog.is_zero()) return 0.0;
  Configuration moved = cfg;
  moved[static_cast<std::size_t>(site - 1)] += dir;
  // Moving phi_k only alters the contour pieces at x in [k-1, k], so attached
  // sites can only change in the columns x = k - 3/2, k - 1/2, k + 1/2.
  const int lo = 2 * site - 3;
  const int hi = 2 * site + 1;
  const std::vector<DualSite> before = attached_in_columns(cfg, lo, hi);
  const std::vector<DualSite> after = attached_in_columns(moved, lo, hi);
  std::vector<DualSite> changed;
  std::set_symmetric_difference(before.begin(), before.end(), after.begin(), after.end(), std::back_inserter(changed));
  if (changed.empty()) return 0.0;
  double dw = 0.0;
  for (const PotentialShape& s : catalog.shapes()) {
    if (s.weight() == 0.0) continue;
    for (LatticeOffset t : offsets_through(s, changed)) {
      if (!translate_inside(s, t, strip)) continue;
      const bool was = translate_touches(cfg, s, t);
      const bool is = translate_touches(moved, s, t);
      if (was != is) dw += is ? s.weight() : -s.weight();
    }
  }
  return dw;
}

double log_weight_change(const Configuration& cfg, int site, int dir, const ModelParams& params) {
  const int L = cfg.length();
  const std::size_t i = static_cast<std::size_t>(site - 1);
  const int M = params.height_bound();
  const int target = cfg[i] + dir;
  if (params.kind == MeasureKind::constrained) {
    if (std::abs(target) > M) return kNegInf;
  } else if (site == 1 && std::abs(target) > M) {
    return kNegInf;
  }
  long long dh = 0;
  if (site > 1) dh += std::abs(target - cfg[i - 1]) - std::abs(cfg[i] - cfg[i - 1]);
  if (site < L) dh += std::abs(cfg[i + 1] - target) - std::abs(cfg[i + 1] - cfg[i]);
  const double dw = long_range_energy_change(cfg, site, dir, params.catalog, params.strip());
  return -params.beta * static_cast<double>(dh) - dw;
}

double gradient_log_weight(const GradientConfiguration& g, const ModelParams& params) {
  if (params.kind != MeasureKind::auxiliary) throw PreconditionError("gradient weights are defined for the auxiliary kind");
  if (g.length() != params.L) throw PreconditionError("gradient configuration length does not match L");
  if (std::abs(g[0]) > params.height_bound()) return kNegInf;
  long long h = 0;
  for (int i = 1; i < g.length(); ++i) h += std::abs(g[static_cast<std::size_t>(i)]);
  const double w = long_range_energy(from_gradient(g), params.catalog, Strip::unbounded(params.L));
  return -params.beta * static_cast<double>(h) - w;
}

}  // namespace sos::model
