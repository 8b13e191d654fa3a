#include "sos/dynamics/rates.hpp"

#include <algorithm>
#include <cmath>

#include "sos/core/error.hpp"
#include "sos/core/numeric.hpp"
#include "sos/dynamics/rng.hpp"
#include "sos/model/energy.hpp"

namespace sos::dynamics {

using model::Configuration;
using model::ModelParams;

double jump_rate(const Configuration& cfg, Move move, const ModelParams& params) {
  if (move.site < 1 || move.site > cfg.length() || (move.direction != 1 && move.direction != -1)) {
    throw PreconditionError("move out of range");
  }
  if (!model::has_mass(cfg, params)) return 0.0;
  const double d = model::log_weight_change(cfg, move.site, move.direction, params);
  return d == kNegInf ? 0.0 : std::exp(0.5 * d);
}

double long_range_move_bound(const ModelParams& params) {
  // A move of phi_k only alters the contour inside [k-1, k] x [phi_k, phi_k + 1]
  // (or the unit square below), so attachment can only change on the 3 x 3
  // block of dual sites around it. Translates missing the block keep their status.
  std::vector<model::DualSite> block;
  for (int x2 = -3; x2 <= 1; x2 += 2)
    for (int y2 = -1; y2 <= 3; y2 += 2) block.push_back({x2, y2});
  double wbar = 0.0;
  for (const auto& s : params.catalog.shapes()) {
    if (s.weight() == 0.0) continue;
    std::vector<model::LatticeOffset> t;
    for (const auto& a : block)
      for (const auto& p : s.sites()) t.push_back(a - p);
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
    wbar += std::abs(s.weight()) * static_cast<double>(t.size());
  }
  return wbar;
}

double rate_bound(const ModelParams& params) {
  // |dH| <= 2 and |dW| <= wbar, rates are exp(d/2).
  return std::exp(params.beta + 0.5 * long_range_move_bound(params));
}

namespace {

struct RatioScan {
  const ModelParams& constrained;
  ModelParams auxiliary;
  RateRatioReport report;

  void visit(const Configuration& cfg) {
    ++report.states_examined;
    for (int k = 1; k <= cfg.length(); ++k) {
      for (int d : {1, -1}) {
        const Move mv{k, d};
        const double c = jump_rate(cfg, mv, constrained);
        const double cbar = jump_rate(cfg, mv, auxiliary);
        ++report.moves_examined;
        if (c == 0.0) {
          if (cbar > 0.0) ++report.edge_moves;
          continue;
        }
        const double dev = std::abs(cbar / c - 1.0);
        if (dev > report.deviation || report.argmax.length() == 0) {
          report.deviation = std::max(report.deviation, dev);
          report.argmax = cfg;
          report.argmax_move = mv;
        }
      }
    }
  }
};

}  // namespace

RateRatioReport rate_ratio_deviation(const ModelParams& params, long long sample_size, long long enumeration_cap,
                                     std::uint64_t seed) {
  params.validate();
  if (params.kind != model::MeasureKind::constrained) throw PreconditionError("kind: constrained measure required");
  if (params.height_bound() != std::max(1, params.L / 2)) throw PreconditionError("M: must equal floor(L/2)");
  const int a = params.region_a_bound();
  RatioScan scan{params, params.with_kind(model::MeasureKind::auxiliary), {}};

  const double slice = std::pow(2.0 * a + 1.0, params.L);
  if (slice <= static_cast<double>(enumeration_cap)) {
    scan.report.exhaustive = true;
    std::vector<int> h(static_cast<std::size_t>(params.L), -a);
    while (true) {
      scan.visit(Configuration(h));
      std::size_t i = 0;
      while (i < h.size() && h[i] == a) h[i++] = -a;
      if (i == h.size()) break;
      ++h[i];
    }
    return scan.report;
  }

  // Structured probes: the largest deviations sit where the profile touches the
  // top or bottom of A, so flat profiles and single spikes at +-a are scanned.
  for (int v = -a; v <= a; ++v) scan.visit(Configuration::flat(params.L, v));
  for (int k = 0; k < params.L; ++k) {
    for (int v : {-a, a}) {
      for (int base : {0, v > 0 ? a - 1 : 1 - a}) {
        Configuration c = Configuration::flat(params.L, base);
        c[static_cast<std::size_t>(k)] = v;
        scan.visit(c);
      }
    }
  }
  // Metropolis chain for mu restricted to A, started flat.
  CounterRng rng({seed, 0});
  Configuration cur = Configuration::flat(params.L, 0);
  const long long thin = params.L;
  for (long long s = 0; s < sample_size * thin; ++s) {
    const int k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(params.L)));
    const int d = rng.uniform() < 0.5 ? 1 : -1;
    if (std::abs(cur[static_cast<std::size_t>(k - 1)] + d) <= a) {
      const double dl = model::log_weight_change(cur, k, d, params);
      if (dl >= 0.0 || rng.uniform() < std::exp(dl)) cur[static_cast<std::size_t>(k - 1)] += d;
    }
    if ((s + 1) % thin == 0) scan.visit(cur);
  }
  return scan.report;
}

nlohmann::json to_json(const RateRatioReport& r) {
  return {{"deviation", r.deviation},
          {"argmax", r.argmax.to_string()},
          {"argmax_move", {{"k", r.argmax_move.site}, {"d", r.argmax_move.direction}}},
          {"edge_moves", r.edge_moves},
          {"moves_examined", r.moves_examined},
          {"states_examined", r.states_examined},
          {"exhaustive", r.exhaustive}};
}

}  // namespace sos::dynamics
