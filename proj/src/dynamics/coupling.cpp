#include "sos/dynamics/coupling.hpp"

#include <cmath>

#include "sos/core/error.hpp"
#include "sos/model/energy.hpp"

namespace sos::dynamics {

using model::Configuration;
using model::ModelParams;

std::string to_string(Mover m) {
  switch (m) {
    case Mover::both: return "both";
    case Mover::phi: return "phi";
    case Mover::phibar: return "phibar";
  }
  return "both";
}

CouplingTrace couple(const Configuration& start, double horizon, const ModelParams& params, RngSpec spec,
                     const CouplingOptions& options) {
  params.validate();
  if (params.kind != model::MeasureKind::constrained) throw PreconditionError("kind: coupling needs the constrained kind");
  const ModelParams aux = params.with_kind(model::MeasureKind::auxiliary);
  if (!model::has_mass(start, params) || !model::has_mass(start, aux)) {
    throw PreconditionError("start: must carry mass under both measures");
  }
  const double cmax = rate_bound(params);
  const int L = params.L;
  const int a = params.region_a_bound();
  const double clock = 2.0 * L * cmax;
  const double half_wbar = 0.5 * long_range_move_bound(params);
  // Upper bound on a move's rate from the local height change alone.
  auto cheap_bound = [&](const Configuration& c, const Move& m) {
    const auto k = static_cast<std::size_t>(m.site - 1);
    const int h = c[k];
    const int g = h + m.direction;
    int dh = 0;
    if (m.site > 1) dh += std::abs(g - c[k - 1]) - std::abs(h - c[k - 1]);
    if (m.site < L) dh += std::abs(g - c[k + 1]) - std::abs(h - c[k + 1]);
    return std::exp(-0.5 * params.beta * dh + half_wbar);
  };

  CouplingTrace tr;
  tr.phi = start;
  tr.phibar = start;
  if (!params.in_region_a(start)) {
    tr.tau = 0.0;
    tr.tau_bar = 0.0;
  }
  CounterRng rng(spec);
  bool apart = false;
  double t = 0.0;
  auto done = [&] {
    return (!options.need_sigma || tr.sigma) && (!options.need_tau || tr.tau) && (!options.need_tau_bar || tr.tau_bar);
  };
  while (!done()) {
    const double dt = rng.exponential(clock);
    if (t + dt > horizon) {
      t = horizon;
      break;
    }
    t += dt;
    ++tr.marks;
    const auto slot = rng.below(2 * static_cast<std::uint64_t>(L));
    const Move mv{static_cast<int>(slot / 2) + 1, slot % 2 == 0 ? 1 : -1};
    const double u = rng.uniform();
    const double level = u * cmax;
    const bool move_phi = cheap_bound(tr.phi, mv) > level && jump_rate(tr.phi, mv, params) > level;
    const bool move_bar = cheap_bound(tr.phibar, mv) > level && jump_rate(tr.phibar, mv, aux) > level;
    if (!move_phi && !move_bar) continue;
    const auto i = static_cast<std::size_t>(mv.site - 1);
    if (move_phi) tr.phi[i] += mv.direction;
    if (move_bar) tr.phibar[i] += mv.direction;
    if (options.record_events) {
      tr.events.push_back({t, mv, move_phi && move_bar ? Mover::both : move_phi ? Mover::phi : Mover::phibar});
    }
    if (!apart && move_phi != move_bar) {
      apart = true;
      tr.sigma = t;
    }
    if (!tr.tau && move_phi && std::abs(tr.phi[i]) > a) tr.tau = t;
    if (!tr.tau_bar && move_bar && std::abs(tr.phibar[i]) > a) tr.tau_bar = t;
  }
  tr.end_time = t;
  return tr;
}

void write_coupling(std::ostream& out, const CouplingTrace& trace, const nlohmann::json& header) {
  out << header.dump() << '\n';
  for (const auto& e : trace.events) {
    nlohmann::json j{{"t", e.time}, {"k", e.move.site}, {"d", e.move.direction}, {"proc", to_string(e.mover)}};
    out << j.dump() << '\n';
  }
}

}  // namespace sos::dynamics
