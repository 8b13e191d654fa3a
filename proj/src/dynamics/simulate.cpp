#include "sos/dynamics/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "sos/core/error.hpp"
#include "sos/model/energy.hpp"

namespace sos::dynamics {

using model::Configuration;
using model::ModelParams;

GillespieChain::GillespieChain(Configuration start, const ModelParams& params)
    : params_(params), cfg_(std::move(start)), rates_(2 * static_cast<std::size_t>(cfg_.length()), 0.0) {
  if (cfg_.length() != params_.L) throw PreconditionError("start: length does not match L");
  if (!model::has_mass(cfg_, params_)) throw PreconditionError("start: configuration has zero mass");
  if (!params_.catalog.is_zero()) {
    int width = 0;
    for (const auto& s : params_.catalog.shapes()) width = std::max(width, (s.x2_hi() - s.x2_lo()) / 2);
    // attached sites in a column depend on the pieces two columns away on
    // either side, and a translate spans `width` columns
    radius_ = width + 4;
  }
  refresh(1, cfg_.length());
}

void GillespieChain::refresh(int lo_site, int hi_site) {
  lo_site = std::max(1, lo_site);
  hi_site = std::min(cfg_.length(), hi_site);
  for (int k = lo_site; k <= hi_site; ++k) {
    for (int d : {1, -1}) rates_[slot({k, d})] = jump_rate(cfg_, {k, d}, params_);
  }
  total_ = 0.0;
  for (double r : rates_) total_ += r;
}

std::vector<double> GillespieChain::fresh_rates() const {
  std::vector<double> r(rates_.size());
  for (int k = 1; k <= cfg_.length(); ++k)
    for (int d : {1, -1}) r[slot({k, d})] = jump_rate(cfg_, {k, d}, params_);
  return r;
}

std::optional<std::pair<double, Move>> GillespieChain::step(CounterRng& rng) {
  if (!(total_ > 0.0)) return std::nullopt;
  const double dt = rng.exponential(total_);
  const double target = rng.uniform() * total_;
  double acc = 0.0;
  std::size_t chosen = rates_.size();
  for (std::size_t i = 0; i < rates_.size(); ++i) {
    if (rates_[i] <= 0.0) continue;
    chosen = i;  // last positive slot absorbs round-off at the top end
    acc += rates_[i];
    if (target < acc) break;
  }
  const Move m{static_cast<int>(chosen / 2) + 1, chosen % 2 == 0 ? 1 : -1};
  cfg_[static_cast<std::size_t>(m.site - 1)] += m.direction;
  refresh(m.site - radius_, m.site + radius_);
  return std::make_pair(dt, m);
}

Trajectory simulate(const Configuration& start, double horizon, const ModelParams& params, RngSpec spec,
                    bool record) {
  if (!(horizon >= 0.0)) throw PreconditionError("horizon: must be nonnegative");
  GillespieChain chain(start, params);
  CounterRng rng(spec);
  Trajectory traj;
  traj.start = start;
  traj.horizon = horizon;
  double t = 0.0;
  while (true) {
    // peek the holding time without committing the move past the horizon
    if (!(chain.total_rate() > 0.0)) {
      traj.absorbed = true;
      break;
    }
    CounterRng probe = rng;
    const double dt = probe.exponential(chain.total_rate());
    if (t + dt > horizon) break;
    const auto ev = chain.step(rng);
    t += ev->first;
    ++traj.jumps;
    if (record) traj.events.push_back({t, ev->second, true});
  }
  traj.final_state = chain.state();
  return traj;
}

ExitSample exit_time(const Configuration& start, const ModelParams& params, RngSpec spec, double horizon) {
  if (!params.in_region_a(start)) throw PreconditionError("start: must lie in region A");
  if (params.kind == model::MeasureKind::constrained && params.region_a_bound() >= params.height_bound() &&
      !std::isfinite(horizon))
    throw PreconditionError("eps: region A covers the whole box, the exit time is infinite");
  GillespieChain chain(start, params);
  CounterRng rng(spec);
  const int a = params.region_a_bound();
  ExitSample out;
  double t = 0.0;
  while (true) {
    const auto ev = chain.step(rng);
    if (!ev) throw Error("absorbing state reached inside A");
    if (t + ev->first > horizon) {
      out.time = horizon;
      out.censored = true;
      return out;
    }
    t += ev->first;
    ++out.jumps;
    if (std::abs(chain.state()[static_cast<std::size_t>(ev->second.site - 1)]) > a) {
      out.time = t;
      return out;
    }
  }
}

void write_trajectory(std::ostream& out, const Trajectory& traj, const nlohmann::json& header) {
  out << header.dump() << '\n';
  for (const auto& e : traj.events) {
    nlohmann::json j{{"t", e.time}, {"k", e.move.site}, {"d", e.move.direction}};
    out << j.dump() << '\n';
  }
}

}  // namespace sos::dynamics
