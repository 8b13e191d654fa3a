#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <ostream>
#include <vector>

#include <nlohmann/json.hpp>

#include "sos/dynamics/rates.hpp"
#include "sos/dynamics/rng.hpp"
#include "sos/model/configuration.hpp"
#include "sos/model/params.hpp"

namespace sos::dynamics {

struct TrajectoryEvent {
  double time = 0.0;
  Move move;
  bool accepted = true;
};

struct Trajectory {
  model::Configuration start;
  model::Configuration final_state;
  std::vector<TrajectoryEvent> events;
  double horizon = 0.0;
  long long jumps = 0;
  bool absorbed = false;  // total rate vanished before the horizon
};

/// Gillespie realisation of the single-site dynamics of params.
///
/// Keeps the 2L move rates and refreshes only those that a jump can change.
class GillespieChain {
 public:
  GillespieChain(model::Configuration start, const model::ModelParams& params);

  const model::Configuration& state() const noexcept { return cfg_; }
  double total_rate() const noexcept { return total_; }
  double rate(Move m) const { return rates_[slot(m)]; }

  /// Draws the holding time and the move, applies it, returns (dt, move);
  /// nullopt when the total rate is zero.
  std::optional<std::pair<double, Move>> step(CounterRng& rng);

  /// Rates recomputed from scratch (for checking the incremental bookkeeping).
  std::vector<double> fresh_rates() const;
  const std::vector<double>& rates() const noexcept { return rates_; }

 private:
  static std::size_t slot(Move m) { return 2 * static_cast<std::size_t>(m.site - 1) + (m.direction > 0 ? 0 : 1); }
  void refresh(int lo_site, int hi_site);

  const model::ModelParams& params_;
  model::Configuration cfg_;
  std::vector<double> rates_;
  double total_ = 0.0;
  int radius_ = 1;
};

/// Runs the dynamics from start up to the horizon. With record = false the
/// event list stays empty and only the final state and jump count are kept.
Trajectory simulate(const model::Configuration& start, double horizon, const model::ModelParams& params,
                    RngSpec rng, bool record = true);

struct ExitSample {
  double time = 0.0;
  bool censored = false;  // horizon reached inside A
  long long jumps = 0;
};

/// First jump time at which ||phi||_inf exceeds the region-A bound.
ExitSample exit_time(const model::Configuration& start, const model::ModelParams& params, RngSpec rng,
                     double horizon = std::numeric_limits<double>::infinity());

/// Trajectory dump: header line then one {"t","k","d"} object per line.
void write_trajectory(std::ostream& out, const Trajectory& traj, const nlohmann::json& header);

}  // namespace sos::dynamics
