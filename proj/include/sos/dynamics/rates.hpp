#pragma once

#include <nlohmann/json.hpp>

#include "sos/model/configuration.hpp"
#include "sos/model/params.hpp"

namespace sos::dynamics {

/// phi -> phi + direction * delta_site.
struct Move {
  int site = 1;       // 1..L
  int direction = 1;  // +1 or -1

  bool operator==(const Move&) const = default;
};

/// c(phi, phi + move) = exp((log mu(psi) - log mu(phi)) / 2), or 0 when either side has no mass.
double jump_rate(const model::Configuration& cfg, Move move, const model::ModelParams& params);

/// w: sum of |weight| over all translates meeting the 3 x 3 block of dual sites
/// around a moved piece, which bounds |W(after) - W(before)| for one move.
double long_range_move_bound(const model::ModelParams& params);

/// Upper bound on every rate of both the constrained and the auxiliary process
/// for these beta and catalog: exp(beta + w / 2).
double rate_bound(const model::ModelParams& params);

/// Result of comparing auxiliary and constrained rates on region A.
struct RateRatioReport {
  double deviation = 0.0;  // max |cbar/c - 1| over moves from A with c > 0
  model::Configuration argmax;
  Move argmax_move;
  /// Moves from A with c = 0 but cbar > 0 (the box edge); excluded from the ratio.
  long long edge_moves = 0;
  long long moves_examined = 0;
  long long states_examined = 0;
  bool exhaustive = false;
};

/// sup over phi in A and moves of |cbar/c - 1|. Enumerates A when it holds at
/// most `enumeration_cap` states; otherwise inspects `sample_size` states from
/// a Metropolis chain for mu restricted to A plus flat and single-spike probes.
RateRatioReport rate_ratio_deviation(const model::ModelParams& params, long long sample_size,
                                     long long enumeration_cap = 2'000'000, std::uint64_t seed = 1);

nlohmann::json to_json(const RateRatioReport& r);

}  // namespace sos::dynamics
