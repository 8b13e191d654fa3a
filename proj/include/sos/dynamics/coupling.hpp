#pragma once

#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sos/dynamics/rates.hpp"
#include "sos/dynamics/rng.hpp"
#include "sos/model/configuration.hpp"
#include "sos/model/params.hpp"

namespace sos::dynamics {

/// Which coupled process moved at a mark.
enum class Mover { both, phi, phibar };
std::string to_string(Mover m);

struct CouplingEvent {
  double time = 0.0;
  Move move;
  Mover mover = Mover::both;
};

struct CouplingTrace {
  std::vector<CouplingEvent> events;  // marks at which at least one process moved
  std::optional<double> sigma;        // first time the profiles differ
  std::optional<double> tau;          // exit of the constrained process from A
  std::optional<double> tau_bar;      // exit of the auxiliary process from A
  model::Configuration phi;           // final states
  model::Configuration phibar;
  double end_time = 0.0;  // time at which the construction stopped
  long long marks = 0;
};

struct CouplingOptions {
  bool record_events = true;
  /// Stop as soon as every requested time is known (or the horizon is hit).
  bool need_sigma = true;
  bool need_tau = true;
  bool need_tau_bar = true;
};

/// Basic coupling of the constrained process (params) and the auxiliary
/// process (params with the auxiliary kind). Marks arrive at total rate
/// 2 L c_max with a uniform site and direction; at a mark each process jumps
/// iff its own rate exceeds U c_max.
CouplingTrace couple(const model::Configuration& start, double horizon, const model::ModelParams& params,
                     RngSpec rng, const CouplingOptions& options = {});

/// Coupling dump: header line then one {"t","k","d","proc"} object per line.
void write_coupling(std::ostream& out, const CouplingTrace& trace, const nlohmann::json& header);

}  // namespace sos::dynamics
