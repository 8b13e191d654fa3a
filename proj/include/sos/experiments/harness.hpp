#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "sos/experiments/report.hpp"
#include "sos/experiments/stats.hpp"
#include "sos/model/catalog.hpp"
#include "sos/model/params.hpp"
#include "sos/spectral/gradient.hpp"

namespace sos::experiments {

struct ScalingPoint {
  int L = 0;
  int M = 0;
  double beta = 0.0;
  double metric = 0.0;
  double metric_se = 0.0;
  std::size_t samples = 0;
  std::size_t censored = 0;
  bool excluded = false;  // left out of the fit
  nlohmann::json extra = nlohmann::json::object();
};

struct ScalingReport {
  std::string name;
  nlohmann::json config;
  std::vector<ScalingPoint> points;
  std::optional<LinearFit> fit;  // only with >= 4 usable points
  std::vector<std::string> warnings;
  bool pass = false;
  std::string verdict;
};

nlohmann::json to_json(const ScalingPoint& p);
nlohmann::json to_json(const ScalingReport& r);
CsvTable to_table(const ScalingReport& r);

struct ExitScalingConfig {
  std::vector<int> Ls{8, 12, 16, 24};
  double beta = 3.0;
  double eps = 0.1;
  double alpha = 0.2;
  int replicas = 200;
  std::uint64_t seed = 1;
  double horizon = std::numeric_limits<double>::infinity();
  model::PotentialCatalog catalog = model::PotentialCatalog::zero();
  double slope_lo = 2.3;
  double slope_hi = 3.7;
  /// Grid points with L at most this also get the median of the exact killed
  /// survival curve started from mu(. | B).
  int exact_max_L = 4;
};
nlohmann::json to_json(const ExitScalingConfig& c);

/// Median exit time from A for the box M = L/2, started from mu(. | B); the
/// verdict is the log-log slope of the medians against L.
ScalingReport exit_time_scaling(const ExitScalingConfig& config);

struct GapScalingConfig {
  std::vector<std::pair<int, int>> grid;  // (L, M)
  double beta = 2.0;
  int R = 4;
  model::PotentialCatalog catalog = model::PotentialCatalog::zero();
  double band_factor = 10.0;
  /// Also solve at R - 1 and flag points whose gap moves by more than this.
  double truncation_tolerance = 0.01;
  bool check_truncation = true;
};
nlohmann::json to_json(const GapScalingConfig& c);
std::vector<std::pair<int, int>> default_gap_grid();

/// lambda_1 of the auxiliary generator times L (L v M^2) over the grid.
ScalingReport gap_scaling(const GapScalingConfig& config);

struct CouplingFidelityConfig {
  std::vector<int> Ls{8, 12, 16};
  // Tall bars reach the strip edge from inside A, so decouplings are seen at all three sizes.
  double beta = 2.0;
  double eps = 0.4;
  double t = 20.0;
  int replicas = 2000;
  std::uint64_t seed = 1;
  model::PotentialCatalog catalog = model::catalogs::vertical_bars(1.0, 6);
  int rate_ratio_samples = 2000;
  long long rate_ratio_enumeration_cap = 100000;
};
nlohmann::json to_json(const CouplingFidelityConfig& c);

/// P(sigma <= t, sigma <= taubar) started from mu(. | A), with 95% intervals,
/// normalised by L t; the verdict is that the normalised estimate decreases in L.
ScalingReport coupling_fidelity(const CouplingFidelityConfig& config);

struct RadonNikodymConfig {
  int L = 6;
  double beta = 3.0;
  double eps = 0.1;
  double alpha = 0.2;
  model::PotentialCatalog catalog = model::PotentialCatalog::zero();
  int R = 3;  // truncation for the auxiliary partition function
};
nlohmann::json to_json(const RadonNikodymConfig& c);

/// sup over A of mu(phi | B) / mubar(phi) against exp(w) / mubar(B), where w is
/// the oscillation of W^inf - W^{L/2} over B.
spectral::FormReport radon_nikodym_bound(const RadonNikodymConfig& config);

}  // namespace sos::experiments
