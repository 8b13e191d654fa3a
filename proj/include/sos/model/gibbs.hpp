#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "sos/model/configuration.hpp"
#include "sos/model/params.hpp"
#include "sos/model/state_space.hpp"

namespace sos::model {

/// Log weights and normalised probabilities of a measure on an enumerated space.
class GibbsTable {
 public:
  GibbsTable(const ModelParams& params, int R, std::size_t cap = kDefaultSizeCap);

  const StateSpace& space() const noexcept { return space_; }
  const ModelParams& params() const noexcept { return params_; }
  int truncation() const noexcept { return R_; }
  std::size_t size() const noexcept { return space_.size(); }

  double log_weight(std::size_t idx) const { return log_weights_[idx]; }
  const std::vector<double>& log_weights() const noexcept { return log_weights_; }
  double log_partition() const noexcept { return log_z_; }
  double probability(std::size_t idx) const { return probs_[idx]; }
  const std::vector<double>& probabilities() const noexcept { return probs_; }

  /// Probability of cfg, exactly 0 for zero-mass or unenumerated configurations.
  double probability(const Configuration& cfg) const;

 private:
  ModelParams params_;
  int R_;
  StateSpace space_;
  std::vector<double> log_weights_;
  std::vector<double> probs_;
  double log_z_;
};

struct PartitionResult {
  double value = 0.0;
  double log_value = 0.0;
  int R = 0;
  std::size_t space_size = 0;
  /// Auxiliary kind only: (Z_{R+1} - Z_R) / Z_{R+1}.
  std::optional<double> tail_increment;
  bool converged = true;
};

/// Partition function on the truncated space; for the auxiliary kind the tail
/// increment to truncation R + 1 is also evaluated and flagged converged below 1e-12.
PartitionResult partition_function(const ModelParams& params, int R, std::size_t cap = kDefaultSizeCap);

/// mu(cfg) on the truncated space with truncation R.
double probability(const Configuration& cfg, const ModelParams& params, int R, std::size_t cap = kDefaultSizeCap);

}  // namespace sos::model
