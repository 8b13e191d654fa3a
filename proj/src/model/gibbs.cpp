#include "sos/model/gibbs.hpp"

#include <cmath>

#include "sos/core/error.hpp"
#include "sos/core/numeric.hpp"
#include "sos/model/energy.hpp"

namespace sos::model {

GibbsTable::GibbsTable(const ModelParams& params, int R, std::size_t cap)
    : params_(params), R_(R), space_(StateSpace::for_params(params, R, cap)) {
  params_.validate();
  log_weights_.resize(space_.size());
  LogSumExp acc;
  for (std::size_t i = 0; i < space_.size(); ++i) {
    log_weights_[i] = model::log_weight(space_.configuration(i), params_);
    acc.add(log_weights_[i]);
  }
  log_z_ = acc.value();
  if (log_z_ == kNegInf) throw Error("enumerated space carries no mass");
  probs_.resize(space_.size());
  for (std::size_t i = 0; i < space_.size(); ++i) probs_[i] = std::exp(log_weights_[i] - log_z_);
}

double GibbsTable::probability(const Configuration& cfg) const {
  const auto idx = space_.index_of(cfg);
  return idx ? probs_[*idx] : 0.0;
}

namespace {

PartitionResult partition_at(const ModelParams& params, int R, std::size_t cap) {
  const StateSpace space = StateSpace::for_params(params, R, cap);
  LogSumExp acc;
  for (std::size_t i = 0; i < space.size(); ++i) acc.add(log_weight(space.configuration(i), params));
  PartitionResult r;
  r.log_value = acc.value();
  r.value = std::exp(r.log_value);
  r.R = R;
  r.space_size = space.size();
  return r;
}

}  // namespace

PartitionResult partition_function(const ModelParams& params, int R, std::size_t cap) {
  params.validate();
  PartitionResult r = partition_at(params, R, cap);
  if (params.kind == MeasureKind::auxiliary) {
    const PartitionResult next = partition_at(params, R + 1, cap);
    const double inc = -std::expm1(r.log_value - next.log_value);
    r.tail_increment = inc;
    r.converged = std::abs(inc) < 1e-12;
  }
  return r;
}

double probability(const Configuration& cfg, const ModelParams& params, int R, std::size_t cap) {
  params.validate();
  const double lw = log_weight(cfg, params);
  if (lw == kNegInf) return 0.0;
  const StateSpace space = StateSpace::for_params(params, R, cap);
  if (!space.index_of(cfg)) return 0.0;
  return std::exp(lw - partition_at(params, R, cap).log_value);
}

}  // namespace sos::model
