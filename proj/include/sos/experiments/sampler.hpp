#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sos/dynamics/rng.hpp"
#include "sos/model/configuration.hpp"
#include "sos/model/params.hpp"

namespace sos::experiments {

enum class SamplerMethod { transfer_matrix, enumeration, metropolis };
std::string to_string(SamplerMethod m);

struct SamplerDiagnostics {
  SamplerMethod method = SamplerMethod::enumeration;
  std::size_t support = 0;  // enumerated states (enumeration only)
  int chains = 0;
  long long burn_in_sweeps = 0;
  double r_hat = 1.0;
  bool converged = true;
};

nlohmann::json to_json(const SamplerDiagnostics& d);

/// Draws from mu(. | ||phi||_inf <= bound) for a constrained parameter set.
///
/// Zero potential: exact, through the transfer matrix of exp(-beta |h - h'|).
/// Otherwise exact by enumeration when L <= 6, else a Metropolis chain on the
/// box mixing independence proposals from the zero-potential law with
/// single-site moves; the burn-in is doubled until the Gelman-Rubin statistic
/// of four dispersed chains drops below r_hat_target.
class ConditionedSampler {
 public:
  ConditionedSampler(const model::ModelParams& params, int bound, std::uint64_t seed = 1, double r_hat_target = 1.05);

  model::Configuration draw(dynamics::RngSpec rng) const;
  const SamplerDiagnostics& diagnostics() const noexcept { return diag_; }
  int bound() const noexcept { return bound_; }

 private:
  model::Configuration free_draw(dynamics::CounterRng& rng) const;
  model::Configuration metropolis(model::Configuration start, long long sweeps, dynamics::CounterRng& rng,
                                  std::vector<double>* trace) const;

  model::ModelParams params_;
  int bound_;
  SamplerDiagnostics diag_;
  std::vector<std::vector<double>> transfer_;  // normalised backward vectors per site
  std::vector<model::Configuration> states_;
  std::vector<double> cumulative_;
};

}  // namespace sos::experiments
