#pragma once

#include "sos/model/catalog.hpp"
#include "sos/model/configuration.hpp"
#include "sos/model/geometry.hpp"
#include "sos/model/params.hpp"

namespace sos::model {

/// Sum of |phi_{k+1} - phi_k| over the chain (free boundary).
long long hamiltonian(const Configuration& cfg);

/// Long-range energy: sum of shape weights over translates that meet the
/// attached set of cfg and lie inside the strip. Each translate counts once.
double long_range_energy(const Configuration& cfg, const PotentialCatalog& catalog, const Strip& strip);

/// Long-range energy in the strip matching params.kind.
double long_range_energy(const Configuration& cfg, const ModelParams& params);

/// Unnormalised log Gibbs weight; -infinity marks a zero-mass configuration.
double log_weight(const Configuration& cfg, const ModelParams& params);

/// True when the measure in params gives cfg positive mass.
bool has_mass(const Configuration& cfg, const ModelParams& params);

/// log_weight(phi + dir * delta_site) - log_weight(phi) using only the
/// geometry near the moved column. site is 1-based, dir is +1 or -1.
/// Returns -infinity when the target has zero mass; phi must have positive mass.
double log_weight_change(const Configuration& cfg, int site, int dir, const ModelParams& params);

/// Change of the long-range energy under phi -> phi + dir * delta_site (local evaluation).
double long_range_energy_change(const Configuration& cfg, int site, int dir, const PotentialCatalog& catalog,
                                const Strip& strip);

/// Log weight of the gradient measure: -beta * sum_{i>=2} |eta_i| - W^inf(T(eta)),
/// or -infinity when |eta_1| > M. Requires the auxiliary kind.
double gradient_log_weight(const GradientConfiguration& g, const ModelParams& params);

}  // namespace sos::model
