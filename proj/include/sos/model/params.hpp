#pragma once

#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "sos/model/catalog.hpp"
#include "sos/model/configuration.hpp"
#include "sos/model/geometry.hpp"

namespace sos::model {

/// Which Gibbs measure a parameter set describes.
///  - constrained: indicator ||phi||_inf <= M, long-range part restricted to the box strip.
///  - auxiliary:   indicator |phi_1| <= M only, long-range part over the unbounded strip.
enum class MeasureKind { constrained, auxiliary };

std::string to_string(MeasureKind kind);
MeasureKind measure_kind_from_string(const std::string& text);

struct ModelParams {
  int L = 1;
  std::optional<int> M = 1;  // nullopt: infinite height bound
  double beta = 3.0;
  PotentialCatalog catalog;
  MeasureKind kind = MeasureKind::constrained;
  double eps = 0.1;
  double alpha = 0.2;

  /// Throws PreconditionError naming the offending field.
  void validate() const;

  /// Finite height bound; throws when M is infinite.
  int height_bound() const;

  /// The strip in which long-range shapes must lie for this measure kind.
  Strip strip() const;

  /// Exit region A = {||phi||_inf <= (1-eps) L / 2}; returns the integer sup-norm bound.
  int region_a_bound() const;
  bool in_region_a(const Configuration& cfg) const { return cfg.within(region_a_bound()); }
  /// Start region B = {||phi||_inf <= alpha L}.
  int region_b_bound() const;
  bool in_region_b(const Configuration& cfg) const { return cfg.within(region_b_bound()); }

  ModelParams with_kind(MeasureKind k) const {
    ModelParams p = *this;
    p.kind = k;
    return p;
  }

  /// The exit-time box: constrained kind with M = floor(L/2).
  static ModelParams half_box(int L, double beta, PotentialCatalog catalog, double eps = 0.1, double alpha = 0.2);
};

nlohmann::json to_json(const ModelParams& params);

}  // namespace sos::model
