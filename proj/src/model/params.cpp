#include "sos/model/params.hpp"

#include <cmath>

#include "sos/core/error.hpp"

namespace sos::model {

std::string to_string(MeasureKind kind) { return kind == MeasureKind::constrained ? "constrained" : "auxiliary"; }

MeasureKind measure_kind_from_string(const std::string& text) {
  if (text == "constrained") return MeasureKind::constrained;
  if (text == "auxiliary") return MeasureKind::auxiliary;
  throw PreconditionError("kind: expected 'constrained' or 'auxiliary', got '" + text + "'");
}

void ModelParams::validate() const {
  if (L < 1) throw PreconditionError("L: must be a positive integer");
  if (M && *M < 1) throw PreconditionError("M: must be a positive integer or infinite");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw PreconditionError("beta: must be a positive finite real");
  if (!M) throw PreconditionError("M: both measure kinds need a finite height bound");
  if (!(eps > 0.0 && eps < 1.0)) throw PreconditionError("eps: must lie in (0,1)");
  if (!(alpha > 0.0 && alpha < 1.0)) throw PreconditionError("alpha: must lie in (0,1)");
}

int ModelParams::height_bound() const {
  if (!M) throw PreconditionError("M: a finite height bound is required here");
  return *M;
}

Strip ModelParams::strip() const {
  return kind == MeasureKind::constrained ? Strip::box(L, height_bound()) : Strip::unbounded(L);
}

int ModelParams::region_a_bound() const {
  // small tolerance so that exact products like 0.9 * 20 / 2 floor correctly
  return static_cast<int>(std::floor((1.0 - eps) * L / 2.0 + 1e-12));
}

int ModelParams::region_b_bound() const { return static_cast<int>(std::floor(alpha * L + 1e-12)); }

ModelParams ModelParams::half_box(int L, double beta, PotentialCatalog catalog, double eps, double alpha) {
  ModelParams p;
  p.L = L;
  p.M = std::max(1, L / 2);
  p.beta = beta;
  p.catalog = std::move(catalog);
  p.kind = MeasureKind::constrained;
  p.eps = eps;
  p.alpha = alpha;
  return p;
}

nlohmann::json to_json(const ModelParams& params) {
  nlohmann::json j;
  j["L"] = params.L;
  if (params.M) {
    j["M"] = *params.M;
  } else {
    j["M"] = "infinite";
  }
  j["beta"] = params.beta;
  j["kind"] = to_string(params.kind);
  j["eps"] = params.eps;
  j["alpha"] = params.alpha;
  j["catalog"] = catalog_to_json(params.catalog);
  return j;
}

}  // namespace sos::model
