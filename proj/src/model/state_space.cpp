#include "sos/model/state_space.hpp"

#include "sos/core/error.hpp"

namespace sos::model {

StateSpace::StateSpace(Coordinates coords, std::vector<int> lo, std::vector<int> hi, std::size_t cap)
    : coords_(coords), lo_(std::move(lo)), hi_(std::move(hi)) {
  if (lo_.empty()) throw PreconditionError("state space needs at least one coordinate");
  double estimate = 1.0;
  for (std::size_t i = 0; i < lo_.size(); ++i) {
    if (hi_[i] < lo_[i]) throw PreconditionError("empty coordinate range");
    estimate *= static_cast<double>(hi_[i] - lo_[i] + 1);
  }
  if (estimate > static_cast<double>(cap)) throw SizeCapError(estimate, cap);
  stride_.resize(lo_.size());
  std::size_t s = 1;
  for (std::size_t i = 0; i < lo_.size(); ++i) {
    stride_[i] = s;
    s *= static_cast<std::size_t>(hi_[i] - lo_[i] + 1);
  }
  size_ = s;
}

StateSpace StateSpace::height_box(int L, int M, std::size_t cap) {
  if (L < 1 || M < 0) throw PreconditionError("height box needs L >= 1 and M >= 0");
  return StateSpace(Coordinates::heights, std::vector<int>(L, -M), std::vector<int>(L, M), cap);
}

StateSpace StateSpace::gradient_box(int L, int M, int R, std::size_t cap) {
  if (L < 1 || M < 0 || R < 0) throw PreconditionError("gradient box needs L >= 1, M >= 0, R >= 0");
  std::vector<int> lo(L, -R), hi(L, R);
  lo[0] = -M;
  hi[0] = M;
  return StateSpace(Coordinates::gradients, std::move(lo), std::move(hi), cap);
}

StateSpace StateSpace::for_params(const ModelParams& params, int R, std::size_t cap) {
  if (params.kind == MeasureKind::constrained) return height_box(params.L, params.height_bound(), cap);
  return gradient_box(params.L, params.height_bound(), R, cap);
}

std::vector<int> StateSpace::coords(std::size_t idx) const {
  std::vector<int> c(lo_.size());
  for (std::size_t i = 0; i < lo_.size(); ++i) {
    const std::size_t r = static_cast<std::size_t>(hi_[i] - lo_[i] + 1);
    c[i] = lo_[i] + static_cast<int>(idx % r);
    idx /= r;
  }
  return c;
}

std::optional<std::size_t> StateSpace::index_of_coords(const std::vector<int>& c) const {
  if (c.size() != lo_.size()) return std::nullopt;
  std::size_t idx = 0;
  for (std::size_t i = 0; i < lo_.size(); ++i) {
    if (c[i] < lo_[i] || c[i] > hi_[i]) return std::nullopt;
    idx += static_cast<std::size_t>(c[i] - lo_[i]) * stride_[i];
  }
  return idx;
}

Configuration StateSpace::configuration(std::size_t idx) const {
  if (coords_ == Coordinates::heights) return Configuration(coords(idx));
  return from_gradient(GradientConfiguration(coords(idx)));
}

GradientConfiguration StateSpace::gradient(std::size_t idx) const {
  if (coords_ == Coordinates::gradients) return GradientConfiguration(coords(idx));
  return to_gradient(Configuration(coords(idx)));
}

std::optional<std::size_t> StateSpace::index_of(const Configuration& cfg) const {
  if (coords_ == Coordinates::heights) return index_of_coords(std::vector<int>(cfg.heights().begin(), cfg.heights().end()));
  const GradientConfiguration g = to_gradient(cfg);
  return index_of_coords(std::vector<int>(g.steps().begin(), g.steps().end()));
}

std::optional<std::size_t> StateSpace::neighbor(std::size_t idx, int site, int dir) const {
  const int k = site - 1;
  const int v = coord(idx, k) + dir;
  if (v < lo(k) || v > hi(k)) return std::nullopt;
  std::size_t out = dir > 0 ? idx + stride(k) : idx - stride(k);
  // In gradient coordinates, moving phi_k also changes eta_{k+1} by -dir.
  if (coords_ == Coordinates::gradients && site < length()) {
    const int w = coord(idx, k + 1) - dir;
    if (w < lo(k + 1) || w > hi(k + 1)) return std::nullopt;
    out = dir > 0 ? out - stride(k + 1) : out + stride(k + 1);
  }
  return out;
}

}  // namespace sos::model
