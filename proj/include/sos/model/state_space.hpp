#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "sos/model/configuration.hpp"
#include "sos/model/params.hpp"

namespace sos::model {

inline constexpr std::size_t kDefaultSizeCap = 5'000'000;

/// How the coordinates of an enumerated state are interpreted.
enum class Coordinates { heights, gradients };

/// Finite box of integer vectors with a mixed-radix bijection to 0..size-1.
///
/// Coordinate 0 varies fastest (stride 1), so the index order is lexicographic
/// in the reversed tuple (c_L, ..., c_1). For gradient coordinates this puts
/// every tail (eta_j, ..., eta_L) in a contiguous block of length stride(j-1).
class StateSpace {
 public:
  /// Heights with |phi_i| <= M for all i.
  static StateSpace height_box(int L, int M, std::size_t cap = kDefaultSizeCap);
  /// Gradients with |eta_1| <= M and |eta_i| <= R for i >= 2.
  static StateSpace gradient_box(int L, int M, int R, std::size_t cap = kDefaultSizeCap);
  /// The natural truncated space for params: height box for the constrained
  /// kind, gradient box (truncation R) for the auxiliary kind.
  static StateSpace for_params(const ModelParams& params, int R, std::size_t cap = kDefaultSizeCap);

  std::size_t size() const noexcept { return size_; }
  int length() const noexcept { return static_cast<int>(lo_.size()); }
  Coordinates coordinates() const noexcept { return coords_; }
  int lo(int i) const { return lo_[static_cast<std::size_t>(i)]; }
  int hi(int i) const { return hi_[static_cast<std::size_t>(i)]; }
  std::size_t radix(int i) const { return static_cast<std::size_t>(hi(i) - lo(i) + 1); }
  std::size_t stride(int i) const { return stride_[static_cast<std::size_t>(i)]; }

  std::vector<int> coords(std::size_t idx) const;
  int coord(std::size_t idx, int i) const {
    return lo(i) + static_cast<int>((idx / stride(i)) % radix(i));
  }
  std::optional<std::size_t> index_of_coords(const std::vector<int>& c) const;

  Configuration configuration(std::size_t idx) const;
  GradientConfiguration gradient(std::size_t idx) const;
  std::optional<std::size_t> index_of(const Configuration& cfg) const;

  /// Index of phi + dir * delta_site (site 1-based), or nullopt when it leaves the box.
  std::optional<std::size_t> neighbor(std::size_t idx, int site, int dir) const;

 private:
  StateSpace(Coordinates coords, std::vector<int> lo, std::vector<int> hi, std::size_t cap);

  Coordinates coords_;
  std::vector<int> lo_, hi_;
  std::vector<std::size_t> stride_;
  std::size_t size_ = 0;
};

}  // namespace sos::model
