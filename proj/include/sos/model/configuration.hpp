#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace sos::model {

/// Integer height profile (phi_1, ..., phi_L) of the interface.
///
/// Sites are stored 0-based; the physical site k (1..L) lives at index k-1.
class Configuration {
 public:
  Configuration() = default;
  explicit Configuration(std::vector<int> heights) : heights_(std::move(heights)) {}

  static Configuration flat(int length, int height = 0) {
    return Configuration(std::vector<int>(static_cast<std::size_t>(length), height));
  }

  int length() const noexcept { return static_cast<int>(heights_.size()); }
  int operator[](std::size_t i) const { return heights_[i]; }
  int& operator[](std::size_t i) { return heights_[i]; }
  std::span<const int> heights() const noexcept { return heights_; }

  /// max_i |phi_i|
  int sup_norm() const noexcept;

  /// True when every |phi_i| <= bound.
  bool within(int bound) const noexcept { return sup_norm() <= bound; }

  Configuration shifted(int c) const;

  std::string to_string() const;

  auto operator<=>(const Configuration&) const = default;
  bool operator==(const Configuration&) const = default;

 private:
  std::vector<int> heights_;
};

/// Discrete-derivative coordinates: eta_1 = phi_1, eta_k = phi_k - phi_{k-1}.
class GradientConfiguration {
 public:
  GradientConfiguration() = default;
  explicit GradientConfiguration(std::vector<int> steps) : steps_(std::move(steps)) {}

  int length() const noexcept { return static_cast<int>(steps_.size()); }
  int operator[](std::size_t i) const { return steps_[i]; }
  int& operator[](std::size_t i) { return steps_[i]; }
  std::span<const int> steps() const noexcept { return steps_; }

  auto operator<=>(const GradientConfiguration&) const = default;
  bool operator==(const GradientConfiguration&) const = default;

 private:
  std::vector<int> steps_;
};

GradientConfiguration to_gradient(const Configuration& cfg);
Configuration from_gradient(const GradientConfiguration& g);

}  // namespace sos::model
