#include "sos/model/configuration.hpp"

#include <cstdlib>
#include <sstream>

namespace sos::model {

int Configuration::sup_norm() const noexcept {
  int m = 0;
  for (int h : heights_) m = std::max(m, std::abs(h));
  return m;
}

Configuration Configuration::shifted(int c) const {
  std::vector<int> out = heights_;
  for (int& h : out) h += c;
  return Configuration(std::move(out));
}

std::string Configuration::to_string() const {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < heights_.size(); ++i) {
    if (i) os << ',';
    os << heights_[i];
  }
  os << ')';
  return os.str();
}

GradientConfiguration to_gradient(const Configuration& cfg) {
  std::vector<int> steps(static_cast<std::size_t>(cfg.length()));
  for (std::size_t i = 0; i < steps.size(); ++i) {
    steps[i] = i == 0 ? cfg[0] : cfg[i] - cfg[i - 1];
  }
  return GradientConfiguration(std::move(steps));
}

Configuration from_gradient(const GradientConfiguration& g) {
  std::vector<int> heights(static_cast<std::size_t>(g.length()));
  int acc = 0;
  for (std::size_t i = 0; i < heights.size(); ++i) {
    acc += g[i];
    heights[i] = acc;
  }
  return Configuration(std::move(heights));
}

}  // namespace sos::model
