#include "sos/experiments/pool.hpp"

#include <cstdlib>
#include <string>

namespace sos::experiments {

unsigned worker_count() {
  if (const char* env = std::getenv("SOS_WORKERS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return static_cast<unsigned>(n);
    } catch (...) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace sos::experiments
