#include "central_approx/parallel.hpp"

#include <cstdlib>
#include <string>

namespace central_approx {

std::size_t worker_count() {
  if (const char* env = std::getenv("CENTRAL_APPROX_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<std::size_t>(v);
    } catch (...) {
      // fall through to the hardware count
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace central_approx
