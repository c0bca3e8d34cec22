#include "adequate/numerics/parallel.hpp"

#include <cstdlib>
#include <string>

namespace adequate::numerics {

namespace {
std::atomic<std::size_t> g_override{0};
}

std::size_t worker_count() {
  if (const std::size_t forced = g_override.load(); forced > 0) return forced;
  if (const char* env = std::getenv("ADEQUATE_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (...) {
    }
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

void set_worker_count(std::size_t workers) { g_override.store(workers); }

}  // namespace adequate::numerics
