#include "mfou/numerics/parallel.hpp"

#include <cstdlib>
#include <string>

namespace mfou {

unsigned default_thread_budget() {
  if (const char* env = std::getenv(kThreadsEnv)) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (...) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace mfou
