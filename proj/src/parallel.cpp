#include "pricekit/parallel.hpp"

#include <algorithm>

namespace pricekit {

namespace {
int g_workers = 0;  // 0 = unset
}

int worker_count() {
  if (g_workers > 0) return g_workers;
  if (const char* env = std::getenv("PRICEKIT_WORKERS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::clamp(hw, 1u, 8u));
}

void set_worker_count(int n) { g_workers = std::max(0, n); }

}  // namespace pricekit
