#include "hch/parallel.hpp"

#include <atomic>

namespace hch {

namespace {
std::atomic<int> g_cap{0};
}

void set_thread_cap(int threads) { g_cap.store(threads < 0 ? 0 : threads); }

int thread_cap() {
  const int cap = g_cap.load();
  if (cap > 0) return cap;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace hch
