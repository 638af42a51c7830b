#include "hyperflow/threads.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace hyperflow {

int max_threads() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw < 1) hw = 1;
  if (const char* env = std::getenv("HYPERFLOW_THREADS")) {
    try {
      int v = std::stoi(env);
      return std::clamp(v, 1, hw);
    } catch (...) {
      return hw;
    }
  }
  return hw;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const int workers = max_threads();
  constexpr std::size_t kMinPerWorker = 64;
  if (workers <= 1 || n < 2 * kMinPerWorker) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::size_t chunks = std::min<std::size_t>(workers, n / kMinPerWorker);
  std::vector<std::thread> pool;
  pool.reserve(chunks);
  for (std::size_t w = 0; w < chunks; ++w) {
    std::size_t lo = n * w / chunks;
    std::size_t hi = n * (w + 1) / chunks;
    pool.emplace_back([&, lo, hi] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace hyperflow
