#include "core/threading.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace scn {

namespace {
std::atomic<int> g_threads{0};
}

void set_thread_count(int n) { g_threads.store(n < 0 ? 0 : n); }

int thread_count() {
  int n = g_threads.load();
  if (n == 0) {
    unsigned hw = std::thread::hardware_concurrency();
    n = hw == 0 ? 1 : static_cast<int>(hw);
  }
  return n;
}

void parallel_chunks(size_t n,
                     const std::function<void(size_t, size_t, int)>& fn) {
  if (n == 0) return;
  // thread startup dwarfs the work below this size
  constexpr size_t kMinParallel = 4096;
  int nt = n < kMinParallel ? 1 : static_cast<int>(std::min<size_t>(thread_count(), n));
  if (nt <= 1) {
    fn(0, n, 0);
    return;
  }
  size_t per = (n + nt - 1) / nt;
  std::vector<std::thread> pool;
  pool.reserve(nt);
  for (int c = 0; c < nt; ++c) {
    size_t b = c * per;
    size_t e = std::min(n, b + per);
    if (b >= e) break;
    pool.emplace_back([&fn, b, e, c] { fn(b, e, c); });
  }
  for (auto& t : pool) t.join();
}

void parallel_for(size_t n, const std::function<void(size_t)>& fn) {
  parallel_chunks(n, [&fn](size_t b, size_t e, int) {
    for (size_t i = b; i < e; ++i) fn(i);
  });
}

}  // namespace scn
