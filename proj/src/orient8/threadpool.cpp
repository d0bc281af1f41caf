#include "orient8/threadpool.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace orient8 {

int worker_count() {
  if (const char* env = std::getenv("ORIENT8_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

void parallel_chunks(int n, int chunk_size,
                     const std::function<void(int, int, int)>& fn) {
  if (n <= 0) return;
  if (chunk_size < 1) chunk_size = 1;
  const int n_chunks = (n + chunk_size - 1) / chunk_size;
  const int workers = std::min(worker_count(), n_chunks);

  if (workers <= 1) {
    for (int c = 0; c < n_chunks; ++c) {
      fn(c, c * chunk_size, std::min(n, (c + 1) * chunk_size));
    }
    return;
  }

  std::atomic<int> next{0};
  auto run = [&]() {
    for (;;) {
      int c = next.fetch_add(1);
      if (c >= n_chunks) return;
      fn(c, c * chunk_size, std::min(n, (c + 1) * chunk_size));
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (int i = 1; i < workers; ++i) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
}

}  // namespace orient8
