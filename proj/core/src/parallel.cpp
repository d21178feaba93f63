#include "imcorrect/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace imc {

namespace {
std::atomic<int> g_default_threads{0};
}

void set_default_threads(int threads) {
  g_default_threads.store(threads < 0 ? 0 : threads);
}

int default_threads() {
  int t = g_default_threads.load();
  if (t == 0) {
    t = static_cast<int>(std::thread::hardware_concurrency());
    if (t == 0) t = 1;
  }
  return t;
}

void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& body,
                  int threads) {
  if (n == 0) return;
  if (threads <= 0) threads = default_threads();
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(threads), n);
  if (workers <= 1) {
    body(0, n);
    return;
  }
  const std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&body, begin, end] { body(begin, end); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace imc
