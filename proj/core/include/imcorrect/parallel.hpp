#pragma once

#include <cstddef>
#include <functional>

namespace imc {

// Process-wide default worker count (0 = hardware concurrency).
void set_default_threads(int threads);
int default_threads();

// Run `body(begin, end)` over contiguous blocks of [0, n). Results must not
// depend on the partitioning; callers get determinism by writing to disjoint
// per-index slots. threads == 0 uses the process default.
void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& body,
                  int threads = 0);

}  // namespace imc
