#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace imc {

// splitmix64: the stream is fully determined by the seed, independent of
// compiler or standard library, which keeps every seeded artifact in this
// project bitwise reproducible.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Small deterministic generator with keyed substreams. Substreams let
// per-user sampling be independent of iteration order.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {
    // Scramble once so nearby seeds do not yield nearby streams.
    (void)splitmix64(state_);
  }

  std::uint64_t next_u64() { return splitmix64(state_); }

  // Derive an independent stream keyed by (this seed, key).
  Rng substream(std::uint64_t key) const {
    std::uint64_t s = state_ ^ (0x9e3779b97f4a7c15ULL * (key + 1));
    return Rng(splitmix64(s));
  }

  // Uniform in [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller.
  double next_gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while (u1 == 0.0) u1 = next_double();
    const double u2 = next_double();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    spare_ = mag * std::sin(2.0 * std::numbers::pi * u2);
    has_spare_ = true;
    return mag * std::cos(2.0 * std::numbers::pi * u2);
  }

  // Unbiased uniform integer in [0, bound) via rejection.
  std::uint64_t below(std::uint64_t bound) {
    if (bound <= 1) return 0;
    const std::uint64_t limit = ~std::uint64_t{0} - ~std::uint64_t{0} % bound;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % bound;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[static_cast<std::size_t>(below(i))]);
    }
  }

  // Draw `k` distinct elements from `pool` (partial Fisher-Yates); the
  // pool is consumed in place and the drawn prefix returned.
  template <typename T>
  std::vector<T> sample(std::vector<T>& pool, std::size_t k) {
    if (k > pool.size()) k = pool.size();
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(below(pool.size() - i));
      std::swap(pool[i], pool[j]);
    }
    return std::vector<T>(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
  }

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace imc
