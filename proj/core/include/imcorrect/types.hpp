#pragma once

#include <compare>
#include <cstdint>

namespace imc {

// 32-bit indices are sufficient for the scales this library targets
// (tens of thousands of users/items).
using Index = std::uint32_t;

// One user-item interaction cell.
struct Cell {
  Index user = 0;
  Index item = 0;

  friend auto operator<=>(const Cell&, const Cell&) = default;
};

// A flip direction: Negative removes interactions (forgetting),
// Positive adds interactions (incremental learning).
enum class Direction { Negative, Positive };

inline const char* to_string(Direction d) {
  return d == Direction::Negative ? "negative" : "positive";
}

}  // namespace imc
