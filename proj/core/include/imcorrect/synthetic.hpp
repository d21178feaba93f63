#pragma once

#include <cstdint>

#include "imcorrect/pipeline.hpp"

namespace imc {

// Seed-driven synthetic interaction log with planted block structure:
// items fall into contiguous blocks, each user favors a primary and a
// secondary block, and a heavy-user subset interacts several times more.
// Ships for tests and demos since the public datasets cannot be vendored.
// Defaults give users ~30 train interactions, enough that even a 5% noise
// fraction flips a few cells per user with visible co-occurrence.
struct SyntheticConfig {
  Index users = 200;
  Index items = 150;
  int blocks = 5;
  double p_primary = 0.8;
  double p_secondary = 0.5;
  double p_background = 0.05;
  double heavy_fraction = 0.2;
  double heavy_boost = 1.3;
  Index min_user_degree = 15;
  std::uint64_t seed = 2024;
};

RawInteractionLog synthetic_log(const SyntheticConfig& cfg);

}  // namespace imc
