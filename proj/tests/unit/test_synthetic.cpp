#include <map>

#include "doctest.h"

#include "imcorrect/synthetic.hpp"

using namespace imc;

TEST_CASE("synthetic logs are deterministic per seed") {
  SyntheticConfig cfg;
  const auto a = synthetic_log(cfg);
  const auto b = synthetic_log(cfg);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].user == b.records[i].user);
    CHECK(a.records[i].item == b.records[i].item);
  }

  SyntheticConfig other = cfg;
  other.seed = cfg.seed + 1;
  const auto c = synthetic_log(other);
  CHECK(a.records.size() != c.records.size());
}

TEST_CASE("synthetic logs respect the degree floors") {
  SyntheticConfig cfg;
  const auto log = synthetic_log(cfg);

  std::map<std::string, int> user_deg, item_deg;
  for (const auto& rec : log.records) {
    ++user_deg[rec.user];
    ++item_deg[rec.item];
  }
  CHECK(user_deg.size() == cfg.users);
  CHECK(item_deg.size() == cfg.items);
  for (const auto& [_, d] : user_deg) {
    CHECK(d >= static_cast<int>(cfg.min_user_degree));
  }
  for (const auto& [_, d] : item_deg) CHECK(d >= 1);
}

TEST_CASE("block structure concentrates interactions") {
  SyntheticConfig cfg;
  cfg.seed = 42;
  const auto log = synthetic_log(cfg);
  const Index block_size = cfg.items / static_cast<Index>(cfg.blocks);

  std::size_t in_block = 0;
  for (const auto& rec : log.records) {
    const Index u = static_cast<Index>(std::stoul(rec.user)) - 1;
    const Index i = static_cast<Index>(std::stoul(rec.item)) - 1;
    const int primary = static_cast<int>(u) % cfg.blocks;
    const int secondary = (primary + 1) % cfg.blocks;
    const int block = static_cast<int>(i / block_size);
    if (block == primary || block == secondary) ++in_block;
  }
  // Preferred blocks hold 20% of the items but most of the interactions.
  CHECK(static_cast<double>(in_block) /
            static_cast<double>(log.records.size()) >
        0.6);
}
