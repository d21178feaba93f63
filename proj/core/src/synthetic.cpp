#include "imcorrect/synthetic.hpp"

#include <algorithm>
#include <string>

#include "imcorrect/errors.hpp"
#include "imcorrect/rng.hpp"

namespace imc {

RawInteractionLog synthetic_log(const SyntheticConfig& cfg) {
  if (cfg.users == 0 || cfg.items == 0 || cfg.blocks < 1) {
    throw ValidationError("synthetic config needs users, items and blocks >= 1");
  }
  const Index block_size =
      (cfg.items + static_cast<Index>(cfg.blocks) - 1) /
      static_cast<Index>(cfg.blocks);

  Rng rng(cfg.seed);
  std::vector<std::vector<Index>> per_user(cfg.users);
  std::vector<std::uint32_t> item_degree(cfg.items, 0);

  for (Index u = 0; u < cfg.users; ++u) {
    Rng user_rng = rng.substream(u);
    const int primary = static_cast<int>(u) % cfg.blocks;
    const int secondary = (primary + 1) % cfg.blocks;
    const bool heavy = user_rng.next_double() < cfg.heavy_fraction;
    const double boost = heavy ? cfg.heavy_boost : 1.0;

    auto& items = per_user[u];
    for (Index i = 0; i < cfg.items; ++i) {
      const int block = static_cast<int>(i / block_size);
      double p = cfg.p_background;
      if (block == primary) {
        p = cfg.p_primary;
      } else if (block == secondary) {
        p = cfg.p_secondary;
      }
      p = std::min(0.95, p * boost);
      if (user_rng.next_double() < p) items.push_back(i);
    }

    // Top up thin users from their primary block so every user clears the
    // degree floor the splitter and noise generator rely on.
    if (items.size() < cfg.min_user_degree) {
      std::vector<char> has(cfg.items, 0);
      for (Index i : items) has[i] = 1;
      std::vector<Index> pool;
      for (Index i = 0; i < cfg.items; ++i) {
        if (!has[i]) pool.push_back(i);
      }
      // Preferring the primary block keeps the planted structure intact.
      std::stable_sort(pool.begin(), pool.end(), [&](Index a, Index b) {
        const bool ap = static_cast<int>(a / block_size) == primary;
        const bool bp = static_cast<int>(b / block_size) == primary;
        return ap > bp;
      });
      const std::size_t need = cfg.min_user_degree - items.size();
      std::size_t primary_avail = 0;
      for (Index i : pool) {
        if (static_cast<int>(i / block_size) == primary) ++primary_avail;
      }
      std::vector<Index> primary_pool(pool.begin(),
                                      pool.begin() + primary_avail);
      for (Index i : user_rng.sample(primary_pool,
                                     std::min(need, primary_avail))) {
        items.push_back(i);
      }
      if (items.size() < cfg.min_user_degree) {
        std::vector<Index> rest(pool.begin() + primary_avail, pool.end());
        const std::size_t more = cfg.min_user_degree - items.size();
        for (Index i : user_rng.sample(rest, std::min(more, rest.size()))) {
          items.push_back(i);
        }
      }
    }
    std::sort(items.begin(), items.end());
    for (Index i : items) ++item_degree[i];
  }

  // Give orphan items one interaction from a deterministic user.
  for (Index i = 0; i < cfg.items; ++i) {
    if (item_degree[i] > 0) continue;
    Rng fix_rng = rng.substream(0x10000u + i);
    const Index u = static_cast<Index>(fix_rng.below(cfg.users));
    per_user[u].insert(
        std::lower_bound(per_user[u].begin(), per_user[u].end(), i), i);
    ++item_degree[i];
  }

  RawInteractionLog log;
  for (Index u = 0; u < cfg.users; ++u) {
    for (Index i : per_user[u]) {
      log.records.push_back(
          {std::to_string(u + 1), std::to_string(i + 1), std::nullopt,
           std::nullopt});
    }
  }
  return log;
}

}  // namespace imc
