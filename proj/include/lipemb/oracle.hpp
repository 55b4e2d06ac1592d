#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lipemb/embed.hpp"
#include "lipemb/fields.hpp"

namespace lipemb {

enum class OracleMode : std::uint8_t { Decide, Count, Enumerate };

struct Instance {
  BitField x, y;
  std::int64_t M = 2;
  OracleMode mode = OracleMode::Decide;
};

struct OracleCaps {
  std::int64_t max_x_sites = 16;   // 4 x 4
  std::int64_t max_y_sites = 256;  // 16 x 16
  std::uint64_t node_budget = 200'000'000;
};

struct SearchStats {
  std::uint64_t nodes = 0;
  bool exhausted = false;  // node budget ran out before the search finished
};

// Exhaustive backtracking: X sites in spiral order from the window centre,
// Y candidates nearest-first, domains pruned by bit equality, injectivity and
// the pairwise distance bound against every assigned site. nullopt certifies
// that no map exists unless stats->exhausted is set.
std::optional<EmbeddingMap> find_embedding(const Instance& inst, const OracleCaps& caps = {},
                                           SearchStats* stats = nullptr);

struct CountResult {
  std::uint64_t count = 0;
  SearchStats stats;  // count is a lower bound when stats.exhausted
};
CountResult count_embeddings(const Instance& inst, const OracleCaps& caps = {});

// Up to `limit` maps in search order.
std::vector<EmbeddingMap> enumerate_embeddings(const Instance& inst, std::size_t limit, const OracleCaps& caps = {},
                                               SearchStats* stats = nullptr);

}  // namespace lipemb
