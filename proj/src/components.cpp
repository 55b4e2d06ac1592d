#include <algorithm>
#include <cmath>
#include <map>

#include "lipemb/embed.hpp"
#include "lipemb/hierarchy.hpp"
#include "lipemb/stats.hpp"

namespace lipemb {

std::vector<std::int32_t> form_components(const ComponentInput& in, std::int32_t* count) {
  const Rect& W = in.window;
  const auto w = static_cast<std::size_t>(W.width());
  const auto h = static_cast<std::size_t>(W.height());
  const std::size_t nb = in.good.size();
  if (in.block.size() != w * h || in.size.size() != nb) throw PreconditionError("component input sizes disagree");

  UnionFind uf(nb);
  // A group needs bordering by good singletons once it has a bad block or
  // more than one cell; `flagged` tracks that per root.
  std::vector<std::uint8_t> flagged(nb, 0);
  for (std::size_t b = 0; b < nb; ++b) flagged[b] = !in.good[b] || in.size[b] > 1;
  auto unite = [&](std::size_t a, std::size_t b) {
    a = uf.find(a);
    b = uf.find(b);
    if (a == b) return false;
    const std::uint8_t f = flagged[a] | flagged[b] | 1;  // a merged group has > 1 cell
    uf.unite(a, b);
    flagged[uf.find(a)] = f;
    return true;
  };
  auto blk = [&](std::size_t x, std::size_t y) { return static_cast<std::size_t>(in.block[y * w + x]); };
  auto good_singleton = [&](std::size_t b) { return in.good[b] && in.size[b] == 1; };

  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t y = 0; y < h; ++y)
      for (std::size_t x = 0; x < w; ++x) {
        const std::size_t b = blk(x, y);
        if (!flagged[uf.find(b)]) continue;
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            if (!dx && !dy) continue;
            const auto nx = static_cast<std::int64_t>(x) + dx, ny = static_cast<std::int64_t>(y) + dy;
            if (nx < 0 || ny < 0 || nx >= static_cast<std::int64_t>(w) || ny >= static_cast<std::int64_t>(h)) continue;
            const std::size_t c = blk(static_cast<std::size_t>(nx), static_cast<std::size_t>(ny));
            if (c == b || good_singleton(c)) continue;
            changed |= unite(b, c);
          }
      }
    // Diagonal pairs in one flagged group pull in their 2x2 square.
    for (std::size_t y = 0; y + 1 < h; ++y)
      for (std::size_t x = 0; x + 1 < w; ++x) {
        const std::size_t a = blk(x, y), b = blk(x + 1, y), c = blk(x, y + 1), d = blk(x + 1, y + 1);
        const bool diag = uf.find(a) == uf.find(d) && flagged[uf.find(a)];
        const bool anti = uf.find(b) == uf.find(c) && flagged[uf.find(b)];
        if (!diag && !anti) continue;
        changed |= unite(a, b);
        changed |= unite(a, c);
        changed |= unite(a, d);
      }
  }

  std::vector<std::int32_t> out(w * h, -1), label(nb, -1);
  std::int32_t next = 0;
  for (std::size_t i = 0; i < w * h; ++i) {
    const std::size_t r = uf.find(static_cast<std::size_t>(in.block[i]));
    if (!flagged[r]) continue;
    if (label[r] < 0) label[r] = next++;
    out[i] = label[r];
  }
  if (count) *count = next;
  return out;
}

Animal nonneighbouring_bad_subset(const Level& lvl, const ComponentRec& q) {
  Animal picked;
  for (Point c : q.cells) {
    if (!lvl.is_bad(c)) continue;
    bool clear = true;
    for (Point s : picked)
      if (linf(s - c) <= 1) {
        clear = false;
        break;
      }
    if (clear) picked.push_back(c);
  }
  return picked;
}

bool semibad_decision(std::int64_t size, long double s_lower, int j, const ParameterSet& p) {
  return size <= p.v0 && s_lower >= p.semibad_threshold(j);
}

bool semibad_reachable(int j, const ParameterSet& p) {
  if (j == 0) return true;
  if (p.semibad_trials < 1) return false;
  const auto n = static_cast<std::uint64_t>(p.semibad_trials);
  return static_cast<long double>(clopper_pearson(n, n).lower) >= p.semibad_threshold(j);
}

bool is_airport(Rect square, const Animal& shape, const std::function<bool(Point)>& embeds, long double fraction) {
  if (shape.empty()) throw PreconditionError("empty library shape");
  const Rect bb = bounding_box(shape);
  std::uint64_t total = 0, hits = 0;
  for (std::int64_t ay = square.y0 - bb.y0; ay + bb.y1 <= square.y1; ++ay)
    for (std::int64_t ax = square.x0 - bb.x0; ax + bb.x1 <= square.x1; ++ax) {
      ++total;
      if (embeds({ax, ay})) ++hits;
    }
  return static_cast<long double>(hits) >= fraction * static_cast<long double>(total);
}

bool is_block_union(const Level& lvl, const Animal& cells) {
  for (Point c : cells) {
    if (!lvl.in(c)) return false;
    if (lvl.level == 0) continue;
    for (Point v : lvl.blocks[static_cast<std::size_t>(lvl.block_at(c))].cells)
      if (!contains(cells, v)) return false;
  }
  return true;
}

bool classify_good_block(const Hierarchy& h, int j, const BlockRec& b, const std::vector<LibraryEntry>& library) {
  const ParameterSet& p = h.params;
  if (b.cells.size() != 1) return false;
  if (b.bad_sub_size > p.k0 || !b.sub_semibad) return false;
  if (library.empty() || b.members.empty()) return true;

  const Level& lower = h.level(j - 1);
  const LevelGeometry g = p.geometry(j);
  const std::int64_t A = g.airport_side;
  const long double fraction = p.airport_fraction(j);

  // Squares of side A lying inside the members, via a prefix-sum table.
  const Rect bb = bounding_box(b.members);
  const auto bw = static_cast<std::size_t>(bb.width()), bh = static_cast<std::size_t>(bb.height());
  std::vector<std::int64_t> pre((bw + 1) * (bh + 1), 0);
  for (Point c : b.members) pre[(static_cast<std::size_t>(c.y - bb.y0) + 1) * (bw + 1) + static_cast<std::size_t>(c.x - bb.x0) + 1] = 1;
  for (std::size_t y = 1; y <= bh; ++y)
    for (std::size_t x = 1; x <= bw; ++x)
      pre[y * (bw + 1) + x] += pre[(y - 1) * (bw + 1) + x] + pre[y * (bw + 1) + x - 1] - pre[(y - 1) * (bw + 1) + x - 1];
  auto count = [&](std::size_t x0, std::size_t y0, std::size_t x1, std::size_t y1) {
    return pre[y1 * (bw + 1) + x1] - pre[y0 * (bw + 1) + x1] - pre[y1 * (bw + 1) + x0] + pre[y0 * (bw + 1) + x0];
  };

  for (const LibraryEntry& e : library) {
    std::map<Point, bool> memo;
    auto embeds = [&](Point anchor) {
      auto it = memo.find(anchor);
      if (it != memo.end()) return it->second;
      const Animal H = translate(e.shape, anchor);
      bool ok = is_block_union(lower, H);
      if (ok) {
        const Animal U = translate(e.shape, e.anchor);
        if (h.family == Family::Y)
          ok = embeds_level(*e.partner, U, h, anchor - e.anchor, j - 1).has_value();
        else
          ok = embeds_level(h, H, *e.partner, e.anchor - anchor, j - 1).has_value();
      }
      memo.emplace(anchor, ok);
      return ok;
    };
    for (std::size_t y = 0; y + static_cast<std::size_t>(A) <= bh; ++y)
      for (std::size_t x = 0; x + static_cast<std::size_t>(A) <= bw; ++x) {
        if (count(x, y, x + static_cast<std::size_t>(A), y + static_cast<std::size_t>(A)) != A * A) continue;
        const Rect sq{bb.x0 + static_cast<std::int64_t>(x), bb.y0 + static_cast<std::int64_t>(y),
                      bb.x0 + static_cast<std::int64_t>(x) + A, bb.y0 + static_cast<std::int64_t>(y) + A};
        if (!is_airport(sq, e.shape, embeds, fraction)) return false;
      }
  }
  return true;
}

}  // namespace lipemb
