#include <algorithm>
#include <map>
#include <unordered_map>

#include "lipemb/embed.hpp"

namespace lipemb {

namespace {

// Unused sites of the Y level-0 blocks touched so far.
class SitePool {
 public:
  SitePool(const BitField& y, std::int64_t M0) : y_(y), M0_(M0) {}

  // Number of sites carrying `bit` in block b.
  std::int64_t capacity(Point b, int bit) const {
    std::int64_t k = 0;
    for (std::int64_t dy = 0; dy < M0_; ++dy)
      for (std::int64_t dx = 0; dx < M0_; ++dx) {
        const Point s{b.x * M0_ + dx, b.y * M0_ + dy};
        if (y_.contains(s) && y_.at(s) == bit) ++k;
      }
    return k;
  }

  // Unused site of block b carrying `bit`, closest to the block centre.
  std::optional<Point> take(Point b, int bit) {
    auto& used = used_[b];
    if (used.empty()) used.assign(static_cast<std::size_t>(M0_ * M0_), 0);
    const Point centre{b.x * M0_ + M0_ / 2, b.y * M0_ + M0_ / 2};
    std::optional<Point> best;
    std::size_t best_i = 0;
    for (std::int64_t dy = 0; dy < M0_; ++dy)
      for (std::int64_t dx = 0; dx < M0_; ++dx) {
        const auto i = static_cast<std::size_t>(dy * M0_ + dx);
        const Point s{b.x * M0_ + dx, b.y * M0_ + dy};
        if (used[i] || !y_.contains(s) || y_.at(s) != bit) continue;
        if (!best || norm2(s - centre) < norm2(*best - centre)) {
          best = s;
          best_i = i;
        }
      }
    if (best) used[best_i] = 1;
    return best;
  }

 private:
  const BitField& y_;
  std::int64_t M0_;
  std::unordered_map<Point, std::vector<std::uint8_t>, PointHash> used_;
};

bool place_cells(const Animal& cells, Point tau, const BitField& x, SitePool& pool, EmbeddingMap& out) {
  for (Point c : cells) {
    const int bit = x.at(c);
    const auto s = pool.take(c + tau, bit);
    if (!s) return false;
    out.domain.push_back(c);
    out.image.push_back(*s);
  }
  return true;
}

// b-matching of left nodes into capacitated right nodes by augmenting paths.
class BMatching {
 public:
  BMatching(std::vector<std::vector<int>> cand, std::vector<std::int64_t> cap)
      : cand_(std::move(cand)), cap_(std::move(cap)), assigned_(cap_.size()), match_(cand_.size(), -1),
        seen_(cap_.size(), 0) {}

  bool run() {
    for (std::size_t i = 0; i < cand_.size(); ++i) {
      ++stamp_;
      if (!augment(static_cast<int>(i))) return false;
    }
    return true;
  }
  int match(std::size_t i) const { return match_[i]; }

 private:
  bool augment(int i) {
    const auto& cs = cand_[static_cast<std::size_t>(i)];
    for (int r : cs) {
      auto& a = assigned_[static_cast<std::size_t>(r)];
      if (static_cast<std::int64_t>(a.size()) < cap_[static_cast<std::size_t>(r)]) {
        a.push_back(i);
        match_[static_cast<std::size_t>(i)] = r;
        return true;
      }
    }
    for (int r : cs) {
      if (seen_[static_cast<std::size_t>(r)] == stamp_) continue;
      seen_[static_cast<std::size_t>(r)] = stamp_;
      auto& a = assigned_[static_cast<std::size_t>(r)];
      for (std::size_t k = 0; k < a.size(); ++k) {
        const int other = a[k];
        if (augment(other)) {
          assigned_[static_cast<std::size_t>(r)][k] = i;
          match_[static_cast<std::size_t>(i)] = r;
          return true;
        }
      }
    }
    return false;
  }

  std::vector<std::vector<int>> cand_;
  std::vector<std::int64_t> cap_;
  std::vector<std::vector<int>> assigned_;
  std::vector<int> match_;
  std::vector<std::uint64_t> seen_;
  std::uint64_t stamp_ = 0;
};

}  // namespace

std::optional<EmbeddingMap> flatten(const Witness& w, const Hierarchy& xh, const Hierarchy& yh) {
  const ParameterSet& p = xh.params;
  EmbeddingMap out;
  out.M = p.lipschitz_bound();
  SitePool pool(yh.field, p.M0);

  if (w.level == 0) {
    if (!place_cells(w.x_cells, w.tau, xh.field, pool, out)) return std::nullopt;
    return out;
  }
  if (w.level != 1) throw PreconditionError("site-level flattening covers levels 0 and 1");

  const Level& YL = yh.level(0);
  const std::int64_t n = xh.level(1).geom.n;
  const Point shiftY{w.tau.x * n, w.tau.y * n};

  // Bad sets and their partners go to exactly the blocks the witness names.
  std::vector<Point> reserved;
  Animal matched_x;
  for (const auto* list : {&w.forward, &w.backward})
    for (const Match& m : *list) {
      if (!place_cells(m.x_cells, m.tau, xh.field, pool, out)) return std::nullopt;
      matched_x.insert(matched_x.end(), m.x_cells.begin(), m.x_cells.end());
      reserved.insert(reserved.end(), m.y_cells.begin(), m.y_cells.end());
    }
  matched_x = make_animal(std::move(matched_x));
  reserved = make_animal(std::move(reserved));

  // Everything else goes to good, unreserved Y blocks near its base image.
  const Animal my_abs = translate(make_animal(std::vector<Point>(w.my)), shiftY);
  std::vector<Point> rest;
  for (Point c : w.mx)
    if (!contains(matched_x, c)) rest.push_back(c);

  std::map<std::pair<Point, int>, int> node;
  std::vector<std::pair<Point, int>> nodes;
  std::vector<std::int64_t> cap;
  std::vector<std::vector<int>> cand(rest.size());
  const std::int64_t r = p.match_radius;
  for (std::size_t i = 0; i < rest.size(); ++i) {
    const int bit = xh.field.at(rest[i]);
    const Point g = w.base.image(rest[i]) + shiftY;
    std::vector<Point> blocks;
    for (std::int64_t dy = -r; dy <= r; ++dy)
      for (std::int64_t dx = -r; dx <= r; ++dx) {
        const Point b = g + Point{dx, dy};
        if (!YL.in(b) || YL.component_at(b) >= 0 || !contains(my_abs, b) || contains(reserved, b)) continue;
        blocks.push_back(b);
      }
    std::sort(blocks.begin(), blocks.end(), [&](Point a, Point b) {
      const auto ka = std::make_tuple(linf(a - g), norm2(a - g), a);
      const auto kb = std::make_tuple(linf(b - g), norm2(b - g), b);
      return ka < kb;
    });
    for (Point b : blocks) {
      const auto key = std::make_pair(b, bit);
      auto it = node.find(key);
      if (it == node.end()) {
        it = node.emplace(key, static_cast<int>(nodes.size())).first;
        nodes.push_back(key);
        cap.push_back(pool.capacity(b, bit));
      }
      cand[i].push_back(it->second);
    }
  }
  BMatching bm(std::move(cand), std::move(cap));
  if (!bm.run()) return std::nullopt;
  for (std::size_t i = 0; i < rest.size(); ++i) {
    const auto& [b, bit] = nodes[static_cast<std::size_t>(bm.match(i))];
    const auto s = pool.take(b, bit);
    if (!s) return std::nullopt;
    out.domain.push_back(rest[i]);
    out.image.push_back(*s);
  }
  return out;
}

bool verify_embedding(const EmbeddingMap& map, const BitField& x, const BitField& y, std::string* reason) {
  auto fail = [&](const std::string& why) {
    if (reason) *reason = why;
    return false;
  };
  if (map.domain.size() != map.image.size()) throw PreconditionError("domain and image lengths differ");
  for (std::size_t i = 0; i < map.domain.size(); ++i) {
    if (!x.contains(map.domain[i])) throw PreconditionError("domain site outside the X window");
    if (!y.contains(map.image[i])) throw PreconditionError("image site outside the Y window");
    if (x.at(map.domain[i]) != y.at(map.image[i])) return fail("value mismatch");
  }
  auto sorted_has_dup = [](std::vector<Point> v) {
    std::sort(v.begin(), v.end());
    return std::adjacent_find(v.begin(), v.end()) != v.end();
  };
  if (sorted_has_dup(map.domain)) return fail("domain repeats a site");
  if (sorted_has_dup(map.image)) return fail("not injective");
  const std::int64_t M2 = map.M * map.M;
  for (std::size_t i = 0; i < map.domain.size(); ++i)
    for (std::size_t k = i + 1; k < map.domain.size(); ++k)
      if (norm2(map.image[i] - map.image[k]) > M2 * norm2(map.domain[i] - map.domain[k]))
        return fail("Lipschitz bound exceeded");
  if (reason) reason->clear();
  return true;
}

}  // namespace lipemb
