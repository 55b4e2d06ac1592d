#include "lipemb/lattice.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <unordered_set>

namespace lipemb {

std::vector<Point> neighbors(Point u, Adjacency mode) {
  if (mode == Adjacency::Euclidean) return {{u.x + 1, u.y}, {u.x - 1, u.y}, {u.x, u.y + 1}, {u.x, u.y - 1}};
  std::vector<Point> out;
  out.reserve(8);
  for (std::int64_t dy = -1; dy <= 1; ++dy)
    for (std::int64_t dx = -1; dx <= 1; ++dx)
      if (dx || dy) out.push_back({u.x + dx, u.y + dy});
  return out;
}

Animal make_animal(std::vector<Point> sites) {
  std::sort(sites.begin(), sites.end());
  sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
  return sites;
}

bool contains(const Animal& a, Point p) { return std::binary_search(a.begin(), a.end(), p); }

bool is_connected(const Animal& a, Adjacency mode) {
  if (a.empty()) return false;
  std::vector<char> seen(a.size(), 0);
  std::vector<std::size_t> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const Point p = a[stack.back()];
    stack.pop_back();
    for (Point q : neighbors(p, mode)) {
      auto it = std::lower_bound(a.begin(), a.end(), q);
      if (it == a.end() || *it != q) continue;
      const auto i = static_cast<std::size_t>(it - a.begin());
      if (!seen[i]) {
        seen[i] = 1;
        ++reached;
        stack.push_back(i);
      }
    }
  }
  return reached == a.size();
}

Rect bounding_box(const Animal& a) {
  if (a.empty()) return {};
  Rect r{a.front().x, a.front().y, a.front().x + 1, a.front().y + 1};
  for (Point p : a) {
    r.x0 = std::min(r.x0, p.x);
    r.y0 = std::min(r.y0, p.y);
    r.x1 = std::max(r.x1, p.x + 1);
    r.y1 = std::max(r.y1, p.y + 1);
  }
  return r;
}

Animal translate(const Animal& a, Point d) {
  Animal out(a.size());
  std::transform(a.begin(), a.end(), out.begin(), [d](Point p) { return p + d; });
  return out;  // translation preserves the lexicographic order
}

std::int64_t linf_distance(const Animal& a, const Animal& b) {
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  for (Point p : a)
    for (Point q : b) best = std::min(best, linf(p - q));
  return best;
}

Shape canonical_shape(const Animal& a) {
  if (a.empty()) return {};
  return Shape{translate(a, -a.front())};
}

std::optional<Point> same_shape(const Animal& a, const Animal& b) {
  if (a.size() != b.size() || a.empty()) return std::nullopt;
  const Point d = b.front() - a.front();
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] + d != b[i]) return std::nullopt;
  return d;
}

std::vector<Animal> enumerate_shapes(int v, bool containing_origin, int cap) {
  if (v < 1) throw PreconditionError("shape size must be at least 1");
  if (v > cap) throw CapError("shape size " + std::to_string(v) + " exceeds the cap of " + std::to_string(cap));
  // Grow canonical shapes one site at a time; the set removes duplicates.
  std::set<Animal> level{Animal{{0, 0}}};
  for (int s = 2; s <= v; ++s) {
    std::set<Animal> next;
    for (const Animal& a : level) {
      for (Point p : a)
        for (Point q : neighbors(p, Adjacency::Euclidean)) {
          if (contains(a, q)) continue;
          Animal b = a;
          b.insert(std::lower_bound(b.begin(), b.end(), q), q);
          next.insert(canonical_shape(b).sites);
        }
    }
    level.swap(next);
  }
  std::vector<Animal> out(level.begin(), level.end());
  if (!containing_origin) return out;
  std::vector<Animal> anchored;
  anchored.reserve(out.size() * static_cast<std::size_t>(v));
  for (const Animal& a : out)
    for (Point p : a) anchored.push_back(translate(a, -p));
  std::sort(anchored.begin(), anchored.end());
  return anchored;
}

// ---------------------------------------------------------------------------

CellGeometry cell_geometry(int j, Point u, const ParameterSet& p) {
  CellGeometry g;
  g.level = j;
  g.index = u;
  if (j == 0) {
    g.region = {u.x, u.y, u.x + 1, u.y + 1};
    g.interior = g.blowup = g.region;
    return g;
  }
  const LevelGeometry lg = p.geometry(j);
  const std::int64_t n = lg.n;
  g.margin = lg.buffer;
  g.region = {u.x * n, u.y * n, (u.x + 1) * n, (u.y + 1) * n};
  g.interior = g.region.inflate(-g.margin);
  g.blowup = g.region.inflate(g.margin);
  return g;
}

const char* side_name(Side s) {
  switch (s) {
    case Side::T: return "T";
    case Side::L: return "L";
    case Side::B: return "B";
    case Side::R: return "R";
  }
  return "?";
}

Point side_offset(Side s) {
  switch (s) {
    case Side::T: return {0, 1};
    case Side::L: return {-1, 0};
    case Side::B: return {0, -1};
    case Side::R: return {1, 0};
  }
  return {};
}

Rect shared_buffer_rect(Point u, Side side, std::int64_t n, std::int64_t w) {
  switch (side) {
    case Side::R: return {(u.x + 1) * n - w, u.y * n - w, (u.x + 1) * n + w, (u.y + 1) * n + w};
    case Side::L: return {u.x * n - w, u.y * n - w, u.x * n + w, (u.y + 1) * n + w};
    case Side::T: return {u.x * n - w, (u.y + 1) * n - w, (u.x + 1) * n + w, (u.y + 1) * n + w};
    case Side::B: return {u.x * n - w, u.y * n - w, (u.x + 1) * n + w, u.y * n + w};
  }
  return {};
}

BufferZone buffer_zone(int j, Point u, Side side, const ParameterSet& p) {
  if (j < 1) throw PreconditionError("buffers exist from level 1 on");
  const LevelGeometry g = p.geometry(j);
  return BufferZone{j, u, side, shared_buffer_rect(u, side, g.n, g.buffer), u + side_offset(side)};
}

std::vector<BufferZone> outer_buffers(const Animal& animal, int j, const ParameterSet& p) {
  std::vector<BufferZone> out;
  for (Point u : animal)
    for (Side s : {Side::T, Side::L, Side::B, Side::R})
      if (!contains(animal, u + side_offset(s))) out.push_back(buffer_zone(j, u, s, p));
  return out;
}

// ---------------------------------------------------------------------------

void UnionFind::reset(std::size_t n) {
  parent_.resize(n);
  std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  rank_.assign(n, 0);
}

std::size_t UnionFind::find(std::size_t a) {
  while (parent_[a] != a) {
    parent_[a] = parent_[parent_[a]];
    a = parent_[a];
  }
  return a;
}

bool UnionFind::unite(std::size_t a, std::size_t b) {
  a = find(a);
  b = find(b);
  if (a == b) return false;
  if (rank_[a] < rank_[b]) std::swap(a, b);
  parent_[b] = a;
  if (rank_[a] == rank_[b]) ++rank_[a];
  return true;
}

}  // namespace lipemb
