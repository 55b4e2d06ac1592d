#include "lipemb/oracle.hpp"

#include <algorithm>
#include <bit>
#include <functional>

namespace lipemb {

namespace {

using Mask = std::vector<std::uint64_t>;

class Search {
 public:
  Search(const Instance& inst, const OracleCaps& caps) : inst_(inst), caps_(caps) {
    if (inst.M < 0) throw PreconditionError("M must be non-negative");
    const std::int64_t nx = inst.x.width * inst.x.height, ny = inst.y.width * inst.y.height;
    if (nx > caps.max_x_sites) throw CapError("X window exceeds the oracle size cap");
    if (ny > caps.max_y_sites) throw CapError("Y window exceeds the oracle size cap");
    if (nx == 0) throw PreconditionError("empty X window");

    const Rect xr = inst.x.rect();
    for (std::int64_t y = xr.y0; y < xr.y1; ++y)
      for (std::int64_t x = xr.x0; x < xr.x1; ++x) xs_.push_back({x, y});
    // Spiral-like order: outward from the centre, doubled coordinates keep it integral.
    const Point cx{xr.x0 + xr.x1 - 1, xr.y0 + xr.y1 - 1};
    std::sort(xs_.begin(), xs_.end(), [&](Point a, Point b) {
      const Point da{2 * a.x - cx.x, 2 * a.y - cx.y}, db{2 * b.x - cx.x, 2 * b.y - cx.y};
      return std::make_tuple(linf(da), norm2(da), a) < std::make_tuple(linf(db), norm2(db), b);
    });
    const Rect yr = inst.y.rect();
    for (std::int64_t y = yr.y0; y < yr.y1; ++y)
      for (std::int64_t x = yr.x0; x < yr.x1; ++x) ys_.push_back({x, y});
    words_ = (ys_.size() + 63) / 64;

    // Nearest-first candidate order around the centre-aligned position.
    const Point cy{yr.x0 + yr.x1 - 1, yr.y0 + yr.y1 - 1};
    order_.resize(xs_.size());
    for (std::size_t i = 0; i < xs_.size(); ++i) {
      const Point want{2 * xs_[i].x - cx.x + cy.x, 2 * xs_[i].y - cx.y + cy.y};
      auto& ord = order_[i];
      for (std::size_t b = 0; b < ys_.size(); ++b) ord.push_back(b);
      std::sort(ord.begin(), ord.end(), [&](std::size_t a, std::size_t b) {
        const Point pa{2 * ys_[a].x - want.x, 2 * ys_[a].y - want.y}, pb{2 * ys_[b].x - want.x, 2 * ys_[b].y - want.y};
        return std::make_tuple(norm2(pa), ys_[a]) < std::make_tuple(norm2(pb), ys_[b]);
      });
    }
  }

  // Visits every complete map in search order until `visit` returns false.
  SearchStats run(const std::function<bool(const std::vector<std::size_t>&)>& visit) {
    std::vector<Mask> dom(xs_.size(), Mask(words_, 0));
    for (std::size_t i = 0; i < xs_.size(); ++i)
      for (std::size_t b = 0; b < ys_.size(); ++b)
        if (inst_.y.at(ys_[b]) == inst_.x.at(xs_[i])) dom[i][b / 64] |= std::uint64_t{1} << (b % 64);
    assign_.assign(xs_.size(), 0);
    visit_ = &visit;
    stop_ = false;
    stats_ = {};
    descend(0, dom);
    return stats_;
  }

  EmbeddingMap to_map(const std::vector<std::size_t>& a) const {
    EmbeddingMap m;
    m.M = inst_.M;
    for (std::size_t i = 0; i < xs_.size(); ++i) {
      m.domain.push_back(xs_[i]);
      m.image.push_back(ys_[a[i]]);
    }
    return m;
  }

 private:
  static bool test(const Mask& m, std::size_t b) { return (m[b / 64] >> (b % 64)) & 1; }
  static bool empty(const Mask& m) {
    return std::all_of(m.begin(), m.end(), [](std::uint64_t w) { return w == 0; });
  }

  void descend(std::size_t i, const std::vector<Mask>& dom) {
    if (i == xs_.size()) {
      if (!(*visit_)(assign_)) stop_ = true;
      return;
    }
    const std::int64_t M2 = inst_.M * inst_.M;
    for (std::size_t b : order_[i]) {
      if (stop_) return;
      if (!test(dom[i], b)) continue;
      if (++stats_.nodes > caps_.node_budget) {
        stats_.exhausted = true;
        stop_ = true;
        return;
      }
      assign_[i] = b;
      // Forward check every later site against this assignment.
      std::vector<Mask> next(dom.begin() + static_cast<std::ptrdiff_t>(i + 1), dom.end());
      bool alive = true;
      for (std::size_t k = i + 1; k < xs_.size() && alive; ++k) {
        Mask& d = next[k - i - 1];
        const std::int64_t lim = M2 * norm2(xs_[k] - xs_[i]);
        for (std::size_t c = 0; c < ys_.size(); ++c)
          if (test(d, c) && (c == b || norm2(ys_[c] - ys_[b]) > lim)) d[c / 64] &= ~(std::uint64_t{1} << (c % 64));
        alive = !empty(d);
      }
      if (!alive) continue;
      std::vector<Mask> full(i + 1);
      full.insert(full.end(), std::make_move_iterator(next.begin()), std::make_move_iterator(next.end()));
      descend(i + 1, full);
    }
  }

  const Instance& inst_;
  OracleCaps caps_;
  std::vector<Point> xs_, ys_;
  std::vector<std::vector<std::size_t>> order_;
  std::size_t words_ = 0;
  std::vector<std::size_t> assign_;
  const std::function<bool(const std::vector<std::size_t>&)>* visit_ = nullptr;
  bool stop_ = false;
  SearchStats stats_;
};

}  // namespace

std::optional<EmbeddingMap> find_embedding(const Instance& inst, const OracleCaps& caps, SearchStats* stats) {
  Search s(inst, caps);
  std::optional<EmbeddingMap> out;
  const SearchStats st = s.run([&](const std::vector<std::size_t>& a) {
    out = s.to_map(a);
    return false;
  });
  if (stats) *stats = st;
  return out;
}

CountResult count_embeddings(const Instance& inst, const OracleCaps& caps) {
  Search s(inst, caps);
  CountResult r;
  r.stats = s.run([&](const std::vector<std::size_t>&) {
    ++r.count;
    return true;
  });
  return r;
}

std::vector<EmbeddingMap> enumerate_embeddings(const Instance& inst, std::size_t limit, const OracleCaps& caps,
                                               SearchStats* stats) {
  Search s(inst, caps);
  std::vector<EmbeddingMap> out;
  if (limit == 0) return out;
  const SearchStats st = s.run([&](const std::vector<std::size_t>& a) {
    out.push_back(s.to_map(a));
    return out.size() < limit;
  });
  if (stats) *stats = st;
  return out;
}

}  // namespace lipemb
