#include "lipemb/hierarchy.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "lipemb/embed.hpp"
#include "lipemb/stats.hpp"

namespace lipemb {

bool Level::block_good(std::int32_t b) const {
  if (level == 0) return bad[static_cast<std::size_t>(b)] == 0;
  return blocks[static_cast<std::size_t>(b)].good;
}

bool Level::block_censored(std::int32_t b) const {
  if (level == 0) return on_border(cell(static_cast<std::size_t>(b)));
  return blocks[static_cast<std::size_t>(b)].censored;
}

Animal Level::block_cells(std::int32_t b) const {
  if (level == 0) return {cell(static_cast<std::size_t>(b))};
  return blocks[static_cast<std::size_t>(b)].cells;
}

std::vector<Rect> window_chain(const ParameterSet& p, int depth, Rect top) {
  if (depth < 0 || depth > kMaxDepth)
    throw PreconditionError("depth must lie in [0, " + std::to_string(kMaxDepth) + "]");
  if (top.empty()) throw PreconditionError("top window is empty");
  std::vector<Rect> w(static_cast<std::size_t>(depth + 1));
  w[static_cast<std::size_t>(depth)] = top;
  for (int j = depth; j >= 1; --j) {
    const LevelGeometry g = p.geometry(j);
    const Rect& up = w[static_cast<std::size_t>(j)];
    const Rect scaled{up.x0 * g.n, up.y0 * g.n, up.x1 * g.n, up.y1 * g.n};
    w[static_cast<std::size_t>(j - 1)] = scaled.inflate(g.buffer + g.clearance + 1);
  }
  return w;
}

Rect site_window(const ParameterSet& p, Family f, Rect cells) {
  if (f == Family::X) return cells;
  return {cells.x0 * p.M0, cells.y0 * p.M0, cells.x1 * p.M0, cells.y1 * p.M0};
}

// ---------------------------------------------------------------------------

bool is_conjoined(const Rect& buffer, const Level& lower, const ParameterSet& p) {
  if (!lower.window.contains(buffer)) throw PreconditionError("lower structure does not cover the buffer");
  std::int64_t total = 0;
  std::set<std::int32_t> seen;
  for (std::int64_t y = buffer.y0; y < buffer.y1; ++y)
    for (std::int64_t x = buffer.x0; x < buffer.x1; ++x) {
      const std::int32_t c = lower.component_at({x, y});
      if (c < 0) continue;
      ++total;
      seen.insert(c);
    }
  if (total > p.k0) return true;
  for (std::int32_t c : seen)
    if (!lower.components[static_cast<std::size_t>(c)].semibad) return true;
  return false;
}

std::vector<std::int32_t> label_lattice_blocks(Rect window, const std::vector<std::uint8_t>& conj_right,
                                               const std::vector<std::uint8_t>& conj_up) {
  const auto w = static_cast<std::size_t>(window.width());
  const auto h = static_cast<std::size_t>(window.height());
  UnionFind uf(w * h);
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x) {
      const std::size_t i = y * w + x;
      if (x + 1 < w && conj_right[i]) uf.unite(i, i + 1);
      if (y + 1 < h && conj_up[i]) uf.unite(i, i + w);
    }
  std::vector<std::int32_t> id(w * h, -1), label(w * h, -1);
  std::int32_t next = 0;
  for (std::size_t i = 0; i < w * h; ++i) {
    const std::size_t r = uf.find(i);
    if (label[r] < 0) label[r] = next++;
    id[i] = label[r];
  }
  return id;
}

std::vector<Animal> form_lattice_blocks(Rect window, const std::function<bool(Point, Point)>& conjoined) {
  const auto w = static_cast<std::size_t>(window.width());
  const auto h = static_cast<std::size_t>(window.height());
  std::vector<std::uint8_t> right(w * h, 0), up(w * h, 0);
  for (std::int64_t y = window.y0; y < window.y1; ++y)
    for (std::int64_t x = window.x0; x < window.x1; ++x) {
      const auto i = static_cast<std::size_t>((y - window.y0) * window.width() + (x - window.x0));
      if (x + 1 < window.x1) right[i] = conjoined({x, y}, {x + 1, y});
      if (y + 1 < window.y1) up[i] = conjoined({x, y}, {x, y + 1});
    }
  const auto id = label_lattice_blocks(window, right, up);
  std::int32_t count = 0;
  for (auto v : id) count = std::max(count, v + 1);
  std::vector<Animal> out(static_cast<std::size_t>(count));
  for (std::size_t i = 0; i < id.size(); ++i)
    out[static_cast<std::size_t>(id[i])].push_back(
        {window.x0 + static_cast<std::int64_t>(i % w), window.y0 + static_cast<std::int64_t>(i / w)});
  for (auto& a : out) a = make_animal(std::move(a));
  return out;
}

bool inside_interior(const Animal& H, Point c, const LevelGeometry& g) {
  const Point u{floor_div(c.x, g.n), floor_div(c.y, g.n)};
  if (!contains(H, u)) return false;
  for (Point v : H)
    for (Side s : {Side::T, Side::L, Side::B, Side::R})
      if (!contains(H, v + side_offset(s)) && shared_buffer_rect(v, s, g.n, g.buffer).contains(c)) return false;
  return true;
}

bool inside_blowup(const Animal& H, Point c, const LevelGeometry& g) {
  const Point u{floor_div(c.x, g.n), floor_div(c.y, g.n)};
  if (contains(H, u)) return true;
  for (Point v : H)
    for (Side s : {Side::T, Side::L, Side::B, Side::R})
      if (!contains(H, v + side_offset(s)) && shared_buffer_rect(v, s, g.n, g.buffer).contains(c)) return true;
  return false;
}

// ---------------------------------------------------------------------------

namespace {

void fill_components(Level& lvl) {
  ComponentInput in;
  in.window = lvl.window;
  in.block = lvl.block;
  const std::size_t nb = lvl.block_count();
  in.good.resize(nb);
  in.size.resize(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    in.good[b] = lvl.block_good(static_cast<std::int32_t>(b)) ? 1 : 0;
    in.size[b] = lvl.level == 0 ? 1 : static_cast<std::int32_t>(lvl.blocks[b].cells.size());
  }
  std::int32_t count = 0;
  lvl.component = form_components(in, &count);
  lvl.components.assign(static_cast<std::size_t>(count), ComponentRec{});
  std::vector<std::set<std::int32_t>> blocks(static_cast<std::size_t>(count));
  for (std::size_t i = 0; i < lvl.component.size(); ++i) {
    const std::int32_t c = lvl.component[i];
    if (c < 0) continue;
    auto& rec = lvl.components[static_cast<std::size_t>(c)];
    const Point u = lvl.cell(i);
    rec.cells.push_back(u);
    if (lvl.bad[i]) ++rec.bad_cells;
    if (lvl.on_border(u)) rec.censored = true;
    blocks[static_cast<std::size_t>(c)].insert(lvl.block[i]);
  }
  for (std::int32_t c = 0; c < count; ++c) {
    auto& rec = lvl.components[static_cast<std::size_t>(c)];
    rec.id = c;
    rec.cells = make_animal(std::move(rec.cells));
    rec.blocks.assign(blocks[static_cast<std::size_t>(c)].begin(), blocks[static_cast<std::size_t>(c)].end());
    for (auto b : rec.blocks)
      if (lvl.block_censored(b)) rec.censored = true;
  }
  if (lvl.level >= 1)
    for (auto& b : lvl.blocks) b.component = lvl.component[lvl.index(b.cells.front())];
}

void classify_level0_components(Level& lvl, const ParameterSet& p) {
  for (auto& c : lvl.components) {
    // Y side only: X level-0 blocks are never bad.
    const long double s = std::ldexp(1.0L, -static_cast<int>(std::min<std::int64_t>(c.bad_cells, 16000)));
    c.s_point = c.s_lower = c.s_upper = static_cast<double>(s);
    c.source = SemiBadSource::Exact;
    c.semibad = semibad_decision(c.size(), s, 0, p);
  }
}

void classify_components(Hierarchy& h, int j) {
  Level& lvl = h.levels[static_cast<std::size_t>(j)];
  const ParameterSet& p = h.params;
  const bool reachable = semibad_reachable(j, p);
  for (auto& c : lvl.components) {
    if (c.size() > p.v0) {
      c.semibad = false;
      c.source = SemiBadSource::SizeGate;
      continue;
    }
    if (!reachable) {
      c.semibad = false;
      c.source = SemiBadSource::Unreachable;
      continue;
    }
    const auto est = estimate_S(h, j, c.id, static_cast<std::uint64_t>(p.semibad_trials),
                                mix_key(h.seed, 0x5EB1U, static_cast<std::uint64_t>(j), static_cast<std::uint64_t>(c.id)));
    c.s_point = est.point;
    c.s_lower = est.lower;
    c.s_upper = est.upper;
    c.source = SemiBadSource::Estimate;
    c.semibad = semibad_decision(c.size(), static_cast<long double>(est.lower), j, p);
  }
}

void build_level0(Hierarchy& h) {
  const ParameterSet& p = h.params;
  Level lvl;
  lvl.level = 0;
  lvl.family = h.family;
  lvl.window = h.windows[0];
  const std::size_t cells = static_cast<std::size_t>(lvl.window.width() * lvl.window.height());
  lvl.block.resize(cells);
  for (std::size_t i = 0; i < cells; ++i) lvl.block[i] = static_cast<std::int32_t>(i);
  lvl.bad.assign(cells, 0);
  lvl.value.resize(cells);
  if (h.family == Family::X) {
    for (std::size_t i = 0; i < cells; ++i) lvl.value[i] = h.field.at(lvl.cell(i));
  } else {
    const Y0Grid g = classify_y0_window(h.field, lvl.window, p.M0);
    for (std::size_t i = 0; i < cells; ++i) {
      lvl.value[i] = static_cast<std::uint8_t>(g.cls[i]);
      lvl.bad[i] = g.cls[i] != Y0Class::Good;
    }
  }
  fill_components(lvl);
  classify_level0_components(lvl, p);
  h.levels.push_back(std::move(lvl));
}

// Library of partner semi-bad components at level j-1, used by the airport
// test at level j.
std::vector<LibraryEntry> build_library(const Hierarchy& h, int j, const BuildOptions& opt) {
  std::vector<LibraryEntry> lib;
  if (!opt.airports) return lib;
  const ParameterSet& p = h.params;
  const Family other = partner(h.family);
  const int lj = j - 1;
  if (lj == 0) {
    if (other == Family::X) return lib;  // level-0 X blocks are always good
    if (!semibad_decision(1, 0.5L, 0, p)) return lib;
  } else if (!semibad_reachable(lj, p)) {
    return lib;
  }
  BuildOptions sub = opt;
  sub.classify_top = true;
  auto ph = std::make_shared<Hierarchy>(build_hierarchy(
      p, other, mix_key(h.seed, 0x11B5U, static_cast<std::uint64_t>(j)), lj,
      Rect{0, 0, opt.library_window, opt.library_window}, sub));
  std::set<Shape> shapes;
  for (const auto& c : ph->level(lj).components) {
    if (c.censored || !c.semibad) continue;
    Shape s = canonical_shape(c.cells);
    if (!shapes.insert(s).second) continue;
    lib.push_back(LibraryEntry{s.sites, ph, c.id, c.cells.front()});
  }
  return lib;
}

void build_level(Hierarchy& h, int j, const BuildOptions& opt) {
  const ParameterSet& p = h.params;
  const Level& lower = h.levels[static_cast<std::size_t>(j - 1)];
  Level lvl;
  lvl.level = j;
  lvl.family = h.family;
  lvl.window = h.windows[static_cast<std::size_t>(j)];
  lvl.geom = p.geometry(j);
  const LevelGeometry& g = lvl.geom;
  const Rect W = lvl.window;
  const std::size_t cells = static_cast<std::size_t>(W.width() * W.height());

  lvl.conj_right.assign(cells, 0);
  lvl.conj_up.assign(cells, 0);
  for (std::size_t i = 0; i < cells; ++i) {
    const Point u = lvl.cell(i);
    if (u.x + 1 < W.x1) lvl.conj_right[i] = is_conjoined(shared_buffer_rect(u, Side::R, g.n, g.buffer), lower, p);
    if (u.y + 1 < W.y1) lvl.conj_up[i] = is_conjoined(shared_buffer_rect(u, Side::T, g.n, g.buffer), lower, p);
  }

  // Cells within L-inf distance < clearance of a bad lower component.
  const Rect LW = lower.window;
  const auto lw = static_cast<std::size_t>(LW.width());
  const auto lh = static_cast<std::size_t>(LW.height());
  std::vector<std::uint8_t> near_bad(lw * lh, 0);
  {
    const std::int64_t r = g.clearance - 1;
    // Separable dilation: rows then columns.
    std::vector<std::uint8_t> rows(lw * lh, 0);
    for (std::size_t y = 0; y < lh; ++y) {
      std::int64_t last = -(1LL << 40);
      for (std::size_t x = 0; x < lw; ++x) {
        if (lower.component[y * lw + x] >= 0) last = static_cast<std::int64_t>(x);
        if (static_cast<std::int64_t>(x) - last <= r) rows[y * lw + x] = 1;
      }
      last = 1LL << 40;
      for (std::size_t x = lw; x-- > 0;) {
        if (lower.component[y * lw + x] >= 0) last = static_cast<std::int64_t>(x);
        if (last - static_cast<std::int64_t>(x) <= r) rows[y * lw + x] = 1;
      }
    }
    for (std::size_t x = 0; x < lw; ++x) {
      std::int64_t last = -(1LL << 40);
      for (std::size_t y = 0; y < lh; ++y) {
        if (rows[y * lw + x]) last = static_cast<std::int64_t>(y);
        if (static_cast<std::int64_t>(y) - last <= r) near_bad[y * lw + x] = 1;
      }
      last = 1LL << 40;
      for (std::size_t y = lh; y-- > 0;) {
        if (rows[y * lw + x]) last = static_cast<std::int64_t>(y);
        if (last - static_cast<std::int64_t>(y) <= r) near_bad[y * lw + x] = 1;
      }
    }
  }

  // Curve selection; pieces with no valid option conjoin their cells and
  // the selection restarts on the coarser partition.
  for (;;) {
    lvl.block = label_lattice_blocks(W, lvl.conj_right, lvl.conj_up);
    CurveProblem prob;
    prob.geom = g;
    prob.level = j;
    prob.window = W;
    prob.lower = LW;
    prob.block_of = [&lvl](Point u) { return lvl.block_at(u); };
    prob.near_bad = &near_bad;
    prob.seed = h.seed;
    prob.family = h.family;
    CurveSelection sel = select_curves(prob);
    if (sel.forced.empty()) {
      lvl.curves = std::move(sel.field);
      break;
    }
    for (const auto& [a, b] : sel.forced) {
      const Point lo = std::min(a, b);
      const Point hi = std::max(a, b);
      auto& flag = (hi.x != lo.x) ? lvl.conj_right[lvl.index(lo)] : lvl.conj_up[lvl.index(lo)];
      if (!flag) {
        flag = 1;
        ++lvl.forced_conjoins;
      }
    }
  }

  std::int32_t nblocks = 0;
  for (auto b : lvl.block) nblocks = std::max(nblocks, b + 1);
  lvl.blocks.assign(static_cast<std::size_t>(nblocks), BlockRec{});
  for (std::size_t i = 0; i < cells; ++i) {
    auto& b = lvl.blocks[static_cast<std::size_t>(lvl.block[i])];
    const Point u = lvl.cell(i);
    b.cells.push_back(u);
    if (lvl.on_border(u)) b.censored = true;
  }
  for (std::int32_t b = 0; b < nblocks; ++b) {
    lvl.blocks[static_cast<std::size_t>(b)].id = b;
    lvl.blocks[static_cast<std::size_t>(b)].cells = make_animal(std::move(lvl.blocks[static_cast<std::size_t>(b)].cells));
  }

  lvl.owner.assign(lw * lh, -1);
  for (std::size_t i = 0; i < lw * lh; ++i) {
    const Point c{LW.x0 + static_cast<std::int64_t>(i % lw), LW.y0 + static_cast<std::int64_t>(i / lw)};
    const Point u = lvl.curves.owner(c);
    if (!W.contains(u)) continue;
    const std::int32_t b = lvl.block_at(u);
    lvl.owner[i] = b;
    lvl.blocks[static_cast<std::size_t>(b)].members.push_back(c);
  }
  for (auto& b : lvl.blocks) {
    std::sort(b.members.begin(), b.members.end());
    std::set<std::int32_t> subs;
    for (Point c : b.members)
      if (const auto k = lower.component_at(c); k >= 0) subs.insert(k);
    b.bad_sub.assign(subs.begin(), subs.end());
    for (auto k : b.bad_sub) {
      const auto& rec = lower.components[static_cast<std::size_t>(k)];
      b.bad_sub_size += rec.size();
      if (!rec.semibad) b.sub_semibad = false;
    }
  }

  h.levels.push_back(std::move(lvl));
  const auto library = build_library(h, j, opt);
  Level& done = h.levels.back();
  done.bad.assign(cells, 0);
  for (auto& b : done.blocks) {
    b.good = classify_good_block(h, j, b, library);
    if (!b.good)
      for (Point u : b.cells) done.bad[done.index(u)] = 1;
  }
  fill_components(done);
}

}  // namespace

Hierarchy build_hierarchy(const ParameterSet& p, Family f, std::uint64_t seed, int depth, Rect top,
                          const BuildOptions& opt) {
  const auto windows = window_chain(p, depth, top);
  const Rect sites = site_window(p, f, windows[0]);
  BitField field = sample_field(seed, f, {sites.x0, sites.y0}, sites.width(), sites.height(), p.field_cap);
  return build_hierarchy(p, std::move(field), depth, top, opt);
}

Hierarchy build_hierarchy(const ParameterSet& p, BitField field, int depth, Rect top, const BuildOptions& opt) {
  Hierarchy h;
  h.params = p;
  h.family = field.family;
  h.seed = field.seed;
  h.depth = depth;
  h.windows = window_chain(p, depth, top);
  if (!field.rect().contains(site_window(p, field.family, h.windows[0])))
    throw PreconditionError("field does not cover the level-0 window of the requested hierarchy");
  h.field = std::move(field);
  build_level0(h);
  for (int j = 1; j <= depth; ++j) {
    build_level(h, j, opt);
    if (j < depth || opt.classify_top) classify_components(h, j);
  }
  return h;
}

}  // namespace lipemb
