#include <algorithm>
#include <cmath>
#include <set>

#include "lipemb/hierarchy.hpp"

namespace lipemb {

std::int64_t track_offset(int s, std::int64_t separation) {
  if (s <= 1) return 0;
  const std::int64_t k = s / 2;
  return (s % 2 == 0) ? k * separation : -k * separation;
}

Point detour_offset(int ell, std::int64_t step) {
  const std::int64_t k = (ell - 1) / 4 + 1;
  const int q = (ell - 1) % 4;
  const std::int64_t sx = (q == 0 || q == 3) ? 1 : -1;
  const std::int64_t sy = q < 2 ? 1 : -1;
  return {sx * k * step, sy * k * step};
}

CurveField::CurveField(const LevelGeometry& g, Rect window) : g_(g), window_(window) {
  const auto w = static_cast<std::size_t>(window.width());
  const auto h = static_cast<std::size_t>(window.height());
  vertices_.assign((w + 1) * (h + 1), VertexChoice{});
  vtracks_.assign((w + 1) * h, 1);
  htracks_.assign(w * (h + 1), 1);
}

std::size_t CurveField::vindex(Point v) const {
  if (v.x < window_.x0 || v.x > window_.x1 || v.y < window_.y0 || v.y > window_.y1) return SIZE_MAX;
  return static_cast<std::size_t>((v.y - window_.y0) * (window_.width() + 1) + (v.x - window_.x0));
}

std::size_t CurveField::vedge_index(Point e) const {
  if (e.x < window_.x0 || e.x > window_.x1 || e.y < window_.y0 || e.y >= window_.y1) return SIZE_MAX;
  return static_cast<std::size_t>((e.y - window_.y0) * (window_.width() + 1) + (e.x - window_.x0));
}

std::size_t CurveField::hedge_index(Point e) const {
  if (e.x < window_.x0 || e.x >= window_.x1 || e.y < window_.y0 || e.y > window_.y1) return SIZE_MAX;
  return static_cast<std::size_t>((e.y - window_.y0) * window_.width() + (e.x - window_.x0));
}

VertexChoice CurveField::vertex(Point v) const {
  const auto i = vindex(v);
  return i == SIZE_MAX ? VertexChoice{} : vertices_[i];
}
int CurveField::vtrack(Point e) const {
  const auto i = vedge_index(e);
  return i == SIZE_MAX ? 1 : vtracks_[i];
}
int CurveField::htrack(Point e) const {
  const auto i = hedge_index(e);
  return i == SIZE_MAX ? 1 : htracks_[i];
}

void CurveField::set_vertex(Point v, VertexChoice c) {
  const auto i = vindex(v);
  if (i == SIZE_MAX) throw PreconditionError("vertex outside the curve window");
  vertices_[i] = c;
}
void CurveField::set_vtrack(Point e, int s) {
  const auto i = vedge_index(e);
  if (i == SIZE_MAX) throw PreconditionError("edge outside the curve window");
  vtracks_[i] = static_cast<std::uint8_t>(s);
}
void CurveField::set_htrack(Point e, int s) {
  const auto i = hedge_index(e);
  if (i == SIZE_MAX) throw PreconditionError("edge outside the curve window");
  htracks_[i] = static_cast<std::uint8_t>(s);
}

bool CurveField::has_line(Piece p) const {
  switch (p.kind) {
    case PieceKind::Vertex: return vindex(p.at) != SIZE_MAX;
    case PieceKind::VEdge: return vedge_index(p.at) != SIZE_MAX;
    case PieceKind::HEdge: return hedge_index(p.at) != SIZE_MAX;
  }
  return false;
}

std::int64_t CurveField::offset_v(std::int64_t a, std::int64_t y) const {
  const std::int64_t n = g_.n, R = g_.buffer;
  const std::int64_t b = floor_div(y + n / 2, n);
  const std::int64_t dy = y - b * n;
  if (std::abs(dy) <= R) {
    const VertexChoice c = vertex({a, b});
    if (c.s == 2 && std::abs(dy) <= g_.detour_radius) return detour_offset(c.ell, g_.detour_step).x;
    return 0;
  }
  const std::int64_t b2 = floor_div(y, n);
  const std::int64_t t = y - (b2 * n + R + 1);
  const std::int64_t len = n - 2 * R - 1;
  if (t < g_.taper || t >= len - g_.taper) return 0;
  return track_offset(vtrack({a, b2}), g_.separation);
}

std::int64_t CurveField::offset_h(std::int64_t b, std::int64_t x) const {
  const std::int64_t n = g_.n, R = g_.buffer;
  const std::int64_t a = floor_div(x + n / 2, n);
  const std::int64_t dx = x - a * n;
  if (std::abs(dx) <= R) {
    const VertexChoice c = vertex({a, b});
    if (c.s == 2 && std::abs(dx) <= g_.detour_radius) return detour_offset(c.ell, g_.detour_step).y;
    return 0;
  }
  const std::int64_t a2 = floor_div(x, n);
  const std::int64_t t = x - (a2 * n + R + 1);
  const std::int64_t len = n - 2 * R - 1;
  if (t < g_.taper || t >= len - g_.taper) return 0;
  return track_offset(htrack({a2, b}), g_.separation);
}

Point CurveField::owner_of_point(Point p) const {
  const std::int64_t n = g_.n;
  std::int64_t ax = floor_div(p.x - 1, n);
  if (p.x <= ax * n + offset_v(ax, p.y)) --ax;
  else if (p.x > (ax + 1) * n + offset_v(ax + 1, p.y)) ++ax;
  std::int64_t by = floor_div(p.y - 1, n);
  if (p.y <= by * n + offset_h(by, p.x)) --by;
  else if (p.y > (by + 1) * n + offset_h(by + 1, p.x)) ++by;
  return {ax, by};
}

Rect CurveField::piece_rect(Piece p) const {
  const std::int64_t n = g_.n, R = g_.buffer;
  const std::int64_t a = p.at.x, b = p.at.y;
  switch (p.kind) {
    case PieceKind::Vertex: return {a * n - R, b * n - R, a * n + R, b * n + R};
    case PieceKind::VEdge: return {a * n - R, b * n + R, a * n + R, (b + 1) * n - R};
    case PieceKind::HEdge: return {a * n + R, b * n - R, (a + 1) * n - R, b * n + R};
  }
  return {};
}

int CurveField::option_count(PieceKind k) const { return k == PieceKind::Vertex ? 1 + g_.detours : g_.tracks; }

void CurveField::apply_option(Piece p, int option) {
  switch (p.kind) {
    case PieceKind::Vertex: set_vertex(p.at, option == 0 ? VertexChoice{1, 1} : VertexChoice{option, 2}); break;
    case PieceKind::VEdge: set_vtrack(p.at, option + 1); break;
    case PieceKind::HEdge: set_htrack(p.at, option + 1); break;
  }
}

int CurveField::current_option(Piece p) const {
  switch (p.kind) {
    case PieceKind::Vertex: {
      const VertexChoice c = vertex(p.at);
      return c.s == 2 ? c.ell : 0;
    }
    case PieceKind::VEdge: return vtrack(p.at) - 1;
    case PieceKind::HEdge: return htrack(p.at) - 1;
  }
  return 0;
}

// ---------------------------------------------------------------------------

long double preferred_mass(int j) { return 1.0L - std::pow(10.0L, -static_cast<long double>(j + 10)); }

int pick_option(int m, double u, int j) {
  if (m <= 1) return 0;
  const double eps = std::pow(10.0, -static_cast<double>(j + 10));
  if (u < 1.0 - eps) return 0;
  const double r = (u - (1.0 - eps)) / eps;
  const int idx = 1 + static_cast<int>(r * (m - 1));
  return std::min(idx, m - 1);
}

namespace {

// Block identity of a level-j cell; cells outside the window are distinct
// from everything else.
std::int64_t block_key(const CurveProblem& prob, Point u) {
  if (prob.window.contains(u)) return prob.block_of(u);
  return -1 - ((((u.x + (1 << 20)) & 0xFFFFF) << 20) | ((u.y + (1 << 20)) & 0xFFFFF));
}

bool interior_piece(const CurveProblem& prob, Piece p) {
  const Rect& w = prob.window;
  const std::int64_t a = p.at.x, b = p.at.y;
  switch (p.kind) {
    case PieceKind::Vertex: return a > w.x0 && a < w.x1 && b > w.y0 && b < w.y1;
    case PieceKind::VEdge: return a > w.x0 && a < w.x1 && b >= w.y0 && b < w.y1;
    case PieceKind::HEdge: return b > w.y0 && b < w.y1 && a >= w.x0 && a < w.x1;
  }
  return false;
}

std::vector<std::pair<Point, Point>> arms(Piece p) {
  const std::int64_t a = p.at.x, b = p.at.y;
  switch (p.kind) {
    case PieceKind::Vertex:
      return {{{a - 1, b}, {a, b}}, {{a - 1, b - 1}, {a, b - 1}}, {{a, b - 1}, {a, b}}, {{a - 1, b - 1}, {a - 1, b}}};
    case PieceKind::VEdge: return {{{a - 1, b}, {a, b}}};
    case PieceKind::HEdge: return {{{a, b - 1}, {a, b}}};
  }
  return {};
}

bool is_boundary_cell(const CurveProblem& prob, const CurveField& f, Point c) {
  const std::int64_t k = block_key(prob, f.owner(c));
  for (std::int64_t dy = -1; dy <= 1; ++dy)
    for (std::int64_t dx = -1; dx <= 1; ++dx)
      if ((dx || dy) && block_key(prob, f.owner(c + Point{dx, dy})) != k) return true;
  return false;
}

}  // namespace

bool piece_active(const CurveProblem& prob, Piece p) { return !piece_pairs(prob, p).empty(); }

std::vector<std::pair<Point, Point>> piece_pairs(const CurveProblem& prob, Piece p) {
  std::vector<std::pair<Point, Point>> out;
  for (const auto& [u, v] : arms(p))
    if (block_key(prob, u) != block_key(prob, v)) out.emplace_back(u, v);
  return out;
}

std::vector<int> valid_options(const CurveProblem& prob, CurveField& field, Piece p) {
  const int saved = field.current_option(p);
  const Rect r = field.piece_rect(p).intersect(prob.lower);
  std::vector<Point> hot;
  for (std::int64_t y = r.y0; y < r.y1; ++y)
    for (std::int64_t x = r.x0; x < r.x1; ++x) {
      const auto i = static_cast<std::size_t>((y - prob.lower.y0) * prob.lower.width() + (x - prob.lower.x0));
      if ((*prob.near_bad)[i]) hot.push_back({x, y});
    }
  std::vector<int> valid;
  const int count = field.option_count(p.kind);
  for (int o = 0; o < count; ++o) {
    field.apply_option(p, o);
    bool ok = true;
    for (Point c : hot)
      if (is_boundary_cell(prob, field, c)) {
        ok = false;
        break;
      }
    if (ok) valid.push_back(o);
  }
  field.apply_option(p, saved);
  return valid;
}

CurveSelection select_curves(const CurveProblem& prob) {
  if (!prob.near_bad || prob.near_bad->size() != static_cast<std::size_t>(prob.lower.width() * prob.lower.height()))
    throw PreconditionError("curve selection needs a bad mask over the lower window");
  CurveSelection out;
  out.field = CurveField(prob.geom, prob.window);
  const Rect& w = prob.window;

  auto visit = [&](Piece p) {
    if (!interior_piece(prob, p)) return;
    auto pairs = piece_pairs(prob, p);
    if (pairs.empty()) return;
    ++out.active_pieces;
    const auto valid = valid_options(prob, out.field, p);
    if (valid.empty()) {
      out.forced.insert(out.forced.end(), pairs.begin(), pairs.end());
      return;
    }
    const double u = to_unit(mix_key(prob.seed, 0xC7U, static_cast<std::uint64_t>(prob.family),
                                     static_cast<std::uint64_t>(prob.level), static_cast<std::uint64_t>(p.kind),
                                     static_cast<std::uint64_t>(p.at.x), static_cast<std::uint64_t>(p.at.y)));
    const int o = valid[static_cast<std::size_t>(pick_option(static_cast<int>(valid.size()), u, prob.level))];
    out.field.apply_option(p, o);
    if (o != 0) ++out.bent_pieces;
  };

  for (std::int64_t b = w.y0; b <= w.y1; ++b)
    for (std::int64_t a = w.x0; a <= w.x1; ++a) visit({PieceKind::Vertex, {a, b}});
  for (std::int64_t b = w.y0; b < w.y1; ++b)
    for (std::int64_t a = w.x0; a <= w.x1; ++a) visit({PieceKind::VEdge, {a, b}});
  for (std::int64_t b = w.y0; b <= w.y1; ++b)
    for (std::int64_t a = w.x0; a < w.x1; ++a) visit({PieceKind::HEdge, {a, b}});
  return out;
}

std::uint64_t count_single_cell_curves(const LevelGeometry& g) {
  CurveField f(g, Rect{-1, -1, 2, 2});
  const Piece pieces[] = {{PieceKind::Vertex, {0, 0}}, {PieceKind::Vertex, {1, 0}}, {PieceKind::Vertex, {0, 1}},
                          {PieceKind::Vertex, {1, 1}}, {PieceKind::VEdge, {0, 0}},  {PieceKind::VEdge, {1, 0}},
                          {PieceKind::HEdge, {0, 0}},  {PieceKind::HEdge, {0, 1}}};
  std::uint64_t total = 1;
  for (const Piece& p : pieces) {
    const Rect r = f.piece_rect(p);
    std::set<std::vector<bool>> shapes;
    for (int o = 0; o < f.option_count(p.kind); ++o) {
      f.apply_option(p, o);
      std::vector<bool> sig;
      for (std::int64_t y = r.y0; y < r.y1; ++y)
        for (std::int64_t x = r.x0; x < r.x1; ++x) sig.push_back(f.owner({x, y}) == Point{0, 0});
      shapes.insert(std::move(sig));
    }
    f.apply_option(p, 0);
    total *= shapes.size();
  }
  return total;
}

}  // namespace lipemb
