#include "lipemb/embed.hpp"

#include <algorithm>
#include <set>

namespace lipemb {

namespace {

bool subset(const Animal& a, const Animal& b) {
  return std::all_of(a.begin(), a.end(), [&](Point c) { return contains(b, c); });
}

Animal set_minus(const Animal& a, const Animal& b) {
  Animal out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

// Nearest cell of S (sorted, nonempty) to c in L-inf, ties by Euclidean
// distance and then lexicographically.
Point nearest_in(const Animal& S, Point c) {
  if (contains(S, c)) return c;
  const Rect bb = bounding_box(S);
  const std::int64_t rmax = std::max({std::abs(c.x - bb.x0), std::abs(c.x - bb.x1), std::abs(c.y - bb.y0),
                                      std::abs(c.y - bb.y1)}) + 1;
  for (std::int64_t r = 1; r <= rmax; ++r) {
    bool found = false;
    Point best;
    auto consider = [&](Point q) {
      if (!contains(S, q)) return;
      if (!found || norm2(q - c) < norm2(best - c) || (norm2(q - c) == norm2(best - c) && q < best)) best = q;
      found = true;
    };
    for (std::int64_t d = -r; d <= r; ++d) {
      consider({c.x + d, c.y - r});
      consider({c.x + d, c.y + r});
    }
    for (std::int64_t d = -r + 1; d <= r - 1; ++d) {
      consider({c.x - r, c.y + d});
      consider({c.x + r, c.y + d});
    }
    if (found) return best;
  }
  throw PreconditionError("nearest cell search ran off the set");
}

// Cells of S (sorted) whose closed L-inf ball of radius m lies in S.
Animal erode(const Animal& S, std::int64_t m) {
  if (m <= 0 || S.empty()) return S;
  const Rect bb = bounding_box(S);
  const auto w = static_cast<std::size_t>(bb.width()), h = static_cast<std::size_t>(bb.height());
  std::vector<std::int64_t> pre((w + 1) * (h + 1), 0);
  for (Point c : S) pre[(static_cast<std::size_t>(c.y - bb.y0) + 1) * (w + 1) + static_cast<std::size_t>(c.x - bb.x0) + 1] = 1;
  for (std::size_t y = 1; y <= h; ++y)
    for (std::size_t x = 1; x <= w; ++x)
      pre[y * (w + 1) + x] += pre[(y - 1) * (w + 1) + x] + pre[y * (w + 1) + x - 1] - pre[(y - 1) * (w + 1) + x - 1];
  const std::int64_t full = (2 * m + 1) * (2 * m + 1);
  Animal out;
  for (Point c : S) {
    const std::int64_t x0 = c.x - m - bb.x0, y0 = c.y - m - bb.y0, x1 = c.x + m + 1 - bb.x0, y1 = c.y + m + 1 - bb.y0;
    if (x0 < 0 || y0 < 0 || x1 > bb.width() || y1 > bb.height()) continue;
    const auto X0 = static_cast<std::size_t>(x0), Y0 = static_cast<std::size_t>(y0);
    const auto X1 = static_cast<std::size_t>(x1), Y1 = static_cast<std::size_t>(y1);
    const std::int64_t cnt = pre[Y1 * (w + 1) + X1] - pre[Y0 * (w + 1) + X1] - pre[Y1 * (w + 1) + X0] + pre[Y0 * (w + 1) + X0];
    if (cnt == full) out.push_back(c);
  }
  return out;
}

void check_margin(const Animal& T, const Animal& domain, std::int64_t margin) {
  for (Point c : T)
    for (std::int64_t dy = -margin; dy <= margin; ++dy)
      for (std::int64_t dx = -margin; dx <= margin; ++dx)
        if (!contains(domain, c + Point{dx, dy}))
          throw PreconditionError("bad set lies closer than the interior margin to the domain boundary");
}

std::int64_t total_size(const std::vector<Animal>& sets) {
  std::int64_t s = 0;
  for (const auto& a : sets) s += static_cast<std::int64_t>(a.size());
  return s;
}

}  // namespace

Point CellCorrespondence::image(Point c) const {
  auto it = std::lower_bound(map.begin(), map.end(), c, [](const auto& e, Point q) { return e.first < q; });
  if (it == map.end() || it->first != c) throw PreconditionError("cell outside the correspondence's source");
  return it->second;
}

bool CellCorrespondence::is_identity() const {
  for (const auto& [a, b] : map)
    if (a != b) return false;
  for (const auto& [a, b] : forward)
    if (a != b) return false;
  for (const auto& [a, b] : backward)
    if (a != b) return false;
  return true;
}

CellCorrespondence star_canonical(const Animal& domain, const std::vector<Animal>& T,
                                  const std::vector<Animal>& source_variants,
                                  const std::vector<Animal>& target_variants, std::int64_t margin) {
  if (source_variants.size() != T.size() || target_variants.size() != T.size())
    throw PreconditionError("one source and one target variant per bad set");
  std::vector<Animal> amb(T.size()), bma(T.size());
  for (std::size_t i = 0; i < T.size(); ++i) {
    const Animal& A = source_variants[i];
    const Animal& B = target_variants[i];
    if (!subset(T[i], domain)) throw PreconditionError("bad set outside the domain");
    check_margin(T[i], domain, margin);
    if (!subset(A, domain) || !subset(B, domain)) throw PreconditionError("variant outside the domain");
    if (!subset(T[i], A) || !subset(T[i], B)) throw PreconditionError("variants must contain their bad set");
    amb[i] = set_minus(A, B);
    bma[i] = set_minus(B, A);
    if (amb[i].empty() != bma[i].empty()) throw PreconditionError("variant shapes incompatible");
  }
  CellCorrespondence out;
  out.source = out.target = domain;
  out.map.reserve(domain.size());
  for (Point c : domain) {
    Point img = c;
    for (std::size_t i = 0; i < T.size(); ++i) {
      if (contains(amb[i], c)) {
        img = nearest_in(bma[i], c);
        break;
      }
      if (contains(bma[i], c)) {
        img = nearest_in(amb[i], c);
        break;
      }
    }
    out.map.emplace_back(c, img);
    out.budget = std::max(out.budget, linf(img - c));
  }
  for (const auto& t : T) out.forward.emplace_back(t, t);
  return out;
}

std::vector<Point> shift_bases(std::int64_t range) {
  std::vector<Point> out;
  for (std::int64_t p = -range; p <= range; ++p)
    for (std::int64_t q = -range; q <= range; ++q) out.push_back({p, q});
  std::stable_sort(out.begin(), out.end(), [](Point a, Point b) { return linf(a) < linf(b); });
  return out;
}

Point family_shift(Point h, Point base, std::int64_t H) {
  const std::int64_t c = (H - 1) / 2;
  return {base.x * H - c + h.x - 1, base.y * H - c + h.y - 1};
}

CellCorrespondence translation_family(const Animal& source, const Animal& target, const std::vector<Animal>& T,
                                      const std::vector<Animal>& Tp, Point h, const ParameterSet& p, int j,
                                      Point base) {
  const auto d = same_shape(source, target);
  if (!d) throw PreconditionError("translation family needs equal-shape domains");
  const std::int64_t H = p.shift_range;
  if (h.x < 1 || h.y < 1 || h.x > H || h.y > H) throw PreconditionError("offset outside [1..H]^2");
  if (total_size(T) > p.v0 * p.k0 || total_size(Tp) > p.v0 * p.k0)
    throw PreconditionError("bad sets exceed the v0*k0 size bound");
  const std::int64_t margin = j >= 1 ? p.geometry(j).interior_margin : 0;
  for (const auto& t : T) {
    if (!subset(t, source)) throw PreconditionError("bad set outside the source domain");
    check_margin(t, source, margin);
  }
  for (const auto& t : Tp) {
    if (!subset(t, target)) throw PreconditionError("bad set outside the target domain");
    check_margin(t, target, margin);
  }
  const Point t = family_shift(h, base, H);
  CellCorrespondence out;
  out.level = j;
  out.source = source;
  out.target = target;
  for (Point c : source) out.map.emplace_back(c, c + *d);
  for (const auto& s : T) {
    Animal img = translate(s, *d + t);
    if (!subset(img, target)) throw PreconditionError("shifted bad set leaves the target domain");
    out.forward.emplace_back(s, std::move(img));
  }
  for (const auto& s : Tp) {
    Animal pre = translate(s, -(*d + t));
    if (!subset(pre, source)) throw PreconditionError("shifted bad set leaves the source domain");
    out.backward.emplace_back(std::move(pre), s);
  }
  for (const auto& [ti, si] : out.forward)
    for (const auto& [sk, tk] : out.backward)
      if (linf_distance(ti, sk) < 2) out.separated = false;
  out.budget = std::max(linf(*d), linf(*d + t));
  return out;
}

CellCorrespondence interior_translation_family(const Animal& source, const Animal& U3, const std::vector<Animal>& T,
                                               Point h, const ParameterSet& p, int j) {
  const std::int64_t H = p.shift_range;
  if (h.x < 1 || h.y < 1 || h.x > H || h.y > H) throw PreconditionError("offset outside [1..H]^2");
  if (total_size(T) > p.v0 * p.k0) throw PreconditionError("bad sets exceed the v0*k0 size bound");
  if (!subset(U3, source)) throw PreconditionError("interior must lie inside the source domain");
  const auto bases = shift_bases(p.shift_bases);
  CellCorrespondence out;
  out.level = j;
  out.source = out.target = source;
  for (Point c : source) out.map.emplace_back(c, c);
  for (const auto& s : T) {
    if (!subset(s, source)) throw PreconditionError("bad set outside the source domain");
    if (!subset(s, U3)) {  // in the annulus: stays put
      out.forward.emplace_back(s, s);
      continue;
    }
    bool placed = false;
    for (Point b : bases) {
      bool all = true;
      for (std::int64_t hx = 1; hx <= H && all; ++hx)
        for (std::int64_t hy = 1; hy <= H && all; ++hy) all = subset(translate(s, family_shift({hx, hy}, b, H)), U3);
      if (!all) continue;
      const Point t = family_shift(h, b, H);
      out.forward.emplace_back(s, translate(s, t));
      out.budget = std::max(out.budget, linf(t));
      placed = true;
      break;
    }
    if (!placed) throw PreconditionError("no base keeps every translate inside the interior");
  }
  return out;
}

std::vector<Point> independent_shifts(const Animal& T, std::int64_t H, Point base) {
  std::vector<Point> picked;
  std::vector<Animal> images;
  for (std::int64_t hx = 1; hx <= H; ++hx)
    for (std::int64_t hy = 1; hy <= H; ++hy) {
      Animal img = translate(T, family_shift({hx, hy}, base, H));
      bool ok = true;
      for (const auto& other : images)
        if (linf_distance(img, other) < 2) {
          ok = false;
          break;
        }
      if (!ok) continue;
      picked.push_back({hx, hy});
      images.push_back(std::move(img));
    }
  return picked;
}

// ---------------------------------------------------------------------------

namespace {

Animal member_union(const Level& lvl, const Animal& U) {
  std::set<std::int32_t> ids;
  for (Point u : U) ids.insert(lvl.block_at(u));
  Animal out;
  for (auto b : ids) {
    const auto& m = lvl.blocks[static_cast<std::size_t>(b)].members;
    out.insert(out.end(), m.begin(), m.end());
  }
  return make_animal(std::move(out));
}

std::vector<Animal> bad_components_in(const Level& lower, const Animal& cells, Point shift) {
  std::set<std::int32_t> ids;
  for (Point c : cells)
    if (lower.in(c))
      if (const auto k = lower.component_at(c); k >= 0) ids.insert(k);
  std::vector<Animal> out;
  for (auto k : ids) out.push_back(translate(lower.components[static_cast<std::size_t>(k)].cells, shift));
  return out;
}

CellCorrespondence nearest_map(const Animal& mx, const Animal& my, int j) {
  CellCorrespondence f;
  f.level = j;
  f.source = mx;
  f.target = my;
  f.map.reserve(mx.size());
  for (Point c : mx) {
    const Point img = my.empty() ? c : nearest_in(my, c);
    f.map.emplace_back(c, img);
    f.budget = std::max(f.budget, linf(img - c));
  }
  return f;
}

}  // namespace

std::optional<Witness> embeds_level(const Hierarchy& xh, const Animal& U, const Hierarchy& yh, Point tau, int j) {
  if (U.empty()) throw PreconditionError("empty cell set");
  if (xh.family != Family::X || yh.family != Family::Y) throw PreconditionError("embedding runs from X into Y");
  if (j < 0 || j > xh.depth || j > yh.depth) throw PreconditionError("structure not built up to the requested level");
  const Level& X = xh.level(j);
  const Level& Y = yh.level(j);
  for (Point u : U)
    if (!X.in(u) || !Y.in(u + tau)) throw PreconditionError("cells outside the built windows");

  if (j == 0) {
    for (Point c : U)
      if (!level0_embeds(X.value[X.index(c)], static_cast<Y0Class>(Y.value[Y.index(c + tau)]))) return std::nullopt;
    Witness w;
    w.level = 0;
    w.tau = tau;
    w.x_cells = U;
    return w;
  }

  const Animal Uy = translate(U, tau);
  if (!is_block_union(X, U) || !is_block_union(Y, Uy)) return std::nullopt;
  const ParameterSet& p = xh.params;
  const std::int64_t n = X.geom.n;
  if (Y.geom.n != n) throw PreconditionError("X and Y structures use different scales");
  const Point shiftY{tau.x * n, tau.y * n};

  const Animal mx = member_union(X, U);
  const Animal my = translate(member_union(Y, Uy), -shiftY);
  const Level& XL = xh.level(j - 1);
  const Level& YL = yh.level(j - 1);
  const auto T = bad_components_in(XL, mx, {0, 0});
  const auto Tp = bad_components_in(YL, translate(my, shiftY), -shiftY);

  Witness w;
  w.level = j;
  w.tau = tau;
  w.x_cells = U;
  w.mx = mx;
  w.my = my;
  w.base = nearest_map(mx, my, j);
  if (T.empty() && Tp.empty()) return w;

  const std::int64_t margin = X.geom.interior_margin;
  const Animal emx = erode(mx, margin);
  const Animal emy = erode(my, margin);
  const std::int64_t H = p.shift_range;

  for (Point base : shift_bases(p.shift_bases))
    for (std::int64_t hx = 1; hx <= H; ++hx)
      for (std::int64_t hy = 1; hy <= H; ++hy) {
        const Point t = family_shift({hx, hy}, base, H);
        ++w.candidates_tried;
        bool ok = true;
        std::vector<Animal> S, Sp;
        for (const auto& ti : T) {
          Animal s = translate(ti, t);
          if (!subset(s, emy) || !is_block_union(YL, translate(s, shiftY))) {
            ok = false;
            break;
          }
          S.push_back(std::move(s));
        }
        for (std::size_t k = 0; ok && k < Tp.size(); ++k) {
          Animal s = translate(Tp[k], -t);
          if (!subset(s, emx) || !is_block_union(XL, s)) {
            ok = false;
            break;
          }
          Sp.push_back(std::move(s));
        }
        for (std::size_t i = 0; ok && i < T.size(); ++i)
          for (const auto& s : Sp)
            if (linf_distance(T[i], s) < 2) {
              ok = false;
              break;
            }
        if (!ok) continue;

        const Point inner_tau = t + shiftY;
        std::vector<Match> fwd, bwd;
        for (std::size_t i = 0; ok && i < T.size(); ++i) {
          auto inner = embeds_level(xh, T[i], yh, inner_tau, j - 1);
          if (!inner) {
            ok = false;
            break;
          }
          fwd.push_back(Match{T[i], translate(T[i], inner_tau), inner_tau, std::make_shared<Witness>(std::move(*inner))});
        }
        for (std::size_t k = 0; ok && k < Sp.size(); ++k) {
          auto inner = embeds_level(xh, Sp[k], yh, inner_tau, j - 1);
          if (!inner) {
            ok = false;
            break;
          }
          bwd.push_back(Match{Sp[k], translate(Sp[k], inner_tau), inner_tau, std::make_shared<Witness>(std::move(*inner))});
        }
        if (!ok) continue;
        w.shift = t;
        w.forward = std::move(fwd);
        w.backward = std::move(bwd);
        return w;
      }
  return std::nullopt;
}

}  // namespace lipemb
