#include <doctest.h>

#include <set>

#include "brute.hpp"
#include "lipemb/embed.hpp"

using namespace lipemb;

namespace {

ParameterSet toy() { return load_profile("toy"); }

Animal box(std::int64_t x0, std::int64_t y0, std::int64_t x1, std::int64_t y1) {
  Animal a;
  for (std::int64_t y = y0; y < y1; ++y)
    for (std::int64_t x = x0; x < x1; ++x) a.push_back({x, y});
  return make_animal(std::move(a));
}

// Y field whose level-0 blocks have the given classes (default good).
BitField y_field(const ParameterSet& p, Rect cells, const std::map<Point, Y0Class>& cls) {
  const Rect s = site_window(p, Family::Y, cells);
  BitField f = sample_field(0, Family::Y, {s.x0, s.y0}, s.width(), s.height());
  for (std::int64_t y = s.y0; y < s.y1; ++y)
    for (std::int64_t x = s.x0; x < s.x1; ++x) {
      const Point b{brute::fdiv(x, p.M0), brute::fdiv(y, p.M0)};
      const auto it = cls.find(b);
      const Y0Class c = it == cls.end() ? Y0Class::Good : it->second;
      f.at({x, y}) = c == Y0Class::Good ? static_cast<std::uint8_t>((x + y) & 1) : c == Y0Class::One;
    }
  return f;
}

BitField x_field(const ParameterSet& p, Rect cells, std::uint64_t seed, const std::map<Point, int>& bits) {
  const Rect s = site_window(p, Family::X, cells);
  BitField f = sample_field(seed, Family::X, {s.x0, s.y0}, s.width(), s.height());
  for (auto [c, b] : bits) f.at(c) = static_cast<std::uint8_t>(b);
  return f;
}

}  // namespace

TEST_CASE("star-canonical correspondences") {
  const Animal D = box(0, 0, 20, 20);
  const Animal T = box(8, 8, 10, 10);
  const Animal A = box(6, 6, 12, 12);

  const auto id = star_canonical(D, {T}, {A}, {A}, 2);
  CHECK(id.is_identity());
  CHECK(id.budget == 0);

  // The target variant gives up a column and takes a row.
  Animal B = box(6, 6, 11, 12);
  for (std::int64_t x = 6; x < 12; ++x) B.push_back({x, 12});
  B = make_animal(B);
  const auto c = star_canonical(D, {T}, {A}, {B}, 2);
  std::set<Point> moved;
  for (auto [s, t] : c.map)
    if (s != t) moved.insert(s);
  // Only cells of the symmetric difference move.
  std::set<Point> diff;
  for (Point u : A)
    if (!contains(B, u)) diff.insert(u);
  for (Point u : B)
    if (!contains(A, u)) diff.insert(u);
  CHECK(moved == diff);
  // Moved cells land on the other side of the difference.
  for (auto [s, t] : c.map)
    if (s != t) CHECK(contains(A, s) != contains(A, t));
  CHECK(c.budget == 6);

  // Random one-cell swaps: the budget is the distance between the swapped cells.
  for (std::uint64_t i = 0; i < 100; ++i) {
    const Point out{6 + static_cast<std::int64_t>(mix_key(i, 1) % 6), 11};
    const Point in{6 + static_cast<std::int64_t>(mix_key(i, 2) % 6), 12};
    Animal v = A;
    v.erase(std::find(v.begin(), v.end(), out));
    v.push_back(in);
    v = make_animal(v);
    const auto r = star_canonical(D, {T}, {A}, {v}, 2);
    CHECK(r.budget == linf(in - out));
  }

  CHECK_THROWS_AS(star_canonical(D, {box(0, 0, 1, 1)}, {A}, {A}, 2), PreconditionError);
}

TEST_CASE("translation families") {
  const ParameterSet p = toy();
  const Animal S = box(0, 0, 30, 30);
  const Animal Tt = box(40, 0, 70, 30);
  const std::vector<Animal> T{box(12, 12, 14, 13)};
  const std::vector<Animal> Tp{box(55, 20, 56, 21)};
  const auto a = translation_family(S, Tt, T, Tp, {1, 1}, p, 1);
  const auto b = translation_family(S, Tt, T, Tp, {2, 1}, p, 1);
  REQUIRE(a.forward.size() == 1);
  CHECK(b.forward[0].second == translate(a.forward[0].second, {1, 0}));
  CHECK(b.backward[0].first == translate(a.backward[0].first, {-1, 0}));
  CHECK(a.image({3, 4}) == Point{43, 4});

  // The separation flag agrees with a direct pairwise check.
  for (std::int64_t hx = 1; hx <= p.shift_range; ++hx)
    for (std::int64_t hy = 1; hy <= p.shift_range; ++hy) {
      const auto c = translation_family(S, Tt, T, Tp, {hx, hy}, p, 1);
      bool sep = true;
      for (Point u : c.forward[0].first)
        for (Point v : c.backward[0].first) sep = sep && linf(u - v) >= 2;
      CHECK(c.separated == sep);
    }

  // Shifts chosen for independence have pairwise non-neighbouring images.
  const auto hs = independent_shifts(T[0], p.shift_range);
  CHECK(hs.size() >= 2);
  for (std::size_t i = 0; i < hs.size(); ++i)
    for (std::size_t k = i + 1; k < hs.size(); ++k) {
      const Animal x = translate(T[0], family_shift(hs[i], {0, 0}, p.shift_range));
      const Animal y = translate(T[0], family_shift(hs[k], {0, 0}, p.shift_range));
      for (Point u : x)
        for (Point v : y) CHECK(linf(u - v) >= 2);
    }

  CHECK_THROWS_AS(translation_family(S, box(0, 0, 3, 3), T, Tp, {1, 1}, p, 1), PreconditionError);
  CHECK_THROWS_AS(translation_family(S, Tt, T, Tp, {0, 1}, p, 1), PreconditionError);
}

TEST_CASE("interior translation families") {
  const ParameterSet p = toy();
  const Animal S = box(0, 0, 36, 36);
  const Animal U3 = box(8, 8, 28, 28);
  const Animal deep = box(17, 17, 19, 18);
  const Animal edge = box(9, 9, 10, 10);  // inside U3, near its edge
  const Animal annulus = box(2, 2, 3, 3);
  for (std::int64_t hx = 1; hx <= p.shift_range; ++hx)
    for (std::int64_t hy = 1; hy <= p.shift_range; ++hy) {
      const auto c = interior_translation_family(S, U3, {deep, edge, annulus}, {hx, hy}, p, 1);
      for (Point u : c.forward[0].second) CHECK(contains(U3, u));
      for (Point u : c.forward[1].second) CHECK(contains(U3, u));
      CHECK(c.forward[2].second == annulus);
    }
  const auto a = interior_translation_family(S, U3, {deep}, {1, 1}, p, 1);
  const auto b = interior_translation_family(S, U3, {deep}, {1, 3}, p, 1);
  CHECK(b.forward[0].second == translate(a.forward[0].second, {0, 2}));
}

TEST_CASE("site maps are verified exactly") {
  BitField x = sample_field(1, Family::X, {0, 0}, 3, 3);
  BitField y = x;
  y.family = Family::Y;
  EmbeddingMap id;
  for (std::int64_t j = 0; j < 3; ++j)
    for (std::int64_t i = 0; i < 3; ++i) {
      id.domain.push_back({i, j});
      id.image.push_back({i, j});
    }
  id.M = 1;
  CHECK(verify_embedding(id, x, y));

  EmbeddingMap col = id;
  col.image[1] = col.image[0];
  y.at(col.image[0]) = x.at(col.domain[1]) = x.at(col.domain[0]);
  std::string why;
  CHECK_FALSE(verify_embedding(col, x, y, &why));
  CHECK(why.find("injective") != std::string::npos);

  // Two neighbours sent to distance sqrt(5) > 2 * 1: Lipschitz 2 is broken
  // by exactly one unit of squared distance.
  BitField a = sample_field(0, Family::X, {0, 0}, 2, 1);
  BitField b = sample_field(0, Family::Y, {0, 0}, 3, 3);
  b.at({0, 0}) = a.at({0, 0});
  b.at({2, 1}) = a.at({1, 0});
  b.at({2, 0}) = a.at({1, 0});
  EmbeddingMap m{{{0, 0}, {1, 0}}, {{0, 0}, {2, 1}}, 2};
  CHECK_FALSE(verify_embedding(m, a, b));
  m.image[1] = {2, 0};
  CHECK(verify_embedding(m, a, b));
  b.at({2, 0}) = !a.at({1, 0});
  CHECK_FALSE(verify_embedding(m, a, b));

  m.image[1] = {5, 0};
  CHECK_THROWS_AS(verify_embedding(m, a, b), PreconditionError);
}

TEST_CASE("level-0 embedding is cellwise") {
  const ParameterSet p = toy();
  const Rect top{0, 0, 8, 6};
  const Y0Class classes[] = {Y0Class::Good, Y0Class::Zero, Y0Class::One};
  for (int bits = 0; bits < 4; ++bits)
    for (auto c0 : classes)
      for (auto c1 : classes) {
        const Hierarchy xh = build_hierarchy(p, x_field(p, top, 3, {{{3, 3}, bits & 1}, {{4, 3}, bits >> 1}}), 0, top);
        const Hierarchy yh = build_hierarchy(p, y_field(p, top, {{{3, 3}, c0}, {{4, 3}, c1}}), 0, top);
        const bool expect = level0_embeds(bits & 1, c0) && level0_embeds(bits >> 1, c1);
        const auto w = embeds_level(xh, {{3, 3}, {4, 3}}, yh, {0, 0}, 0);
        REQUIRE(w.has_value() == expect);
        if (w) {
          const auto m = flatten(*w, xh, yh);
          REQUIRE(m);
          CHECK(verify_embedding(*m, xh.field, yh.field));
        }
      }
  const Hierarchy xh = build_hierarchy(p, x_field(p, top, 3, {{{3, 3}, 0}, {{4, 3}, 1}}), 0, top);
  const Hierarchy yh = build_hierarchy(p, y_field(p, top, {{{3, 3}, Y0Class::Zero}, {{4, 3}, Y0Class::One}}), 0, top);
  CHECK(embeds_level(xh, {{3, 3}, {4, 3}}, yh, {0, 0}, 0).has_value());
  CHECK_THROWS_AS(embeds_level(yh, {{3, 3}}, xh, {0, 0}, 0), PreconditionError);
}

TEST_CASE("good X block into an all-good Y block") {
  const ParameterSet p = toy();
  const Rect top{0, 0, 3, 3};
  const Rect w0 = window_chain(p, 1, top)[0];
  const Hierarchy yh = build_hierarchy(p, y_field(p, w0, {}), 1, top);
  int checked = 0;
  for (std::uint64_t s = 0; s < 20 && checked < 5; ++s) {
    const Hierarchy xh = build_hierarchy(p, Family::X, s, 1, top);
    if (!xh.level(1).block_good(xh.level(1).block_at({1, 1}))) continue;
    if (xh.level(1).curves.current_option({PieceKind::Vertex, {1, 1}}) != 0) continue;
    ++checked;
    const auto w = embeds_level(xh, {{1, 1}}, yh, {0, 0}, 1);
    REQUIRE(w);
    CHECK(w->forward.empty());
    CHECK(w->backward.empty());
    const auto m = flatten(*w, xh, yh);
    REQUIRE(m);
    CHECK(verify_embedding(*m, xh.field, yh.field));
    // Deterministic.
    const auto w2 = embeds_level(xh, {{1, 1}}, yh, {0, 0}, 1);
    CHECK(w2->shift == w->shift);
    CHECK(w2->candidates_tried == w->candidates_tried);
  }
  CHECK(checked > 0);
}
