#include <doctest.h>

#include <set>

#include "brute.hpp"
#include "lipemb/oracle.hpp"

using namespace lipemb;

namespace {

BitField constant(Family f, std::int64_t w, std::int64_t h, std::uint8_t v) {
  BitField b = sample_field(0, f, {0, 0}, w, h);
  std::fill(b.bits.begin(), b.bits.end(), v);
  return b;
}

// Brute-force count of maps, same filter as brute::exists_embedding.
std::uint64_t brute_count(const BitField& x, const BitField& y, std::int64_t M) {
  std::vector<Point> xs, ys;
  for (std::int64_t j = 0; j < x.height; ++j)
    for (std::int64_t i = 0; i < x.width; ++i) xs.push_back({x.origin.x + i, x.origin.y + j});
  for (std::int64_t j = 0; j < y.height; ++j)
    for (std::int64_t i = 0; i < y.width; ++i) ys.push_back({y.origin.x + i, y.origin.y + j});
  std::vector<std::size_t> pick(xs.size(), 0);
  std::uint64_t n = 0;
  for (;;) {
    bool ok = true;
    for (std::size_t i = 0; i < xs.size() && ok; ++i) {
      ok = x.at(xs[i]) == y.at(ys[pick[i]]);
      for (std::size_t k = 0; k < i && ok; ++k)
        ok = pick[i] != pick[k] && norm2(ys[pick[i]] - ys[pick[k]]) <= M * M * norm2(xs[i] - xs[k]);
    }
    n += ok;
    std::size_t i = 0;
    while (i < pick.size() && ++pick[i] == ys.size()) pick[i++] = 0;
    if (i == pick.size()) return n;
  }
}

}  // namespace

TEST_CASE("decision examples") {
  Instance a{constant(Family::X, 2, 2, 0), constant(Family::Y, 6, 6, 0), 2};
  const auto m = find_embedding(a);
  REQUIRE(m);
  CHECK(verify_embedding(*m, a.x, a.y));

  Instance b{constant(Family::X, 2, 2, 0), constant(Family::Y, 6, 6, 0), 2};
  b.x.at({1, 0}) = 1;
  SearchStats st;
  CHECK_FALSE(find_embedding(b, {}, &st));
  CHECK_FALSE(st.exhausted);
}

TEST_CASE("counts") {
  for (std::uint64_t s = 0; s < 8; ++s) {
    Instance one{sample_field(s, Family::X, {0, 0}, 1, 1), sample_field(s, Family::Y, {0, 0}, 3, 3), 0};
    std::uint64_t k = 0;
    for (auto v : one.y.bits) k += v == one.x.bits[0];
    CHECK(count_embeddings(one).count == k);
    one.M = 5;
    CHECK(count_embeddings(one).count == k);
  }
  for (std::uint64_t s = 0; s < 30; ++s) {
    Instance inst{sample_field(s, Family::X, {0, 0}, 2, 2), sample_field(s, Family::Y, {0, 0}, 4, 4),
                  static_cast<std::int64_t>(1 + s % 3)};
    const auto c = count_embeddings(inst);
    REQUIRE_FALSE(c.stats.exhausted);
    CHECK(c.count == brute_count(inst.x, inst.y, inst.M));
    CHECK((c.count > 0) == find_embedding(inst).has_value());

    const auto all = enumerate_embeddings(inst, 1000);
    CHECK(all.size() == std::min<std::uint64_t>(c.count, 1000));
    std::set<std::vector<Point>> distinct;
    for (const auto& e : all) {
      CHECK(verify_embedding(e, inst.x, inst.y));
      distinct.insert(e.image);
    }
    CHECK(distinct.size() == all.size());
  }
}

TEST_CASE("rotation-symmetric target") {
  // A 4x4 Y invariant under the quarter turn about its centre has no fixed
  // site, so maps fall into orbits of exactly four.
  for (std::uint64_t s = 0; s < 10; ++s) {
    BitField y = constant(Family::Y, 4, 4, 0);
    for (std::int64_t j = 0; j < 2; ++j)
      for (std::int64_t i = 0; i < 2; ++i) {
        const auto v = static_cast<std::uint8_t>(mix_key(s, i, j) & 1);
        Point q{i, j};
        for (int r = 0; r < 4; ++r) {
          y.at(q) = v;
          q = {3 - q.y, q.x};
        }
      }
    Instance inst{sample_field(s, Family::X, {0, 0}, 2, 1), y, 2};
    CHECK(count_embeddings(inst).count % 4 == 0);
  }
}

TEST_CASE("caps and budgets") {
  Instance big{constant(Family::X, 5, 5, 0), constant(Family::Y, 8, 8, 0), 2};
  CHECK_THROWS_AS(find_embedding(big), CapError);
  Instance wide{constant(Family::X, 2, 2, 0), constant(Family::Y, 20, 20, 0), 2};
  CHECK_THROWS_AS(find_embedding(wide), CapError);

  OracleCaps tight;
  tight.node_budget = 10;
  Instance hard{constant(Family::X, 3, 3, 0), constant(Family::Y, 8, 8, 0), 1};
  hard.y.at({0, 0}) = 1;
  const auto c = count_embeddings(hard, tight);
  CHECK(c.stats.exhausted);
}
