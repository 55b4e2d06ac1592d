#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <vector>

#include "brute.hpp"
#include "lipemb/fields.hpp"
#include "lipemb/io.hpp"
#include "lipemb/simd.hpp"
#include "lipemb/stats.hpp"

using namespace lipemb;

TEST_CASE("sampling is deterministic and keyed per site") {
  const BitField a = sample_field(7, Family::X, {0, 0}, 4, 4);
  const BitField b = sample_field(7, Family::X, {0, 0}, 4, 4);
  CHECK(a.bits == b.bits);

  const BitField c = sample_field(7, Family::X, {2, 2}, 4, 4);
  for (std::int64_t y = 2; y < 4; ++y)
    for (std::int64_t x = 2; x < 4; ++x) CHECK(a.at({x, y}) == c.at({x, y}));

  // Negative coordinates and unaligned origins agree with the single-site path.
  const BitField d = sample_field(99, Family::Y, {-37, -5}, 71, 9);
  for (std::int64_t y = -5; y < 4; ++y)
    for (std::int64_t x = -37; x < 34; ++x) REQUIRE(d.at({x, y}) == sample_site(99, Family::Y, {x, y}));

  // Families and seeds give different fields.
  CHECK(sample_field(7, Family::Y, {0, 0}, 16, 16).bits != sample_field(7, Family::X, {0, 0}, 16, 16).bits);
  CHECK(sample_field(8, Family::X, {0, 0}, 16, 16).bits != sample_field(7, Family::X, {0, 0}, 16, 16).bits);
}

TEST_CASE("sampled bits are fair") {
  const BitField f = sample_field(2024, Family::X, {0, 0}, 1000, 1000);
  double ones = 0;
  for (auto b : f.bits) ones += b;
  const double mean = ones / 1e6;
  // 3 sigma of a fair coin over 10^6 draws is 0.0015.
  CHECK(std::abs(mean - 0.5) <= 0.0015);
}

TEST_CASE("oversized windows are rejected") {
  CHECK_THROWS_AS(sample_field(1, Family::X, {0, 0}, 1 << 16, 1 << 16, 1 << 20), CapError);
  CHECK_THROWS_AS(sample_field(1, Family::X, {0, 0}, 0, 4), PreconditionError);
}

TEST_CASE("level-0 Y classes") {
  std::vector<std::uint8_t> b(9, 0);
  CHECK(classify_y0_block(b, 3) == Y0Class::Zero);
  b[0] = b[1] = b[2] = 1;
  CHECK(classify_y0_block(b, 3) == Y0Class::Good);
  b[2] = 0;
  CHECK(classify_y0_block(b, 3) == Y0Class::Zero);

  std::vector<std::uint8_t> c{1, 1, 0, 0};
  CHECK(classify_y0_block(c, 2) == Y0Class::Good);
  std::vector<std::uint8_t> one{1, 1, 1, 1};
  CHECK(classify_y0_block(one, 2) == Y0Class::One);
  CHECK_THROWS_AS(classify_y0_block(c, 3), PreconditionError);

  // Non-good ties go to One.
  CHECK(classify_y0_counts(1, 2) == Y0Class::Good);
  CHECK(classify_y0_counts(8, 25) == Y0Class::Zero);
  CHECK(classify_y0_counts(17, 25) == Y0Class::One);
}

TEST_CASE("class probabilities match enumeration") {
  for (int M0 = 1; M0 <= 4; ++M0) {
    const auto c = brute::enumerate_y0_blocks(M0);
    const auto p = y0_class_probabilities(M0);
    const auto t = static_cast<long long>(c.total);
    CHECK(p.good == Rational(static_cast<long long>(c.good), t));
    CHECK(p.zero == Rational(static_cast<long long>(c.zero), t));
    CHECK(p.one == Rational(static_cast<long long>(c.one), t));
  }
  for (int M0 : {3, 6, 9, 11})
    CHECK(to_double(y0_class_probabilities(M0).good) == doctest::Approx(static_cast<double>(brute::y0_good_probability(M0))).epsilon(1e-12));
}

TEST_CASE("level-0 embedding rule") {
  CHECK(level0_embeds(0, Y0Class::Good));
  CHECK(level0_embeds(1, Y0Class::Good));
  CHECK(level0_embeds(0, Y0Class::Zero));
  CHECK(level0_embeds(1, Y0Class::One));
  CHECK_FALSE(level0_embeds(1, Y0Class::Zero));
  CHECK_FALSE(level0_embeds(0, Y0Class::One));
}

TEST_CASE("window classification matches per-block classification") {
  for (int M0 : {2, 3, 5, 11}) {
    const Rect cells{-3, -2, 7, 5};
    const BitField f = sample_field(5, Family::Y, {cells.x0 * M0, cells.y0 * M0}, cells.width() * M0,
                                    cells.height() * M0);
    const Y0Grid g = classify_y0_window(f, cells, M0);
    for (std::int64_t by = cells.y0; by < cells.y1; ++by)
      for (std::int64_t bx = cells.x0; bx < cells.x1; ++bx) {
        std::vector<std::uint8_t> bits;
        for (std::int64_t y = 0; y < M0; ++y)
          for (std::int64_t x = 0; x < M0; ++x) bits.push_back(f.at({bx * M0 + x, by * M0 + y}));
        REQUIRE(g.at({bx, by}) == classify_y0_block(bits, M0));
      }
  }
}

TEST_CASE("AVX2 kernels match the scalar reference") {
  const simd::KernelTable* v = simd::avx2_kernels();
  if (!v) {
    MESSAGE("AVX2 variant unavailable; scalar only");
    return;
  }
  const simd::KernelTable& s = simd::scalar_kernels();
  for (std::uint64_t seed : {0ULL, 1ULL, 0xDEADBEEFCAFEULL})
    for (std::int64_t row : {-1000LL, -1LL, 0LL, 7LL, 123456LL}) {
      const simd::RowKey k = simd::make_row_key(seed, 1, row);
      for (std::size_t count : {0u, 1u, 7u, 8u, 9u, 31u, 64u, 100u}) {
        std::vector<std::uint32_t> a(count + 1, 0), b(count + 1, 0);
        s.hash_words(k, 5, count, a.data());
        v->hash_words(k, 5, count, b.data());
        REQUIRE(a == b);
      }
    }

  std::vector<std::uint32_t> words(20);
  for (std::size_t i = 0; i < words.size(); ++i) words[i] = static_cast<std::uint32_t>(mix_key(3, i));
  for (std::size_t first : {0u, 1u, 5u, 31u, 32u, 33u})
    for (std::size_t n : {0u, 1u, 17u, 32u, 63u, 100u, 500u}) {
      if (first + n > words.size() * 32) continue;
      std::vector<std::uint8_t> a(n), b(n);
      s.unpack_bits(words.data(), first, n, a.data());
      v->unpack_bits(words.data(), first, n, b.data());
      REQUIRE(a == b);
    }

  std::vector<std::uint8_t> row(301);
  for (std::size_t i = 0; i < row.size(); ++i) row[i] = static_cast<std::uint8_t>(mix_key(9, i) & 1);
  for (std::size_t n : {0u, 1u, 15u, 16u, 31u, 32u, 33u, 301u}) {
    std::vector<std::uint16_t> a(n, 3), b(n, 3);
    s.accumulate_u8(a.data(), row.data(), n);
    v->accumulate_u8(b.data(), row.data(), n);
    REQUIRE(a == b);
    CHECK(s.sum_u8(row.data(), n) == v->sum_u8(row.data(), n));
  }
}

TEST_CASE("field serialization round-trips") {
  for (auto [w, h] : {std::pair<std::int64_t, std::int64_t>{1, 1}, {3, 5}, {8, 8}, {13, 7}}) {
    BitField f = sample_field(11, Family::Y, {-4, 9}, w, h);
    const std::string text = serialize_field(f);
    std::size_t pos = 0;
    const BitField g = deserialize_field(text + serialize_field(f), &pos);
    CHECK(pos == text.size());
    CHECK(g.family == f.family);
    CHECK(g.origin == f.origin);
    CHECK(g.width == f.width);
    CHECK(g.height == f.height);
    CHECK(g.seed == f.seed);
    CHECK(g.bits == f.bits);
  }
  CHECK_THROWS_AS(deserialize_field("lipemb-field v2 family=X origin=0,0 width=1 height=1 seed=0\n\x01"), ConfigError);
  CHECK_THROWS_AS(deserialize_field("lipemb-field v1 family=X origin=0,0 width=9 height=9 seed=0\n"), ConfigError);
}
