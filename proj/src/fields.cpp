#include "lipemb/fields.hpp"

#include <algorithm>

#include "lipemb/simd.hpp"

namespace lipemb {

namespace {
constexpr std::uint32_t family_tag(Family f) { return f == Family::X ? 0x58U : 0x59U; }
}  // namespace

const char* family_name(Family f) { return f == Family::X ? "X" : "Y"; }

Family parse_family(const std::string& s) {
  if (s == "X" || s == "x") return Family::X;
  if (s == "Y" || s == "y") return Family::Y;
  throw ConfigError("family must be X or Y, got '" + s + "'");
}

const char* y0_class_name(Y0Class c) {
  switch (c) {
    case Y0Class::Good: return "good";
    case Y0Class::Zero: return "zero";
    case Y0Class::One: return "one";
  }
  return "?";
}

BitField sample_field(std::uint64_t seed, Family family, Point origin, std::int64_t width, std::int64_t height,
                      std::uint64_t cap) {
  if (width < 1 || height < 1) throw PreconditionError("field window must be at least 1x1");
  if (static_cast<std::uint64_t>(width) > cap / static_cast<std::uint64_t>(height))
    throw CapError("field window " + std::to_string(width) + "x" + std::to_string(height) + " exceeds the cap of " +
                   std::to_string(cap) + " sites");
  BitField f;
  f.family = family;
  f.origin = origin;
  f.width = width;
  f.height = height;
  f.seed = seed;
  f.bits.resize(static_cast<std::size_t>(width * height));

  const auto& k = simd::kernels();
  const std::int64_t c0 = floor_div(origin.x, 32);
  const std::int64_t c1 = floor_div(origin.x + width - 1, 32);
  const auto nwords = static_cast<std::size_t>(c1 - c0 + 1);
  const auto first_bit = static_cast<std::size_t>(origin.x - c0 * 32);
  std::vector<std::uint32_t> words(nwords);
  for (std::int64_t r = 0; r < height; ++r) {
    const simd::RowKey key = simd::make_row_key(seed, family_tag(family), origin.y + r);
    k.hash_words(key, static_cast<std::uint32_t>(c0), nwords, words.data());
    k.unpack_bits(words.data(), first_bit, static_cast<std::size_t>(width),
                  f.bits.data() + static_cast<std::size_t>(r * width));
  }
  return f;
}

std::uint8_t sample_site(std::uint64_t seed, Family family, Point p) {
  const simd::RowKey key = simd::make_row_key(seed, family_tag(family), p.y);
  const std::uint32_t w = simd::word_at(key, static_cast<std::uint32_t>(floor_div(p.x, 32)));
  return static_cast<std::uint8_t>((w >> (p.x - floor_div(p.x, 32) * 32)) & 1U);
}

Y0Class classify_y0_counts(std::int64_t ones, std::int64_t total) {
  const std::int64_t zeros = total - ones;
  // total = M0^2, so the threshold is ceil(total / 3).
  const std::int64_t t = (total + 2) / 3;
  if (std::min(ones, zeros) >= t) return Y0Class::Good;
  return zeros > ones ? Y0Class::Zero : Y0Class::One;
}

Y0Class classify_y0_block(std::span<const std::uint8_t> bits, std::int64_t M0) {
  if (M0 < 1 || bits.size() != static_cast<std::size_t>(M0 * M0))
    throw PreconditionError("a level-0 Y block needs exactly M0^2 = " + std::to_string(M0 * M0) + " bits, got " +
                            std::to_string(bits.size()));
  std::int64_t ones = 0;
  for (auto b : bits) ones += (b != 0);
  return classify_y0_counts(ones, M0 * M0);
}

bool level0_embeds(int x_bit, Y0Class y) {
  return y == Y0Class::Good || (x_bit == 0 && y == Y0Class::Zero) || (x_bit == 1 && y == Y0Class::One);
}

Y0Grid classify_y0_window(const BitField& field, Rect cells, std::int64_t M0) {
  const Rect sites{cells.x0 * M0, cells.y0 * M0, cells.x1 * M0, cells.y1 * M0};
  if (!field.rect().contains(sites)) throw PreconditionError("field does not cover the requested Y blocks");
  if (M0 > 255) throw CapError("M0 above 255 is not supported by the block counters");
  Y0Grid g;
  g.cells = cells;
  g.cls.resize(static_cast<std::size_t>(cells.width() * cells.height()));
  g.ones.resize(g.cls.size());

  const auto& k = simd::kernels();
  const auto w = static_cast<std::size_t>(sites.width());
  std::vector<std::uint16_t> acc(w);
  const std::int64_t total = M0 * M0;
  for (std::int64_t by = cells.y0; by < cells.y1; ++by) {
    std::fill(acc.begin(), acc.end(), 0);
    for (std::int64_t r = 0; r < M0; ++r) {
      const std::uint8_t* row = field.row(by * M0 + r) + (sites.x0 - field.origin.x);
      k.accumulate_u8(acc.data(), row, w);
    }
    for (std::int64_t bx = cells.x0; bx < cells.x1; ++bx) {
      std::uint32_t ones = 0;
      const std::size_t off = static_cast<std::size_t>((bx - cells.x0) * M0);
      for (std::int64_t c = 0; c < M0; ++c) ones += acc[off + static_cast<std::size_t>(c)];
      const std::size_t i = g.index({bx, by});
      g.ones[i] = static_cast<std::uint16_t>(ones);
      g.cls[i] = classify_y0_counts(ones, total);
    }
  }
  return g;
}

}  // namespace lipemb
