#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lipemb/core.hpp"

namespace lipemb {

enum class Family : std::uint8_t { X = 0, Y = 1 };

const char* family_name(Family f);
Family parse_family(const std::string& s);
constexpr Family partner(Family f) { return f == Family::X ? Family::Y : Family::X; }

// A finite window of site values, one byte (0/1) per site, row-major.
struct BitField {
  Family family = Family::X;
  Point origin;
  std::int64_t width = 0;
  std::int64_t height = 0;
  std::uint64_t seed = 0;
  std::vector<std::uint8_t> bits;

  Rect rect() const { return {origin.x, origin.y, origin.x + width, origin.y + height}; }
  bool contains(Point p) const { return rect().contains(p); }
  std::uint8_t at(Point p) const {
    return bits[static_cast<std::size_t>((p.y - origin.y) * width + (p.x - origin.x))];
  }
  std::uint8_t& at(Point p) { return bits[static_cast<std::size_t>((p.y - origin.y) * width + (p.x - origin.x))]; }
  const std::uint8_t* row(std::int64_t y) const {
    return bits.data() + static_cast<std::size_t>((y - origin.y) * width);
  }
};

inline constexpr std::uint64_t kDefaultFieldCap = std::uint64_t{1} << 31;

// Each site is a fair coin determined by (seed, family, absolute coordinate).
BitField sample_field(std::uint64_t seed, Family family, Point origin, std::int64_t width, std::int64_t height,
                      std::uint64_t cap = kDefaultFieldCap);
// The same value sample_field produces at p, computed on its own.
std::uint8_t sample_site(std::uint64_t seed, Family family, Point p);

// ---------------------------------------------------------------------------
// Level-0 Y blocks.

enum class Y0Class : std::uint8_t { Good = 0, Zero = 1, One = 2 };
const char* y0_class_name(Y0Class c);

// ceil(M0^2 / 3): minimum count of each symbol in a good block.
constexpr std::int64_t y0_threshold(std::int64_t M0) { return (M0 * M0 + 2) / 3; }

Y0Class classify_y0_counts(std::int64_t ones, std::int64_t total);
// Exactly M0*M0 bits, row-major. Throws PreconditionError otherwise.
Y0Class classify_y0_block(std::span<const std::uint8_t> bits, std::int64_t M0);
bool level0_embeds(int x_bit, Y0Class y);

// Classes for every level-0 Y block in `cells`; the field must cover the
// corresponding M0-scaled site rectangle.
struct Y0Grid {
  Rect cells;
  std::vector<Y0Class> cls;
  std::vector<std::uint16_t> ones;
  std::size_t index(Point u) const {
    return static_cast<std::size_t>((u.y - cells.y0) * cells.width() + (u.x - cells.x0));
  }
  Y0Class at(Point u) const { return cls[index(u)]; }
};
Y0Grid classify_y0_window(const BitField& field, Rect cells, std::int64_t M0);

}  // namespace lipemb
