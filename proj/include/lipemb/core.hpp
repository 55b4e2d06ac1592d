#pragma once

#include <compare>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <string>

namespace lipemb {

// Integer lattice point. Used for sites, cell indices and offsets alike; the
// unit is always stated by the owner of the value.
struct Point {
  std::int64_t x = 0;
  std::int64_t y = 0;

  constexpr Point operator+(Point o) const { return {x + o.x, y + o.y}; }
  constexpr Point operator-(Point o) const { return {x - o.x, y - o.y}; }
  constexpr Point operator-() const { return {-x, -y}; }
  constexpr Point& operator+=(Point o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr bool operator==(const Point&) const = default;
  // Lexicographic on (x, y).
  constexpr auto operator<=>(const Point&) const = default;
};

constexpr std::int64_t linf(Point p) {
  const std::int64_t ax = p.x < 0 ? -p.x : p.x;
  const std::int64_t ay = p.y < 0 ? -p.y : p.y;
  return ax > ay ? ax : ay;
}

constexpr std::int64_t norm2(Point p) { return p.x * p.x + p.y * p.y; }

// Floor division for possibly negative numerators.
constexpr std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

struct PointHash {
  std::size_t operator()(Point p) const noexcept {
    std::uint64_t h = static_cast<std::uint64_t>(p.x) * 0x9E3779B97F4A7C15ULL;
    h ^= static_cast<std::uint64_t>(p.y) + 0x7F4A7C159E3779B9ULL + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

// Axis-aligned half-open rectangle [x0, x1) x [y0, y1) of lattice cells.
struct Rect {
  std::int64_t x0 = 0, y0 = 0, x1 = 0, y1 = 0;

  constexpr std::int64_t width() const { return x1 - x0; }
  constexpr std::int64_t height() const { return y1 - y0; }
  constexpr bool empty() const { return x1 <= x0 || y1 <= y0; }
  constexpr bool contains(Point p) const { return p.x >= x0 && p.x < x1 && p.y >= y0 && p.y < y1; }
  constexpr bool contains(const Rect& r) const {
    return r.empty() || (r.x0 >= x0 && r.x1 <= x1 && r.y0 >= y0 && r.y1 <= y1);
  }
  constexpr Rect intersect(const Rect& r) const {
    Rect o{x0 > r.x0 ? x0 : r.x0, y0 > r.y0 ? y0 : r.y0, x1 < r.x1 ? x1 : r.x1, y1 < r.y1 ? y1 : r.y1};
    if (o.empty()) return Rect{};
    return o;
  }
  constexpr Rect inflate(std::int64_t d) const { return {x0 - d, y0 - d, x1 + d, y1 + d}; }
  constexpr bool operator==(const Rect&) const = default;
};

// Error kinds map one-to-one onto CLI exit codes.
enum class ErrorKind { Config = 1, Precondition = 2, Cap = 3 };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::Config, what) {}
};

class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& what) : Error(ErrorKind::Precondition, what) {}
};

class CapError : public Error {
 public:
  explicit CapError(const std::string& what) : Error(ErrorKind::Cap, what) {}
};

// ---------------------------------------------------------------------------
// Counter-based hashing. Everything random in the library is a pure function
// of a 64-bit seed and a tuple of integer counters.

constexpr std::uint32_t fmix32(std::uint32_t h) {
  h ^= h >> 16;
  h *= 0x85EBCA6BU;
  h ^= h >> 13;
  h *= 0xC2B2AE35U;
  h ^= h >> 16;
  return h;
}

constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Combines a seed with a stream of counters into one 64-bit key.
constexpr std::uint64_t mix_key(std::uint64_t seed, std::uint64_t a) { return splitmix64(seed ^ splitmix64(a)); }

template <typename... Rest>
constexpr std::uint64_t mix_key(std::uint64_t seed, std::uint64_t a, Rest... rest) {
  return mix_key(mix_key(seed, a), static_cast<std::uint64_t>(rest)...);
}

// Uniform double in [0, 1) with 53 bits of resolution.
constexpr double to_unit(std::uint64_t h) { return static_cast<double>(h >> 11) * 0x1.0p-53; }

// Small deterministic generator for sequential draws keyed by a counter tuple.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}
  std::uint64_t next() { return splitmix64(key_ + 0x632BE59BD9B4E019ULL * ++counter_); }
  double uniform() { return to_unit(next()); }
  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    // Lemire-style rejection keeps the draw exactly uniform.
    const std::uint64_t limit = (~std::uint64_t{0}) - ((~std::uint64_t{0}) % n);
    std::uint64_t r;
    do {
      r = next();
    } while (r >= limit);
    return r % n;
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace lipemb
