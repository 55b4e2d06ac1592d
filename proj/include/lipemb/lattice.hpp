#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lipemb/core.hpp"
#include "lipemb/params.hpp"

namespace lipemb {

enum class Adjacency { Euclidean, ClosePacked };

std::vector<Point> neighbors(Point u, Adjacency mode);

// Finite site set, kept sorted and duplicate free.
using Animal = std::vector<Point>;

Animal make_animal(std::vector<Point> sites);
bool is_connected(const Animal& a, Adjacency mode = Adjacency::Euclidean);
bool contains(const Animal& a, Point p);
Rect bounding_box(const Animal& a);
Animal translate(const Animal& a, Point d);
// Minimum L-infinity distance between two nonempty sets.
std::int64_t linf_distance(const Animal& a, const Animal& b);

// Translation-equivalence class, represented by the animal moved so that its
// lexicographically least site is the origin.
struct Shape {
  Animal sites;
  bool operator==(const Shape&) const = default;
  auto operator<=>(const Shape&) const = default;
};

Shape canonical_shape(const Animal& a);
// The unique d with a + d = b, if any.
std::optional<Point> same_shape(const Animal& a, const Animal& b);

inline constexpr int kShapeCap = 10;
// Fixed polyominoes of size v (canonical form, sorted). With
// containing_origin, every animal of size v that contains the origin.
std::vector<Animal> enumerate_shapes(int v, bool containing_origin = false, int cap = kShapeCap);

// ---------------------------------------------------------------------------
// Cells and buffers. All rectangles are half-open ranges of level-(j-1) cells
// (level-0 cells for j = 0 and j = 1).

struct CellGeometry {
  int level = 0;
  Point index;
  Rect region, interior, blowup;
  std::int64_t margin = 0;
};

CellGeometry cell_geometry(int j, Point u, const ParameterSet& p);

enum class Side { T, L, B, R };
const char* side_name(Side s);
Point side_offset(Side s);

struct BufferZone {
  int level = 0;
  Point owner;
  Side side = Side::T;
  Rect rect;
  Point shared_with;
};

// The buffer strip shared by u and its neighbour across `side`.
BufferZone buffer_zone(int j, Point u, Side side, const ParameterSet& p);
// Same, from raw geometry (n sub-cells per side, half-width w).
Rect shared_buffer_rect(Point u, Side side, std::int64_t n, std::int64_t w);
std::vector<BufferZone> outer_buffers(const Animal& animal, int j, const ParameterSet& p);

// ---------------------------------------------------------------------------

class UnionFind {
 public:
  explicit UnionFind(std::size_t n = 0) { reset(n); }
  void reset(std::size_t n);
  std::size_t find(std::size_t a);
  // Returns true when two distinct sets were merged.
  bool unite(std::size_t a, std::size_t b);
  std::size_t size() const { return parent_.size(); }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::uint32_t> rank_;
};

}  // namespace lipemb
