#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "lipemb/core.hpp"
#include "lipemb/fields.hpp"
#include "lipemb/lattice.hpp"
#include "lipemb/params.hpp"

namespace lipemb {

// ---------------------------------------------------------------------------
// Boundary curves.
//
// At level j the cell grid lines sit at multiples of n (level-(j-1) units).
// Vertical line a is perturbed inside the buffer strip around x = a*n: near a
// vertex (a, b) by a corner detour, between vertices by an edge track. The
// horizontal lines are the transposed picture. All offsets are integers, so
// the "curve" is a staircase and ownership of a lower cell is decided by its
// north-east corner.

struct VertexChoice {
  int ell = 1;  // detour index; only meaningful when s == 2
  int s = 1;    // 1 = straight through the corner, 2 = detour
  bool operator==(const VertexChoice&) const = default;
};

enum class PieceKind : std::uint8_t { Vertex = 0, VEdge = 1, HEdge = 2 };

struct Piece {
  PieceKind kind = PieceKind::Vertex;
  Point at;  // vertex (a, b); VEdge (a, b) spans b*n..(b+1)*n; HEdge (a, b) spans a*n..(a+1)*n
  bool operator==(const Piece&) const = default;
};

// Track offset of edge choice s: 1 -> 0, 2k -> +k*sep, 2k+1 -> -k*sep.
std::int64_t track_offset(int s, std::int64_t separation);
// Corner detour displacement (dx, dy) of detour ell with diagonal step d.
Point detour_offset(int ell, std::int64_t step);

class CurveField {
 public:
  CurveField() = default;
  CurveField(const LevelGeometry& g, Rect window);

  const LevelGeometry& geometry() const { return g_; }
  Rect window() const { return window_; }
  std::int64_t n() const { return g_.n; }

  VertexChoice vertex(Point v) const;
  int vtrack(Point e) const;
  int htrack(Point e) const;
  void set_vertex(Point v, VertexChoice c);
  void set_vtrack(Point e, int s);
  void set_htrack(Point e, int s);
  bool has_line(Piece p) const;

  std::int64_t offset_v(std::int64_t a, std::int64_t y) const;
  std::int64_t offset_h(std::int64_t b, std::int64_t x) const;
  // Level-j cell owning the lattice point p (level-(j-1) units).
  Point owner_of_point(Point p) const;
  // Level-j cell owning the lower cell c (north-east corner rule).
  Point owner(Point c) const { return owner_of_point(c + Point{1, 1}); }

  // Lower cells whose ownership depends on this piece alone.
  Rect piece_rect(Piece p) const;
  // Distinct options in preference order (straight first).
  int option_count(PieceKind k) const;
  void apply_option(Piece p, int option);
  int current_option(Piece p) const;

 private:
  std::size_t vindex(Point v) const;
  std::size_t vedge_index(Point e) const;
  std::size_t hedge_index(Point e) const;

  LevelGeometry g_;
  Rect window_;
  std::vector<VertexChoice> vertices_;
  std::vector<std::uint8_t> vtracks_, htracks_;
};

// Probability mass of the preferred valid option at level j.
long double preferred_mass(int j);
// Index into a list of m valid options for a uniform u in [0, 1): the first
// gets 1 - 10^-(j+10), the rest share the remainder equally.
int pick_option(int m, double u, int j);

// Inputs of the curve selection for one level.
struct CurveProblem {
  LevelGeometry geom;
  int level = 1;
  Rect window;  // level-j cells
  Rect lower;   // level-(j-1) cells covered by the masks below
  // Lattice block id of a level-j cell of the window.
  std::function<std::int32_t(Point)> block_of;
  // Per lower cell: 1 when a bad lower component lies at L-inf distance
  // < clearance (a dilated bad mask).
  const std::vector<std::uint8_t>* near_bad = nullptr;
  std::uint64_t seed = 0;
  Family family = Family::X;
};

struct CurveSelection {
  CurveField field;
  // Pieces without a valid option; their separated cell pairs must be
  // conjoined before selecting again.
  std::vector<std::pair<Point, Point>> forced;
  std::size_t active_pieces = 0;
  std::size_t bent_pieces = 0;
};

bool piece_active(const CurveProblem& prob, Piece p);
// The separated pairs of cells across the active arms of a piece.
std::vector<std::pair<Point, Point>> piece_pairs(const CurveProblem& prob, Piece p);
// Options of the piece that leave no boundary cell near a bad cell, given the
// rest of `field`.
std::vector<int> valid_options(const CurveProblem& prob, CurveField& field, Piece p);
CurveSelection select_curves(const CurveProblem& prob);
// Number of distinct curves around a single cell (product over its pieces),
// found by realising every option.
std::uint64_t count_single_cell_curves(const LevelGeometry& g);

// ---------------------------------------------------------------------------
// Hierarchy records.

struct BlockRec {
  std::int32_t id = -1;
  Animal cells;               // the lattice block H (level-j indices)
  std::vector<Point> members;  // level-(j-1) cells, sorted
  bool good = false;
  bool censored = false;
  std::int32_t component = -1;
  std::vector<std::int32_t> bad_sub;  // lower bad components inside the members
  std::int64_t bad_sub_size = 0;
  bool sub_semibad = true;
};

enum class SemiBadSource : std::uint8_t { Unknown, Exact, Estimate, Unreachable, SizeGate };

struct ComponentRec {
  std::int32_t id = -1;
  Animal cells;                      // Q (level-j indices)
  std::vector<std::int32_t> blocks;  // ids of member blocks (level 0: cell indices)
  std::int64_t bad_cells = 0;        // cells lying in bad blocks
  bool censored = false;
  bool semibad = false;
  SemiBadSource source = SemiBadSource::Unknown;
  double s_point = -1, s_lower = -1, s_upper = -1;
  std::int64_t size() const { return static_cast<std::int64_t>(cells.size()); }
};

struct Level {
  int level = 0;
  Family family = Family::X;
  Rect window;  // level-j cells
  LevelGeometry geom;

  std::vector<std::int32_t> block;      // per cell: block id (level 0: cell index)
  std::vector<std::int32_t> component;  // per cell: bad component id, -1 = good singleton
  std::vector<std::uint8_t> bad;        // per cell: lies in a bad block
  std::vector<std::uint8_t> value;      // level 0: X bit or Y0Class

  // Level j >= 1 only.
  std::vector<BlockRec> blocks;
  std::vector<std::uint8_t> conj_right, conj_up;  // conjoined edge to (x+1, y) / (x, y+1)
  CurveField curves;
  std::vector<std::int32_t> owner;  // per lower window cell: owning block id or -1
  int forced_conjoins = 0;

  std::vector<ComponentRec> components;

  bool in(Point u) const { return window.contains(u); }
  std::size_t index(Point u) const {
    return static_cast<std::size_t>((u.y - window.y0) * window.width() + (u.x - window.x0));
  }
  Point cell(std::size_t i) const {
    const auto w = static_cast<std::size_t>(window.width());
    return {window.x0 + static_cast<std::int64_t>(i % w), window.y0 + static_cast<std::int64_t>(i / w)};
  }
  std::int32_t block_at(Point u) const { return block[index(u)]; }
  std::int32_t component_at(Point u) const { return component[index(u)]; }
  bool is_bad(Point u) const { return bad[index(u)] != 0; }
  bool block_good(std::int32_t b) const;
  bool block_censored(std::int32_t b) const;
  Animal block_cells(std::int32_t b) const;
  std::size_t block_count() const { return level == 0 ? block.size() : blocks.size(); }
  bool on_border(Point u) const {
    return u.x == window.x0 || u.y == window.y0 || u.x == window.x1 - 1 || u.y == window.y1 - 1;
  }
};

struct BuildOptions {
  bool classify_top = true;  // semi-bad flags for top-level components
  bool airports = true;      // airport test against a partner library
  std::int64_t library_window = 2;  // side of the partner sample, in level-(j-1) cells per library level
};

struct Hierarchy {
  ParameterSet params;
  Family family = Family::X;
  std::uint64_t seed = 0;
  int depth = 0;
  std::vector<Rect> windows;  // W_0 .. W_depth
  BitField field;
  std::vector<Level> levels;

  const Level& level(int j) const { return levels.at(static_cast<std::size_t>(j)); }
};

// W_{j-1} = n_j * W_j inflated by buffer + clearance + 1.
std::vector<Rect> window_chain(const ParameterSet& p, int depth, Rect top);
// Sites needed to cover the level-0 cells of `cells`.
Rect site_window(const ParameterSet& p, Family f, Rect cells);

Hierarchy build_hierarchy(const ParameterSet& p, Family f, std::uint64_t seed, int depth, Rect top,
                          const BuildOptions& opt = {});
// Same, over a supplied field that must cover the site window.
Hierarchy build_hierarchy(const ParameterSet& p, BitField field, int depth, Rect top, const BuildOptions& opt = {});

// ---------------------------------------------------------------------------
// Individual construction steps.

// Buffer test against the level below: more than k0 cells of bad components
// inside the rectangle, or a bad component meeting it that is not semi-bad.
bool is_conjoined(const Rect& buffer, const Level& lower, const ParameterSet& p);

// Connected components of the kept edges over a window. Returns the block id
// of each cell (row-major); ids follow first appearance.
std::vector<std::int32_t> label_lattice_blocks(Rect window, const std::vector<std::uint8_t>& conj_right,
                                               const std::vector<std::uint8_t>& conj_up);
std::vector<Animal> form_lattice_blocks(Rect window, const std::function<bool(Point, Point)>& conjoined);

// Components from per-cell block ids and per-block goodness (closure of the
// grouping rules to a fixed point). Returns per-cell component ids, -1 for
// good singleton components.
struct ComponentInput {
  Rect window;
  std::vector<std::int32_t> block;    // per cell
  std::vector<std::uint8_t> good;     // per block
  std::vector<std::int32_t> size;     // per block: number of cells
};
std::vector<std::int32_t> form_components(const ComponentInput& in, std::int32_t* count = nullptr);

// A subset of the bad cells of Q, pairwise not close-packed neighbours,
// chosen greedily in lexicographic order.
Animal nonneighbouring_bad_subset(const Level& lvl, const ComponentRec& q);

// Every lattice block of `lvl` meeting `cells` lies inside `cells` (and all
// cells are inside the window).
bool is_block_union(const Level& lvl, const Animal& cells);

// Semi-bad decision from a size and an embedding-probability lower bound.
bool semibad_decision(std::int64_t size, long double s_lower, int j, const ParameterSet& p);
// Whether trials successes out of trials can clear the level-j threshold
// with the conservative interval; if not, no level-j component is semi-bad.
bool semibad_reachable(int j, const ParameterSet& p);

// Airports. `embeds(anchor)` tells whether the library shape translated to
// `anchor` is a valid block union that embeds.
bool is_airport(Rect square, const Animal& shape, const std::function<bool(Point)>& embeds, long double fraction);

struct LibraryEntry {
  Animal shape;  // canonical, level-(j-1) cells
  std::shared_ptr<const Hierarchy> partner;
  std::int32_t component = -1;  // partner component at level j-1
  Point anchor;                 // partner position of the canonical origin
};

// Per-block goodness test at level j >= 1 against the finished level j-1.
bool classify_good_block(const Hierarchy& h, int j, const BlockRec& b, const std::vector<LibraryEntry>& library);

// Lower cells of a lattice block's ideal interior / blow-up.
bool inside_interior(const Animal& H, Point c, const LevelGeometry& g);
bool inside_blowup(const Animal& H, Point c, const LevelGeometry& g);

}  // namespace lipemb
