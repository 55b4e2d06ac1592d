#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lipemb/core.hpp"
#include "lipemb/fields.hpp"
#include "lipemb/hierarchy.hpp"
#include "lipemb/lattice.hpp"
#include "lipemb/params.hpp"

namespace lipemb {

// Discrete stand-in for a canonical map between two domains of lower cells.
// Bijectivity is not required; the site-level flattening restores
// injectivity by matching.
struct CellCorrespondence {
  int level = 0;
  Animal source, target;
  std::vector<std::pair<Point, Point>> map;          // sorted by source cell
  std::vector<std::pair<Animal, Animal>> forward;    // T_i -> S_i
  std::vector<std::pair<Animal, Animal>> backward;   // S'_k -> T'_k
  std::int64_t budget = 0;                           // max L-inf displacement
  bool separated = true;                             // T_i and S'_k pairwise non-neighbouring

  Point image(Point c) const;
  bool is_identity() const;
};

// Identity away from the sub-domain variants; inside their symmetric
// difference each cell moves to the nearest cell of the opposite side.
CellCorrespondence star_canonical(const Animal& domain, const std::vector<Animal>& T,
                                  const std::vector<Animal>& source_variants,
                                  const std::vector<Animal>& target_variants, std::int64_t margin);

// Base offsets (p, q), |p|, |q| <= range, ordered by ring then lexicographically.
std::vector<Point> shift_bases(std::int64_t range);
// Offset of shift h in [1..H]^2 around base (p, q).
Point family_shift(Point h, Point base, std::int64_t H);

// Translation family between equal-shape domains: T_i -> T_i + d + t(h) and
// T'_k -> T'_k - d - t(h), where d maps source onto target.
CellCorrespondence translation_family(const Animal& source, const Animal& target, const std::vector<Animal>& T,
                                      const std::vector<Animal>& Tp, Point h, const ParameterSet& p, int j,
                                      Point base = {0, 0});
// Each T_i outside the annulus source \ U3 gets the first base that keeps all
// H^2 translates inside U3; annulus sets stay fixed.
CellCorrespondence interior_translation_family(const Animal& source, const Animal& U3, const std::vector<Animal>& T,
                                               Point h, const ParameterSet& p, int j);
// Greedy subfamily of shifts whose translates of T are pairwise at L-inf
// distance >= 2.
std::vector<Point> independent_shifts(const Animal& T, std::int64_t H, Point base = {0, 0});

// ---------------------------------------------------------------------------

struct Witness;

struct Match {
  Animal x_cells;  // level-(j-1) X cells
  Animal y_cells;  // level-(j-1) Y cells
  Point tau;       // y = x + tau
  std::shared_ptr<const Witness> inner;
};

struct Witness {
  int level = 0;
  Point tau;    // level-j shift X -> Y
  Point shift;  // chosen t, level-(j-1) cells
  Animal x_cells;
  std::vector<Point> mx;  // X members (level j-1)
  std::vector<Point> my;  // Y members, X-aligned (Y cell - tau * n)
  std::vector<Match> forward, backward;
  CellCorrespondence base;  // nearest-cell map MX -> MY
  std::size_t candidates_tried = 0;
};

// Does the X structure over U (level-j cells) embed into the Y structure over
// U + tau? Sound semi-decision over the translation family; the first working
// shift in the fixed search order is returned.
std::optional<Witness> embeds_level(const Hierarchy& xh, const Animal& U, const Hierarchy& yh, Point tau, int j);

// ---------------------------------------------------------------------------
// Site-level maps.

struct EmbeddingMap {
  std::vector<Point> domain;  // X sites
  std::vector<Point> image;   // Y sites, same order
  std::int64_t M = 1;
};

// Site map realising a witness (levels 0 and 1).
std::optional<EmbeddingMap> flatten(const Witness& w, const Hierarchy& xh, const Hierarchy& yh);

// Injective, value preserving and M-Lipschitz in the Euclidean norm, using
// exact integer squared distances. Images outside y are a precondition error.
bool verify_embedding(const EmbeddingMap& map, const BitField& x, const BitField& y, std::string* reason = nullptr);

}  // namespace lipemb
