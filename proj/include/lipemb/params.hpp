#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace lipemb {

inline constexpr int kMaxDepth = 3;

// Geometry of one level j >= 1, in units of level-(j-1) cells.
struct LevelGeometry {
  int level = 0;
  std::int64_t n = 1;                // sub-cells per level-j cell side
  std::int64_t buffer = 0;           // half-width of a buffer strip
  std::int64_t clearance = 0;        // min distance from a boundary cell to a bad cell
  std::int64_t interior_margin = 0;  // bad sets must sit this deep inside a domain
  std::int64_t separation = 0;       // spacing between parallel edge tracks
  std::int64_t taper = 0;            // rows at offset 0 at both ends of an edge strip
  std::int64_t detour_radius = 0;    // half-length of a corner detour
  std::int64_t detour_step = 0;      // diagonal shift of a corner detour
  int tracks = 1;                    // usable edge tracks (s_e values)
  int detours = 0;                   // corner detours (l values with s = 2)
  std::int64_t airport_side = 0;     // side of an airport square
};

struct ParameterSet {
  std::string name = "custom";
  double alpha = 2, beta = 1, gamma = 1, m = 1;
  std::int64_t k0 = 2, v0 = 2, L0 = 6, M0 = 11;
  std::int64_t M = 0;  // Lipschitz bound for site maps; 0 derives one

  // Per-level overrides (index j-1); 0 selects the scaled default.
  std::array<std::int64_t, kMaxDepth> buffer{}, clearance{}, interior_margin{}, separation{}, taper{},
      airport_side{};
  int tracks = 3;
  int detours = 4;
  std::int64_t shift_range = 4;   // H: shifts h range over [1..H]^2
  std::int64_t shift_bases = 1;   // base offsets searched: |p|,|q| <= shift_bases
  std::int64_t match_radius = 2;  // site matching radius around a cell image
  std::int64_t semibad_trials = 400;
  std::uint64_t field_cap = std::uint64_t{1} << 31;  // max sites per sampled window

  // L_j = L0^(alpha^j). Throws CapError when not representable.
  std::int64_t L(int j) const;
  // Sub-cells per side of a level-j cell (j >= 1): L_1 for j = 1, L_j / L_{j-1} above.
  std::int64_t cells_per_side(int j) const;
  double m_j(int j) const;
  LevelGeometry geometry(int j) const;
  // 1 - 1/(v0^5 k0^4 100^j) as numerator/denominator is exposed through these.
  long double semibad_threshold(int j) const;
  long double airport_fraction(int j) const;
  std::int64_t lipschitz_bound() const;
};

// Key/value profile handling. Unknown keys are ConfigErrors.
using KeyValues = std::map<std::string, std::string>;
KeyValues parse_key_values(const std::string& text);
KeyValues read_key_values(const std::string& path);
void apply_parameter(ParameterSet& p, const std::string& key, const std::string& value);
bool is_parameter_key(const std::string& key);
ParameterSet parameters_from(const KeyValues& kv);
// Named profile from the bundled profile directory, or a path to a file.
ParameterSet load_profile(const std::string& name_or_path);
std::string profile_path(const std::string& name_or_path);
// Canonical key=value text of every field (stable ordering).
std::string to_key_values(const ParameterSet& p);

// --------------------------------------------------------------------------
// Constraint audit.

enum class Verdict { Satisfied, Violated, Inconclusive };
const char* verdict_name(Verdict v);

struct ConstraintRow {
  std::string name;
  std::string lhs, rhs, slack;  // exact decimal/rational renderings
  Verdict verdict = Verdict::Violated;
};

struct ConstraintReport {
  std::vector<ConstraintRow> rows;
  bool overall = false;
};

ConstraintReport check_constraints(const ParameterSet& p);

}  // namespace lipemb
