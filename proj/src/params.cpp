#include "lipemb/params.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "lipemb/core.hpp"

namespace lipemb {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::int64_t parse_int(const std::string& key, const std::string& v) {
  std::int64_t out = 0;
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec == std::errc() && ptr == end) return out;
  // Accept integral values written in scientific notation (e.g. 1.3e7).
  double d = 0;
  auto [p2, ec2] = std::from_chars(v.data(), end, d);
  if (ec2 == std::errc() && p2 == end && std::isfinite(d) && d == std::floor(d) && std::fabs(d) < 9.0e18)
    return static_cast<std::int64_t>(d);
  throw ConfigError("parameter '" + key + "' expects an integer, got '" + v + "'");
}

double parse_real(const std::string& key, const std::string& v) {
  double out = 0;
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end || !std::isfinite(out))
    throw ConfigError("parameter '" + key + "' expects a number, got '" + v + "'");
  return out;
}

void parse_levels(const std::string& key, const std::string& v, std::array<std::int64_t, kMaxDepth>& dst) {
  std::stringstream ss(v);
  std::string item;
  std::size_t i = 0;
  std::int64_t last = 0;
  while (std::getline(ss, item, ',')) {
    if (i >= dst.size()) throw ConfigError("parameter '" + key + "' lists more than " + std::to_string(kMaxDepth) + " levels");
    last = parse_int(key, trim(item));
    if (last < 0) throw ConfigError("parameter '" + key + "' must be non-negative");
    dst[i++] = last;
  }
  if (i == 0) throw ConfigError("parameter '" + key + "' is empty");
  // A single value applies to every level.
  if (i == 1)
    for (auto& x : dst) x = last;
}

std::string join_levels(const std::array<std::int64_t, kMaxDepth>& a) {
  std::string s;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(a[i]);
  }
  return s;
}

std::string fmt_real(double d) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, d);
  (void)ec;
  return std::string(buf, ptr);
}

// a^b for non-negative integers, nullopt-like -1 on overflow.
std::int64_t checked_pow(std::int64_t a, std::int64_t b) {
  std::int64_t r = 1;
  for (std::int64_t i = 0; i < b; ++i) {
    if (a != 0 && r > std::numeric_limits<std::int64_t>::max() / a) return -1;
    r *= a;
  }
  return r;
}

}  // namespace

std::int64_t ParameterSet::L(int j) const {
  if (j < 0) throw PreconditionError("negative level");
  if (alpha != std::floor(alpha) || alpha < 1) throw ConfigError("cell scales need an integer alpha >= 1");
  const std::int64_t e = checked_pow(static_cast<std::int64_t>(alpha), j);
  const std::int64_t v = e < 0 ? -1 : checked_pow(L0, e);
  if (v < 0) throw CapError("scale L_" + std::to_string(j) + " = L0^(alpha^" + std::to_string(j) + ") overflows 64 bits");
  return v;
}

std::int64_t ParameterSet::cells_per_side(int j) const {
  if (j < 1) return 1;
  if (j == 1) return L(1);
  return L(j) / L(j - 1);
}

double ParameterSet::m_j(int j) const { return m + std::ldexp(1.0, -j); }

LevelGeometry ParameterSet::geometry(int j) const {
  if (j < 1 || j > kMaxDepth) throw PreconditionError("geometry is defined for levels 1.." + std::to_string(kMaxDepth));
  LevelGeometry g;
  g.level = j;
  g.n = cells_per_side(j);
  const auto i = static_cast<std::size_t>(j - 1);
  const long double lower = static_cast<long double>(L(j - 1));

  const std::int64_t cap = g.n / 4 - 1;
  if (cap < 1) throw ConfigError("level " + std::to_string(j) + " cells have " + std::to_string(g.n) + " sub-cells per side; need at least 8");
  const long double paper_buffer = std::pow(lower, 5.0L);
  g.buffer = buffer[i] ? buffer[i] : (paper_buffer < cap ? static_cast<std::int64_t>(paper_buffer) : cap);
  g.clearance = clearance[i] ? clearance[i] : std::max<std::int64_t>(1, 3 * g.buffer / 8);
  g.interior_margin = interior_margin[i] ? interior_margin[i] : std::max<std::int64_t>(0, g.clearance - 1);
  g.separation = separation[i] ? separation[i] : std::max<std::int64_t>(1, g.buffer - 1);
  g.taper = taper[i] ? taper[i] : std::max<std::int64_t>(1, g.buffer / 2);

  if (g.buffer < 1 || g.buffer > cap)
    throw ConfigError("buffer at level " + std::to_string(j) + " must lie in [1, n/4 - 1] = [1, " + std::to_string(cap) + "]");
  if (!(g.interior_margin < g.clearance && g.clearance < g.n / 4))
    throw ConfigError("level " + std::to_string(j) + " needs interior_margin < clearance < n/4");
  if (g.n - 2 * g.buffer - 1 <= 2 * g.taper)
    throw ConfigError("level " + std::to_string(j) + " edge strips are shorter than two tapers");

  g.detour_radius = g.buffer >= 3 ? g.buffer - 2 : 0;
  g.detour_step = std::max<std::int64_t>(1, g.detour_radius / 2);
  const int max_detours = g.detour_radius > 0 ? static_cast<int>(4 * (g.detour_radius / g.detour_step)) : 0;
  g.detours = std::min(std::max(detours, 0), max_detours);
  const int max_tracks = 1 + 2 * static_cast<int>((g.buffer - 1) / g.separation);
  g.tracks = std::max(1, std::min(tracks, max_tracks));

  const long double paper_side = std::ceil(std::pow(lower, 1.5L));
  const std::int64_t side_cap = g.n / 2;
  g.airport_side = airport_side[i] ? airport_side[i]
                                   : (paper_side < side_cap ? static_cast<std::int64_t>(paper_side) : side_cap);
  if (g.airport_side < 1) throw ConfigError("airport_side must be positive");
  return g;
}

long double ParameterSet::semibad_threshold(int j) const {
  const long double den = std::pow(static_cast<long double>(v0), 5.0L) * std::pow(static_cast<long double>(k0), 4.0L) *
                          std::pow(100.0L, static_cast<long double>(j));
  return 1.0L - 1.0L / den;
}

long double ParameterSet::airport_fraction(int j) const {
  const long double den = std::pow(static_cast<long double>(v0), 2.0L) * std::pow(static_cast<long double>(k0), 4.0L) *
                          std::pow(100.0L, static_cast<long double>(j));
  return 1.0L - 1.0L / den;
}

std::int64_t ParameterSet::lipschitz_bound() const {
  if (M > 0) return M;
  std::int64_t buf = 0;
  try {
    buf = geometry(1).buffer;
  } catch (const Error&) {
    buf = 0;
  }
  const std::int64_t D = 2 * buf + (2 * shift_bases + 1) * shift_range;
  const double f = 1.0 + std::sqrt(2.0) * static_cast<double>(2 * (D + match_radius) + 1);
  return static_cast<std::int64_t>(std::ceil(static_cast<double>(M0) * f));
}

// --------------------------------------------------------------------------

KeyValues parse_key_values(const std::string& text) {
  KeyValues kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    kv[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

KeyValues read_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_key_values(ss.str());
}

namespace {
const char* const kParameterKeys[] = {"name",      "alpha",   "beta",        "gamma",       "m",
                                      "k0",        "v0",      "L0",          "M0",          "M",
                                      "buffer",    "clearance", "interior_margin", "separation", "taper",
                                      "airport_side", "tracks", "detours",   "shift_range", "shift_bases",
                                      "match_radius", "semibad_trials", "field_cap"};
}

bool is_parameter_key(const std::string& key) {
  for (const char* k : kParameterKeys)
    if (key == k) return true;
  return false;
}

void apply_parameter(ParameterSet& p, const std::string& key, const std::string& value) {
  auto positive = [&](std::int64_t v) {
    if (v <= 0) throw ConfigError("parameter '" + key + "' must be positive");
    return v;
  };
  auto positive_real = [&](double v) {
    if (!(v > 0)) throw ConfigError("parameter '" + key + "' must be positive");
    return v;
  };
  if (key == "name") p.name = value;
  else if (key == "alpha") p.alpha = positive_real(parse_real(key, value));
  else if (key == "beta") p.beta = positive_real(parse_real(key, value));
  else if (key == "gamma") p.gamma = positive_real(parse_real(key, value));
  else if (key == "m") p.m = positive_real(parse_real(key, value));
  else if (key == "k0") p.k0 = positive(parse_int(key, value));
  else if (key == "v0") p.v0 = positive(parse_int(key, value));
  else if (key == "L0") p.L0 = positive(parse_int(key, value));
  else if (key == "M0") p.M0 = positive(parse_int(key, value));
  else if (key == "M") {
    p.M = parse_int(key, value);
    if (p.M < 0) throw ConfigError("parameter 'M' must be non-negative");
  } else if (key == "buffer") parse_levels(key, value, p.buffer);
  else if (key == "clearance") parse_levels(key, value, p.clearance);
  else if (key == "interior_margin") parse_levels(key, value, p.interior_margin);
  else if (key == "separation") parse_levels(key, value, p.separation);
  else if (key == "taper") parse_levels(key, value, p.taper);
  else if (key == "airport_side") parse_levels(key, value, p.airport_side);
  else if (key == "tracks") p.tracks = static_cast<int>(positive(parse_int(key, value)));
  else if (key == "detours") {
    const auto v = parse_int(key, value);
    if (v < 0) throw ConfigError("parameter 'detours' must be non-negative");
    p.detours = static_cast<int>(v);
  } else if (key == "shift_range") p.shift_range = positive(parse_int(key, value));
  else if (key == "shift_bases") {
    p.shift_bases = parse_int(key, value);
    if (p.shift_bases < 0) throw ConfigError("parameter 'shift_bases' must be non-negative");
  } else if (key == "match_radius") {
    p.match_radius = parse_int(key, value);
    if (p.match_radius < 0) throw ConfigError("parameter 'match_radius' must be non-negative");
  } else if (key == "semibad_trials") p.semibad_trials = positive(parse_int(key, value));
  else if (key == "field_cap") p.field_cap = static_cast<std::uint64_t>(positive(parse_int(key, value)));
  else throw ConfigError("unknown parameter '" + key + "'");
}

ParameterSet parameters_from(const KeyValues& kv) {
  ParameterSet p;
  for (const auto& [k, v] : kv) apply_parameter(p, k, v);
  return p;
}

std::string profile_path(const std::string& name_or_path) {
  if (name_or_path.find('/') != std::string::npos || name_or_path.find(".cfg") != std::string::npos)
    return name_or_path;
  std::string dir = LIPEMB_PROFILE_DIR;
  if (const char* env = std::getenv("LIPEMB_PROFILE_DIR")) dir = env;
  return dir + "/" + name_or_path + ".cfg";
}

ParameterSet load_profile(const std::string& name_or_path) {
  const std::string path = profile_path(name_or_path);
  std::ifstream probe(path);
  if (!probe) throw ConfigError("profile '" + name_or_path + "' not found (looked for " + path + ")");
  return parameters_from(read_key_values(path));
}

std::string to_key_values(const ParameterSet& p) {
  std::ostringstream o;
  o << "name = " << p.name << '\n'
    << "alpha = " << fmt_real(p.alpha) << '\n'
    << "beta = " << fmt_real(p.beta) << '\n'
    << "gamma = " << fmt_real(p.gamma) << '\n'
    << "m = " << fmt_real(p.m) << '\n'
    << "k0 = " << p.k0 << '\n'
    << "v0 = " << p.v0 << '\n'
    << "L0 = " << p.L0 << '\n'
    << "M0 = " << p.M0 << '\n'
    << "M = " << p.M << '\n'
    << "buffer = " << join_levels(p.buffer) << '\n'
    << "clearance = " << join_levels(p.clearance) << '\n'
    << "interior_margin = " << join_levels(p.interior_margin) << '\n'
    << "separation = " << join_levels(p.separation) << '\n'
    << "taper = " << join_levels(p.taper) << '\n'
    << "airport_side = " << join_levels(p.airport_side) << '\n'
    << "tracks = " << p.tracks << '\n'
    << "detours = " << p.detours << '\n'
    << "shift_range = " << p.shift_range << '\n'
    << "shift_bases = " << p.shift_bases << '\n'
    << "match_radius = " << p.match_radius << '\n'
    << "semibad_trials = " << p.semibad_trials << '\n'
    << "field_cap = " << p.field_cap << '\n';
  return o.str();
}

}  // namespace lipemb
