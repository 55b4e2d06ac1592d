#include "lipemb/io.hpp"

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace lipemb {

std::string serialize_field(const BitField& f) {
  std::ostringstream o;
  o << "lipemb-field v" << kFieldFormatVersion << " family=" << family_name(f.family) << " origin=" << f.origin.x
    << ',' << f.origin.y << " width=" << f.width << " height=" << f.height << " seed=" << f.seed << '\n';
  std::string out = o.str();
  const std::size_t n = f.bits.size();
  std::string packed((n + 7) / 8, '\0');
  for (std::size_t i = 0; i < n; ++i)
    if (f.bits[i]) packed[i / 8] = static_cast<char>(static_cast<unsigned char>(packed[i / 8]) | (1u << (i % 8)));
  return out + packed;
}

BitField deserialize_field(const std::string& data, std::size_t* pos) {
  std::size_t start = pos ? *pos : 0;
  const std::size_t eol = data.find('\n', start);
  if (eol == std::string::npos) throw ConfigError("field header is not terminated");
  std::istringstream hdr(data.substr(start, eol - start));
  std::string magic, version;
  hdr >> magic >> version;
  if (magic != "lipemb-field") throw ConfigError("not a field file");
  if (version != "v" + std::to_string(kFieldFormatVersion)) throw ConfigError("unsupported field format " + version);
  BitField f;
  bool seen[5] = {};
  std::string tok;
  while (hdr >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw ConfigError("malformed field header token " + tok);
    const std::string k = tok.substr(0, eq), v = tok.substr(eq + 1);
    try {
      if (k == "family") {
        f.family = parse_family(v);
        seen[0] = true;
      } else if (k == "origin") {
        const auto c = v.find(',');
        if (c == std::string::npos) throw ConfigError("malformed origin");
        f.origin = {std::stoll(v.substr(0, c)), std::stoll(v.substr(c + 1))};
        seen[1] = true;
      } else if (k == "width") {
        f.width = std::stoll(v);
        seen[2] = true;
      } else if (k == "height") {
        f.height = std::stoll(v);
        seen[3] = true;
      } else if (k == "seed") {
        f.seed = std::stoull(v);
        seen[4] = true;
      } else {
        throw ConfigError("unknown field header key " + k);
      }
    } catch (const std::logic_error&) {
      throw ConfigError("malformed field header value " + tok);
    }
  }
  for (bool s : seen)
    if (!s) throw ConfigError("field header is incomplete");
  if (f.width < 0 || f.height < 0) throw ConfigError("negative field extent");
  const auto n = static_cast<std::size_t>(f.width * f.height);
  const std::size_t bytes = (n + 7) / 8;
  if (data.size() < eol + 1 + bytes) throw ConfigError("field data is truncated");
  f.bits.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    f.bits[i] = (static_cast<unsigned char>(data[eol + 1 + i / 8]) >> (i % 8)) & 1u;
  if (pos) *pos = eol + 1 + bytes;
  return f;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path);
  std::ostringstream o;
  o << in.rdbuf();
  return o.str();
}

void write_new_file(const std::string& path, const std::string& content) {
  if (std::filesystem::exists(path)) throw ConfigError("refusing to overwrite " + path);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << content;
}

std::string shape_to_text(const Animal& a) {
  std::string out;
  for (Point p : make_animal(a)) out += std::to_string(p.x) + "," + std::to_string(p.y) + "\n";
  return out;
}

Animal shape_from_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  Animal out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c = line.find(',');
    if (c == std::string::npos) throw ConfigError("malformed shape line " + line);
    try {
      out.push_back({std::stoll(line.substr(0, c)), std::stoll(line.substr(c + 1))});
    } catch (const std::logic_error&) {
      throw ConfigError("malformed shape line " + line);
    }
  }
  return make_animal(std::move(out));
}

namespace {

nlohmann::json cells_json(const Animal& a) {
  auto arr = nlohmann::json::array();
  for (Point p : a) arr.push_back({p.x, p.y});
  return arr;
}

nlohmann::json rect_json(const Rect& r) { return {r.x0, r.y0, r.x1, r.y1}; }

const char* source_name(SemiBadSource s) {
  switch (s) {
    case SemiBadSource::Unknown: return "unknown";
    case SemiBadSource::Exact: return "exact";
    case SemiBadSource::Estimate: return "estimate";
    case SemiBadSource::Unreachable: return "unreachable";
    case SemiBadSource::SizeGate: return "size-gate";
  }
  return "unknown";
}

}  // namespace

std::string hierarchy_jsonl(const Hierarchy& h, bool include_level0_cells) {
  std::string out;
  auto emit = [&](const nlohmann::ordered_json& j) { out += j.dump() + "\n"; };
  emit({{"record", "hierarchy"},
        {"family", family_name(h.family)},
        {"seed", h.seed},
        {"depth", h.depth},
        {"profile", h.params.name}});
  for (const Level& lvl : h.levels) {
    emit({{"record", "level"},
          {"level", lvl.level},
          {"window", rect_json(lvl.window)},
          {"blocks", lvl.block_count()},
          {"components", lvl.components.size()},
          {"forced_conjoins", lvl.forced_conjoins}});
    if (lvl.level == 0) {
      if (include_level0_cells)
        for (std::size_t i = 0; i < lvl.block.size(); ++i) {
          const Point u = lvl.cell(i);
          emit({{"record", "block"},
                {"level", 0},
                {"id", i},
                {"cells", cells_json({u})},
                {"value", lvl.value[i]},
                {"good", !lvl.bad[i]},
                {"censored", lvl.on_border(u)},
                {"component", lvl.component[i]}});
        }
    } else {
      for (const BlockRec& b : lvl.blocks) {
        const Rect bb = b.members.empty() ? Rect{} : bounding_box(b.members);
        emit({{"record", "block"},
              {"level", lvl.level},
              {"id", b.id},
              {"cells", cells_json(b.cells)},
              {"good", b.good},
              {"censored", b.censored},
              {"component", b.component},
              {"members", b.members.size()},
              {"members_bbox", rect_json(bb)},
              {"bad_sub_size", b.bad_sub_size}});
      }
    }
    for (const ComponentRec& c : lvl.components)
      emit({{"record", "component"},
            {"level", lvl.level},
            {"id", c.id},
            {"cells", cells_json(c.cells)},
            {"size", c.size()},
            {"bad_cells", c.bad_cells},
            {"censored", c.censored},
            {"semibad", c.semibad},
            {"semibad_source", source_name(c.source)},
            {"s_point", c.s_point},
            {"s_lower", c.s_lower},
            {"s_upper", c.s_upper}});
  }
  return out;
}

namespace {

nlohmann::ordered_json witness_object(const Witness& w) {
  nlohmann::ordered_json j{{"level", w.level},
                           {"tau", {w.tau.x, w.tau.y}},
                           {"shift", {w.shift.x, w.shift.y}},
                           {"x_cells", cells_json(w.x_cells)},
                           {"candidates_tried", w.candidates_tried},
                           {"base_budget", w.base.budget}};
  auto matches = [](const std::vector<Match>& ms) {
    auto arr = nlohmann::ordered_json::array();
    for (const Match& m : ms) {
      nlohmann::ordered_json e{{"x_cells", cells_json(m.x_cells)},
                               {"y_cells", cells_json(m.y_cells)},
                               {"tau", {m.tau.x, m.tau.y}}};
      if (m.inner) e["inner"] = witness_object(*m.inner);
      arr.push_back(std::move(e));
    }
    return arr;
  };
  j["forward"] = matches(w.forward);
  j["backward"] = matches(w.backward);
  return j;
}

}  // namespace

std::string witness_json(const Witness& w, const EmbeddingMap* map) {
  nlohmann::ordered_json j = witness_object(w);
  if (map) {
    auto pairs = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < map->domain.size(); ++i)
      pairs.push_back({map->domain[i].x, map->domain[i].y, map->image[i].x, map->image[i].y});
    j["site_map"] = {{"M", map->M}, {"pairs", pairs}};
  }
  return j.dump() + "\n";
}

const char* oracle_mode_name(OracleMode m) {
  switch (m) {
    case OracleMode::Decide: return "decide";
    case OracleMode::Count: return "count";
    case OracleMode::Enumerate: return "enumerate";
  }
  return "decide";
}

OracleMode parse_oracle_mode(const std::string& s) {
  if (s == "decide") return OracleMode::Decide;
  if (s == "count") return OracleMode::Count;
  if (s == "enumerate") return OracleMode::Enumerate;
  throw ConfigError("unknown oracle mode " + s);
}

std::string serialize_instance(const Instance& inst) {
  return "lipemb-instance v1 M=" + std::to_string(inst.M) + " mode=" + oracle_mode_name(inst.mode) + "\n" +
         serialize_field(inst.x) + serialize_field(inst.y);
}

Instance deserialize_instance(const std::string& data) {
  const std::size_t eol = data.find('\n');
  if (eol == std::string::npos) throw ConfigError("instance header is not terminated");
  std::istringstream hdr(data.substr(0, eol));
  std::string magic, version, m, mode;
  hdr >> magic >> version >> m >> mode;
  if (magic != "lipemb-instance" || version != "v1") throw ConfigError("not an instance file");
  if (m.rfind("M=", 0) != 0 || mode.rfind("mode=", 0) != 0) throw ConfigError("malformed instance header");
  Instance inst;
  try {
    inst.M = std::stoll(m.substr(2));
  } catch (const std::logic_error&) {
    throw ConfigError("malformed M in instance header");
  }
  inst.mode = parse_oracle_mode(mode.substr(5));
  std::size_t pos = eol + 1;
  inst.x = deserialize_field(data, &pos);
  inst.y = deserialize_field(data, &pos);
  return inst;
}

}  // namespace lipemb
