#pragma once

#include <string>

#include "lipemb/embed.hpp"
#include "lipemb/fields.hpp"
#include "lipemb/hierarchy.hpp"
#include "lipemb/oracle.hpp"

namespace lipemb {

inline constexpr int kFieldFormatVersion = 1;

// Header line, then row-major bits packed 8 per byte, least significant bit
// first.
std::string serialize_field(const BitField& f);
// Reads one field from `data` starting at *pos and advances it.
BitField deserialize_field(const std::string& data, std::size_t* pos = nullptr);

std::string read_file(const std::string& path);
// Refuses to replace an existing file.
void write_new_file(const std::string& path, const std::string& content);

// One "x,y" pair per line, sorted.
std::string shape_to_text(const Animal& a);
Animal shape_from_text(const std::string& text);

// One JSON record per block and per component of each level.
std::string hierarchy_jsonl(const Hierarchy& h, bool include_level0_cells = false);
std::string witness_json(const Witness& w, const EmbeddingMap* map = nullptr);

// Header line "lipemb-instance v1 M=<M> mode=<mode>" followed by two fields.
std::string serialize_instance(const Instance& inst);
Instance deserialize_instance(const std::string& data);
const char* oracle_mode_name(OracleMode m);
OracleMode parse_oracle_mode(const std::string& s);

struct RenderOptions {
  double scale = 4;  // pixels per lower cell
  bool buffers = true;
  bool curves = true;
};
// SVG of one level: a <g class="block"> per block, buffer strips, boundary
// polylines and bad components shaded.
std::string render_svg(const Hierarchy& h, int level, const RenderOptions& opt = {});

}  // namespace lipemb
