#include <doctest.h>

#include <filesystem>
#include <json.hpp>
#include <sstream>

#include "lipemb/io.hpp"

using namespace lipemb;
namespace fs = std::filesystem;

TEST_CASE("shapes as text") {
  const Animal a = make_animal({{3, -1}, {0, 0}, {1, 0}});
  CHECK(shape_from_text(shape_to_text(a)) == a);
  CHECK(shape_to_text(a) == "0,0\n1,0\n3,-1\n");
  CHECK_THROWS_AS(shape_from_text("1;2\n"), ConfigError);
}

TEST_CASE("instances round-trip") {
  Instance inst{sample_field(3, Family::X, {0, 0}, 2, 3), sample_field(3, Family::Y, {-1, 2}, 5, 4), 3,
                OracleMode::Count};
  const Instance back = deserialize_instance(serialize_instance(inst));
  CHECK(back.M == 3);
  CHECK(back.mode == OracleMode::Count);
  CHECK(back.x.bits == inst.x.bits);
  CHECK(back.y.bits == inst.y.bits);
  CHECK(back.y.origin == inst.y.origin);
  for (auto m : {OracleMode::Decide, OracleMode::Count, OracleMode::Enumerate})
    CHECK(parse_oracle_mode(oracle_mode_name(m)) == m);
  CHECK_THROWS_AS(parse_oracle_mode("guess"), ConfigError);
  CHECK_THROWS_AS(deserialize_instance("lipemb-instance v1 M=x mode=decide\n"), ConfigError);
}

TEST_CASE("files are never overwritten") {
  const fs::path dir = fs::temp_directory_path() / "lipemb_io_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string f = (dir / "a.txt").string();
  write_new_file(f, "one");
  CHECK(read_file(f) == "one");
  CHECK_THROWS_AS(write_new_file(f, "two"), ConfigError);
  CHECK(read_file(f) == "one");
  CHECK_THROWS_AS(read_file((dir / "missing").string()), ConfigError);
  fs::remove_all(dir);
}

TEST_CASE("hierarchy dump and rendering agree") {
  const ParameterSet p = load_profile("toy");
  const Hierarchy h = build_hierarchy(p, Family::Y, 8, 1, {0, 0, 3, 3});
  std::istringstream in(hierarchy_jsonl(h));
  std::string line;
  int blocks1 = 0, components = 0;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    if (j["record"] == "block" && j["level"] == 1) ++blocks1;
    if (j["record"] == "component") ++components;
  }
  CHECK(blocks1 == static_cast<int>(h.level(1).blocks.size()));
  std::size_t comp_total = 0;
  for (const auto& l : h.levels) comp_total += l.components.size();
  CHECK(components == static_cast<int>(comp_total));

  const std::string svg = render_svg(h, 1);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
  std::size_t groups = 0;
  for (std::size_t pos = 0; (pos = svg.find("<g class=\"block\"", pos)) != std::string::npos; ++pos) ++groups;
  CHECK(groups == h.level(1).blocks.size());
}

TEST_CASE("witness records") {
  const ParameterSet p = load_profile("toy");
  const Hierarchy x = build_hierarchy(p, Family::X, 1, 0, {0, 0, 4, 4});
  const Hierarchy y = build_hierarchy(p, Family::Y, 1, 0, {0, 0, 4, 4});
  for (std::int64_t cy = 1; cy < 3; ++cy)
    for (std::int64_t cx = 1; cx < 3; ++cx) {
      const auto w = embeds_level(x, {{cx, cy}}, y, {0, 0}, 0);
      if (!w) continue;
      const auto m = flatten(*w, x, y);
      const auto j = nlohmann::json::parse(witness_json(*w, m ? &*m : nullptr));
      CHECK(j["level"] == 0);
      return;
    }
}
