#include <doctest.h>

#include <filesystem>
#include <json.hpp>
#include <sstream>

#include "lipemb/cli.hpp"
#include "lipemb/io.hpp"

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("lipemb_cli_" + name)) {
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string sub(const std::string& s) const { return (path / s).string(); }
};

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "lipemb");
  return lipemb::run(args);
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (std::size_t pos = 0; (pos = text.find(needle, pos)) != std::string::npos; pos += needle.size()) ++n;
  return n;
}

}  // namespace

TEST_CASE("exit codes") {
  TempDir t("codes");
  CHECK(cli({"audit-params", "--profile", "paper"}) == 0);
  CHECK(cli({"nonsense"}) == 1);
  CHECK(cli({"build", "--profile", "no-such"}) == 1);
  CHECK(cli({"build", "--out", t.sub("a"), "--set", "bogus=1"}) == 1);
  CHECK(cli({"build", "--out", t.sub("b"), "--depth", "9"}) == 1);
  // A level-1 estimate on a component that does not exist.
  CHECK(cli({"estimate-s", "--depth", "0", "--level", "0", "--component", "99999", "--trials", "10"}) == 2);
  // A field window beyond the configured cap.
  CHECK(cli({"sample", "--out", t.sub("c"), "--width", "100000", "--height", "100000"}) == 3);
}

TEST_CASE("audit table") {
  TempDir t("audit");
  REQUIRE(cli({"audit-params", "--profile", "paper", "--out", t.sub("run")}) == 0);
  const std::string jsonl = lipemb::read_file(t.sub("run/audit.jsonl"));
  CHECK(count(jsonl, "\n") == 10);
  const std::string table = lipemb::read_file(t.sub("run/audit.txt"));
  CHECK(count(table, "violated") == 3);
}

TEST_CASE("builds are reproducible and never overwrite") {
  TempDir t("build");
  const std::vector<std::string> args = {"build", "--profile", "toy", "--seed", "11", "--depth", "1", "--family", "Y"};
  auto with_out = [&](const std::string& d) {
    auto a = args;
    a.push_back("--out");
    a.push_back(t.sub(d));
    return a;
  };
  REQUIRE(cli(with_out("one")) == 0);
  REQUIRE(cli(with_out("two")) == 0);
  CHECK(lipemb::read_file(t.sub("one/hierarchy.jsonl")) == lipemb::read_file(t.sub("two/hierarchy.jsonl")));

  const auto before = lipemb::read_file(t.sub("one/manifest.json"));
  CHECK(cli(with_out("one")) == 1);
  CHECK(lipemb::read_file(t.sub("one/manifest.json")) == before);

  const auto m = nlohmann::json::parse(before);
  CHECK(m["seed"] == 11);
  CHECK(m["subcommand"] == "build");
  CHECK(m["artifacts"].size() == 1);
  CHECK(m["config_hash"].get<std::string>().size() == 16);
  CHECK(m["parameters"].get<std::string>().find("L0 = 6") != std::string::npos);
}

TEST_CASE("render matches the dump") {
  TempDir t("render");
  const std::vector<std::string> common = {"--profile", "toy", "--seed", "4", "--depth", "1", "--family", "X"};
  auto b = common, r = common;
  b.insert(b.begin(), "build");
  b.insert(b.end(), {"--out", t.sub("b")});
  r.insert(r.begin(), "render");
  r.insert(r.end(), {"--out", t.sub("r"), "--level", "1"});
  REQUIRE(cli(b) == 0);
  REQUIRE(cli(r) == 0);
  std::istringstream in(lipemb::read_file(t.sub("b/hierarchy.jsonl")));
  std::string line;
  std::size_t blocks = 0;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    blocks += j["record"] == "block" && j["level"] == 1;
  }
  const std::string svg = lipemb::read_file(t.sub("r/level1.svg"));
  CHECK(blocks > 0);
  CHECK(count(svg, "<g class=\"block\"") == blocks);
}

TEST_CASE("config files and flags") {
  TempDir t("config");
  fs::create_directories(t.path);
  const std::string cfg = t.sub("run.cfg");
  lipemb::write_new_file(cfg, "seed = 5\nM0 = 7\nworkers = 2\n");
  REQUIRE(cli({"sample", "--config", cfg, "--seed", "6", "--out", t.sub("s"), "--width", "4", "--height", "4"}) == 0);
  const auto m = nlohmann::json::parse(lipemb::read_file(t.sub("s/manifest.json")));
  CHECK(m["seed"] == 6);  // the flag wins
  CHECK(m["workers"] == 2);
  CHECK(m["parameters"].get<std::string>().find("M0 = 7") != std::string::npos);
  const auto f = lipemb::deserialize_field(lipemb::read_file(t.sub("s/field.bin")));
  CHECK(f.bits == lipemb::sample_field(6, lipemb::Family::X, {0, 0}, 4, 4).bits);
}

TEST_CASE("reports are identical across worker counts") {
  TempDir t("reports");
  for (const char* w : {"1", "3"})
    REQUIRE(cli({"reports", "--profile", "toy", "--seed", "2", "--depth", "1", "--windows", "3", "--workers", w,
                 "--out", t.sub(std::string("w") + w)}) == 0);
  for (const char* f : {"tail.csv", "tail.jsonl", "size.csv", "good.jsonl"})
    CHECK(lipemb::read_file(t.sub(std::string("w1/") + f)) == lipemb::read_file(t.sub(std::string("w3/") + f)));
}

TEST_CASE("oracle subcommand") {
  TempDir t("oracle");
  fs::create_directories(t.path);
  lipemb::Instance inst{lipemb::sample_field(1, lipemb::Family::X, {0, 0}, 1, 1),
                        lipemb::sample_field(1, lipemb::Family::Y, {0, 0}, 3, 3), 1, lipemb::OracleMode::Count};
  lipemb::write_new_file(t.sub("i.txt"), lipemb::serialize_instance(inst));
  REQUIRE(cli({"oracle", "--instance", t.sub("i.txt"), "--out", t.sub("o")}) == 0);
  const auto j = nlohmann::json::parse(lipemb::read_file(t.sub("o/oracle.jsonl")));
  std::uint64_t k = 0;
  for (auto v : inst.y.bits) k += v == inst.x.bits[0];
  CHECK(j["count"] == k);
  CHECK(cli({"oracle", "--instances", "3", "--x-size", "5", "--y-size", "5"}) == 3);
}
