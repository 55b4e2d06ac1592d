#include "lipemb/cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "lipemb/embed.hpp"
#include "lipemb/hierarchy.hpp"
#include "lipemb/io.hpp"
#include "lipemb/oracle.hpp"
#include "lipemb/params.hpp"
#include "lipemb/simd.hpp"
#include "lipemb/stats.hpp"

namespace lipemb {

namespace {

struct RunConfig {
  std::string profile = "toy";
  std::string config;
  std::vector<std::string> sets;
  std::uint64_t seed = 1;
  std::string out;
  int workers = 1;
  int depth = 1;
  std::string window = "0,0,3,3";
  std::string family = "X";
  // sample
  std::string origin = "0,0";
  std::int64_t width = 64, height = 64;
  // estimate-s / render
  int level = 1;
  std::int32_t component = 0;
  std::uint64_t trials = 1000;
  double scale = 4;
  // reports
  std::uint64_t windows = 20, s_trials = 0;
  std::int64_t vmax = 4;
  // oracle
  std::string instance;
  std::string mode = "decide";
  std::uint64_t instances = 10, node_budget = 200'000'000, limit = 10;
  std::int64_t x_size = 2, y_size = 5, M = 2;
};

template <class T>
T parse_number(const std::string& key, const std::string& v) {
  std::istringstream in(v);
  T out{};
  in >> out;
  if (!in || !in.eof()) throw ConfigError("bad value for '" + key + "': " + v);
  return out;
}

void set_run_key(RunConfig& c, const std::string& k, const std::string& v) {
  if (k == "profile") c.profile = v;
  else if (k == "seed") c.seed = parse_number<std::uint64_t>(k, v);
  else if (k == "out") c.out = v;
  else if (k == "workers") c.workers = parse_number<int>(k, v);
  else if (k == "depth") c.depth = parse_number<int>(k, v);
  else if (k == "window") c.window = v;
  else if (k == "family") c.family = v;
  else if (k == "origin") c.origin = v;
  else if (k == "width") c.width = parse_number<std::int64_t>(k, v);
  else if (k == "height") c.height = parse_number<std::int64_t>(k, v);
  else if (k == "level") c.level = parse_number<int>(k, v);
  else if (k == "component") c.component = parse_number<std::int32_t>(k, v);
  else if (k == "trials") c.trials = parse_number<std::uint64_t>(k, v);
  else if (k == "scale") c.scale = parse_number<double>(k, v);
  else if (k == "windows") c.windows = parse_number<std::uint64_t>(k, v);
  else if (k == "s_trials") c.s_trials = parse_number<std::uint64_t>(k, v);
  else if (k == "vmax") c.vmax = parse_number<std::int64_t>(k, v);
  else if (k == "instance") c.instance = v;
  else if (k == "mode") c.mode = v;
  else if (k == "instances") c.instances = parse_number<std::uint64_t>(k, v);
  else if (k == "node_budget") c.node_budget = parse_number<std::uint64_t>(k, v);
  else if (k == "limit") c.limit = parse_number<std::uint64_t>(k, v);
  else if (k == "x_size") c.x_size = parse_number<std::int64_t>(k, v);
  else if (k == "y_size") c.y_size = parse_number<std::int64_t>(k, v);
  else if (k == "M") c.M = parse_number<std::int64_t>(k, v);
  else throw ConfigError("unknown config key '" + k + "'");
}

std::vector<std::int64_t> parse_ints(const std::string& what, const std::string& s, std::size_t n) {
  std::vector<std::int64_t> out;
  std::istringstream in(s);
  std::string tok;
  while (std::getline(in, tok, ',')) out.push_back(parse_number<std::int64_t>(what, tok));
  if (out.size() != n) throw ConfigError(what + " needs " + std::to_string(n) + " comma-separated integers");
  return out;
}

Rect parse_rect(const std::string& s) {
  const auto v = parse_ints("window", s, 4);
  const Rect r{v[0], v[1], v[2], v[3]};
  if (r.empty()) throw ConfigError("window is empty");
  return r;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

class Session {
 public:
  Session(std::string command, RunConfig cfg, ParameterSet params, std::vector<std::string> argv)
      : command_(std::move(command)), cfg_(std::move(cfg)), params_(std::move(params)), argv_(std::move(argv)) {}

  const RunConfig& cfg() const { return cfg_; }
  const ParameterSet& params() const { return params_; }

  void require_out() const {
    if (cfg_.out.empty()) throw ConfigError(command_ + " needs --out");
  }
  // Fails before any work when the directory already holds a run.
  void open() {
    if (cfg_.out.empty()) return;
    std::filesystem::create_directories(cfg_.out);
    if (std::filesystem::exists(path("manifest.json")))
      throw ConfigError("output directory " + cfg_.out + " already holds a run");
  }
  void artifact(const std::string& name, const std::string& content) {
    write_new_file(path(name), content);
    artifacts_.push_back({name, content.size(), hex64(fnv1a(content))});
  }
  void finish() {
    if (cfg_.out.empty()) return;
    nlohmann::ordered_json m;
    m["tool"] = "lipemb";
    m["version"] = LIPEMB_VERSION;
    m["subcommand"] = command_;
    m["argv"] = argv_;
    m["seed"] = cfg_.seed;
    m["workers"] = cfg_.workers;
    m["kernels"] = std::string(simd::kernels().name);
    const std::string params = to_key_values(params_);
    m["parameters"] = params;
    m["config_hash"] = hex64(fnv1a(params + "\n" + nlohmann::json(argv_).dump()));
    auto arts = nlohmann::ordered_json::array();
    for (const auto& a : artifacts_) arts.push_back({{"name", a.name}, {"bytes", a.bytes}, {"fnv1a", a.hash}});
    m["artifacts"] = arts;
    write_new_file(path("manifest.json"), m.dump(2) + "\n");
  }

 private:
  std::string path(const std::string& name) const { return (std::filesystem::path(cfg_.out) / name).string(); }

  struct Artifact {
    std::string name;
    std::size_t bytes;
    std::string hash;
  };
  std::string command_;
  RunConfig cfg_;
  ParameterSet params_;
  std::vector<std::string> argv_;
  std::vector<Artifact> artifacts_;
};

Hierarchy build_from(const Session& s) {
  const RunConfig& c = s.cfg();
  if (c.depth < 0 || c.depth > kMaxDepth) throw ConfigError("depth must lie in 0.." + std::to_string(kMaxDepth));
  return build_hierarchy(s.params(), parse_family(c.family), c.seed, c.depth, parse_rect(c.window));
}

void cmd_sample(Session& s) {
  s.require_out();
  s.open();
  const RunConfig& c = s.cfg();
  const auto o = parse_ints("origin", c.origin, 2);
  const BitField f = sample_field(c.seed, parse_family(c.family), {o[0], o[1]}, c.width, c.height, s.params().field_cap);
  s.artifact("field.bin", serialize_field(f));
  s.finish();
}

void cmd_build(Session& s) {
  s.require_out();
  s.open();
  const Hierarchy h = build_from(s);
  s.artifact("hierarchy.jsonl", hierarchy_jsonl(h));
  s.finish();
}

void cmd_components(Session& s) {
  s.open();
  const Hierarchy h = build_from(s);
  std::ostringstream csv;
  csv << "level,id,size,bad_cells,censored,semibad,source,s_point,s_lower,s_upper\n";
  std::printf("%5s %6s %5s %9s %8s %7s\n", "level", "id", "size", "bad_cells", "censored", "semibad");
  for (const Level& lvl : h.levels)
    for (const ComponentRec& q : lvl.components) {
      std::printf("%5d %6d %5lld %9lld %8s %7s\n", lvl.level, q.id, static_cast<long long>(q.size()),
                  static_cast<long long>(q.bad_cells), q.censored ? "yes" : "no", q.semibad ? "yes" : "no");
      csv << lvl.level << ',' << q.id << ',' << q.size() << ',' << q.bad_cells << ',' << q.censored << ','
          << q.semibad << ',' << static_cast<int>(q.source) << ',' << q.s_point << ',' << q.s_lower << ','
          << q.s_upper << '\n';
    }
  if (!s.cfg().out.empty()) s.artifact("components.csv", csv.str());
  s.finish();
}

void cmd_estimate(Session& s) {
  s.open();
  const RunConfig& c = s.cfg();
  const Hierarchy h = build_from(s);
  const auto e = estimate_S(h, c.level, c.component, c.trials, mix_key(c.seed, 0xE57U), c.workers);
  nlohmann::ordered_json j{{"family", c.family}, {"level", c.level}, {"component", c.component},
                           {"trials", e.trials}, {"successes", e.successes}, {"point", e.point},
                           {"ci_lower", e.lower},  {"ci_upper", e.upper},     {"seed", e.seed}};
  const std::string text = j.dump() + "\n";
  std::cout << text;
  if (!c.out.empty()) s.artifact("estimate.jsonl", text);
  s.finish();
}

void cmd_reports(Session& s) {
  s.require_out();
  s.open();
  const RunConfig& c = s.cfg();
  if (c.depth < 0 || c.depth > kMaxDepth) throw ConfigError("depth must lie in 0.." + std::to_string(kMaxDepth));
  const auto samples =
      collect_report_samples(s.params(), c.seed, c.depth, parse_rect(c.window), c.windows, c.s_trials, c.workers);
  const auto tail = tail_report(samples.s, s.params(), {}, c.vmax);
  const auto size = size_report(samples.s, s.params(), c.vmax);
  const auto good = good_prob_report(samples.good, s.params());
  s.artifact("tail.csv", tail_csv(tail));
  s.artifact("tail.jsonl", tail_jsonl(tail));
  s.artifact("size.csv", size_csv(size));
  s.artifact("size.jsonl", size_jsonl(size));
  s.artifact("good.csv", good_csv(good));
  s.artifact("good.jsonl", good_jsonl(good));
  s.finish();
}

nlohmann::ordered_json oracle_record(const Instance& inst, const RunConfig& c, std::uint64_t index) {
  OracleCaps caps;
  caps.node_budget = c.node_budget;
  nlohmann::ordered_json r{{"instance", index}, {"M", inst.M}, {"mode", oracle_mode_name(inst.mode)}};
  SearchStats st;
  switch (inst.mode) {
    case OracleMode::Decide: {
      const auto m = find_embedding(inst, caps, &st);
      r["decision"] = st.exhausted ? "unknown" : (m ? "yes" : "no");
      if (m) {
        auto pairs = nlohmann::ordered_json::array();
        for (std::size_t i = 0; i < m->domain.size(); ++i)
          pairs.push_back({m->domain[i].x, m->domain[i].y, m->image[i].x, m->image[i].y});
        r["witness"] = pairs;
        r["verified"] = verify_embedding(*m, inst.x, inst.y);
      }
      break;
    }
    case OracleMode::Count: {
      const auto cr = count_embeddings(inst, caps);
      st = cr.stats;
      r["count"] = cr.count;
      break;
    }
    case OracleMode::Enumerate: {
      const auto maps = enumerate_embeddings(inst, c.limit, caps, &st);
      auto all = nlohmann::ordered_json::array();
      for (const auto& m : maps) {
        auto pairs = nlohmann::ordered_json::array();
        for (std::size_t i = 0; i < m.domain.size(); ++i)
          pairs.push_back({m.domain[i].x, m.domain[i].y, m.image[i].x, m.image[i].y});
        all.push_back(pairs);
      }
      r["maps"] = all;
      break;
    }
  }
  r["nodes"] = st.nodes;
  r["budget_exhausted"] = st.exhausted;
  return r;
}

void cmd_oracle(Session& s) {
  s.open();
  const RunConfig& c = s.cfg();
  std::string out;
  if (!c.instance.empty()) {
    out = oracle_record(deserialize_instance(read_file(c.instance)), c, 0).dump() + "\n";
  } else {
    std::vector<std::string> lines(c.instances);
    parallel_for(c.instances, c.workers, [&](std::size_t i) {
      Instance inst;
      inst.x = sample_field(mix_key(c.seed, i), Family::X, {0, 0}, c.x_size, c.x_size);
      inst.y = sample_field(mix_key(c.seed, i), Family::Y, {0, 0}, c.y_size, c.y_size);
      inst.M = c.M;
      inst.mode = parse_oracle_mode(c.mode);
      lines[i] = oracle_record(inst, c, i).dump() + "\n";
    });
    for (const auto& l : lines) out += l;
  }
  std::cout << out;
  if (!c.out.empty()) s.artifact("oracle.jsonl", out);
  s.finish();
}

void cmd_audit(Session& s) {
  s.open();
  const ConstraintReport rep = check_constraints(s.params());
  std::ostringstream table, jsonl;
  char line[512];
  std::snprintf(line, sizeof line, "%-4s %-38s %-13s %s\n", "#", "constraint", "verdict", "slack (lhs - rhs)");
  table << line;
  int i = 0;
  for (const auto& r : rep.rows) {
    ++i;
    std::snprintf(line, sizeof line, "%-4d %-38s %-13s %s\n", i, r.name.c_str(), verdict_name(r.verdict),
                  r.slack.c_str());
    table << line;
    jsonl << nlohmann::ordered_json{{"index", i},          {"constraint", r.name}, {"lhs", r.lhs},
                                    {"rhs", r.rhs},        {"slack", r.slack},
                                    {"verdict", verdict_name(r.verdict)}}
                 .dump()
          << '\n';
  }
  table << "overall: " << (rep.overall ? "satisfied" : "not satisfied") << '\n';
  std::cout << table.str() << jsonl.str();
  if (!s.cfg().out.empty()) {
    s.artifact("audit.txt", table.str());
    s.artifact("audit.jsonl", jsonl.str());
  }
  s.finish();
}

void cmd_render(Session& s) {
  s.require_out();
  s.open();
  const Hierarchy h = build_from(s);
  RenderOptions opt;
  opt.scale = s.cfg().scale;
  s.artifact("level" + std::to_string(s.cfg().level) + ".svg", render_svg(h, s.cfg().level, opt));
  s.finish();
}

}  // namespace

int run(const std::vector<std::string>& args) {
  RunConfig cfg;
  CLI::App app{"Lipschitz embeddings of Bernoulli fields: multi-scale block experiments", "lipemb"};
  app.require_subcommand(1);
  app.set_version_flag("--version", LIPEMB_VERSION);

  auto common = [&](CLI::App* sub) {
    sub->add_option("--profile", cfg.profile, "named profile or .cfg path");
    sub->add_option("--config", cfg.config, "key = value file; flags win over it");
    sub->add_option("--set", cfg.sets, "parameter override key=value (repeatable)");
    sub->add_option("--seed", cfg.seed);
    sub->add_option("--out", cfg.out, "output directory");
    sub->add_option("--workers", cfg.workers);
  };
  auto structure = [&](CLI::App* sub) {
    sub->add_option("--family", cfg.family, "X or Y");
    sub->add_option("--depth", cfg.depth);
    sub->add_option("--window", cfg.window, "top-level cells x0,y0,x1,y1");
  };
  auto* sample = app.add_subcommand("sample", "sample a field window");
  common(sample);
  sample->add_option("--family", cfg.family);
  sample->add_option("--origin", cfg.origin);
  sample->add_option("--width", cfg.width);
  sample->add_option("--height", cfg.height);
  auto* build = app.add_subcommand("build", "build and dump a hierarchy");
  common(build);
  structure(build);
  auto* comps = app.add_subcommand("components", "list component statistics");
  common(comps);
  structure(comps);
  auto* est = app.add_subcommand("estimate-s", "estimate a component's embedding probability");
  common(est);
  structure(est);
  est->add_option("--level", cfg.level);
  est->add_option("--component", cfg.component);
  est->add_option("--trials", cfg.trials);
  auto* reports = app.add_subcommand("reports", "tail / size / good-block reports");
  common(reports);
  structure(reports);
  reports->add_option("--windows", cfg.windows);
  reports->add_option("--s-trials", cfg.s_trials);
  reports->add_option("--vmax", cfg.vmax);
  auto* oracle = app.add_subcommand("oracle", "exact search on small windows");
  common(oracle);
  oracle->add_option("--instance", cfg.instance, "instance file");
  oracle->add_option("--mode", cfg.mode, "decide, count or enumerate");
  oracle->add_option("--instances", cfg.instances);
  oracle->add_option("--x-size", cfg.x_size);
  oracle->add_option("--y-size", cfg.y_size);
  oracle->add_option("-M,--lipschitz", cfg.M);
  oracle->add_option("--node-budget", cfg.node_budget);
  oracle->add_option("--limit", cfg.limit);
  auto* audit = app.add_subcommand("audit-params", "evaluate the parameter constraints exactly");
  common(audit);
  auto* render = app.add_subcommand("render", "SVG of one hierarchy level");
  common(render);
  structure(render);
  render->add_option("--level", cfg.level);
  render->add_option("--scale", cfg.scale);

  try {
    // The config file supplies defaults, so it is read before the flags.
    KeyValues file_params;
    for (std::size_t i = 0; i + 1 < args.size(); ++i)
      if (args[i] == "--config") {
        for (const auto& [k, v] : read_key_values(args[i + 1])) {
          if (is_parameter_key(k)) file_params[k] = v;
          else set_run_key(cfg, k, v);
        }
      }
    std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
    try {
      app.parse(rev);
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e);
      return code == 0 ? 0 : 1;
    }

    ParameterSet p = load_profile(cfg.profile);
    for (const auto& [k, v] : file_params) apply_parameter(p, k, v);
    for (const auto& kv : cfg.sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value");
      apply_parameter(p, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (cfg.workers < 1) throw ConfigError("workers must be at least 1");

    CLI::App* sub = app.get_subcommands().front();
    Session s(sub->get_name(), cfg, p, std::vector<std::string>(args.begin() + (args.empty() ? 0 : 1), args.end()));
    const std::string& name = sub->get_name();
    if (name == "sample") cmd_sample(s);
    else if (name == "build") cmd_build(s);
    else if (name == "components") cmd_components(s);
    else if (name == "estimate-s") cmd_estimate(s);
    else if (name == "reports") cmd_reports(s);
    else if (name == "oracle") cmd_oracle(s);
    else if (name == "audit-params") cmd_audit(s);
    else if (name == "render") cmd_render(s);
    return 0;
  } catch (const Error& e) {
    std::cerr << "lipemb: " << e.what() << '\n';
    return static_cast<int>(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "lipemb: " << e.what() << '\n';
    return 1;
  }
}

int run(int argc, char** argv) { return run(std::vector<std::string>(argv, argv + argc)); }

}  // namespace lipemb
