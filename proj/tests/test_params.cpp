#include <doctest.h>

#include "lipemb/core.hpp"
#include "lipemb/params.hpp"

using namespace lipemb;

TEST_CASE("scales") {
  ParameterSet p;
  p.L0 = 6;
  p.alpha = 2;
  CHECK(p.L(0) == 6);
  CHECK(p.L(1) == 36);
  CHECK(p.L(2) == 1296);
  CHECK(p.cells_per_side(1) == 36);
  CHECK(p.cells_per_side(2) == 36);
  CHECK(p.m_j(1) == doctest::Approx(1.5));
  p.L0 = 10;
  p.alpha = 8;
  CHECK(p.L(1) == 100000000);
  CHECK_THROWS_AS(p.L(2), CapError);
}

TEST_CASE("toy geometry") {
  const ParameterSet p = load_profile("toy");
  const LevelGeometry g = p.geometry(1);
  CHECK(g.n == 36);
  CHECK(g.buffer == 8);
  CHECK(g.clearance == 3);
  CHECK(g.interior_margin == 2);
  CHECK(g.separation == 7);
  CHECK(g.taper == 4);
  CHECK(g.detour_radius == 6);
  CHECK(g.detour_step == 3);
  CHECK(g.tracks == 3);
  CHECK(g.detours == 4);
  CHECK(g.airport_side == 15);
  // Tracks and detours must fit inside the buffer strip.
  CHECK((g.tracks / 2) * g.separation < g.buffer);
  CHECK(g.detour_step + 1 < g.buffer);
}

TEST_CASE("key-value profiles") {
  const KeyValues kv = parse_key_values("# comment\nalpha = 3\n\nM0=5  # trailing\n");
  CHECK(kv.at("alpha") == "3");
  CHECK(kv.at("M0") == "5");
  CHECK_THROWS_AS(parse_key_values("novalue\n"), ConfigError);

  ParameterSet p = parameters_from(kv);
  CHECK(p.alpha == 3);
  CHECK(p.M0 == 5);
  CHECK_THROWS_AS(apply_parameter(p, "nonsense", "1"), ConfigError);
  CHECK_THROWS_AS(apply_parameter(p, "M0", "abc"), ConfigError);
  CHECK(is_parameter_key("gamma"));
  CHECK_FALSE(is_parameter_key("seed"));

  for (const char* name : {"toy", "tiny", "paper"}) {
    const ParameterSet q = load_profile(name);
    const ParameterSet r = parameters_from(parse_key_values(to_key_values(q)));
    CHECK(to_key_values(r) == to_key_values(q));
  }
  CHECK_THROWS_AS(load_profile("no-such-profile"), ConfigError);
}

TEST_CASE("constraint audit") {
  ParameterSet p = load_profile("paper");
  p.alpha = 8;
  p.gamma = 350;
  CHECK(check_constraints(p).rows[1].verdict == Verdict::Satisfied);
  CHECK(check_constraints(p).rows[1].slack == "30");
  p.alpha = 7;
  p.gamma = 280;
  CHECK(check_constraints(p).rows[1].verdict == Verdict::Violated);
  CHECK(check_constraints(p).rows[1].slack == "0");

  // Raising gamma alone never breaks gamma > 40 alpha.
  for (double g = 200; g < 400; g += 7.5) {
    p.gamma = g;
    const bool before = check_constraints(p).rows[1].verdict == Verdict::Satisfied;
    p.gamma = g + 7.5;
    const bool after = check_constraints(p).rows[1].verdict == Verdict::Satisfied;
    CHECK((!before || after));
  }

  const ParameterSet paper = load_profile("paper");
  const ConstraintReport a = check_constraints(paper), b = check_constraints(paper);
  REQUIRE(a.rows.size() == 10);
  for (std::size_t i = 0; i < 10; ++i) {
    CHECK(a.rows[i].slack == b.rows[i].slack);
    CHECK(a.rows[i].verdict == b.rows[i].verdict);
  }

  // The transcendental row is undecided only inside its error band.
  // The crossing sits at v0 = 263401289.13; the neighbours straddle it.
  ParameterSet edge = paper;
  edge.v0 = 263401289;
  CHECK(check_constraints(edge).rows[9].verdict == Verdict::Satisfied);
  edge.v0 = 263401290;
  CHECK(check_constraints(edge).rows[9].verdict == Verdict::Violated);

  ParameterSet bad = paper;
  bad.k0 = 0;
  CHECK_THROWS_AS(check_constraints(bad), PreconditionError);
}
