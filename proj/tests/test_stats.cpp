#include <doctest.h>

#include <cmath>

#include "brute.hpp"
#include "lipemb/stats.hpp"

using namespace lipemb;

namespace {
ParameterSet toy() { return load_profile("toy"); }
constexpr auto G = static_cast<std::uint8_t>(Y0Class::Good);
constexpr auto Z = static_cast<std::uint8_t>(Y0Class::Zero);
constexpr auto O = static_cast<std::uint8_t>(Y0Class::One);
}  // namespace

TEST_CASE("exact level-0 embedding probabilities") {
  ParameterSet p = toy();
  CHECK(exact_S0(Family::Y, {Z, O, Z}, p) == Rational(1, 8));
  CHECK(exact_S0(Family::Y, {G}, p) == 1);
  p.M0 = 2;
  // 16 blocks: 6 good, 5 zero-heavy, 5 one-heavy.
  const auto c = brute::enumerate_y0_blocks(2);
  CHECK(c.good == 6);
  CHECK(exact_S0(Family::X, {0}, p) == Rational(11, 16));
  CHECK(exact_S0(Family::X, {1}, p) == Rational(11, 16));
  CHECK(exact_S0(Family::X, {0, 1}, p) == Rational(121, 256));
}

TEST_CASE("exact and estimated agree on random components") {
  const ParameterSet p = toy();
  for (Family f : {Family::X, Family::Y})
    for (std::uint64_t i = 0; i < 20; ++i) {
      const std::size_t v = 1 + mix_key(i, 1) % 3;
      std::vector<std::uint8_t> vals;
      for (std::size_t k = 0; k < v; ++k) {
        const auto r = mix_key(i, 2, k);
        vals.push_back(static_cast<std::uint8_t>(f == Family::X ? r % 2 : 1 + r % 2));
      }
      const double exact = to_double(exact_S0(f, vals, p));
      const auto e = estimate_S0(f, vals, p, 4000, mix_key(i, 3));
      const double sd = std::sqrt(exact * (1 - exact) / 4000.0);
      CHECK(std::abs(e.point - exact) <= 3 * sd + 1e-12);
    }
}

TEST_CASE("estimates are deterministic and worker-independent") {
  const ParameterSet p = toy();
  const auto a = estimate_S0(Family::Y, {Z, O}, p, 5000, 99, 1);
  const auto b = estimate_S0(Family::Y, {Z, O}, p, 5000, 99, 6);
  CHECK(a.successes == b.successes);
  CHECK(a.lower == b.lower);
  CHECK_THROWS_AS(estimate_S0(Family::Y, {Z}, p, 0, 1), PreconditionError);
  CHECK_THROWS_AS(make_estimate(0, 0, 1), PreconditionError);

  const Hierarchy h = build_hierarchy(p, Family::Y, 3, 1, {0, 0, 3, 3});
  const Level& l1 = h.level(1);
  for (const auto& q : l1.components) {
    if (q.censored) continue;
    const auto x = estimate_S(h, 1, q.id, 6, 17, 1);
    const auto y = estimate_S(h, 1, q.id, 6, 17, 3);
    CHECK(x.successes == y.successes);
    CHECK_THROWS_AS(estimate_S(h, 1, q.id, 0, 17), PreconditionError);
    break;
  }
  CHECK_THROWS_AS(estimate_S(h, 2, 0, 1, 1), PreconditionError);
}

TEST_CASE("Clopper-Pearson intervals") {
  // 0 of 10: upper = 1 - 0.025^(1/10).
  const Interval z = clopper_pearson(0, 10);
  CHECK(z.lower == 0);
  CHECK(z.upper == doctest::Approx(1 - std::pow(0.025, 0.1)).epsilon(1e-9));
  const Interval f = clopper_pearson(10, 10);
  CHECK(f.upper == 1);
  CHECK(f.lower == doctest::Approx(std::pow(0.025, 0.1)).epsilon(1e-9));
  const Interval h = clopper_pearson(50, 100);
  CHECK(h.lower < 0.5);
  CHECK(h.upper > 0.5);
  CHECK(h.lower == doctest::Approx(1 - h.upper).epsilon(1e-9));
  CHECK_THROWS_AS(clopper_pearson(3, 2), PreconditionError);
}

TEST_CASE("reports") {
  const ParameterSet p = toy();
  const auto samples = collect_report_samples(p, 5, 1, {0, 0, 3, 3}, 6, 0, 2);

  // Level-0 Y: S <= 1/2 exactly for the bad components.
  std::uint64_t y0 = 0, y0_bad = 0;
  for (const auto& s : samples.s)
    if (s.family == Family::Y && s.level == 0) {
      ++y0;
      y0_bad += s.s < 1;
    }
  REQUIRE(y0 > 0);
  const auto tail = tail_report(samples.s, p, {0.5}, 3);
  for (const auto& r : tail)
    if (r.family == Family::Y && r.level == 0 && r.v == 1) {
      CHECK(r.count == y0_bad);
      CHECK(r.total == y0);
    }

  // Bound column instantiation at x = 1 - 1/L_j, v = 1.
  const auto grid = default_x_grid(1, p);
  const double x = grid.back();
  CHECK(x == doctest::Approx(1 - 1.0 / 36));
  std::vector<SSample> fake{{Family::X, 1, 0.3, 2}};
  const auto t1 = tail_report(fake, p, {x}, 1);
  REQUIRE(t1.size() == 1);
  CHECK(t1[0].log10_bound ==
        doctest::Approx(p.m_j(1) * std::log10(x) - p.beta * std::log10(36.0)).epsilon(1e-12));

  const auto size = size_report(samples.s, p, 3);
  for (const auto& r : size) {
    if (r.v == 1) CHECK(r.empirical == 1);
    if (r.family == Family::X && r.level == 0 && r.v == 2) CHECK(r.count == 0);
  }

  const auto good = good_prob_report(samples.good, p);
  for (const auto& r : good)
    if (r.family == Family::X && r.level == 0) CHECK(r.frequency == 1);

  const auto again = collect_report_samples(p, 5, 1, {0, 0, 3, 3}, 6, 0, 5);
  CHECK(tail_csv(tail_report(again.s, p, {}, 3)) == tail_csv(tail_report(samples.s, p, {}, 3)));
  CHECK(good_jsonl(good_prob_report(again.good, p)) == good_jsonl(good));
  CHECK(size_csv(size).rfind("# schema_version=1\n", 0) == 0);
}

TEST_CASE("parallel_for propagates errors") {
  std::vector<int> out(100, 0);
  parallel_for(out.size(), 4, [&](std::size_t i) { out[i] = static_cast<int>(i); });
  for (int i = 0; i < 100; ++i) CHECK(out[static_cast<std::size_t>(i)] == i);
  CHECK_THROWS_AS(parallel_for(10, 3, [](std::size_t i) {
    if (i == 7) throw PreconditionError("boom");
  }), PreconditionError);
}
