#include "lipemb/stats.hpp"

#include <algorithm>
#include <bit>
#include <boost/math/distributions/beta.hpp>
#include <cmath>
#include <thread>

#include "lipemb/embed.hpp"

namespace lipemb {

Interval clopper_pearson(std::uint64_t successes, std::uint64_t trials, double confidence) {
  if (successes > trials) throw PreconditionError("more successes than trials");
  if (trials == 0) return {0, 1};
  const double a = (1 - confidence) / 2;
  const auto s = static_cast<double>(successes), n = static_cast<double>(trials);
  Interval out;
  out.lower = successes == 0 ? 0.0 : boost::math::quantile(boost::math::beta_distribution<double>(s, n - s + 1), a);
  out.upper = successes == trials ? 1.0 : boost::math::quantile(boost::math::beta_distribution<double>(s + 1, n - s), 1 - a);
  return out;
}

double ProbabilityEstimate::std_error() const {
  if (trials == 0) return 0;
  return std::sqrt(point * (1 - point) / static_cast<double>(trials));
}

ProbabilityEstimate make_estimate(std::uint64_t successes, std::uint64_t trials, std::uint64_t seed) {
  if (trials == 0) throw PreconditionError("at least one trial is required");
  ProbabilityEstimate e;
  e.trials = trials;
  e.successes = successes;
  e.point = static_cast<double>(successes) / static_cast<double>(trials);
  const Interval ci = clopper_pearson(successes, trials);
  e.lower = std::min(ci.lower, e.point);
  e.upper = std::max(ci.upper, e.point);
  e.seed = seed;
  return e;
}

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
  const std::size_t w = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, workers)));
  if (w <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(w);
  for (std::size_t t = 0; t < w; ++t)
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < n; i += w) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// ---------------------------------------------------------------------------

ClassProbabilities y0_class_probabilities(std::int64_t M0) {
  if (M0 < 1) throw PreconditionError("M0 must be positive");
  const std::int64_t N = M0 * M0;
  using boost::multiprecision::cpp_int;
  cpp_int binom = 1, good = 0, zero = 0, one = 0;
  for (std::int64_t k = 0; k <= N; ++k) {
    switch (classify_y0_counts(k, N)) {
      case Y0Class::Good: good += binom; break;
      case Y0Class::Zero: zero += binom; break;
      case Y0Class::One: one += binom; break;
    }
    binom = binom * (N - k) / (k + 1);
  }
  const cpp_int total = cpp_int(1) << static_cast<unsigned>(N);
  return {Rational(good, total), Rational(zero, total), Rational(one, total)};
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

Rational exact_S0(Family f, const std::vector<std::uint8_t>& values, const ParameterSet& p) {
  Rational s = 1;
  if (f == Family::Y) {
    for (auto v : values)
      if (static_cast<Y0Class>(v) != Y0Class::Good) s /= 2;
    return s;
  }
  const ClassProbabilities c = y0_class_probabilities(p.M0);
  for (auto bit : values) s *= c.good + (bit ? c.one : c.zero);
  return s;
}

ProbabilityEstimate estimate_S0(Family f, const std::vector<std::uint8_t>& values, const ParameterSet& p,
                                std::uint64_t trials, std::uint64_t seed, int workers) {
  if (trials == 0) throw PreconditionError("at least one trial is required");
  const std::int64_t N = p.M0 * p.M0;
  std::vector<std::uint8_t> ok(trials, 0);
  parallel_for(trials, workers, [&](std::size_t t) {
    bool all = true;
    for (std::size_t k = 0; k < values.size() && all; ++k) {
      CounterRng rng(mix_key(seed, t, k));
      if (f == Family::Y) {
        // Fresh X bit against a fixed Y block class.
        const int bit = static_cast<int>(rng.next() & 1);
        all = level0_embeds(bit, static_cast<Y0Class>(values[k]));
      } else {
        // Fresh M0 x M0 Y block against a fixed X bit.
        std::int64_t ones = 0;
        for (std::int64_t left = N; left > 0; left -= 64) {
          std::uint64_t word = rng.next();
          if (left < 64) word &= (std::uint64_t{1} << left) - 1;
          ones += std::popcount(word);
        }
        all = level0_embeds(values[k], classify_y0_counts(ones, N));
      }
    }
    ok[t] = all;
  });
  return make_estimate(static_cast<std::uint64_t>(std::count(ok.begin(), ok.end(), 1)), trials, seed);
}

ProbabilityEstimate estimate_S(const Hierarchy& h, int j, std::int32_t comp, std::uint64_t trials,
                               std::uint64_t seed, int workers) {
  if (trials == 0) throw PreconditionError("at least one trial is required");
  if (j < 0 || j > h.depth) throw PreconditionError("level not built");
  const Level& lvl = h.level(j);
  if (comp < 0 || static_cast<std::size_t>(comp) >= lvl.components.size())
    throw PreconditionError("no such component");
  const ComponentRec& q = lvl.components[static_cast<std::size_t>(comp)];

  if (j == 0) {
    std::vector<std::uint8_t> values;
    for (Point c : q.cells) values.push_back(lvl.value[lvl.index(c)]);
    return estimate_S0(h.family, values, h.params, trials, seed, workers);
  }

  const Rect top = bounding_box(q.cells).inflate(1);
  const Family other = partner(h.family);
  BuildOptions opt;
  opt.classify_top = false;
  std::vector<std::uint8_t> ok(trials, 0);
  parallel_for(trials, workers, [&](std::size_t t) {
    const Hierarchy ph = build_hierarchy(h.params, other, mix_key(seed, t), j, top, opt);
    const Level& pl = ph.level(j);
    // Valid: no conjoined edge leaves Q in the partner structure.
    for (Point u : q.cells)
      for (Point d : {Point{1, 0}, Point{-1, 0}, Point{0, 1}, Point{0, -1}}) {
        const Point v = u + d;
        if (contains(q.cells, v)) continue;
        const Point lo = std::min(u, v);
        const bool conj = d.y == 0 ? pl.conj_right[pl.index(lo)] : pl.conj_up[pl.index(lo)];
        if (conj) return;
      }
    const bool emb = h.family == Family::X ? embeds_level(h, q.cells, ph, {0, 0}, j).has_value()
                                           : embeds_level(ph, q.cells, h, {0, 0}, j).has_value();
    ok[t] = emb;
  });
  return make_estimate(static_cast<std::uint64_t>(std::count(ok.begin(), ok.end(), 1)), trials, seed);
}

// ---------------------------------------------------------------------------

ReportSamples collect_report_samples(const ParameterSet& p, std::uint64_t seed, int depth, Rect top,
                                     std::uint64_t windows, std::uint64_t s_trials, int workers) {
  const ClassProbabilities cp = y0_class_probabilities(p.M0);
  const double x_single[2] = {to_double(cp.good + cp.zero), to_double(cp.good + cp.one)};
  std::vector<ReportSamples> slots(windows * 2);
  parallel_for(slots.size(), workers, [&](std::size_t slot) {
    const std::uint64_t i = slot / 2;
    const Family f = slot % 2 ? Family::Y : Family::X;
    ReportSamples& out = slots[slot];
    const Hierarchy h = build_hierarchy(p, f, mix_key(seed, i, static_cast<std::uint64_t>(f)), depth, top);
    for (int j = 0; j <= depth; ++j) {
      const Level& lvl = h.level(j);
      for (std::size_t b = 0; b < lvl.block_count(); ++b) {
        const auto id = static_cast<std::int32_t>(b);
        if (lvl.block_censored(id)) continue;
        out.good.push_back({f, j, lvl.block_good(id)});
      }
      for (std::size_t k = 0; k < lvl.component.size(); ++k) {
        if (lvl.component[k] >= 0 || lvl.on_border(lvl.cell(k))) continue;
        double s = std::nan("");
        if (j == 0) s = f == Family::Y ? 1.0 : x_single[lvl.value[k] ? 1 : 0];
        out.s.push_back({f, j, s, 1});
      }
      for (const auto& c : lvl.components) {
        if (c.censored) continue;
        double s = std::nan("");
        if (j == 0) {
          s = c.s_point;
        } else if (s_trials > 0) {
          s = estimate_S(h, j, c.id, s_trials,
                         mix_key(seed, 0x5A3CU, i, static_cast<std::uint64_t>(j), static_cast<std::uint64_t>(c.id)))
                  .point;
        }
        out.s.push_back({f, j, s, c.size()});
      }
    }
  });
  ReportSamples all;
  for (auto& s : slots) {
    all.s.insert(all.s.end(), s.s.begin(), s.s.end());
    all.good.insert(all.good.end(), s.good.begin(), s.good.end());
  }
  return all;
}

}  // namespace lipemb
